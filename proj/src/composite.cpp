#include "ftf/composite.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "composite-system";
constexpr int kDimBudget = 2000;

using Eigen::MatrixXcd;
using Eigen::VectorXd;

struct EigenSystem {
  VectorXd energies;
  MatrixXcd vectors;
};

// With both fluxonia at a sweet spot the assembled Hamiltonian is purely
// real in the gauged mode eigenbases; the real solver is several times
// faster than the complex one at these dimensions.
EigenSystem diagonalize(const MatrixXcd& h) {
  const double imag_norm = h.imag().cwiseAbs().maxCoeff();
  const double real_norm = h.real().cwiseAbs().maxCoeff();
  if (imag_norm <= 1e-13 * std::max(1.0, real_norm)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) throw Error(kModule, "eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors().cast<std::complex<double>>()};
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw Error(kModule, "eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Greedy max-overlap assignment of tracked labels to eigenvector columns.
// `score(label_idx, col)` is the squared overlap; ties broken by energy
// proximity to `target_energy(label_idx)` when provided.
struct Assignment {
  std::vector<int> column;  // per tracked label
  std::vector<double> score;
};

Assignment assign_greedy(int n_labels, int n_cols,
                         const std::function<double(int, int)>& score) {
  struct Cand {
    double s;
    int label;
    int col;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>(n_labels) * n_cols);
  for (int a = 0; a < n_labels; ++a)
    for (int c = 0; c < n_cols; ++c) cands.push_back({score(a, c), a, c});
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.s > y.s; });

  Assignment out;
  out.column.assign(n_labels, -1);
  out.score.assign(n_labels, 0.0);
  std::vector<char> used(n_cols, 0);
  int assigned = 0;
  for (const auto& c : cands) {
    if (assigned == n_labels) break;
    if (out.column[c.label] >= 0 || used[c.col]) continue;
    out.column[c.label] = c.col;
    out.score[c.label] = c.s;
    used[c.col] = 1;
    ++assigned;
  }
  return out;
}

}  // namespace

StateLabel parse_state_label(const std::string& s) {
  if (s.size() != 3 || !std::isdigit(s[0]) || !std::isdigit(s[1]) || !std::isdigit(s[2]))
    throw Error(kModule, "state label must be three digits jkl, got '" + s + "'");
  return StateLabel{s[0] - '0', s[1] - '0', s[2] - '0'};
}

const std::vector<StateLabel>& default_tracked_labels() {
  static const std::vector<StateLabel> labels = {
      {0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 1}, {2, 0, 0}, {0, 0, 2},
      {1, 1, 0}, {0, 1, 1}, {2, 0, 1}, {1, 1, 1}, {1, 0, 2},
  };
  return labels;
}

FtfOperators assemble_from_modes(const ModeSpectrum& f1, const ModeSpectrum& coupler,
                                 const ModeSpectrum& f2, double j_1c, double j_2c, double j_12) {
  const int k1 = f1.levels_kept;
  const int kc = coupler.levels_kept;
  const int k2 = f2.levels_kept;
  const int dim = k1 * kc * k2;
  if (dim > kDimBudget)
    throw Error(kModule, "product dimension " + std::to_string(dim) + " exceeds budget " +
                             std::to_string(kDimBudget));

  FtfOperators op;
  op.levels = {k1, kc, k2};
  op.dim = dim;
  op.n1 = MatrixXcd::Zero(dim, dim);
  op.n2 = MatrixXcd::Zero(dim, dim);
  op.nc = MatrixXcd::Zero(dim, dim);
  op.product_energies = VectorXd::Zero(dim);

  for (int j = 0; j < k1; ++j)
    for (int k = 0; k < kc; ++k)
      for (int l = 0; l < k2; ++l) {
        const int row = (j * kc + k) * k2 + l;
        op.product_energies(row) =
            f1.energies(j) + coupler.energies(k) + f2.energies(l);
        for (int jp = 0; jp < k1; ++jp)
          op.n1(row, (jp * kc + k) * k2 + l) = f1.n_matrix(j, jp);
        for (int kp = 0; kp < kc; ++kp)
          op.nc(row, (j * kc + kp) * k2 + l) = coupler.n_matrix(k, kp);
        for (int lp = 0; lp < k2; ++lp)
          op.n2(row, (j * kc + k) * k2 + lp) = f2.n_matrix(l, lp);
      }

  // Coupling terms filled through the Kronecker structure; a dense product
  // of the embedded operators would cost dim^3 for no benefit.
  op.hamiltonian = MatrixXcd::Zero(dim, dim);
  op.hamiltonian.diagonal() = op.product_energies;
  for (int j = 0; j < k1; ++j)
    for (int jp = 0; jp < k1; ++jp)
      for (int k = 0; k < kc; ++k)
        for (int kp = 0; kp < kc; ++kp) {
          const auto v = j_1c * f1.n_matrix(j, jp) * coupler.n_matrix(k, kp);
          if (v == std::complex<double>(0.0, 0.0)) continue;
          for (int l = 0; l < k2; ++l)
            op.hamiltonian((j * kc + k) * k2 + l, (jp * kc + kp) * k2 + l) += v;
        }
  for (int k = 0; k < kc; ++k)
    for (int kp = 0; kp < kc; ++kp)
      for (int l = 0; l < k2; ++l)
        for (int lp = 0; lp < k2; ++lp) {
          const auto v = j_2c * coupler.n_matrix(k, kp) * f2.n_matrix(l, lp);
          if (v == std::complex<double>(0.0, 0.0)) continue;
          for (int j = 0; j < k1; ++j)
            op.hamiltonian((j * kc + k) * k2 + l, (j * kc + kp) * k2 + lp) += v;
        }
  for (int j = 0; j < k1; ++j)
    for (int jp = 0; jp < k1; ++jp)
      for (int l = 0; l < k2; ++l)
        for (int lp = 0; lp < k2; ++lp) {
          const auto v = j_12 * f1.n_matrix(j, jp) * f2.n_matrix(l, lp);
          if (v == std::complex<double>(0.0, 0.0)) continue;
          for (int k = 0; k < kc; ++k)
            op.hamiltonian((j * kc + k) * k2 + l, (jp * kc + k) * k2 + lp) += v;
        }
  return op;
}

FtfOperators assemble_ftf(const DeviceSpec& device) {
  const auto [k1, kc, k2] = device.levels;
  if (static_cast<long>(k1) * kc * k2 > kDimBudget)
    throw Error(kModule, "levels (k1, kc, k2) exceed the dense-diagonalization budget");
  const ModeSpectrum f1 = build_fluxonium_mode(device.fluxonium1, k1);
  const ModeSpectrum mc = build_transmon_mode(device.transmon, kc);
  const ModeSpectrum f2 = build_fluxonium_mode(device.fluxonium2, k2);
  return assemble_from_modes(f1, mc, f2, device.j_1c, device.j_2c, device.j_12);
}

int LabeledSpectrum::index(const StateLabel& s) const {
  for (const auto& amb : ambiguities) {
    if (amb.label == s)
      throw Error(kModule, "label " + s.str() + " is ambiguous (overlap tie between eigenstates " +
                               std::to_string(amb.eigenindex_a) + " and " +
                               std::to_string(amb.eigenindex_b) + ")");
  }
  const auto it = labels.find(s);
  if (it == labels.end()) throw Error(kModule, "label " + s.str() + " is not tracked");
  return it->second;
}

namespace {

// Label assignment at a single flux point by max overlap with product states.
LabeledSpectrum label_direct(const FtfOperators& op, const EigenSystem& sys,
                             const std::vector<StateLabel>& tracked) {
  LabeledSpectrum out;
  out.energies = sys.energies;
  out.eigenvectors = sys.vectors;

  std::vector<int> rows(tracked.size());
  for (size_t a = 0; a < tracked.size(); ++a) {
    const auto& s = tracked[a];
    if (s.j >= op.levels[0] || s.k >= op.levels[1] || s.l >= op.levels[2])
      throw Error(kModule, "tracked label " + s.str() + " outside the truncated basis");
    rows[a] = op.index_of(s);
  }

  auto score = [&](int a, int c) { return std::norm(sys.vectors(rows[a], c)); };
  Assignment asg = assign_greedy(static_cast<int>(tracked.size()), op.dim, score);

  for (size_t a = 0; a < tracked.size(); ++a) {
    out.labels[tracked[a]] = asg.column[a];
    out.overlaps[tracked[a]] = asg.score[a];
    out.assignment_overlaps[tracked[a]] = asg.score[a];
    // Report a tie when another eigenstate claims this label equally well.
    double second = 0.0;
    int second_col = -1;
    for (int c = 0; c < op.dim; ++c) {
      if (c == asg.column[a]) continue;
      const double s = score(static_cast<int>(a), c);
      if (s > second) {
        second = s;
        second_col = c;
      }
    }
    if (second_col >= 0 && asg.score[a] - second < 1e-6)
      out.ambiguities.push_back({tracked[a], asg.column[a], second_col, asg.score[a] - second});
  }
  return out;
}

}  // namespace

std::vector<LabeledSpectrum> diagonalize_and_label_sweep(const DeviceSpec& device,
                                                         const std::vector<double>& flux_phi0,
                                                         const LabelOptions& options) {
  if (flux_phi0.empty()) throw Error(kModule, "empty flux sweep");
  const auto [k1, kc, k2] = device.levels;
  const ModeSpectrum f1 = build_fluxonium_mode(device.fluxonium1, k1);
  const ModeSpectrum f2 = build_fluxonium_mode(device.fluxonium2, k2);

  auto at_flux = [&](double frac) {
    TransmonParams tp = device.transmon;
    tp.phi_ext = constants::two_pi * frac;
    const ModeSpectrum mc = build_transmon_mode(tp, kc);
    return assemble_from_modes(f1, mc, f2, device.j_1c, device.j_2c, device.j_12);
  };

  std::vector<LabeledSpectrum> out(flux_phi0.size());
  if (options.mode == LabelOptions::Mode::direct) {
    for (size_t i = 0; i < flux_phi0.size(); ++i) {
      const FtfOperators op = at_flux(flux_phi0[i]);
      out[i] = label_direct(op, diagonalize(op.hamiltonian), options.tracked);
    }
    return out;
  }

  // Tracked mode: label by max overlap at the reference coupler flux
  // (nearest integer Phi_0 to the closest sweep end), then walk through
  // every requested point carrying labels by eigenvector continuity.
  std::vector<size_t> order(flux_phi0.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return flux_phi0[a] < flux_phi0[b]; });

  const double lo = flux_phi0[order.front()];
  const double hi = flux_phi0[order.back()];
  const bool from_high = std::abs(hi - std::round(hi)) <= std::abs(lo - std::round(lo));
  if (from_high) std::reverse(order.begin(), order.end());
  const double ref = std::round(from_high ? hi : lo);

  // Ladder of fluxes visited: fine steps between emission targets.
  struct Node {
    double frac;
    std::vector<int> emit;  // indices into flux_phi0
  };
  std::vector<Node> ladder;
  double cursor = ref;
  for (size_t t : order) {
    const double target = flux_phi0[t];
    if (std::abs(target - cursor) > 1e-15) {
      const int n_steps =
          std::max(1, static_cast<int>(std::ceil(std::abs(target - cursor) / options.flux_step)));
      for (int s = 1; s <= n_steps; ++s)
        ladder.push_back({cursor + (target - cursor) * s / n_steps, {}});
    } else if (ladder.empty() || std::abs(ladder.back().frac - target) > 1e-15) {
      ladder.push_back({target, {}});
    }
    ladder.back().emit.push_back(static_cast<int>(t));
    cursor = target;
  }

  FtfOperators op = at_flux(ref);
  EigenSystem sys = diagonalize(op.hamiltonian);
  const LabeledSpectrum reference = label_direct(op, sys, options.tracked);

  const int n_labels = static_cast<int>(options.tracked.size());
  MatrixXcd prev_vecs(op.dim, n_labels);
  VectorXd prev_energy(n_labels);
  std::vector<int> columns(n_labels);
  for (int a = 0; a < n_labels; ++a) {
    columns[a] = reference.labels.at(options.tracked[a]);
    prev_vecs.col(a) = sys.vectors.col(columns[a]);
    prev_energy(a) = sys.energies(columns[a]);
  }

  auto snapshot = [&](const std::vector<int>& emit) {
    LabeledSpectrum snap;
    snap.energies = sys.energies;
    snap.eigenvectors = sys.vectors;
    for (int a = 0; a < n_labels; ++a) {
      const auto& s = options.tracked[a];
      snap.labels[s] = columns[a];
      snap.overlaps[s] = std::norm(sys.vectors(op.index_of(s), columns[a]));
      snap.assignment_overlaps[s] = reference.assignment_overlaps.at(s);
    }
    snap.ambiguities = reference.ambiguities;
    for (int e : emit) out[e] = snap;
  };

  for (const Node& node : ladder) {
    if (std::abs(node.frac - ref) > 1e-15) {
      op = at_flux(node.frac);
      sys = diagonalize(op.hamiltonian);
      const MatrixXcd ov = prev_vecs.adjoint() * sys.vectors;  // n_labels x dim
      auto score = [&](int a, int c) {
        // Overlap with a small energy-proximity tie-break.
        const double s = std::norm(ov(a, c));
        const double de = std::abs(sys.energies(c) - prev_energy(a));
        return s - 1e-9 * de;
      };
      Assignment asg = assign_greedy(n_labels, op.dim, score);
      for (int a = 0; a < n_labels; ++a) {
        if (std::norm(ov(a, asg.column[a])) < 0.5)
          throw Error(kModule, "label continuity lost for " + options.tracked[a].str() +
                                   " near coupler flux " + std::to_string(node.frac) +
                                   " Phi_0; reduce flux_step");
        columns[a] = asg.column[a];
        prev_vecs.col(a) = sys.vectors.col(columns[a]);
        prev_energy(a) = sys.energies(columns[a]);
      }
    }
    if (!node.emit.empty()) snapshot(node.emit);
  }
  return out;
}

LabeledSpectrum diagonalize_and_label(const DeviceSpec& device, const LabelOptions& options) {
  return diagonalize_and_label_sweep(device, {device.transmon.phi_ext / constants::two_pi},
                                     options)
      .front();
}

double transition_frequency(const LabeledSpectrum& spec, const StateLabel& from,
                            const StateLabel& to) {
  return spec.energy(to) - spec.energy(from);
}

}  // namespace ftf

#include "ftf/zz.hpp"

#include <array>
#include <cmath>

#include "ftf/errors.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "zz-analysis";

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

const std::array<StateLabel, 4> kComputational = {
    StateLabel{0, 0, 0}, StateLabel{1, 0, 0}, StateLabel{0, 0, 1}, StateLabel{1, 0, 1}};

// zeta combination E(101) - E(100) - E(001) + E(000) for per-state values
// ordered as kComputational.
double zeta_combo(const std::array<double, 4>& e) { return e[3] - e[1] - e[2] + e[0]; }

// Uncoupled product basis with the three coupling operators at unit
// strength: a = n1 nc, b = n2 nc, c = n1 n2.
struct PtWorkspace {
  VectorXd e0;
  MatrixXcd a, b, c;
  std::array<int, 3> levels{};
  int dim = 0;

  int index_of(const StateLabel& s) const {
    return (s.j * levels[1] + s.k) * levels[2] + s.l;
  }
  StateLabel label_of(int idx) const {
    const int l = idx % levels[2];
    idx /= levels[2];
    return StateLabel{idx / levels[1], idx % levels[1], l};
  }
};

PtWorkspace build_workspace(const ModeSpectrum& f1, const ModeSpectrum& mc,
                            const ModeSpectrum& f2) {
  const int k1 = f1.levels_kept, kc = mc.levels_kept, k2 = f2.levels_kept;
  PtWorkspace w;
  w.levels = {k1, kc, k2};
  w.dim = k1 * kc * k2;
  w.e0.resize(w.dim);
  w.a = MatrixXcd::Zero(w.dim, w.dim);
  w.b = MatrixXcd::Zero(w.dim, w.dim);
  w.c = MatrixXcd::Zero(w.dim, w.dim);

  for (int j = 0; j < k1; ++j)
    for (int k = 0; k < kc; ++k)
      for (int l = 0; l < k2; ++l)
        w.e0((j * kc + k) * k2 + l) = f1.energies(j) + mc.energies(k) + f2.energies(l);

  for (int j = 0; j < k1; ++j)
    for (int jp = 0; jp < k1; ++jp)
      for (int k = 0; k < kc; ++k)
        for (int kp = 0; kp < kc; ++kp) {
          const complex<double> v = f1.n_matrix(j, jp) * mc.n_matrix(k, kp);
          if (v == complex<double>(0.0, 0.0)) continue;
          for (int l = 0; l < k2; ++l)
            w.a((j * kc + k) * k2 + l, (jp * kc + kp) * k2 + l) = v;
        }
  for (int k = 0; k < kc; ++k)
    for (int kp = 0; kp < kc; ++kp)
      for (int l = 0; l < k2; ++l)
        for (int lp = 0; lp < k2; ++lp) {
          const complex<double> v = mc.n_matrix(k, kp) * f2.n_matrix(l, lp);
          if (v == complex<double>(0.0, 0.0)) continue;
          for (int j = 0; j < k1; ++j)
            w.b((j * kc + k) * k2 + l, (j * kc + kp) * k2 + lp) = v;
        }
  for (int j = 0; j < k1; ++j)
    for (int jp = 0; jp < k1; ++jp)
      for (int l = 0; l < k2; ++l)
        for (int lp = 0; lp < k2; ++lp) {
          const complex<double> v = f1.n_matrix(j, jp) * f2.n_matrix(l, lp);
          if (v == complex<double>(0.0, 0.0)) continue;
          for (int k = 0; k < kc; ++k)
            w.c((j * kc + k) * k2 + l, (jp * kc + k) * k2 + lp) = v;
        }
  return w;
}

// Per-state resolvent weights 1/(E0_n - E0_k); excluded intermediates
// (k == n or |detuning| below the guard) carry zero weight.
struct StateResolvent {
  int n = 0;
  VectorXd w;  // weight per intermediate
};

StateResolvent make_resolvent(const PtWorkspace& ws, int n, double guard,
                              const MatrixXcd& v_actual, StateLabel state_label,
                              std::vector<DegenerateIntermediate>* flags) {
  StateResolvent r;
  r.n = n;
  r.w = VectorXd::Zero(ws.dim);
  for (int k = 0; k < ws.dim; ++k) {
    if (k == n) continue;
    const double d = ws.e0(n) - ws.e0(k);
    if (std::abs(d) < guard) {
      if (flags) {
        const double coupling = std::abs(v_actual(n, k));
        if (coupling > 1e-12)
          flags->push_back({state_label, ws.label_of(k), d, coupling});
      }
      continue;
    }
    r.w(k) = 1.0 / d;
  }
  return r;
}

// sum_k X(n,k) Y(k,n) / d_k
double pt2(const MatrixXcd& x, const MatrixXcd& y, const StateResolvent& r) {
  complex<double> acc = 0.0;
  for (int k = 0; k < r.w.size(); ++k)
    if (r.w(k) != 0.0) acc += x(r.n, k) * y(k, r.n) * r.w(k);
  return acc.real();
}

// sum_k X(n,k) Y(k,n) / d_k^2
double pt2_sq(const MatrixXcd& x, const MatrixXcd& y, const StateResolvent& r) {
  complex<double> acc = 0.0;
  for (int k = 0; k < r.w.size(); ++k)
    if (r.w(k) != 0.0) acc += x(r.n, k) * y(k, r.n) * r.w(k) * r.w(k);
  return acc.real();
}

// sum_{k1 k2} X(n,k1) Y(k1,k2) Z(k2,n) / (d_k1 d_k2)
double pt3(const MatrixXcd& x, const MatrixXcd& y, const MatrixXcd& z,
           const StateResolvent& r) {
  const VectorXcd left = x.row(r.n).transpose().cwiseProduct(r.w.cast<complex<double>>());
  const VectorXcd right = z.col(r.n).cwiseProduct(r.w.cast<complex<double>>());
  return (left.transpose() * (y * right)).value().real();
}

// sum_{k1 k2 k3} X(n,k1) Y(k1,k2) Z(k2,k3) W(k3,n) / (d_k1 d_k2 d_k3)
double pt4_chain(const MatrixXcd& x, const MatrixXcd& y, const MatrixXcd& z,
                 const MatrixXcd& w, const StateResolvent& r) {
  const VectorXcd cw = r.w.cast<complex<double>>();
  const VectorXcd left = x.row(r.n).transpose().cwiseProduct(cw);
  VectorXcd t = w.col(r.n).cwiseProduct(cw);
  t = (z * t).cwiseProduct(cw);
  t = y * t;
  return (left.transpose() * t).value().real();
}

struct ModeSet {
  ModeSpectrum f1, mc, f2;
};

ModeSet build_modes(const DeviceSpec& device) {
  return {build_fluxonium_mode(device.fluxonium1, device.levels[0]),
          build_transmon_mode(device.transmon, device.levels[1]),
          build_fluxonium_mode(device.fluxonium2, device.levels[2])};
}

double zeta_exact_from_ops(const FtfOperators& op) {
  const double imag_norm = op.hamiltonian.imag().cwiseAbs().maxCoeff();
  VectorXd energies;
  Eigen::MatrixXcd vectors;
  if (imag_norm <= 1e-13) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(op.hamiltonian.real());
    energies = s.eigenvalues();
    vectors = s.eigenvectors().cast<complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> s(op.hamiltonian);
    energies = s.eigenvalues();
    vectors = s.eigenvectors();
  }
  // Max-overlap labels for the four computational states.
  std::array<double, 4> e{};
  std::array<int, 4> cols{-1, -1, -1, -1};
  for (int a = 0; a < 4; ++a) {
    const int row = op.index_of(kComputational[a]);
    double best = -1.0;
    for (int c = 0; c < op.dim; ++c) {
      bool taken = false;
      for (int b = 0; b < a; ++b)
        if (cols[b] == c) taken = true;
      if (taken) continue;
      const double s = std::norm(vectors(row, c));
      if (s > best) {
        best = s;
        cols[a] = c;
      }
    }
    e[a] = energies(cols[a]);
  }
  return zeta_combo(e) * 1e6;
}

}  // namespace

namespace {

ZetaCoefficients fit_from_workspace(const PtWorkspace& ws) {
  ZetaCoefficients out;
  std::array<double, 4> c2{}, c3{}, c4{};
  for (int s = 0; s < 4; ++s) {
    const int n = ws.index_of(kComputational[s]);
    const StateResolvent r = make_resolvent(ws, n, 1e-3, ws.c, kComputational[s], nullptr);

    // J12^2 monomial: the fluxonium-fluxonium pair alone.
    c2[s] = pt2(ws.c, ws.c, r);

    // J12 Jc^2 monomial: every ordered triple with two coupler legs and one
    // direct leg. Only the three-cycles survive at the sweet spot, but the
    // full set keeps the bookkeeping exact off it.
    const MatrixXcd* ops[3] = {&ws.a, &ws.b, &ws.c};
    double acc3 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int n_c = (i == 2) + (j == 2) + (k == 2);
          if (n_c == 1) acc3 += pt3(*ops[i], *ops[j], *ops[k], r);
        }
    c3[s] = acc3;

    // Jc^4 monomial: all chains over the two coupler legs, plus the
    // renormalization product of the fourth-order formula.
    double acc4 = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            acc4 += pt4_chain(*ops[i], *ops[j], *ops[k], *ops[l], r);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            acc4 -= pt2(*ops[i], *ops[j], r) * pt2_sq(*ops[k], *ops[l], r);
    c4[s] = acc4;
  }
  out.zeta2_per_ghz = zeta_combo(c2);
  out.zeta3_per_ghz2 = zeta_combo(c3);
  out.zeta4_per_ghz3 = zeta_combo(c4);
  return out;
}

}  // namespace

double zz_exact_khz(const DeviceSpec& device) {
  return zeta_exact_from_ops(assemble_ftf(device));
}

ZetaExpansion zz_perturbative(const DeviceSpec& device, int max_order, const ZzOptions& options) {
  if (max_order < 2 || max_order > 4)
    throw Error(kModule, "max_order must be 2, 3 or 4");

  const ModeSet modes = build_modes(device);
  const PtWorkspace ws = build_workspace(modes.f1, modes.mc, modes.f2);
  const MatrixXcd v = device.j_1c * ws.a + device.j_2c * ws.b + device.j_12 * ws.c;

  ZetaExpansion out;
  out.max_order = max_order;

  std::array<double, 4> e2{}, e3{}, e4{};
  for (int s = 0; s < 4; ++s) {
    const int n = ws.index_of(kComputational[s]);
    const StateResolvent r =
        make_resolvent(ws, n, options.degeneracy_guard_ghz, v, kComputational[s], &out.flagged);
    e2[s] = pt2(v, v, r);
    if (max_order >= 3) e3[s] = pt3(v, v, v, r);
    if (max_order >= 4) e4[s] = pt4_chain(v, v, v, v, r) - e2[s] * pt2_sq(v, v, r);
  }
  out.per_order_khz = {zeta_combo(e2) * 1e6, zeta_combo(e3) * 1e6, zeta_combo(e4) * 1e6};

  // Coefficients come from the same per-order sums at unit couplings.
  out.coefficients = fit_from_workspace(ws);

  if (options.compute_exact)
    out.zeta_exact_khz = zeta_exact_from_ops(
        assemble_from_modes(modes.f1, modes.mc, modes.f2, device.j_1c, device.j_2c, device.j_12));
  return out;
}

ZetaCoefficients fit_zeta_coefficients(const DeviceSpec& device) {
  const ModeSet modes = build_modes(device);
  return fit_from_workspace(build_workspace(modes.f1, modes.mc, modes.f2));
}

ZzLandscape zz_landscape(const DeviceSpec& device, const std::vector<double>& jc_grid,
                         const std::vector<double>& j12_grid, par::Mode mode) {
  if (jc_grid.empty() || j12_grid.empty()) throw Error(kModule, "empty landscape grid");
  const ModeSet modes = build_modes(device);

  ZzLandscape out;
  out.j_c = jc_grid;
  out.j_12 = j12_grid;
  out.zeta_khz.resize(static_cast<long>(jc_grid.size()), static_cast<long>(j12_grid.size()));
  out.coefficients = fit_zeta_coefficients(device);

  const long n_cells = out.zeta_khz.size();
  const long n12 = static_cast<long>(j12_grid.size());
  par::map_indices(
      n_cells,
      [&](std::ptrdiff_t cell) {
        const long i = cell / n12;
        const long j = cell % n12;
        const FtfOperators op = assemble_from_modes(modes.f1, modes.mc, modes.f2, jc_grid[i],
                                                    jc_grid[i], j12_grid[j]);
        out.zeta_khz(i, j) = zeta_exact_from_ops(op);
      },
      mode);

  out.min_j12.resize(jc_grid.size());
  out.parabola_j12.resize(jc_grid.size());
  for (size_t i = 0; i < jc_grid.size(); ++i) {
    long jmin = 0;
    out.zeta_khz.row(static_cast<long>(i)).cwiseAbs().minCoeff(&jmin);
    out.min_j12[i] = j12_grid[jmin];
    out.parabola_j12[i] = out.coefficients.parabola_j12(jc_grid[i]);
  }
  return out;
}

}  // namespace ftf

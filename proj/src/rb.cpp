#include "ftf/rb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"
#include "ftf/parallel.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "rb-engine";

using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using std::complex;

constexpr complex<double> kI{0.0, 1.0};

std::string kind_name(Gate::Kind k) {
  switch (k) {
    case Gate::Kind::i: return "I";
    case Gate::Kind::x: return "X";
    case Gate::Kind::y: return "Y";
    case Gate::Kind::x_half: return "X/2";
    case Gate::Kind::x_half_neg: return "-X/2";
    case Gate::Kind::y_half: return "Y/2";
    case Gate::Kind::y_half_neg: return "-Y/2";
    case Gate::Kind::cz: return "CZ";
  }
  return "?";
}

Matrix2cd rotation(double theta, bool about_y) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Matrix2cd u;
  if (about_y)
    u << c, -s, s, c;
  else
    u << c, -kI * s, -kI * s, c;
  return u;
}

// Canonical hash key for a unitary up to global phase: normalize by the
// phase of the first maximal-magnitude entry, then round to a 1e-6 grid
// (Clifford entries are well separated on that grid).
std::string canonical_key(const MatrixXcd& u) {
  const double mx = u.cwiseAbs().maxCoeff();
  complex<double> ref = 1.0;
  for (long c = 0; c < u.cols(); ++c) {
    for (long r = 0; r < u.rows(); ++r) {
      if (std::abs(u(r, c)) >= mx * (1.0 - 1e-9)) {
        ref = u(r, c);
        goto found;
      }
    }
  }
found:
  const complex<double> phase = std::conj(ref) / std::abs(ref);
  std::string key;
  key.reserve(static_cast<size_t>(u.size()) * 10);
  char buf[32];
  for (long c = 0; c < u.cols(); ++c)
    for (long r = 0; r < u.rows(); ++r) {
      const complex<double> z = u(r, c) * phase;
      const long long re = llround(z.real() * 1e6) + 0;  // avoid -0
      const long long im = llround(z.imag() * 1e6) + 0;
      snprintf(buf, sizeof buf, "%lld,%lld;", re == 0 ? 0 : re, im == 0 ? 0 : im);
      key += buf;
    }
  return key;
}

MatrixXcd kron2(const Matrix2cd& a, const Matrix2cd& b) {
  MatrixXcd out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

MatrixXcd cz_matrix() {
  MatrixXcd u = MatrixXcd::Identity(4, 4);
  u(3, 3) = -1.0;
  return u;
}

MatrixXcd gate_matrix(const Gate& g, int n_qubits) {
  if (g.kind == Gate::Kind::cz) {
    if (n_qubits != 2) throw Error(kModule, "CZ gate needs two qubits");
    return cz_matrix();
  }
  const Matrix2cd u1 = gate_unitary_1q(g.kind);
  if (n_qubits == 1) return u1;
  return g.qubit == 0 ? kron2(u1, Matrix2cd::Identity()) : kron2(Matrix2cd::Identity(), u1);
}

MatrixXcd compose_word(const std::vector<Gate>& word, int n_qubits) {
  const int d = n_qubits == 1 ? 2 : 4;
  MatrixXcd u = MatrixXcd::Identity(d, d);
  for (const Gate& g : word) u = gate_matrix(g, n_qubits) * u;
  return u;
}

int count_singles(const std::vector<Gate>& word) {
  int n = 0;
  for (const Gate& g : word)
    if (g.kind != Gate::Kind::cz) ++n;
  return n;
}

int count_cz(const std::vector<Gate>& word) {
  int n = 0;
  for (const Gate& g : word)
    if (g.kind == Gate::Kind::cz) ++n;
  return n;
}

std::vector<Gate> on_qubit(const std::vector<Gate>& word, int qubit) {
  std::vector<Gate> out;
  out.reserve(word.size());
  for (Gate g : word) {
    g.qubit = qubit;
    out.push_back(g);
  }
  return out;
}

std::vector<Gate> concat(std::initializer_list<std::vector<Gate>> parts) {
  std::vector<Gate> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Minimal-length decompositions of the 24 single-qubit Cliffords over the
// generator set, found by breadth-first search. The identity Clifford is
// the idle pulse and counts as one gate, giving the 45/24 = 1.875 average.
std::vector<CliffordElement> build_c1() {
  const std::vector<Gate::Kind> gens = {Gate::Kind::x,          Gate::Kind::y,
                                        Gate::Kind::x_half,     Gate::Kind::x_half_neg,
                                        Gate::Kind::y_half,     Gate::Kind::y_half_neg};
  std::vector<CliffordElement> elements;
  std::unordered_map<std::string, int> seen;

  CliffordElement ident;
  ident.unitary = Matrix2cd::Identity();
  ident.word = {Gate{Gate::Kind::i, 0}};
  elements.push_back(ident);
  seen[canonical_key(ident.unitary)] = 0;

  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    for (Gate::Kind k : gens) {
      const MatrixXcd u = gate_unitary_1q(k) * elements[cur].unitary;
      const std::string key = canonical_key(u);
      if (seen.count(key)) continue;
      CliffordElement e;
      e.unitary = u;
      e.word = elements[cur].word;
      if (cur == 0) e.word.clear();  // identity contributes no prefix
      e.word.push_back(Gate{k, 0});
      seen[key] = static_cast<int>(elements.size());
      queue.push_back(static_cast<int>(elements.size()));
      elements.push_back(std::move(e));
    }
  }
  if (elements.size() != 24)
    throw Error(kModule, "single-qubit Clifford group closure failure: found " +
                             std::to_string(elements.size()) + " elements");
  for (auto& e : elements) e.single_qubit_gates = count_singles(e.word);
  return elements;
}

}  // namespace

std::string Gate::str() const {
  if (kind == Kind::cz) return "CZ";
  return kind_name(kind) + "(q" + std::to_string(qubit) + ")";
}

Eigen::Matrix2cd gate_unitary_1q(Gate::Kind kind) {
  switch (kind) {
    case Gate::Kind::i: return Matrix2cd::Identity();
    case Gate::Kind::x: return rotation(constants::pi, false);
    case Gate::Kind::y: return rotation(constants::pi, true);
    case Gate::Kind::x_half: return rotation(constants::pi / 2, false);
    case Gate::Kind::x_half_neg: return rotation(-constants::pi / 2, false);
    case Gate::Kind::y_half: return rotation(constants::pi / 2, true);
    case Gate::Kind::y_half_neg: return rotation(-constants::pi / 2, true);
    case Gate::Kind::cz: throw Error(kModule, "CZ is not a single-qubit gate");
  }
  throw Error(kModule, "unknown gate kind");
}

void CliffordGroup::finalize() {
  lookup_.clear();
  long singles = 0, czs = 0;
  for (size_t i = 0; i < elements_.size(); ++i) {
    auto& e = elements_[i];
    e.single_qubit_gates = count_singles(e.word);
    e.cz_count = count_cz(e.word);
    singles += e.single_qubit_gates;
    czs += e.cz_count;
    const std::string key = canonical_key(e.unitary);
    if (!lookup_.emplace(key, static_cast<int>(i)).second)
      throw Error(kModule, "group-closure failure: duplicate element at index " +
                               std::to_string(i));
  }
  avg_singles_ = static_cast<double>(singles) / static_cast<double>(elements_.size());
  avg_cz_ = static_cast<double>(czs) / static_cast<double>(elements_.size());
}

CliffordGroup CliffordGroup::build(int n_qubits) {
  if (n_qubits != 1 && n_qubits != 2) throw Error(kModule, "n_qubits must be 1 or 2");
  CliffordGroup g;
  g.n_qubits_ = n_qubits;

  const std::vector<CliffordElement> c1 = build_c1();
  if (n_qubits == 1) {
    g.elements_ = c1;
    g.finalize();
    return g;
  }

  // S1 = {I, 120-degree vertex rotation, its inverse}.
  const std::vector<std::vector<Gate>> s1_words = {
      {Gate{Gate::Kind::i, 0}},
      {Gate{Gate::Kind::y_half, 0}, Gate{Gate::Kind::x_half, 0}},
      {Gate{Gate::Kind::x_half_neg, 0}, Gate{Gate::Kind::y_half_neg, 0}},
  };
  const std::vector<Gate> mid_word = {Gate{Gate::Kind::y_half, 0}, Gate{Gate::Kind::x_half_neg, 1}};
  const std::vector<Gate> swap_l1 = {Gate{Gate::Kind::y_half_neg, 0}, Gate{Gate::Kind::y_half, 1}};
  const std::vector<Gate> swap_l2 = {Gate{Gate::Kind::y_half, 0}, Gate{Gate::Kind::y_half_neg, 1}};
  const std::vector<Gate> cz_word = {Gate{Gate::Kind::cz, 0}};

  g.elements_.reserve(11520);
  for (int a = 0; a < 24; ++a)
    for (int b = 0; b < 24; ++b) {
      const std::vector<Gate> base =
          concat({on_qubit(c1[a].word, 0), on_qubit(c1[b].word, 1)});
      // single-qubit class
      CliffordElement e;
      e.word = base;
      e.unitary = compose_word(e.word, 2);
      g.elements_.push_back(std::move(e));

      // CNOT-like: one CZ plus an S1 x S1 tail. The tail of the first eight
      // representatives carries an explicit idle to match the reference
      // hardware gate counts (8.25 single-qubit gates per Clifford).
      int rep = 0;
      for (const auto& sw : s1_words)
        for (const auto& tw : s1_words) {
          CliffordElement c;
          c.word = concat({base, cz_word, on_qubit(sw, 0), on_qubit(tw, 1)});
          if (rep < 8) c.word.push_back(Gate{Gate::Kind::i, 1});
          c.unitary = compose_word(c.word, 2);
          g.elements_.push_back(std::move(c));
          ++rep;
        }

      // iSWAP-like
      for (const auto& sw : s1_words)
        for (const auto& tw : s1_words) {
          CliffordElement c;
          c.word = concat({base, cz_word, mid_word, cz_word, on_qubit(sw, 0), on_qubit(tw, 1)});
          c.unitary = compose_word(c.word, 2);
          g.elements_.push_back(std::move(c));
        }

      // SWAP-like
      CliffordElement s;
      s.word = concat({base, cz_word, swap_l1, cz_word, swap_l2, cz_word});
      s.unitary = compose_word(s.word, 2);
      g.elements_.push_back(std::move(s));
    }

  if (g.elements_.size() != 11520)
    throw Error(kModule, "two-qubit construction produced " + std::to_string(g.elements_.size()) +
                             " elements, expected 11520");
  g.finalize();
  return g;
}

int CliffordGroup::find(const MatrixXcd& u) const {
  const auto it = lookup_.find(canonical_key(u));
  return it == lookup_.end() ? -1 : it->second;
}

int CliffordGroup::inverse_index(const MatrixXcd& u) const {
  const int idx = find(u.adjoint());
  if (idx < 0) throw Error(kModule, "matrix has no inverse in the group (closure failure)");
  return idx;
}

bool NoiseChannel::trace_preserving(double tol) const {
  if (kraus.empty()) return false;
  const long d = dim();
  MatrixXcd acc = MatrixXcd::Zero(d, d);
  for (const auto& g : kraus) acc += g.adjoint() * g;
  return (acc - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

NoiseChannel NoiseChannel::depolarizing(int dim, double p) {
  if (dim != 2 && dim != 4) throw Error(kModule, "depolarizing channel supports dim 2 or 4");
  if (p < 0.0 || p > 1.0) throw Error(kModule, "depolarizing parameter must be in [0, 1]");
  Matrix2cd paulis[4];
  paulis[0] = Matrix2cd::Identity();
  paulis[1] << 0, 1, 1, 0;
  paulis[2] << 0, -kI, kI, 0;
  paulis[3] << 1, 0, 0, -1;

  NoiseChannel ch;
  const double d2 = static_cast<double>(dim) * dim;
  const double w_pauli = (1.0 - p) / d2;
  const double w_id = p + w_pauli;
  if (dim == 2) {
    ch.kraus.push_back(std::sqrt(w_id) * paulis[0]);
    for (int k = 1; k < 4; ++k) ch.kraus.push_back(std::sqrt(w_pauli) * paulis[k]);
  } else {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double w = (a == 0 && b == 0) ? w_id : w_pauli;
        ch.kraus.push_back(std::sqrt(w) * kron2(paulis[a], paulis[b]));
      }
  }
  return ch;
}

NoiseChannel NoiseChannel::leakage(double t_over_t1) {
  NoiseChannel ch;
  const double decay_half = std::exp(-0.5 * t_over_t1);
  const double jump = std::sqrt(1.0 - std::exp(-t_over_t1));
  const double s = 1.0 / std::sqrt(2.0);
  MatrixXcd g0 = MatrixXcd::Identity(5, 5) * s;
  g0(4, 4) = s * decay_half;
  MatrixXcd g1 = MatrixXcd::Zero(5, 5);
  g1(3, 4) = s * jump;
  MatrixXcd g2 = MatrixXcd::Identity(5, 5) * s;
  g2(3, 3) = s * decay_half;
  MatrixXcd g3 = MatrixXcd::Zero(5, 5);
  g3(4, 3) = s * jump;
  ch.kraus = {g0, g1, g2, g3};
  return ch;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

MatrixXcd embed(const MatrixXcd& u, long sim_dim) {
  if (u.rows() == sim_dim) return u;
  MatrixXcd out = MatrixXcd::Identity(sim_dim, sim_dim);
  out.topLeftCorner(u.rows(), u.cols()) = u;
  return out;
}

void apply_unitary(MatrixXcd& rho, const MatrixXcd& u) { rho = u * rho * u.adjoint(); }

void apply_channel(MatrixXcd& rho, const NoiseChannel& ch) {
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& g : ch.kraus) out += g * rho * g.adjoint();
  rho = out;
}

}  // namespace

RBResult simulate_rb(const CliffordGroup& group, const RbOptions& options) {
  if (options.lengths.empty()) throw Error(kModule, "no sequence lengths given");
  if (options.randomizations < 1) throw Error(kModule, "need at least one randomization");
  for (int m : options.lengths)
    if (m < 1) throw Error(kModule, "sequence lengths must be >= 1");

  const int dg = group.dim();
  long sim_dim = dg;
  for (const auto& ch : {options.per_clifford_noise, options.interleaved_noise}) {
    if (!ch) continue;
    if (!ch->trace_preserving())
      throw Error(kModule, "noise channel is not trace-preserving on its space");
    sim_dim = std::max(sim_dim, ch->dim());
  }
  if (options.interleave_cz && group.n_qubits() != 2)
    throw Error(kModule, "CZ interleaving needs the two-qubit group");

  MatrixXcd cz, cz_ideal;
  if (options.interleave_cz) {
    cz = embed(cz_matrix(), sim_dim);
    cz_ideal = cz_matrix();
  }

  const size_t n_len = options.lengths.size();
  const int n_rand = options.randomizations;
  std::vector<std::vector<double>> survival(n_len, std::vector<double>(n_rand, 0.0));

  par::map_indices(static_cast<std::ptrdiff_t>(n_len) * n_rand, [&](std::ptrdiff_t task) {
    const size_t li = static_cast<size_t>(task) / n_rand;
    const int r = static_cast<int>(task % n_rand);
    const int m = options.lengths[li];
    std::mt19937_64 rng(splitmix64(options.seed ^ (0x5851f42d4c957f2dull * (li + 1) + r)));
    std::uniform_int_distribution<int> pick(0, group.size() - 1);

    MatrixXcd rho = MatrixXcd::Zero(sim_dim, sim_dim);
    rho(0, 0) = 1.0;
    MatrixXcd ideal = MatrixXcd::Identity(dg, dg);

    for (int step = 0; step < m; ++step) {
      const int idx = pick(rng);
      const auto& e = group.element(idx);
      apply_unitary(rho, embed(e.unitary, sim_dim));
      ideal = e.unitary * ideal;
      if (options.per_clifford_noise) apply_channel(rho, *options.per_clifford_noise);
      if (options.interleave_cz) {
        apply_unitary(rho, cz);
        ideal = cz_ideal * ideal;
        if (options.interleaved_noise) apply_channel(rho, *options.interleaved_noise);
      }
    }
    const auto& rec = group.element(group.inverse_index(ideal));
    apply_unitary(rho, embed(rec.unitary, sim_dim));
    if (options.per_clifford_noise) apply_channel(rho, *options.per_clifford_noise);

    double p_surv = std::clamp(rho(0, 0).real(), 0.0, 1.0);
    if (options.shots > 0) {
      std::binomial_distribution<int> shot(options.shots, p_surv);
      p_surv = static_cast<double>(shot(rng)) / options.shots;
    }
    survival[li][r] = p_surv;
  });

  RBResult out;
  out.d = dg;
  out.points.reserve(n_len);
  for (size_t li = 0; li < n_len; ++li) {
    RbPoint pt;
    pt.length = options.lengths[li];
    double mean = 0.0;
    for (double v : survival[li]) mean += v;
    mean /= n_rand;
    double var = 0.0;
    for (double v : survival[li]) var += (v - mean) * (v - mean);
    var = n_rand > 1 ? var / (n_rand - 1) : 0.0;
    pt.mean = mean;
    pt.sem = std::sqrt(var / n_rand);
    out.points.push_back(pt);
  }

  out.fit = fit_rb(out.points);
  out.f_clifford = clifford_fidelity(out.fit.p, out.d);
  out.f_clifford_sigma = (1.0 - 1.0 / out.d) * out.fit.sigma_p;
  const double per_clifford_gates = group.n_qubits() == 1 ? group.average_single_qubit_gates()
                                                          : group.average_single_qubit_gates() +
                                                                group.average_cz_gates();
  out.f_per_gate = 1.0 - (1.0 - 1.0 / out.d) * (1.0 - out.fit.p) / per_clifford_gates;
  return out;
}

namespace {

// Weighted least squares for (A, B) at fixed p; returns chi^2.
double linear_ab(const std::vector<RbPoint>& pts, const std::vector<double>& w, double p,
                 double* a_out, double* b_out) {
  double s_xx = 0, s_x1 = 0, s_11 = 0, s_xy = 0, s_1y = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double x = std::pow(p, pts[i].length);
    s_xx += w[i] * x * x;
    s_x1 += w[i] * x;
    s_11 += w[i];
    s_xy += w[i] * x * pts[i].mean;
    s_1y += w[i] * pts[i].mean;
  }
  const double det = s_xx * s_11 - s_x1 * s_x1;
  double a, b;
  if (std::abs(det) < 1e-300) {
    a = 0.0;
    b = s_1y / std::max(s_11, 1e-300);
  } else {
    a = (s_xy * s_11 - s_1y * s_x1) / det;
    b = (s_xx * s_1y - s_x1 * s_xy) / det;
  }
  double chi2 = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double r = pts[i].mean - (a * std::pow(p, pts[i].length) + b);
    chi2 += w[i] * r * r;
  }
  *a_out = a;
  *b_out = b;
  return chi2;
}

}  // namespace

RbFit fit_rb(const std::vector<RbPoint>& points) {
  if (points.size() < 4) throw Error(kModule, "fit needs at least 4 distinct lengths");

  double ymin = points[0].mean, ymax = points[0].mean;
  for (const auto& p : points) {
    ymin = std::min(ymin, p.mean);
    ymax = std::max(ymax, p.mean);
  }

  RbFit fit;
  if (ymax - ymin < 1e-12) {
    // Degenerate (noiseless) data: no decay to fit.
    fit.a = ymax;
    fit.p = 1.0;
    fit.b = 0.0;
    return fit;
  }

  const bool have_sems = std::all_of(points.begin(), points.end(),
                                     [](const RbPoint& p) { return p.sem > 0.0; });
  std::vector<double> w(points.size(), 1.0);
  if (have_sems)
    for (size_t i = 0; i < points.size(); ++i) w[i] = 1.0 / (points[i].sem * points[i].sem);

  // Variable-projection search over p, then a local refine.
  double best_p = 0.0, best_chi = 1e300, a = 0, b = 0;
  for (int i = 0; i <= 400; ++i) {
    const double p = 0.5 + 0.5 * i / 400.0;
    double ta, tb;
    const double chi = linear_ab(points, w, p, &ta, &tb);
    if (chi < best_chi) {
      best_chi = chi;
      best_p = p;
      a = ta;
      b = tb;
    }
  }
  double lo = std::max(0.0, best_p - 0.002), hi = std::min(1.0, best_p + 0.002);
  for (int iter = 0; iter < 200; ++iter) {
    const double p1 = lo + (hi - lo) / 3.0, p2 = hi - (hi - lo) / 3.0;
    double ta, tb;
    if (linear_ab(points, w, p1, &ta, &tb) < linear_ab(points, w, p2, &ta, &tb))
      hi = p2;
    else
      lo = p1;
  }
  best_p = 0.5 * (lo + hi);
  best_chi = linear_ab(points, w, best_p, &a, &b);

  fit.a = a;
  fit.p = best_p;
  fit.b = b;
  fit.rms_residual = std::sqrt(best_chi / points.size());

  // Covariance from the weighted normal equations at the optimum. With
  // reported sems the weights are absolute uncertainties; otherwise scale
  // by the residual variance.
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < points.size(); ++i) {
    const int m = points[i].length;
    const double pm = std::pow(best_p, m);
    Eigen::Vector3d j(pm, a * m * std::pow(best_p, m - 1), 1.0);
    jtj += w[i] * j * j.transpose();
  }
  Eigen::Matrix3d cov = jtj.inverse();
  if (!have_sems) {
    const double dof = std::max<double>(1.0, static_cast<double>(points.size()) - 3.0);
    cov *= best_chi / dof;
  }
  fit.sigma_a = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.sigma_p = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.sigma_b = std::sqrt(std::max(0.0, cov(2, 2)));
  return fit;
}

double clifford_fidelity(double p, int d) { return 1.0 - (1.0 - 1.0 / d) * (1.0 - p); }

InterleavedFidelity interleaved_gate_fidelity(const RbFit& reference, const RbFit& interleaved,
                                              int d) {
  if (reference.p <= 0.0) throw Error(kModule, "reference decay must be positive");
  InterleavedFidelity out;
  const double ratio = interleaved.p / reference.p;
  out.f_cz = 1.0 - (d - 1.0) * (1.0 - ratio) / d;
  const double dfdpi = (d - 1.0) / (d * reference.p);
  const double dfdpr = -(d - 1.0) * interleaved.p / (d * reference.p * reference.p);
  out.sigma = std::sqrt(dfdpi * dfdpi * interleaved.sigma_p * interleaved.sigma_p +
                        dfdpr * dfdpr * reference.sigma_p * reference.sigma_p);
  return out;
}

}  // namespace ftf

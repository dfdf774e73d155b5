#include "ftf/pulse.hpp"

#include <algorithm>
#include <cmath>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"
#include "ftf/parallel.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "pulse-dynamics";

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

double wrap_angle(double a) {
  while (a > constants::pi) a -= constants::two_pi;
  while (a <= -constants::pi) a += constants::two_pi;
  return a;
}

// Natural cubic spline through evenly spaced points.
struct Spline {
  double h = 0.0;
  std::vector<double> y;
  std::vector<double> m;  // second derivatives

  static Spline fit(const std::vector<double>& values, double spacing) {
    Spline s;
    s.h = spacing;
    s.y = values;
    const int n = static_cast<int>(values.size());
    s.m.assign(n, 0.0);
    if (n < 3) return s;
    // Tridiagonal solve for interior second derivatives (natural ends).
    std::vector<double> diag(n - 2, 4.0), rhs(n - 2);
    for (int i = 0; i < n - 2; ++i)
      rhs[i] = 6.0 * (values[i + 2] - 2.0 * values[i + 1] + values[i]) / (spacing * spacing);
    for (int i = 1; i < n - 2; ++i) {
      const double w = 1.0 / diag[i - 1];
      diag[i] -= w;
      rhs[i] -= w * rhs[i - 1];
    }
    for (int i = n - 3; i >= 0; --i)
      s.m[i + 1] = (rhs[i] - (i + 1 < n - 2 ? s.m[i + 2] : 0.0)) / diag[i];
    return s;
  }

  double eval(double t) const {
    const int n = static_cast<int>(y.size());
    if (n == 0) return 0.0;
    if (n == 1) return y[0];
    const double tmax = h * (n - 1);
    t = std::clamp(t, 0.0, tmax);
    int i = std::min(n - 2, static_cast<int>(t / h));
    const double a = (h * (i + 1) - t) / h;
    const double b = (t - h * i) / h;
    return a * y[i] + b * y[i + 1] +
           ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  }
};

}  // namespace

PulseEnvelope PulseEnvelope::cosine(double width_ns, double amplitude_ghz) {
  PulseEnvelope e;
  e.kind = Kind::cosine;
  e.width_ns = width_ns;
  e.amplitude_ghz = amplitude_ghz;
  return e;
}

PulseEnvelope PulseEnvelope::drag(double width_ns, double amplitude_ghz, double coefficient) {
  PulseEnvelope e = cosine(width_ns, amplitude_ghz);
  e.kind = Kind::drag;
  e.drag_coefficient = coefficient;
  return e;
}

PulseEnvelope PulseEnvelope::interpolated(double width_ns, double amplitude_ghz,
                                          std::vector<std::pair<double, double>> points) {
  if (points.size() != 6)
    throw Error(kModule, "interpolated-IQ envelope needs exactly 6 control points");
  PulseEnvelope e;
  e.kind = Kind::interpolated_iq;
  e.width_ns = width_ns;
  e.amplitude_ghz = amplitude_ghz;
  e.iq_points = std::move(points);
  return e;
}

std::pair<double, double> PulseEnvelope::iq(double t_ns) const {
  if (width_ns <= 0.0) throw Error(kModule, "envelope width must be > 0");
  if (t_ns < 0.0 || t_ns > width_ns) return {0.0, 0.0};
  const double x = t_ns / width_ns;
  switch (kind) {
    case Kind::cosine:
      return {0.5 * (1.0 - std::cos(constants::two_pi * x)), 0.0};
    case Kind::drag: {
      const double i = 0.5 * (1.0 - std::cos(constants::two_pi * x));
      // Q = coeff * dI/dt * width / (2 pi)
      const double q = drag_coefficient * 0.5 * std::sin(constants::two_pi * x);
      return {i, q};
    }
    case Kind::interpolated_iq: {
      const double spacing = width_ns / 5.0;
      std::vector<double> iv(6), qv(6);
      for (int k = 0; k < 6; ++k) {
        iv[k] = iq_points[k].first;
        qv[k] = iq_points[k].second;
      }
      // Refitting the six-point spline costs a few dozen flops, noise next
      // to the per-step matrix work.
      const Spline si = Spline::fit(iv, spacing);
      const Spline sq = Spline::fit(qv, spacing);
      return {si.eval(t_ns), sq.eval(t_ns)};
    }
  }
  return {0.0, 0.0};
}

int GateModel::position(const StateLabel& s) const {
  const auto it = positions.find(s);
  if (it == positions.end())
    throw Error(kModule, "state " + s.str() + " is not in the propagation subspace");
  return it->second;
}

int Propagator::column_of(int position) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == position) return static_cast<int>(i);
  return -1;
}

GateModel build_gate_model(const DeviceSpec& device, const GateModelOptions& options) {
  GateModel model;
  model.spectrum = diagonalize_and_label(device, options.labels);
  model.tracked = options.labels.tracked;

  const FtfOperators op = assemble_ftf(device);

  // Photon-energy scale: the lowest of the three gate transitions.
  const double e101 = model.spectrum.energy({1, 0, 1});
  double f_est = 0.0;
  for (const StateLabel& s : {StateLabel{2, 0, 1}, StateLabel{1, 1, 1}, StateLabel{1, 0, 2}}) {
    const auto it = model.spectrum.labels.find(s);
    if (it == model.spectrum.labels.end()) continue;
    const double f = model.spectrum.energies(it->second) - e101;
    if (f > 0.0 && (f_est <= 0.0 || f < f_est)) f_est = f;
  }
  if (f_est <= 0.0) f_est = 5.0;
  const double cutoff = e101 + options.photon_margin * f_est + options.extra_margin_ghz;

  std::vector<int> keep;
  std::vector<char> included(op.dim, 0);
  for (int e = 0; e < op.dim; ++e)
    if (model.spectrum.energies(e) <= cutoff) {
      keep.push_back(e);
      included[e] = 1;
    }
  for (const StateLabel& s : model.tracked) {
    const int e = model.spectrum.index(s);
    if (!included[e]) {
      keep.push_back(e);
      included[e] = 1;
    }
  }
  std::sort(keep.begin(), keep.end());

  const int dim = static_cast<int>(keep.size());
  MatrixXcd w_sub(op.dim, dim);
  model.energies.resize(dim);
  for (int i = 0; i < dim; ++i) {
    w_sub.col(i) = model.spectrum.eigenvectors.col(keep[i]);
    model.energies(i) = model.spectrum.energies(keep[i]);
  }
  model.n1 = w_sub.adjoint() * op.n1 * w_sub;
  model.n2 = w_sub.adjoint() * op.n2 * w_sub;
  model.eigen_index = keep;
  for (const StateLabel& s : model.tracked) {
    const int e = model.spectrum.index(s);
    const auto it = std::lower_bound(keep.begin(), keep.end(), e);
    model.positions[s] = static_cast<int>(it - keep.begin());
  }
  return model;
}

namespace {

struct DriveSignal {
  double amp1 = 0.0, amp2 = 0.0;  // amplitude_ghz * a_i
  double phase1 = 0.0, phase2 = 0.0;
  double carrier = 0.0;
  const PulseEnvelope* envelope = nullptr;

  // Scalar drive coefficients (c1, c2) at time t.
  std::pair<double, double> at(double t) const {
    const auto [i, q] = envelope->iq(t);
    const double w = constants::two_pi * carrier * t;
    const double c1 = amp1 * (i * std::cos(w + phase1) - q * std::sin(w + phase1));
    const double c2 = amp2 * (i * std::cos(w + phase2) - q * std::sin(w + phase2));
    return {c1, c2};
  }
};

DriveSignal make_signal(const DriveLinePair& drives, const PulseEnvelope& envelope) {
  if (drives.carrier_ghz <= 0.0) throw Error(kModule, "carrier frequency must be > 0");
  if (drives.a1 < 0.0 || drives.a2 < 0.0) throw Error(kModule, "line amplitudes must be >= 0");
  DriveSignal s;
  s.amp1 = envelope.amplitude_ghz * drives.a1;
  s.amp2 = envelope.amplitude_ghz * drives.a2;
  s.phase1 = drives.phi1;
  s.phase2 = drives.phi2 + drives.dispersion_rad_per_ghz * drives.carrier_ghz;
  s.carrier = drives.carrier_ghz;
  s.envelope = &envelope;
  return s;
}

// One Strang step: U <- D_half exp(-i 2 pi dt V(t_mid)) D_half U, with the
// exponential applied by a short Taylor series (the drive term is small per
// step).
void apply_step(MatrixXcd& u, const VectorXcd& d_half, const MatrixXcd& n1, const MatrixXcd& n2,
                double c1, double c2, double dt, int taylor_order, MatrixXcd& v_scratch,
                MatrixXcd& term_scratch) {
  u = d_half.asDiagonal() * u;
  v_scratch = c1 * n1 + c2 * n2;
  const complex<double> factor(0.0, -constants::two_pi * dt);
  term_scratch = u;
  for (int k = 1; k <= taylor_order; ++k) {
    term_scratch = (factor / static_cast<double>(k)) * (v_scratch * term_scratch);
    u += term_scratch;
  }
  u = d_half.asDiagonal() * u;
}

MatrixXcd propagate_lab(const GateModel& model, const DriveSignal& sig, double width,
                        double samples_per_period, const std::vector<int>& columns) {
  const int dim = model.dim();
  const long n_steps =
      std::max<long>(8, static_cast<long>(std::ceil(width * samples_per_period * sig.carrier)));
  const double dt = width / static_cast<double>(n_steps);

  // Taylor order from the worst-case step rotation.
  const double vnorm =
      std::abs(sig.amp1) * model.n1.cwiseAbs().rowwise().sum().maxCoeff() +
      std::abs(sig.amp2) * model.n2.cwiseAbs().rowwise().sum().maxCoeff();
  const double theta = constants::two_pi * dt * vnorm;
  int order = 4;
  double err = theta * theta * theta * theta * theta / 120.0;
  while (err > 1e-17 && order < 10) {
    ++order;
    err *= theta / (order + 1.0);
  }

  VectorXcd d_half(dim);
  for (int i = 0; i < dim; ++i)
    d_half(i) = std::polar(1.0, -constants::pi * dt * model.energies(i));

  MatrixXcd u = MatrixXcd::Zero(dim, static_cast<long>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) u(columns[c], static_cast<long>(c)) = 1.0;

  MatrixXcd v_scratch(dim, dim), term_scratch(dim, static_cast<long>(columns.size()));
  for (long k = 0; k < n_steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    const auto [c1, c2] = sig.at(t_mid);
    apply_step(u, d_half, model.n1, model.n2, c1, c2, dt, order, v_scratch, term_scratch);
  }
  return u;
}

std::vector<int> select_columns(const GateModel& model, EvolveOptions::Columns which) {
  std::vector<int> cols;
  switch (which) {
    case EvolveOptions::Columns::full:
      cols.resize(model.dim());
      for (int i = 0; i < model.dim(); ++i) cols[i] = i;
      break;
    case EvolveOptions::Columns::computational:
      for (const StateLabel& s :
           {StateLabel{0, 0, 0}, StateLabel{1, 0, 0}, StateLabel{0, 0, 1}, StateLabel{1, 0, 1}})
        cols.push_back(model.position(s));
      break;
    case EvolveOptions::Columns::tracked:
      cols.reserve(model.tracked.size());
      for (const StateLabel& s : model.tracked) cols.push_back(model.position(s));
      break;
  }
  return cols;
}

}  // namespace

Propagator evolve(const GateModel& model, const DriveLinePair& drives,
                  const PulseEnvelope& envelope, const EvolveOptions& options) {
  if (options.samples_per_period < 40.0)
    throw Error(kModule, "time step must resolve the carrier: samples_per_period >= 40");
  if (envelope.width_ns <= 0.0) throw Error(kModule, "pulse width must be > 0");

  const DriveSignal sig = make_signal(drives, envelope);
  const std::vector<int> columns = select_columns(model, options.columns);

  MatrixXcd u = propagate_lab(model, sig, envelope.width_ns, options.samples_per_period, columns);
  if (options.richardson_check) {
    const MatrixXcd u_half =
        propagate_lab(model, sig, envelope.width_ns, 2.0 * options.samples_per_period, columns);
    const double diff = (u - u_half).cwiseAbs().maxCoeff();
    if (diff > 1e-6)
      throw Error(kModule, "step-size nonconvergence: halving dt changes the propagator by " +
                               std::to_string(diff));
    u = u_half;
  }

  // Interaction frame of the static Hamiltonian.
  Propagator out;
  out.width_ns = envelope.width_ns;
  out.columns = columns;
  VectorXcd row_phase(model.dim());
  for (int i = 0; i < model.dim(); ++i)
    row_phase(i) = std::polar(1.0, constants::two_pi * model.energies(i) * envelope.width_ns);
  out.u = row_phase.asDiagonal() * u;
  return out;
}

namespace {

complex<double> diagonal_element(const GateModel& model, const Propagator& prop,
                                 const StateLabel& s) {
  const int pos = model.position(s);
  const int col = prop.column_of(pos);
  if (col < 0) throw Error(kModule, "state " + s.str() + " was not propagated");
  return prop.u(pos, col);
}

}  // namespace

double calibration_leakage(const GateModel& model, const Propagator& prop) {
  double acc = 0.0;
  for (const StateLabel& s :
       {StateLabel{0, 0, 0}, StateLabel{1, 0, 0}, StateLabel{0, 0, 1}, StateLabel{1, 0, 1}})
    acc += std::norm(diagonal_element(model, prop, s));
  return 1.0 - 0.25 * acc;  // mean population left per computational state
}

double conditional_phase(const GateModel& model, const Propagator& prop) {
  const complex<double> u00 = diagonal_element(model, prop, {0, 0, 0});
  const complex<double> u10 = diagonal_element(model, prop, {1, 0, 0});
  const complex<double> u01 = diagonal_element(model, prop, {0, 0, 1});
  const complex<double> u11 = diagonal_element(model, prop, {1, 0, 1});
  for (const auto& [name, z] : {std::pair<const char*, complex<double>>{"000", u00},
                                {"100", u10},
                                {"001", u01},
                                {"101", u11}}) {
    if (std::abs(z) < 0.5)
      throw Error(kModule, std::string("computational state ") + name +
                               " lost too much population for a conditional phase (|amp| = " +
                               std::to_string(std::abs(z)) + ")");
  }
  return wrap_angle(std::arg(u11) - std::arg(u10) - std::arg(u01) + std::arg(u00));
}

ChevronResult chevron_scan(const GateModel& model, const PulseEnvelope& envelope_shape,
                           const std::vector<double>& freq_ghz,
                           const std::vector<double>& widths_ns, const ChevronOptions& options) {
  if (freq_ghz.empty() || widths_ns.empty()) throw Error(kModule, "empty chevron grid");
  ChevronResult out;
  out.freq_ghz = freq_ghz;
  out.width_ns = widths_ns;
  out.p_leave.resize(static_cast<long>(freq_ghz.size()), static_cast<long>(widths_ns.size()));

  const double eps = options.initialization_error;
  const long n_w = static_cast<long>(widths_ns.size());
  par::map_indices(
      static_cast<std::ptrdiff_t>(freq_ghz.size()) * n_w,
      [&](std::ptrdiff_t cell) {
        const long fi = cell / n_w;
        const long wi = cell % n_w;
        PulseEnvelope env = envelope_shape;
        env.width_ns = widths_ns[wi];
        DriveLinePair drives = options.drives;
        drives.carrier_ghz = freq_ghz[fi];
        EvolveOptions eopt = options.evolve;
        eopt.columns = EvolveOptions::Columns::computational;
        const Propagator prop = evolve(model, drives, env, eopt);
        const double stay_101 = std::norm(diagonal_element(model, prop, {1, 0, 1}));
        double p = 1.0 - stay_101;
        if (eps > 0.0) {
          const double stay_001 = std::norm(diagonal_element(model, prop, {0, 0, 1}));
          p = (1.0 - eps) * (1.0 - stay_101) + eps * (1.0 - stay_001);
        }
        out.p_leave(fi, wi) = p;
      },
      options.mode);
  return out;
}

namespace {

// Combined drive matrix element of a transition for unit line weights and
// given relative phase.
complex<double> combined_element(const GateModel& model, const StateLabel& from,
                                 const StateLabel& to, double a1, double a2, double phase1,
                                 double phase2) {
  const int i = model.position(from);
  const int f = model.position(to);
  return a1 * std::polar(1.0, phase1) * model.n1(f, i) +
         a2 * std::polar(1.0, phase2) * model.n2(f, i);
}

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

template <typename Fn>
GoldenResult golden_min(Fn&& fn, double lo, double hi, double rel_tol, int max_iter = 40) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < max_iter && (b - a) > rel_tol * std::abs(a + b) * 0.5; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = fn(x2);
    }
  }
  return f1 < f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

}  // namespace

CZCalibration calibrate_cz(const GateModel& model, const StateLabel& target, double width_ns,
                           const CalibrateOptions& options) {
  const double e101 = model.energy({1, 0, 1});
  const double f0 = model.energy(target) - e101;
  if (f0 <= 0.0) throw Error(kModule, "target transition must lie above |101>");

  // Nearest unwanted transition with appreciable drive strength must be at
  // least 10 MHz detuned.
  const double target_elem = std::abs(combined_element(model, {1, 0, 1}, target, 1, 1, 0, 0));
  for (const StateLabel& c :
       {StateLabel{0, 0, 0}, StateLabel{1, 0, 0}, StateLabel{0, 0, 1}, StateLabel{1, 0, 1}}) {
    const int ci = model.position(c);
    for (int x = 0; x < model.dim(); ++x) {
      if (x == ci) continue;
      if (c == StateLabel{1, 0, 1} && x == model.position(target)) continue;
      const double f = std::abs(model.energies(x) - model.energies(ci));
      const double elem = std::abs(model.n1(x, ci)) + std::abs(model.n2(x, ci));
      if (elem > 0.05 * target_elem && std::abs(f - f0) < 0.010)
        throw Error(kModule, "unwanted transition from " + c.str() + " lies within 10 MHz of the "
                             "gate transition (detuning " +
                                 std::to_string((f - f0) * 1e3) + " MHz)");
    }
  }

  DriveLinePair drives;
  drives.carrier_ghz = f0;
  if (options.align_phase) {
    // Constructive interference at the target transition.
    const int i = model.position({1, 0, 1});
    const int f = model.position(target);
    drives.phi2 = wrap_angle(std::arg(model.n1(f, i)) - std::arg(model.n2(f, i)));
  } else {
    drives.phi2 = options.fixed_relative_phase_rad;
  }

  const double m_tot = std::abs(combined_element(model, {1, 0, 1}, target, 1, 1, drives.phi1,
                                                 drives.phi2));
  if (m_tot < 1e-9) throw Error(kModule, "target transition has no drive matrix element");
  double amplitude = 2.0 / (m_tot * width_ns);

  EvolveOptions eopt;
  eopt.samples_per_period = options.samples_per_period;
  eopt.columns = EvolveOptions::Columns::computational;

  auto leakage_at = [&](double amp) {
    PulseEnvelope env = PulseEnvelope::cosine(width_ns, amp);
    const Propagator prop = evolve(model, drives, env, eopt);
    return calibration_leakage(model, prop);
  };
  auto phase_at = [&](double freq) {
    DriveLinePair d = drives;
    d.carrier_ghz = freq;
    PulseEnvelope env = PulseEnvelope::cosine(width_ns, amplitude);
    const Propagator prop = evolve(model, d, env, eopt);
    return wrap_angle(conditional_phase(model, prop) - constants::pi);
  };

  for (int round = 0; round < options.rounds; ++round) {
    // (1) amplitude: minimize single-pulse leakage around the current value.
    GoldenResult g = golden_min(leakage_at, 0.75 * amplitude, 1.3 * amplitude, 2e-4);
    amplitude = g.x;

    // (2) frequency: conditional phase to 180 degrees by bisection.
    const double half = options.freq_bracket_ghz;
    double lo = drives.carrier_ghz - half, hi = drives.carrier_ghz + half;
    double glo = phase_at(lo), ghi = phase_at(hi);
    if (glo * ghi > 0.0) {
      // Scan for a sign change before giving up.
      bool found = false;
      double prev_f = lo, prev_g = glo;
      double min_phase = glo, max_phase = glo;
      for (int k = 1; k <= 12 && !found; ++k) {
        const double f = lo + (hi - lo) * k / 12.0;
        const double gf = phase_at(f);
        min_phase = std::min({min_phase, gf});
        max_phase = std::max({max_phase, gf});
        if (prev_g * gf <= 0.0) {
          lo = prev_f;
          glo = prev_g;
          hi = f;
          ghi = gf;
          found = true;
        }
        prev_f = f;
        prev_g = gf;
      }
      if (!found)
        throw Error(kModule,
                    "no 180-degree conditional phase reachable in the frequency bracket; "
                    "achievable phase spans [" +
                        std::to_string(constants::pi + min_phase) + ", " +
                        std::to_string(constants::pi + max_phase) + "] rad");
    }
    for (int it = 0; it < 60 && (hi - lo) > 2e-8; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = phase_at(mid);
      if (gm * glo <= 0.0) {
        hi = mid;
        ghi = gm;
      } else {
        lo = mid;
        glo = gm;
      }
    }
    drives.carrier_ghz = 0.5 * (lo + hi);
  }

  // Final evaluation and virtual-Z readout, with the leakage states tracked.
  PulseEnvelope env = PulseEnvelope::cosine(width_ns, amplitude);
  EvolveOptions final_opt = eopt;
  final_opt.columns = EvolveOptions::Columns::tracked;
  const Propagator prop = evolve(model, drives, env, final_opt);

  CZCalibration cal;
  cal.drive_freq_ghz = drives.carrier_ghz;
  cal.amplitude_ghz = amplitude;
  cal.relative_phase_rad = wrap_angle(drives.phi2 - drives.phi1);
  cal.residual_leakage = calibration_leakage(model, prop);
  cal.phase_error_rad = wrap_angle(conditional_phase(model, prop) - constants::pi);
  cal.theta_z1_rad = -std::arg(diagonal_element(model, prop, {1, 0, 0}));
  cal.theta_z2_rad = -std::arg(diagonal_element(model, prop, {0, 0, 1}));
  return cal;
}

InterferenceSetting interference_setting(const GateModel& model, const StateLabel& from,
                                         const StateLabel& to, double dispersion_rad_per_ghz) {
  const int i = model.position(from);
  const int f = model.position(to);
  const complex<double> m1 = model.n1(f, i);
  const complex<double> m2 = model.n2(f, i);
  if (std::abs(m2) < 1e-12)
    throw Error(kModule, "transition " + from.str() + "->" + to.str() +
                             " has a vanishing line-2 matrix element");
  const double f_transition = std::abs(model.energies(f) - model.energies(i));
  const complex<double> rho = m1 / m2;
  InterferenceSetting out;
  out.amplitude_ratio = std::abs(rho);
  out.relative_phase_rad = wrap_angle(constants::pi - dispersion_rad_per_ghz * f_transition +
                                      std::arg(rho));
  return out;
}

}  // namespace ftf

// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "ftf/capnet.hpp"
#include "ftf/composite.hpp"
#include "ftf/config.hpp"
#include "ftf/constants.hpp"
#include "ftf/error_budget.hpp"
#include "ftf/parallel.hpp"
#include "ftf/pulse.hpp"
#include "ftf/rb.hpp"
#include "ftf/zz.hpp"

using namespace ftf;
using clk = std::chrono::high_resolution_clock;

namespace {

int failures = 0;
clk::time_point t_start;

void begin() { t_start = clk::now(); }

void report(int criterion, bool pass, const std::string& detail) {
  const double secs = std::chrono::duration<double>(clk::now() - t_start).count();
  std::printf("criterion %2d: %s  %s  [%.1f s]\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

DeviceSpec at_flux(DeviceSpec d, double flux) {
  d.transmon.phi_ext = constants::two_pi * flux;
  return d;
}

// --- criterion 1: fluxonium frequencies ------------------------------------
void criterion_1(const DeviceSpec& a, const DeviceSpec& b) {
  begin();
  struct Case {
    const char* name;
    FluxoniumParams params;
    double expected;
  };
  const std::vector<Case> cases = {
      {"A1", a.fluxonium1, 0.333},
      {"A2", a.fluxonium2, 0.242},
      {"B1", b.fluxonium1, 0.426},
      {"B2", b.fluxonium2, 0.281},
  };
  bool pass = true;
  std::string detail = "w01 (GHz):";
  for (const Case& c : cases) {
    const double w01 = build_fluxonium_mode(c.params, 8).energies(1);
    const bool ok = std::abs(w01 - c.expected) <= 0.005;
    pass = pass && ok;
    detail += fmt(" %s=%.4f(exp %.3f%s)", c.name, w01, c.expected, ok ? "" : " MISS");
  }
  report(1, pass, detail);
}

// --- criterion 2: ZZ flux sweep ---------------------------------------------
void criterion_2(const DeviceSpec& a) {
  begin();
  std::vector<double> zeta(21);
  par::map_indices(21, [&](std::ptrdiff_t i) {
    zeta[i] = zz_exact_khz(at_flux(a, 0.5 + 0.5 * i / 20.0));
  });
  double lo = zeta[0], hi = zeta[0];
  bool negative = true;
  for (double z : zeta) {
    lo = std::min(lo, z);
    hi = std::max(hi, z);
    negative = negative && z < 0.0;
  }
  const bool pass = negative && lo >= -2.7 - 0.5 && hi <= -1.5 + 0.5;
  report(2, pass, fmt("zeta in [%.3f, %.3f] kHz over 21 points (band [-3.2, -1.0], negative=%s)",
                      lo, hi, negative ? "yes" : "no"));
}

// --- criterion 3: perturbative coefficients ---------------------------------
void criterion_3(const DeviceSpec& a) {
  begin();
  const ZetaCoefficients c = fit_zeta_coefficients(at_flux(a, 0.5));
  const double ratio = -2.0 * c.zeta2_per_ghz / c.zeta3_per_ghz2;
  const bool signs = c.zeta2_per_ghz < 0 && c.zeta3_per_ghz2 > 0 && c.zeta4_per_ghz3 < 0;
  const bool z2 = std::abs(c.zeta2_per_ghz + 2.1e-3) <= 0.15 * 2.1e-3;
  const bool z3 = std::abs(c.zeta3_per_ghz2 - 1.4e-3) <= 0.15 * 1.4e-3;
  const bool z4 = std::abs(c.zeta4_per_ghz3 + 2.6e-4) <= 0.15 * 2.6e-4;
  const bool rt = std::abs(ratio - 2.97) <= 0.10 * 2.97;
  report(3, signs && z2 && z3 && z4 && rt,
         fmt("zeta2=%.3e(%s) zeta3=%.3e(%s) zeta4=%.3e(%s) ratio=%.3f GHz(%s) signs=%s",
             c.zeta2_per_ghz, z2 ? "ok" : "MISS", c.zeta3_per_ghz2, z3 ? "ok" : "MISS",
             c.zeta4_per_ghz3, z4 ? "ok" : "MISS", ratio, rt ? "ok" : "MISS",
             signs ? "ok" : "MISS"));
}

// --- criterion 4: perturbation-vs-exact oracle -------------------------------
void criterion_4(const DeviceSpec& a) {
  begin();
  const DeviceSpec base = at_flux(a, 0.5);
  const ZetaCoefficients c = fit_zeta_coefficients(base);

  bool parabola_ok = true;
  std::string worst = "";
  double worst_dev = 0.0;
  for (double j12 : {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35}) {
    DeviceSpec t = base;
    t.j_1c = t.j_2c = std::sqrt(-2.0 * c.zeta2_per_ghz * j12 / c.zeta3_per_ghz2);
    t.j_12 = j12;
    const ZetaExpansion pt = zz_perturbative(t, 4);
    const double exact = pt.zeta_exact_khz.value();
    if (std::abs(exact) <= 0.5) continue;
    const double dev = std::abs(pt.perturbative_total_khz() - exact) / std::abs(exact);
    if (dev > worst_dev) {
      worst_dev = dev;
      worst = fmt("J12=%.2f", j12);
    }
    parabola_ok = parabola_ok && dev <= 0.15;
  }

  // Coupler-frequency asymptote: the tail decreases monotonically and drops
  // below 10 Hz.
  bool monotone = true;
  double prev = 1e300, final_hz = 0.0;
  for (int k : {1, 4, 16, 64, 128}) {
    DeviceSpec t = base;
    t.transmon.e_j1 *= k;
    t.transmon.e_j2 *= k;
    t.transmon.charge_cutoff = 60;
    const double z = std::abs(zz_exact_khz(t));
    monotone = monotone && z < prev;
    prev = z;
    final_hz = z * 1e3;
  }
  const bool asym = monotone && final_hz < 10.0;

  // Minimum-curve cancellation, reported qualitatively: the quoted
  // -2e-6 GHz^-3 is a near-cancellation of rounded values.
  const double term = -c.zeta3_per_ghz2 * c.zeta3_per_ghz2 / (4.0 * c.zeta2_per_ghz);
  const double sum = term + c.zeta4_per_ghz3;

  report(4, parabola_ok && asym,
         fmt("parabola max dev %.1f%% at %s (<=15%%); tail |zeta| -> %.2f Hz (<10, monotone=%s); "
             "min-curve sum %.2e vs terms %.2e/%.2e (quoted -2e-6)",
             100.0 * worst_dev, worst.c_str(), final_hz, monotone ? "yes" : "no", sum, term,
             c.zeta4_per_ghz3));
}

// --- criterion 5: capacitance ratios ----------------------------------------
void criterion_5() {
  begin();
  const CapacitanceNetwork net = CapacitanceNetwork::grounded(45.0, 11.0, 2.8, 8.5);
  const double exact = coupling_from_capacitance(net).ratio_ghz;
  const double leading = ratio_leading_order_ghz(net);

  double res45, res90, res180;
  {
    CapacitanceNetwork n = net;
    res45 = ratio_leading_order_ghz(n) - coupling_from_capacitance(n).ratio_ghz;
    n.c_t = 90.0;
    res90 = ratio_leading_order_ghz(n) - coupling_from_capacitance(n).ratio_ghz;
    n.c_t = 180.0;
    res180 = ratio_leading_order_ghz(n) - coupling_from_capacitance(n).ratio_ghz;
  }
  const double f1 = res45 / res90, f2 = res90 / res180;
  const bool ok = std::abs(exact - 2.8) <= 0.05 && std::abs(leading - 3.44) <= 0.01 &&
                  std::abs(f1 - 4.0) <= 1.0 && std::abs(f2 - 4.0) <= 1.0;
  report(5, ok,
         fmt("exact %.4f GHz (2.80+-0.05), leading %.4f (3.44+-0.01), residual factors %.2f/%.2f "
             "(4+-1)",
             exact, leading, f1, f2));
}

// --- criterion 6: gate calibration -------------------------------------------
void criterion_6(const DeviceSpec& a) {
  begin();
  const GateModel model = build_gate_model(at_flux(a, 0.575));
  const CZCalibration cal = calibrate_cz(model, {1, 0, 2}, 85.0);

  const bool leak_ok = cal.residual_leakage < 1e-3;
  const bool phase_ok = std::abs(cal.phase_error_rad) < 1e-2;

  // CZ^2 returns to the identity up to the virtual-Z corrections.
  DriveLinePair drives;
  drives.carrier_ghz = cal.drive_freq_ghz;
  drives.phi2 = cal.relative_phase_rad;
  const Propagator prop =
      evolve(model, drives, PulseEnvelope::cosine(85.0, cal.amplitude_ghz));
  Eigen::Matrix4cd block;
  const StateLabel comp[4] = {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1}};
  for (int r = 0; r < 4; ++r)
    for (int cidx = 0; cidx < 4; ++cidx)
      block(r, cidx) = prop.u(model.position(comp[r]), prop.column_of(model.position(comp[cidx])));
  Eigen::Vector4cd vz;
  vz << 1.0, std::polar(1.0, cal.theta_z2_rad), std::polar(1.0, cal.theta_z1_rad),
      std::polar(1.0, cal.theta_z1_rad + cal.theta_z2_rad);
  const Eigen::Matrix4cd corrected = vz.asDiagonal() * block;
  const Eigen::Matrix4cd squared = corrected * corrected;
  double min_pop = 1.0;
  for (int i = 0; i < 4; ++i) min_pop = std::min(min_pop, std::norm(squared(i, i)));
  double phase2 = std::arg(squared(3, 3)) - std::arg(squared(2, 2)) - std::arg(squared(1, 1)) +
                  std::arg(squared(0, 0));
  while (phase2 > constants::pi) phase2 -= constants::two_pi;
  while (phase2 <= -constants::pi) phase2 += constants::two_pi;
  const bool cz2_ok = min_pop > 0.99 && std::abs(phase2) < 2e-2;

  report(6, leak_ok && phase_ok && cz2_ok,
         fmt("leakage %.2e (<1e-3), |phase err| %.2e rad (<1e-2), CZ^2 pop %.4f (>0.99), "
             "CZ^2 cond phase %.2e",
             cal.residual_leakage, std::abs(cal.phase_error_rad), min_pop, std::abs(phase2)));
}

// --- criterion 7: error-budget numbers ---------------------------------------
void criterion_7() {
  begin();
  const double deg = 180.0 / constants::pi;
  const double p999 = phase_error_tolerance_rad(0.999) * deg;
  const double p9999 = phase_error_tolerance_rad(0.9999) * deg;
  const double a999 = amplitude_error_tolerance_rad(0.999) * deg;
  const double a9999 = amplitude_error_tolerance_rad(0.9999) * deg;
  const double f999 = frequency_tolerance_mhz(0.999, 50.0);
  const double f9999 = frequency_tolerance_mhz(0.9999, 50.0);
  const double leak = leakage_relaxation_fidelity(85.0, 10.0).fidelity;

  const bool values_ok = std::abs(p999 - 4.7) <= 0.05 && std::abs(p9999 - 1.5) <= 0.05 &&
                         std::abs(a999 - 7.25) <= 0.005 && std::abs(a9999 - 2.29) <= 0.005 &&
                         std::abs(f999 - 0.5) <= 0.05 && std::abs(f9999 - 0.160) <= 0.005 &&
                         std::abs(leak - 0.99894) <= 5e-6;

  // Kraus machinery against each closed form.
  bool kraus_ok = true;
  {
    const double x = 40e-3 / 10.0;  // small-parameter regime
    const double k = kraus_average_fidelity(leakage_kraus_set(x),
                                            Eigen::MatrixXcd::Identity(5, 5),
                                            computational_projector(5), 4);
    kraus_ok = kraus_ok && std::abs(k - (1.0 - x / 8.0)) < 1e-6;
  }
  for (double dphi : {0.05, 0.12}) {
    Eigen::MatrixXcd g = cz_unitary(4);
    g(3, 3) *= std::polar(1.0, -dphi);
    const double k = kraus_average_fidelity({g}, cz_unitary(4), computational_projector(4), 4);
    kraus_ok = kraus_ok && std::abs(k - phase_error_fidelity(dphi)) < 1e-6;
  }
  for (double dtheta : {0.05, 0.2}) {
    const double k = kraus_average_fidelity({rabi_unitary(constants::two_pi + dtheta)},
                                            cz_unitary(5), computational_projector(5), 4);
    kraus_ok = kraus_ok && std::abs(k - amplitude_error_fidelity(dtheta)) < 1e-6;
  }

  report(7, values_ok && kraus_ok,
         fmt("phase %.2f/%.2f deg, amp %.3f/%.3f deg, freq %.3f MHz/%.1f kHz, F(85ns,10us)=%.5f, "
             "kraus=%s",
             p999, p9999, a999, a9999, f999, f9999 * 1e3, leak, kraus_ok ? "ok" : "MISS"));
}

// --- criterion 8: Clifford counts ---------------------------------------------
void criterion_8() {
  begin();
  const CliffordGroup c1 = CliffordGroup::build(1);
  const CliffordGroup c2 = CliffordGroup::build(2);
  const bool ok = c1.size() == 24 && c2.size() == 11520 &&
                  c1.average_single_qubit_gates() == 1.875 &&
                  c2.average_single_qubit_gates() == 8.25 && c2.average_cz_gates() == 1.5;
  report(8, ok,
         fmt("sizes %d/%d, averages %.4f / %.4f singles + %.4f CZ", c1.size(), c2.size(),
             c1.average_single_qubit_gates(), c2.average_single_qubit_gates(),
             c2.average_cz_gates()));
}

// --- criterion 9: RB end-to-end -----------------------------------------------
void criterion_9() {
  begin();
  const CliffordGroup group = CliffordGroup::build(2);
  RbOptions ref;
  ref.lengths = {2, 20, 50, 100, 160, 240, 330};
  ref.randomizations = 20;
  ref.seed = 7;
  const RBResult res_ref = simulate_rb(group, ref);

  RbOptions inter = ref;
  inter.interleave_cz = true;
  inter.interleaved_noise = NoiseChannel::leakage(85e-3 / 10.0);  // per-CZ error 1.06e-3
  const RBResult res_int = simulate_rb(group, inter);

  const InterleavedFidelity f = interleaved_gate_fidelity(res_ref.fit, res_int.fit, 4);
  const bool ok = std::abs(f.f_cz - 0.9989) <= 3e-4;
  report(9, ok,
         fmt("F_CZ = %.5f +- %.5f (target 0.99890 +- 0.00030, model-consistency check)", f.f_cz,
             f.sigma));
}

// --- criterion 10: property suites --------------------------------------------
void criterion_10(const DeviceSpec& a, const DeviceSpec& b) {
  begin();
  bool ok = true;
  std::string detail;

  for (const auto& [name, device] : {std::pair<const char*, DeviceSpec>{"A", a}, {"B", b}}) {
    // Hermiticity of the assembled Hamiltonian.
    const FtfOperators op = assemble_ftf(at_flux(device, 0.6));
    const double herm = (op.hamiltonian - op.hamiltonian.adjoint()).norm() / op.hamiltonian.norm();
    ok = ok && herm < 1e-12;

    // Unitarity of a short driven propagator on the full subspace.
    const GateModel model = build_gate_model(at_flux(device, 0.575));
    EvolveOptions eopt;
    eopt.columns = EvolveOptions::Columns::full;
    DriveLinePair drives;
    drives.carrier_ghz = model.energy({1, 0, 2}) - model.energy({1, 0, 1});
    const Propagator prop = evolve(model, drives, PulseEnvelope::cosine(10.0, 0.05), eopt);
    const double unit =
        (prop.u.adjoint() * prop.u - Eigen::MatrixXcd::Identity(model.dim(), model.dim())).norm();
    ok = ok && unit < 1e-8;

    // Truncation convergence of the ZZ rate.
    const double z0 = zz_exact_khz(at_flux(device, 0.5));
    DeviceSpec fine = at_flux(device, 0.5);
    fine.levels = {10, 8, 10};
    const double z1 = zz_exact_khz(fine);
    ok = ok && std::abs(z1 - z0) <= 0.01 * std::abs(z0);

    // Label continuity through the avoided-crossing region.
    const LabeledSpectrum tracked = diagonalize_and_label(at_flux(device, 0.65));
    for (const StateLabel& s : default_tracked_labels())
      ok = ok && tracked.assignment_overlaps.at(s) > 0.25;

    detail += fmt("%s[herm %.1e unit %.1e dzeta %.2f%%] ", name, herm, unit,
                  100.0 * std::abs(z1 - z0) / std::abs(z0));
  }

  // Stochastic reproducibility by seed.
  const CliffordGroup g1 = CliffordGroup::build(1);
  RbOptions opt;
  opt.lengths = {2, 10, 30, 60};
  opt.randomizations = 10;
  opt.shots = 50;
  opt.seed = 99;
  opt.per_clifford_noise = NoiseChannel::depolarizing(2, 0.99);
  const RBResult r1 = simulate_rb(g1, opt);
  const RBResult r2 = simulate_rb(g1, opt);
  bool repro = true;
  for (size_t i = 0; i < r1.points.size(); ++i)
    repro = repro && r1.points[i].mean == r2.points[i].mean;
  ok = ok && repro;
  detail += fmt("seed-repro=%s", repro ? "yes" : "no");

  report(10, ok, detail);
}

}  // namespace

int main() {
  const DeviceSpec device_a = parse_device_config("device_a");
  const DeviceSpec device_b = parse_device_config("device_b");

  criterion_1(device_a, device_b);
  criterion_2(device_a);
  criterion_3(device_a);
  criterion_4(device_a);
  criterion_5();
  criterion_6(device_a);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(device_a, device_b);

  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failures);
  return 1;
}

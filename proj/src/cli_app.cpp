#include "ftf/cli_app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ftf/capnet.hpp"
#include "ftf/composite.hpp"
#include "ftf/config.hpp"
#include "ftf/constants.hpp"
#include "ftf/error_budget.hpp"
#include "ftf/errors.hpp"
#include "ftf/output.hpp"
#include "ftf/parallel.hpp"
#include "ftf/pulse.hpp"
#include "ftf/rb.hpp"
#include "ftf/zz.hpp"

namespace ftf {

namespace {

std::vector<double> linspace(double from, double to, int points) {
  if (points < 1) throw Error("cli", "point counts must be >= 1");
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i)
    v[i] = points == 1 ? from : from + (to - from) * i / (points - 1);
  return v;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < csv.size()) {
    size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stoi(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) throw Error("cli", "empty length list");
  return out;
}

struct OutputSink {
  std::string path = "-";
  std::string format = "csv";

  void write(const SweepTable& table) const {
    const std::string text = format == "jsonl" ? table.jsonl() : table.csv();
    if (path == "-") {
      std::cout << text;
      return;
    }
    std::string full = path;
    const char* dir = std::getenv("FTF_OUT_DIR");
    if (dir && *dir && full.front() != '/') full = std::string(dir) + "/" + full;
    std::ofstream out(full, std::ios::binary);
    if (!out) throw Error("cli", "cannot open output file '" + full + "'");
    out << text;
  }
};

struct CommonState {
  OutputSink sink;
  std::uint64_t seed = 0;
  int threads = 0;
  bool serial = false;

  par::Mode mode() const { return serial ? par::Mode::serial : par::Mode::parallel; }
};

DeviceSpec load_device(const std::string& config, std::uint64_t* hash_out) {
  const std::string text = load_device_config_text(config);
  if (hash_out) *hash_out = fnv1a64(text);
  return parse_device_config_text(text, config);
}

DeviceSpec with_coupler_flux(DeviceSpec d, double flux_phi0) {
  d.transmon.phi_ext = constants::two_pi * flux_phi0;
  return d;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"FTF circuit simulator: spectra, static ZZ, capacitance networks, "
               "microwave-activated CZ gates and randomized benchmarking"};
  app.require_subcommand(1);

  CommonState common;
  app.add_option("--out", common.sink.path, "Output file path, or - for stdout")
      ->capture_default_str();
  app.add_option("--format", common.sink.format, "Output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  app.add_option("--seed", common.seed, "Random seed for stochastic commands")
      ->capture_default_str();
  app.add_option("--threads", common.threads, "OpenMP thread count (0: library default)");
  app.add_flag("--serial", common.serial, "Run sweeps on the serial reference path");

  // ---- spectrum ----------------------------------------------------------
  struct {
    std::string config;
    double flux_c = 0.5;
    bool flux_set = false;
    bool uncoupled = false;
  } spectrum_opts;
  {
    auto* cmd = app.add_subcommand("spectrum", "Labeled coupled spectrum at one coupler flux");
    cmd->add_option("--config", spectrum_opts.config, "Device config (path or bundled name)")
        ->required();
    cmd->add_option("--flux-c", spectrum_opts.flux_c, "Coupler flux in Phi_0")
        ->each([&](const std::string&) { spectrum_opts.flux_set = true; });
    cmd->add_flag("--uncoupled", spectrum_opts.uncoupled, "Zero all couplings first");
  }

  // ---- zz-flux -----------------------------------------------------------
  struct {
    std::string config;
    double from = 0.5, to = 1.0;
    int points = 21;
  } zzflux_opts;
  {
    auto* cmd = app.add_subcommand("zz-flux", "Static ZZ rate vs coupler flux");
    cmd->add_option("--config", zzflux_opts.config)->required();
    cmd->add_option("--from", zzflux_opts.from, "Start flux (Phi_0)")->capture_default_str();
    cmd->add_option("--to", zzflux_opts.to, "End flux (Phi_0)")->capture_default_str();
    cmd->add_option("--points", zzflux_opts.points)->capture_default_str();
  }

  // ---- zz-landscape ------------------------------------------------------
  struct {
    std::string config;
    double flux_c = 0.5;
    double jc_from = 0.1, jc_to = 1.0;
    int jc_points = 10;
    double j12_from = 0.0, j12_to = 0.3;
    int j12_points = 13;
  } land_opts;
  {
    auto* cmd = app.add_subcommand("zz-landscape", "Exact ZZ over a (J_c, J_12) grid");
    cmd->add_option("--config", land_opts.config)->required();
    cmd->add_option("--flux-c", land_opts.flux_c, "Coupler flux (Phi_0)")->capture_default_str();
    cmd->add_option("--jc-from", land_opts.jc_from)->capture_default_str();
    cmd->add_option("--jc-to", land_opts.jc_to)->capture_default_str();
    cmd->add_option("--jc-points", land_opts.jc_points)->capture_default_str();
    cmd->add_option("--j12-from", land_opts.j12_from)->capture_default_str();
    cmd->add_option("--j12-to", land_opts.j12_to)->capture_default_str();
    cmd->add_option("--j12-points", land_opts.j12_points)->capture_default_str();
  }

  // ---- zz-pt -------------------------------------------------------------
  struct {
    std::string config;
    double flux_c = 0.5;
    int order = 4;
  } zzpt_opts;
  {
    auto* cmd = app.add_subcommand("zz-pt", "Perturbative ZZ orders and expansion coefficients");
    cmd->add_option("--config", zzpt_opts.config)->required();
    cmd->add_option("--flux-c", zzpt_opts.flux_c, "Coupler flux (Phi_0)")->capture_default_str();
    cmd->add_option("--order", zzpt_opts.order, "Highest order (2, 3 or 4)")
        ->check(CLI::Range(2, 4))
        ->capture_default_str();
  }

  // ---- capnet ------------------------------------------------------------
  struct {
    std::string topology = "grounded";
    double ct = 45.0, cf1 = 11.0, cf2 = 2.8, cc = 8.5;
    double ct1 = 20.0, ct2 = 40.0;
    double scan_from = 0.0, scan_to = 0.0;
    int scan_points = 0;
  } cap_opts;
  {
    auto* cmd = app.add_subcommand("capnet", "Coupling strengths from a capacitance network");
    cmd->add_option("--topology", cap_opts.topology)
        ->check(CLI::IsMember({"grounded", "differential"}))
        ->capture_default_str();
    cmd->add_option("--ct", cap_opts.ct, "Grounded transmon capacitance (fF)")
        ->capture_default_str();
    cmd->add_option("--ct1", cap_opts.ct1, "Differential transmon pad-to-ground (fF)")
        ->capture_default_str();
    cmd->add_option("--ct2", cap_opts.ct2, "Differential transmon pad-to-pad (fF)")
        ->capture_default_str();
    cmd->add_option("--cf1", cap_opts.cf1, "Fluxonium pad-to-ground (fF)")->capture_default_str();
    cmd->add_option("--cf2", cap_opts.cf2, "Fluxonium pad-to-pad (fF)")->capture_default_str();
    cmd->add_option("--cc", cap_opts.cc, "Fluxonium-transmon coupling capacitance (fF)")
        ->capture_default_str();
    cmd->add_option("--scan-cc-from", cap_opts.scan_from, "Scan c_c from (fF)");
    cmd->add_option("--scan-cc-to", cap_opts.scan_to, "Scan c_c to (fF)");
    cmd->add_option("--scan-cc-points", cap_opts.scan_points, "Scan c_c point count");
  }

  // ---- chevron -----------------------------------------------------------
  struct {
    std::string config;
    std::string transition = "102";
    double flux_c = 0.575;
    double freq_span = 0.06;
    int freq_points = 11;
    double width_from = 20.0, width_to = 180.0;
    int width_points = 9;
    double amplitude = 0.0;
    double init_error = 0.0;
  } chev_opts;
  {
    auto* cmd = app.add_subcommand("chevron", "Driven population map vs frequency and duration");
    cmd->add_option("--config", chev_opts.config)->required();
    cmd->add_option("--transition", chev_opts.transition, "Target label: 201, 111 or 102")
        ->capture_default_str();
    cmd->add_option("--flux-c", chev_opts.flux_c)->capture_default_str();
    cmd->add_option("--freq-span", chev_opts.freq_span, "Frequency half-span around resonance (GHz)")
        ->capture_default_str();
    cmd->add_option("--freq-points", chev_opts.freq_points)->capture_default_str();
    cmd->add_option("--width-from", chev_opts.width_from)->capture_default_str();
    cmd->add_option("--width-to", chev_opts.width_to)->capture_default_str();
    cmd->add_option("--width-points", chev_opts.width_points)->capture_default_str();
    cmd->add_option("--amplitude", chev_opts.amplitude,
                    "Drive amplitude (GHz); 0 picks a full-period amplitude at the center width")
        ->capture_default_str();
    cmd->add_option("--init-error", chev_opts.init_error,
                    "Population prepared in |001> instead of |101>")
        ->capture_default_str();
  }

  // ---- calibrate-cz ------------------------------------------------------
  struct {
    std::string config;
    std::string transition = "102";
    double flux_c = 0.575;
    double width_ns = 85.0;
    int rounds = 3;
  } cal_opts;
  {
    auto* cmd = app.add_subcommand("calibrate-cz", "Automated CZ calibration loop");
    cmd->add_option("--config", cal_opts.config)->required();
    cmd->add_option("--transition", cal_opts.transition)->capture_default_str();
    cmd->add_option("--flux-c", cal_opts.flux_c)->capture_default_str();
    cmd->add_option("--width-ns", cal_opts.width_ns)->capture_default_str();
    cmd->add_option("--rounds", cal_opts.rounds)->capture_default_str();
  }

  // ---- error-budget ------------------------------------------------------
  struct {
    double gate_ns = 85.0;
    double t1_alpha_us = 10.0;
    double t1_us = 500.0;
    double tphi_us = 200.0;
  } err_opts;
  {
    auto* cmd = app.add_subcommand("error-budget", "Analytic fidelity estimates");
    cmd->add_option("--gate-ns", err_opts.gate_ns)->capture_default_str();
    cmd->add_option("--t1-alpha-us", err_opts.t1_alpha_us)->capture_default_str();
    cmd->add_option("--t1-us", err_opts.t1_us)->capture_default_str();
    cmd->add_option("--tphi-us", err_opts.tphi_us)->capture_default_str();
  }

  // ---- rb ----------------------------------------------------------------
  struct {
    std::string config;
    int qubits = 1;
    double p_depol = 0.995;
    std::string lengths = "2,10,30,60,100,160,240";
    int randomizations = 20;
    int shots = 0;
  } rb_opts;
  {
    auto* cmd = app.add_subcommand("rb", "Simulated randomized benchmarking");
    cmd->add_option("--config", rb_opts.config, "Device config recorded in metadata");
    cmd->add_option("--qubits", rb_opts.qubits)->check(CLI::Range(1, 2))->capture_default_str();
    cmd->add_option("--p-depol", rb_opts.p_depol, "Per-Clifford depolarizing parameter")
        ->capture_default_str();
    cmd->add_option("--lengths", rb_opts.lengths)->capture_default_str();
    cmd->add_option("--randomizations", rb_opts.randomizations)->capture_default_str();
    cmd->add_option("--shots", rb_opts.shots, "Shots per sequence (0: exact probabilities)")
        ->capture_default_str();
  }

  // ---- irb ---------------------------------------------------------------
  struct {
    std::string config;
    double t1_alpha_us = 10.0;
    double gate_ns = 85.0;
    std::string lengths = "2,20,50,100,160,240,330";
    int randomizations = 20;
  } irb_opts;
  {
    auto* cmd = app.add_subcommand("irb", "Interleaved RB of a CZ with the leakage channel");
    cmd->add_option("--config", irb_opts.config, "Device config recorded in metadata");
    cmd->add_option("--t1-alpha-us", irb_opts.t1_alpha_us)->capture_default_str();
    cmd->add_option("--gate-ns", irb_opts.gate_ns)->capture_default_str();
    cmd->add_option("--lengths", irb_opts.lengths)->capture_default_str();
    cmd->add_option("--randomizations", irb_opts.randomizations)->capture_default_str();
  }

  // Global options may appear after the subcommand name.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("ftf-sim");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (common.threads > 0) par::set_threads(common.threads);

    if (app.got_subcommand("spectrum")) {
      std::uint64_t hash = 0;
      DeviceSpec d = load_device(spectrum_opts.config, &hash);
      if (spectrum_opts.flux_set) d = with_coupler_flux(d, spectrum_opts.flux_c);
      if (spectrum_opts.uncoupled) d.j_1c = d.j_2c = d.j_12 = 0.0;
      const LabeledSpectrum spec = diagonalize_and_label(d);

      SweepTable table("spectrum", {"label", "energy_ghz", "overlap", "eigenindex"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("flux_c_phi0", format_double(d.transmon.phi_ext / constants::two_pi));
      for (const StateLabel& s : default_tracked_labels()) {
        table.add_row({s.str(), spec.energy(s), spec.overlaps.at(s),
                       static_cast<long long>(spec.labels.at(s))});
      }
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("zz-flux")) {
      std::uint64_t hash = 0;
      const DeviceSpec d = load_device(zzflux_opts.config, &hash);
      const std::vector<double> flux = linspace(zzflux_opts.from, zzflux_opts.to,
                                                zzflux_opts.points);
      std::vector<double> zeta(flux.size());
      par::map_indices(
          static_cast<std::ptrdiff_t>(flux.size()),
          [&](std::ptrdiff_t i) { zeta[i] = zz_exact_khz(with_coupler_flux(d, flux[i])); },
          common.mode());

      SweepTable table("zz-flux", {"phi_ext_c_phi0", "zeta_khz"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      for (size_t i = 0; i < flux.size(); ++i) table.add_row({flux[i], zeta[i]});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("zz-landscape")) {
      std::uint64_t hash = 0;
      DeviceSpec d = with_coupler_flux(load_device(land_opts.config, &hash), land_opts.flux_c);
      const auto jc = linspace(land_opts.jc_from, land_opts.jc_to, land_opts.jc_points);
      const auto j12 = linspace(land_opts.j12_from, land_opts.j12_to, land_opts.j12_points);
      const ZzLandscape land = zz_landscape(d, jc, j12, common.mode());

      SweepTable table("zz-landscape",
                       {"j_c_ghz", "j_12_ghz", "zeta_khz", "is_column_min", "j12_parabola_ghz"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("zeta2_per_ghz", format_double(land.coefficients.zeta2_per_ghz));
      table.meta("zeta3_per_ghz2", format_double(land.coefficients.zeta3_per_ghz2));
      table.meta("zeta4_per_ghz3", format_double(land.coefficients.zeta4_per_ghz3));
      for (size_t i = 0; i < jc.size(); ++i)
        for (size_t j = 0; j < j12.size(); ++j)
          table.add_row({jc[i], j12[j], land.zeta_khz(i, j),
                         static_cast<long long>(land.min_j12[i] == j12[j] ? 1 : 0),
                         land.parabola_j12[i]});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("zz-pt")) {
      std::uint64_t hash = 0;
      DeviceSpec d = with_coupler_flux(load_device(zzpt_opts.config, &hash), zzpt_opts.flux_c);
      const ZetaExpansion pt = zz_perturbative(d, zzpt_opts.order);

      SweepTable table("zz-pt",
                       {"order2_khz", "order3_khz", "order4_khz", "pt_total_khz", "exact_khz",
                        "zeta2_per_ghz", "zeta3_per_ghz2", "zeta4_per_ghz3", "optimal_ratio_ghz",
                        "flagged_intermediates"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.add_row({pt.per_order_khz[0], pt.per_order_khz[1], pt.per_order_khz[2],
                     pt.perturbative_total_khz(), pt.zeta_exact_khz.value_or(0.0),
                     pt.coefficients.zeta2_per_ghz, pt.coefficients.zeta3_per_ghz2,
                     pt.coefficients.zeta4_per_ghz3,
                     -2.0 * pt.coefficients.zeta2_per_ghz / pt.coefficients.zeta3_per_ghz2,
                     static_cast<long long>(pt.flagged.size())});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("capnet")) {
      CapacitanceNetwork net =
          cap_opts.topology == "grounded"
              ? CapacitanceNetwork::grounded(cap_opts.ct, cap_opts.cf1, cap_opts.cf2, cap_opts.cc)
              : CapacitanceNetwork::differential(cap_opts.ct1, cap_opts.ct2, cap_opts.cf1,
                                                 cap_opts.cf2, cap_opts.cc);
      SweepTable table("capnet", {"c_c_ff", "j_1c_ghz", "j_2c_ghz", "j_12_ghz",
                                  "ratio_exact_ghz", "ratio_leading_ghz"});
      table.meta("seed", std::to_string(common.seed));
      table.meta("topology", cap_opts.topology);
      if (cap_opts.scan_points > 0) {
        const auto grid = linspace(cap_opts.scan_from, cap_opts.scan_to, cap_opts.scan_points);
        const CcScanResult scan = cc_insensitivity_scan(net, grid);
        table.meta("ratio_relative_span", format_double(scan.ratio_relative_span));
        table.meta("j_c_relative_span", format_double(scan.j_c_relative_span));
        for (size_t i = 0; i < grid.size(); ++i) {
          CapacitanceNetwork n = net;
          n.c_c = grid[i];
          const CouplingExtraction e = coupling_from_capacitance(n);
          table.add_row({grid[i], e.j_1c_ghz, e.j_2c_ghz, e.j_12_ghz, e.ratio_ghz,
                         ratio_leading_order_ghz(n)});
        }
      } else {
        const CouplingExtraction e = coupling_from_capacitance(net);
        table.add_row({net.c_c, e.j_1c_ghz, e.j_2c_ghz, e.j_12_ghz, e.ratio_ghz,
                       ratio_leading_order_ghz(net)});
      }
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("chevron")) {
      std::uint64_t hash = 0;
      DeviceSpec d = with_coupler_flux(load_device(chev_opts.config, &hash), chev_opts.flux_c);
      const GateModel model = build_gate_model(d);
      const StateLabel target = parse_state_label(chev_opts.transition);
      const double f0 = model.energy(target) - model.energy({1, 0, 1});

      double amp = chev_opts.amplitude;
      const double width_mid = 0.5 * (chev_opts.width_from + chev_opts.width_to);
      if (amp <= 0.0) {
        const double m = std::abs(model.n1(model.position(target), model.position({1, 0, 1}))) +
                         std::abs(model.n2(model.position(target), model.position({1, 0, 1})));
        amp = 2.0 / (m * width_mid);
      }

      ChevronOptions copt;
      copt.initialization_error = chev_opts.init_error;
      copt.mode = common.mode();
      const auto freq = linspace(f0 - chev_opts.freq_span, f0 + chev_opts.freq_span,
                                 chev_opts.freq_points);
      const auto widths = linspace(chev_opts.width_from, chev_opts.width_to,
                                   chev_opts.width_points);
      const ChevronResult res =
          chevron_scan(model, PulseEnvelope::cosine(width_mid, amp), freq, widths, copt);

      SweepTable table("chevron", {"freq_ghz", "width_ns", "p_leave"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("transition", chev_opts.transition);
      table.meta("amplitude_ghz", format_double(amp));
      for (size_t i = 0; i < freq.size(); ++i)
        for (size_t j = 0; j < widths.size(); ++j)
          table.add_row({freq[i], widths[j], res.p_leave(i, j)});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("calibrate-cz")) {
      std::uint64_t hash = 0;
      DeviceSpec d = with_coupler_flux(load_device(cal_opts.config, &hash), cal_opts.flux_c);
      const GateModel model = build_gate_model(d);
      CalibrateOptions copt;
      copt.rounds = cal_opts.rounds;
      const CZCalibration cal =
          calibrate_cz(model, parse_state_label(cal_opts.transition), cal_opts.width_ns, copt);

      SweepTable table("calibrate-cz",
                       {"drive_freq_ghz", "amplitude_ghz", "relative_phase_rad", "theta_z1_rad",
                        "theta_z2_rad", "residual_leakage", "phase_error_rad"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("transition", cal_opts.transition);
      table.meta("width_ns", format_double(cal_opts.width_ns));
      table.add_row({cal.drive_freq_ghz, cal.amplitude_ghz, cal.relative_phase_rad,
                     cal.theta_z1_rad, cal.theta_z2_rad, cal.residual_leakage,
                     cal.phase_error_rad});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("error-budget")) {
      SweepTable table("error-budget", {"quantity", "value", "unit"});
      table.meta("seed", std::to_string(common.seed));
      const auto leak = leakage_relaxation_fidelity(err_opts.gate_ns, err_opts.t1_alpha_us);
      table.add_row({std::string("leakage_relaxation_fidelity"), leak.fidelity, std::string("")});
      table.add_row({std::string("leakage_regime_warning"),
                     static_cast<long long>(leak.regime_warning ? 1 : 0), std::string("")});
      const double deg = 180.0 / constants::pi;
      table.add_row({std::string("phase_tolerance_99.9"),
                     phase_error_tolerance_rad(0.999) * deg, std::string("deg")});
      table.add_row({std::string("phase_tolerance_99.99"),
                     phase_error_tolerance_rad(0.9999) * deg, std::string("deg")});
      table.add_row({std::string("frequency_tolerance_99.9"),
                     frequency_tolerance_mhz(0.999, err_opts.gate_ns), std::string("MHz")});
      table.add_row({std::string("frequency_tolerance_99.99"),
                     frequency_tolerance_mhz(0.9999, err_opts.gate_ns), std::string("MHz")});
      table.add_row({std::string("amplitude_tolerance_99.9"),
                     amplitude_error_tolerance_rad(0.999) * deg, std::string("deg")});
      table.add_row({std::string("amplitude_tolerance_99.99"),
                     amplitude_error_tolerance_rad(0.9999) * deg, std::string("deg")});
      table.add_row({std::string("coherence_limit_two_qubit"),
                     coherence_limit(err_opts.gate_ns, err_opts.t1_us, err_opts.tphi_us, 2),
                     std::string("")});
      table.add_row({std::string("coherence_limit_single_qubit"),
                     coherence_limit(err_opts.gate_ns, err_opts.t1_us, err_opts.tphi_us, 1),
                     std::string("")});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("rb")) {
      std::uint64_t hash = 0;
      if (!rb_opts.config.empty()) load_device(rb_opts.config, &hash);
      const CliffordGroup group = CliffordGroup::build(rb_opts.qubits);
      RbOptions opt;
      opt.lengths = parse_int_list(rb_opts.lengths);
      opt.randomizations = rb_opts.randomizations;
      opt.seed = common.seed;
      opt.shots = rb_opts.shots;
      opt.per_clifford_noise = NoiseChannel::depolarizing(group.dim(), rb_opts.p_depol);
      const RBResult res = simulate_rb(group, opt);

      SweepTable table("rb", {"length", "mean_survival", "sem"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("p_depol", format_double(rb_opts.p_depol));
      table.meta("group_size", static_cast<std::uint64_t>(group.size()));
      table.meta("avg_single_qubit_gates", format_double(group.average_single_qubit_gates()));
      table.meta("avg_cz_gates", format_double(group.average_cz_gates()));
      table.meta("fit_a", format_double(res.fit.a));
      table.meta("fit_p", format_double(res.fit.p));
      table.meta("fit_b", format_double(res.fit.b));
      table.meta("fit_sigma_p", format_double(res.fit.sigma_p));
      table.meta("f_clifford", format_double(res.f_clifford));
      table.meta("f_per_gate", format_double(res.f_per_gate));
      for (const RbPoint& p : res.points)
        table.add_row({static_cast<long long>(p.length), p.mean, p.sem});
      common.sink.write(table);
      return 0;
    }

    if (app.got_subcommand("irb")) {
      std::uint64_t hash = 0;
      if (!irb_opts.config.empty()) load_device(irb_opts.config, &hash);
      const CliffordGroup group = CliffordGroup::build(2);
      RbOptions ref;
      ref.lengths = parse_int_list(irb_opts.lengths);
      ref.randomizations = irb_opts.randomizations;
      ref.seed = common.seed;
      const RBResult res_ref = simulate_rb(group, ref);

      RbOptions inter = ref;
      inter.interleave_cz = true;
      inter.interleaved_noise =
          NoiseChannel::leakage(irb_opts.gate_ns * 1e-3 / irb_opts.t1_alpha_us);
      const RBResult res_int = simulate_rb(group, inter);
      const InterleavedFidelity f = interleaved_gate_fidelity(res_ref.fit, res_int.fit, 4);

      SweepTable table("irb", {"length", "ref_mean", "ref_sem", "int_mean", "int_sem"});
      table.meta("config_hash", hash);
      table.meta("seed", std::to_string(common.seed));
      table.meta("t1_alpha_us", format_double(irb_opts.t1_alpha_us));
      table.meta("gate_ns", format_double(irb_opts.gate_ns));
      table.meta("p_ref", format_double(res_ref.fit.p));
      table.meta("p_int", format_double(res_int.fit.p));
      table.meta("f_cz", format_double(f.f_cz));
      table.meta("f_cz_sigma", format_double(f.sigma));
      for (size_t i = 0; i < res_ref.points.size(); ++i)
        table.add_row({static_cast<long long>(res_ref.points[i].length), res_ref.points[i].mean,
                       res_ref.points[i].sem, res_int.points[i].mean, res_int.points[i].sem});
      common.sink.write(table);
      return 0;
    }

    throw Error("cli", "no subcommand dispatched");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: cli: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ftf

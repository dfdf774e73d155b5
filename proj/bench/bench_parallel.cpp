// Compares the serial reference path against the OpenMP path on the
// data-parallel kernels: the ZZ flux sweep, the ZZ landscape grid and a
// chevron map. Results must agree bitwise; the speedup column is the point.
#include <chrono>
#include <cstdio>

#include "ftf/composite.hpp"
#include "ftf/config.hpp"
#include "ftf/constants.hpp"
#include "ftf/parallel.hpp"
#include "ftf/pulse.hpp"
#include "ftf/zz.hpp"

using namespace ftf;
using clk = std::chrono::high_resolution_clock;

namespace {

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

std::vector<double> flux_sweep(const DeviceSpec& base, int points, par::Mode mode) {
  std::vector<double> zeta(points);
  par::map_indices(
      points,
      [&](std::ptrdiff_t i) {
        DeviceSpec d = base;
        d.transmon.phi_ext = constants::two_pi * (0.5 + 0.5 * i / (points - 1));
        zeta[i] = zz_exact_khz(d);
      },
      mode);
  return zeta;
}

}  // namespace

int main() {
  const DeviceSpec device = parse_device_config("device_a");
  std::printf("threads available: %d\n\n", par::max_threads());
  std::printf("%-24s %10s %10s %8s %s\n", "kernel", "serial", "parallel", "speedup", "match");

  {
    auto t0 = clk::now();
    const auto serial = flux_sweep(device, 21, par::Mode::serial);
    const double ts = seconds_since(t0);
    t0 = clk::now();
    const auto parallel = flux_sweep(device, 21, par::Mode::parallel);
    const double tp = seconds_since(t0);
    const bool match = serial == parallel;
    std::printf("%-24s %9.2fs %9.2fs %7.2fx %s\n", "zz flux sweep (21 pts)", ts, tp, ts / tp,
                match ? "bitwise" : "MISMATCH");
  }

  {
    const std::vector<double> jc = {0.2, 0.4, 0.6, 0.8};
    std::vector<double> j12(7);
    for (int i = 0; i < 7; ++i) j12[i] = 0.05 * i;
    auto t0 = clk::now();
    const ZzLandscape serial = zz_landscape(device, jc, j12, par::Mode::serial);
    const double ts = seconds_since(t0);
    t0 = clk::now();
    const ZzLandscape parallel = zz_landscape(device, jc, j12, par::Mode::parallel);
    const double tp = seconds_since(t0);
    const bool match = (serial.zeta_khz - parallel.zeta_khz).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-24s %9.2fs %9.2fs %7.2fx %s\n", "zz landscape (4x7)", ts, tp, ts / tp,
                match ? "bitwise" : "MISMATCH");
  }

  {
    DeviceSpec d = device;
    d.transmon.phi_ext = constants::two_pi * 0.575;
    const GateModel model = build_gate_model(d);
    const double f0 = model.energy({1, 0, 2}) - model.energy({1, 0, 1});
    std::vector<double> freq(5), widths(4);
    for (int i = 0; i < 5; ++i) freq[i] = f0 - 0.02 + 0.01 * i;
    for (int i = 0; i < 4; ++i) widths[i] = 30.0 + 25.0 * i;
    const PulseEnvelope env = PulseEnvelope::cosine(60.0, 0.06);

    ChevronOptions opt;
    opt.mode = par::Mode::serial;
    auto t0 = clk::now();
    const ChevronResult serial = chevron_scan(model, env, freq, widths, opt);
    const double ts = seconds_since(t0);
    opt.mode = par::Mode::parallel;
    t0 = clk::now();
    const ChevronResult parallel = chevron_scan(model, env, freq, widths, opt);
    const double tp = seconds_since(t0);
    const bool match = (serial.p_leave - parallel.p_leave).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-24s %9.2fs %9.2fs %7.2fx %s\n", "chevron map (5x4)", ts, tp, ts / tp,
                match ? "bitwise" : "MISMATCH");
  }
  return 0;
}

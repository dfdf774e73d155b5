#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ftf/composite.hpp"
#include "ftf/parallel.hpp"

namespace ftf {

// Expansion coefficients of the static ZZ rate in the coupling strengths,
// zeta ~ J12^2 zeta2 + J12 Jc^2 zeta3 + Jc^4 zeta4 with Jc = J1c = J2c.
// They depend only on the uncoupled mode spectra.
struct ZetaCoefficients {
  double zeta2_per_ghz = 0.0;   // GHz^-1
  double zeta3_per_ghz2 = 0.0;  // GHz^-2
  double zeta4_per_ghz3 = 0.0;  // GHz^-3

  // J12 on the minimum-zeta parabola for a given Jc.
  double parabola_j12(double j_c) const {
    return -j_c * j_c * zeta3_per_ghz2 / (2.0 * zeta2_per_ghz);
  }
};

// Intermediate state excluded from a perturbative sum because its detuning
// from the corrected state fell below the degeneracy guard.
struct DegenerateIntermediate {
  StateLabel state;         // the computational state being corrected
  StateLabel intermediate;  // the near-degenerate virtual state
  double detuning_ghz = 0.0;
  double coupling_ghz = 0.0;  // |V_nk|
};

struct ZetaExpansion {
  std::optional<double> zeta_exact_khz;
  std::array<double, 3> per_order_khz{};  // orders 2, 3, 4
  int max_order = 4;
  ZetaCoefficients coefficients;
  std::vector<DegenerateIntermediate> flagged;

  double perturbative_total_khz() const {
    double t = 0.0;
    for (int m = 2; m <= max_order; ++m) t += per_order_khz[m - 2];
    return t;
  }
};

struct ZzOptions {
  double degeneracy_guard_ghz = 1e-3;  // 1 MHz
  bool compute_exact = true;
};

// Signed static ZZ rate from labeled eigenenergies,
// zeta = E(101) - E(100) - E(001) + E(000), in kHz.
double zz_exact_khz(const DeviceSpec& device);

// Rayleigh-Schrodinger corrections to the four computational-state energies
// with the coupling terms as the perturbation, combined into zeta per order.
ZetaExpansion zz_perturbative(const DeviceSpec& device, int max_order,
                              const ZzOptions& options = {});

// Per-order sums are exact monomials in the couplings; the coefficients are
// read off at unit couplings rather than fit over a grid.
ZetaCoefficients fit_zeta_coefficients(const DeviceSpec& device);

struct ZzLandscape {
  std::vector<double> j_c;   // GHz
  std::vector<double> j_12;  // GHz
  Eigen::MatrixXd zeta_khz;  // rows: j_c index, cols: j_12 index
  std::vector<double> min_j12;       // per-column (fixed j_c) argmin of |zeta|
  std::vector<double> parabola_j12;  // perturbative minimum curve
  ZetaCoefficients coefficients;
};

ZzLandscape zz_landscape(const DeviceSpec& device, const std::vector<double>& jc_grid,
                         const std::vector<double>& j12_grid,
                         par::Mode mode = par::Mode::parallel);

}  // namespace ftf

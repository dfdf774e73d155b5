#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ftf {

enum class TransmonTopology { grounded, differential };

// Lumped capacitance model of the FTF circuit: each fluxonium has two pads
// with c_f1 to ground and c_f2 between them; the pad nearest the transmon
// couples through c_c. A grounded transmon is a single island with c_t to
// ground; a differential transmon has two pads (c_t1 to ground each, c_t2
// between them), one facing each fluxonium.
struct CapacitanceNetwork {
  TransmonTopology topology = TransmonTopology::grounded;
  double c_f1 = 0.0;  // fF
  double c_f2 = 0.0;
  double c_c = 0.0;
  double c_t = 0.0;   // grounded transmon island capacitance
  double c_t1 = 0.0;  // differential transmon pad-to-ground
  double c_t2 = 0.0;  // differential transmon pad-to-pad

  static CapacitanceNetwork grounded(double c_t, double c_f1, double c_f2, double c_c);
  static CapacitanceNetwork differential(double c_t1, double c_t2, double c_f1, double c_f2,
                                         double c_c);
};

struct CouplingExtraction {
  double j_1c_ghz = 0.0;
  double j_2c_ghz = 0.0;
  double j_12_ghz = 0.0;
  double ratio_ghz = 0.0;  // exact J_c^2 / J_12
  // The sum coordinates carry no potential, so their charges are conserved
  // and they can be discarded. Numerically this is the statement that the
  // retained block of the inverse equals the inverse of the Schur-reduced
  // capacitance matrix; this field holds the relative deviation.
  double sum_mode_reduction_error = 0.0;
};

// Builds the full capacitance matrix, applies the sum/difference transform,
// and reads couplings off the inverse: J_ij = 4 e^2 C^-1[i, j] / h.
CouplingExtraction coupling_from_capacitance(const CapacitanceNetwork& net);

// Leading-order coupling ratio 4 e^2 / (h c_t) (grounded) or
// 4 e^2 / (h c_t2) (differential).
double ratio_leading_order_ghz(const CapacitanceNetwork& net);

struct CcScanResult {
  std::vector<double> c_c;           // fF
  std::vector<double> ratio_ghz;     // exact ratio per grid point
  std::vector<double> j_1c_ghz;      // for comparing relative spans
  double ratio_relative_span = 0.0;  // (max-min)/mean of the ratio
  double j_c_relative_span = 0.0;
};

CcScanResult cc_insensitivity_scan(const CapacitanceNetwork& net, const std::vector<double>& c_c_grid);

}  // namespace ftf

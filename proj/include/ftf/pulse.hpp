#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "ftf/composite.hpp"
#include "ftf/parallel.hpp"

namespace ftf {

// Drive envelope. I(t) and Q(t) are dimensionless shapes on [0, width]; the
// physical drive on line i is
//   amplitude_ghz * a_i * [I(t) cos(w t + phi_i) - Q(t) sin(w t + phi_i)]
// as a coefficient of the line's charge operator.
struct PulseEnvelope {
  enum class Kind { cosine, drag, interpolated_iq };
  Kind kind = Kind::cosine;
  double width_ns = 0.0;
  double amplitude_ghz = 0.0;
  double drag_coefficient = 0.0;  // Q = coeff * dI/dt * width / (2 pi)
  std::vector<std::pair<double, double>> iq_points;  // 6 evenly spaced (I, Q)

  static PulseEnvelope cosine(double width_ns, double amplitude_ghz);
  static PulseEnvelope drag(double width_ns, double amplitude_ghz, double coefficient);
  static PulseEnvelope interpolated(double width_ns, double amplitude_ghz,
                                    std::vector<std::pair<double, double>> points);

  // (I, Q) at time t; cubic interpolation through the control points for
  // the interpolated kind.
  std::pair<double, double> iq(double t_ns) const;
};

// Phase-locked drive pair applied to the two fluxonium charge lines.
struct DriveLinePair {
  double a1 = 1.0;  // relative line amplitudes (dimensionless weights)
  double a2 = 1.0;
  double phi1 = 0.0;  // rad
  double phi2 = 0.0;
  double carrier_ghz = 0.0;
  // Path-length dispersion k(x2 - x1) expressed as phase per carrier GHz,
  // added to line 2.
  double dispersion_rad_per_ghz = 0.0;
};

struct GateModelOptions {
  LabelOptions labels;
  // Propagation subspace: eigenstates with energy below
  // E(101) + photon_margin * drive frequency estimate + extra_margin_ghz.
  double photon_margin = 3.2;
  double extra_margin_ghz = 0.5;
};

// Coupled eigenbasis restricted to the propagation subspace, with the
// embedded fluxonium charge operators. Built once per device/flux point and
// reused across pulse evaluations.
struct GateModel {
  LabeledSpectrum spectrum;  // full labeling at the device flux
  Eigen::VectorXd energies;  // propagation subspace (GHz)
  Eigen::MatrixXcd n1, n2;   // drive operators in the subspace
  std::vector<int> eigen_index;           // subspace position -> eigenindex
  std::map<StateLabel, int> positions;    // tracked label -> subspace position
  std::vector<StateLabel> tracked;

  int position(const StateLabel& s) const;
  double energy(const StateLabel& s) const { return energies(position(s)); }
  int dim() const { return static_cast<int>(energies.size()); }
};

GateModel build_gate_model(const DeviceSpec& device, const GateModelOptions& options = {});

struct EvolveOptions {
  enum class Columns { tracked, computational, full };
  double samples_per_period = 64.0;  // time steps per carrier period (>= 40)
  Columns columns = Columns::tracked;
  bool richardson_check = false;  // repeat at dt/2 and compare
};

// Propagator restricted to the propagation subspace, expressed in the
// interaction frame of the static Hamiltonian (static phases removed).
struct Propagator {
  Eigen::MatrixXcd u;        // subspace rows x propagated columns
  std::vector<int> columns;  // subspace positions of the propagated columns
  double width_ns = 0.0;

  // Column index for a subspace position; -1 if it was not propagated.
  int column_of(int position) const;
};

Propagator evolve(const GateModel& model, const DriveLinePair& drives,
                  const PulseEnvelope& envelope, const EvolveOptions& options = {});

// 1 - sum_s |<s|U|s>|^2 over the four computational states.
double calibration_leakage(const GateModel& model, const Propagator& prop);

// arg<11|U|11> - arg<10|U|10> - arg<01|U|01> + arg<00|U|00>, wrapped to
// (-pi, pi]. Errors if any computational diagonal amplitude falls below 0.5.
double conditional_phase(const GateModel& model, const Propagator& prop);

struct ChevronOptions {
  double initialization_error = 0.0;  // population prepared in |001> instead of |101>
  DriveLinePair drives;               // template; the carrier is set per grid point
  EvolveOptions evolve;
  par::Mode mode = par::Mode::parallel;
};

struct ChevronResult {
  std::vector<double> freq_ghz;
  std::vector<double> width_ns;
  Eigen::MatrixXd p_leave;  // rows: frequency, cols: width
};

// P(leave |101>) as a function of drive frequency and pulse duration.
ChevronResult chevron_scan(const GateModel& model, const PulseEnvelope& envelope_shape,
                           const std::vector<double>& freq_ghz,
                           const std::vector<double>& widths_ns,
                           const ChevronOptions& options = {});

struct CZCalibration {
  double drive_freq_ghz = 0.0;
  double amplitude_ghz = 0.0;
  double relative_phase_rad = 0.0;
  double theta_z1_rad = 0.0;  // virtual-Z corrections
  double theta_z2_rad = 0.0;
  double residual_leakage = 0.0;
  double phase_error_rad = 0.0;  // conditional phase - pi, wrapped
};

struct CalibrateOptions {
  int rounds = 3;  // amplitude/frequency alternations
  double freq_bracket_ghz = 0.030;
  double samples_per_period = 64.0;
  // aligned: relative phase chosen for constructive interference at the
  // target transition; fixed: use the value below.
  bool align_phase = true;
  double fixed_relative_phase_rad = 0.0;
};

CZCalibration calibrate_cz(const GateModel& model, const StateLabel& target, double width_ns,
                           const CalibrateOptions& options = {});

struct InterferenceSetting {
  double relative_phase_rad = 0.0;  // phi2 - phi1
  double amplitude_ratio = 0.0;     // A2 / A1
};

// Relative phase and amplitude that null the total drive matrix element of
// the given transition.
InterferenceSetting interference_setting(const GateModel& model, const StateLabel& from,
                                         const StateLabel& to, double dispersion_rad_per_ghz);

}  // namespace ftf

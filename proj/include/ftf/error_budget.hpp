#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ftf {

// Average state fidelity of a Kraus process against an ideal unitary on the
// projected computational subspace:
//   F = [Tr(sum M_k^dag M_k) + sum |Tr M_k|^2] / (n(n+1)),  M_k = P U0^dag G_k P
// with n the subspace dimension.
double kraus_average_fidelity(const std::vector<Eigen::MatrixXcd>& kraus,
                              const Eigen::MatrixXcd& ideal_unitary,
                              const Eigen::MatrixXcd& projector, int subspace_dim);

// Kraus set on {00, 01, 10, 11, alpha} for the driven non-computational
// state and |11> decaying into each other at equal rates over a time
// t = x * T1_alpha.
std::vector<Eigen::MatrixXcd> leakage_kraus_set(double t_over_t1);

// Ideal CZ on the computational subspace, optionally embedded in the
// five-state space with identity on alpha.
Eigen::MatrixXcd cz_unitary(int dim = 4);
Eigen::MatrixXcd computational_projector(int dim);

// Full-period Rabi unitary on {.., 11, alpha} with rotation angle
// omega_t = Omega * t (2 pi for a perfect gate).
Eigen::MatrixXcd rabi_unitary(double omega_t);

struct LeakageFidelity {
  double fidelity = 1.0;
  bool regime_warning = false;  // t_g / T1_alpha > 0.1
};

// F ~= 1 - t_g / (8 T1_alpha)
LeakageFidelity leakage_relaxation_fidelity(double t_gate_ns, double t1_alpha_us);

// Conditional-phase miscalibration: F = (7 + 3 cos dphi)/10.
double phase_error_fidelity(double dphi_rad);
double phase_error_fidelity_small_angle(double dphi_rad);  // 1 - (3/20) dphi^2

// Phase error tolerated at a target fidelity, and the drive-frequency
// detuning that produces it over one gate (dphi = pi * delta * t_g).
double phase_error_tolerance_rad(double target_fidelity);
double frequency_tolerance_mhz(double target_fidelity, double t_gate_ns);

// Amplitude miscalibration dtheta = Omega t_g - 2 pi:
// F = (6 + 3 cos(dtheta/2) + cos^2(dtheta/2))/10.
double amplitude_error_fidelity(double dtheta_rad);
double amplitude_error_fidelity_small_angle(double dtheta_rad);  // 1 - dtheta^2/16
double amplitude_error_tolerance_rad(double target_fidelity);

// Computational-subspace coherence limit.
double coherence_limit(double t_gate_ns, double t1_us, double t_phi_us, int n_qubits);

}  // namespace ftf

#include "ftf/error_budget.hpp"

#include <cmath>
#include <complex>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"

namespace ftf {

namespace {
constexpr const char* kModule = "error-budget";
using Eigen::MatrixXcd;
using std::complex;
}  // namespace

double kraus_average_fidelity(const std::vector<MatrixXcd>& kraus, const MatrixXcd& ideal_unitary,
                              const MatrixXcd& projector, int subspace_dim) {
  if (kraus.empty()) throw Error(kModule, "empty Kraus set");
  const long dim = kraus.front().rows();
  MatrixXcd norm_check = MatrixXcd::Zero(dim, dim);
  for (const auto& g : kraus) norm_check += g.adjoint() * g;
  if ((norm_check - MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(kModule, "Kraus set is not normalized: sum G_k^dag G_k != I");

  const double n = subspace_dim;
  double trace_mm = 0.0;
  double trace_sq = 0.0;
  for (const auto& g : kraus) {
    const MatrixXcd m = projector * ideal_unitary.adjoint() * g * projector;
    trace_mm += (m.adjoint() * m).trace().real();
    trace_sq += std::norm(m.trace());
  }
  return (trace_mm + trace_sq) / (n * (n + 1.0));
}

std::vector<MatrixXcd> leakage_kraus_set(double t_over_t1) {
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
  return {g0, g1, g2, g3};
}

MatrixXcd cz_unitary(int dim) {
  if (dim != 4 && dim != 5) throw Error(kModule, "cz_unitary expects dim 4 or 5");
  MatrixXcd u = MatrixXcd::Identity(dim, dim);
  u(3, 3) = -1.0;
  return u;
}

MatrixXcd computational_projector(int dim) {
  if (dim < 4) throw Error(kModule, "projector needs dim >= 4");
  MatrixXcd p = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < 4; ++i) p(i, i) = 1.0;
  return p;
}

MatrixXcd rabi_unitary(double omega_t) {
  MatrixXcd u = MatrixXcd::Identity(5, 5);
  const double c = std::cos(0.5 * omega_t);
  const double s = std::sin(0.5 * omega_t);
  u(3, 3) = c;
  u(4, 4) = c;
  u(3, 4) = complex<double>(0.0, -s);
  u(4, 3) = complex<double>(0.0, -s);
  return u;
}

LeakageFidelity leakage_relaxation_fidelity(double t_gate_ns, double t1_alpha_us) {
  if (t_gate_ns <= 0 || t1_alpha_us <= 0) throw Error(kModule, "times must be > 0");
  const double x = t_gate_ns * 1e-3 / t1_alpha_us;
  LeakageFidelity out;
  out.fidelity = 1.0 - x / 8.0;
  out.regime_warning = x > 0.1;
  return out;
}

double phase_error_fidelity(double dphi_rad) { return (7.0 + 3.0 * std::cos(dphi_rad)) / 10.0; }

double phase_error_fidelity_small_angle(double dphi_rad) {
  return 1.0 - 0.15 * dphi_rad * dphi_rad;
}

double phase_error_tolerance_rad(double target_fidelity) {
  const double c = (10.0 * target_fidelity - 7.0) / 3.0;
  if (c < -1.0 || c > 1.0) throw Error(kModule, "target fidelity out of range for phase error");
  return std::acos(c);
}

double frequency_tolerance_mhz(double target_fidelity, double t_gate_ns) {
  if (t_gate_ns <= 0) throw Error(kModule, "gate time must be > 0");
  const double dphi = phase_error_tolerance_rad(target_fidelity);
  // dphi = pi * delta * t_g with delta in ordinary frequency.
  const double delta_ghz = dphi / (constants::pi * t_gate_ns);
  return delta_ghz * 1e3;
}

double amplitude_error_fidelity(double dtheta_rad) {
  const double c = std::cos(0.5 * dtheta_rad);
  return (6.0 + 3.0 * c + c * c) / 10.0;
}

double amplitude_error_fidelity_small_angle(double dtheta_rad) {
  return 1.0 - dtheta_rad * dtheta_rad / 16.0;
}

double amplitude_error_tolerance_rad(double target_fidelity) {
  // Invert (6 + 3c + c^2)/10 = F for c = cos(dtheta/2).
  const double disc = 9.0 - 4.0 * (6.0 - 10.0 * target_fidelity);
  if (disc < 0) throw Error(kModule, "target fidelity out of range for amplitude error");
  const double c = 0.5 * (-3.0 + std::sqrt(disc));
  if (c < -1.0 || c > 1.0) throw Error(kModule, "target fidelity out of range for amplitude error");
  return 2.0 * std::acos(c);
}

double coherence_limit(double t_gate_ns, double t1_us, double t_phi_us, int n_qubits) {
  if (t_gate_ns < 0 || t1_us <= 0 || t_phi_us <= 0) throw Error(kModule, "invalid times");
  if (n_qubits != 1 && n_qubits != 2) throw Error(kModule, "n_qubits must be 1 or 2");
  const double rate = 1.0 / t1_us + 1.0 / t_phi_us;  // 1/us
  const double t_us = t_gate_ns * 1e-3;
  const double factor = (n_qubits == 1) ? 1.0 / 3.0 : 4.0 / 5.0;
  return 1.0 - factor * t_us * rate;
}

}  // namespace ftf

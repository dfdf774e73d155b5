#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ftf {

// Fluxonium: 4 E_C n^2 + (1/2) E_L phi^2 - E_J cos(phi - phi_ext).
// Energies are in GHz (E/h); phi_ext is a phase in radians
// (phi_ext = 2*pi*Phi_ext/Phi_0).
struct FluxoniumParams {
  double e_c = 0.0;
  double e_l = 0.0;
  double e_j = 0.0;
  double phi_ext = 0.0;
  int basis_size = 120;  // oscillator levels retained in the working basis
};

// Tunable transmon: 4 E_C n^2 - E_J1 cos(phi) - E_J2 cos(phi - phi_ext),
// diagonalized in the charge basis n = -charge_cutoff .. +charge_cutoff.
struct TransmonParams {
  double e_c = 0.0;
  double e_j1 = 0.0;
  double e_j2 = 0.0;
  double phi_ext = 0.0;
  int charge_cutoff = 30;
};

// Single-mode spectrum with operator matrix elements in the mode eigenbasis.
// The ground-state energy is pinned to 0 so composite assembly can sum
// excitation energies directly.
struct ModeSpectrum {
  Eigen::VectorXd energies;     // ascending, energies[0] == 0
  Eigen::MatrixXcd n_matrix;    // <j|n|k>, Hermitian
  Eigen::MatrixXcd phi_matrix;  // <j|phi|k>, Hermitian
  int levels_kept = 0;
};

ModeSpectrum build_fluxonium_mode(const FluxoniumParams& params, int levels_kept);
ModeSpectrum build_transmon_mode(const TransmonParams& params, int levels_kept);

// <j|n|k> with bounds checking; conjugate-symmetric by construction.
std::complex<double> charge_matrix_element(const ModeSpectrum& mode, int j, int k);

}  // namespace ftf

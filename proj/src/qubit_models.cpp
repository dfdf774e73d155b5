#include "ftf/qubit_models.hpp"

#include <cmath>
#include <vector>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "qubit-models";

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::complex;

// <m|exp(i lambda (a + a^dag))|n> in the harmonic-oscillator basis.
// Closed form via generalized Laguerre polynomials; exact infinite-basis
// matrix elements truncated to dim x dim.
MatrixXcd displacement_matrix(double lambda, int dim) {
  const double x = lambda * lambda;
  MatrixXcd u(dim, dim);
  // Laguerre recurrence along n for each superdiagonal alpha = m - n.
  for (int alpha = 0; alpha < dim; ++alpha) {
    double lk1 = 0.0;           // L_{n-1}^{(alpha)}(x)
    double lk = 1.0;            // L_n^{(alpha)}(x), starting at n = 0
    for (int n = 0; n + alpha < dim; ++n) {
      const int m = n + alpha;
      if (n > 0) {
        const double next = ((2.0 * (n - 1) + 1.0 + alpha - x) * lk - (n - 1.0 + alpha) * lk1) / n;
        lk1 = lk;
        lk = next;
      }
      const double logpref =
          -0.5 * x + 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) + alpha * std::log(lambda);
      const double mag = std::exp(logpref) * lk;
      // (i)^alpha phase factor
      complex<double> phase;
      switch (alpha % 4) {
        case 0: phase = {1.0, 0.0}; break;
        case 1: phase = {0.0, 1.0}; break;
        case 2: phase = {-1.0, 0.0}; break;
        default: phase = {0.0, -1.0}; break;
      }
      u(m, n) = phase * mag;
      u(n, m) = u(m, n);  // complex symmetric
    }
  }
  return u;
}

// Deterministic eigenvector gauge that is also smooth along parameter
// sweeps. The ground state is fixed by its largest-magnitude component
// (unique for a nodeless state); each higher level is then fixed by
// requiring <k|n|k+1> real positive. Adjacent-level charge elements do not
// vanish for these circuits, so the chain is stable where an
// argmax-component convention flips under parity ties.
void fix_eigenvector_phases(MatrixXcd& v, const MatrixXcd& n_op) {
  auto rotate = [&](int col, complex<double> z) {
    const double a = std::abs(z);
    if (a > 0) v.col(col) *= std::conj(z) / a;
  };
  int imax = 0;
  v.col(0).cwiseAbs().maxCoeff(&imax);
  rotate(0, v(imax, 0));
  for (int k = 0; k + 1 < v.cols(); ++k) {
    const complex<double> el = v.col(k).dot(n_op * v.col(k + 1));
    if (std::abs(el) > 1e-10) {
      rotate(k + 1, el);
    } else {
      v.col(k + 1).cwiseAbs().maxCoeff(&imax);
      rotate(k + 1, v(imax, k + 1));
    }
  }
}

struct Diagonalized {
  VectorXd energies;  // ground pinned to 0, all levels of the working basis
  MatrixXcd vectors;
};

Diagonalized diagonalize(const MatrixXcd& h, const MatrixXcd& n_op) {
  Diagonalized out;
  const double imag_norm = h.imag().cwiseAbs().maxCoeff();
  const double real_norm = h.real().cwiseAbs().maxCoeff();
  if (imag_norm <= 1e-13 * std::max(1.0, real_norm)) {
    // Sweet-spot Hamiltonians are real; the real solver is faster.
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) throw Error(kModule, "eigensolver failed to converge");
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors().cast<complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw Error(kModule, "eigensolver failed to converge");
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  out.energies.array() -= out.energies(0);
  fix_eigenvector_phases(out.vectors, n_op);
  return out;
}

MatrixXcd fluxonium_hamiltonian(const FluxoniumParams& p, int dim) {
  const double omega = std::sqrt(8.0 * p.e_c * p.e_l);
  const double phi_zpf = std::pow(2.0 * p.e_c / p.e_l, 0.25);
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) h(n, n) = omega * n;
  const MatrixXcd u = displacement_matrix(phi_zpf, dim);
  const complex<double> w = std::polar(1.0, -p.phi_ext);
  // cos(phi - phi_ext) = (e^{-i phi_ext} U + e^{+i phi_ext} U^dag)/2
  h -= 0.5 * p.e_j * (w * u + std::conj(w) * u.adjoint());
  return h;
}

VectorXd eigenvalues_only(const MatrixXcd& h, int levels) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(kModule, "eigensolver failed to converge");
  VectorXd e = solver.eigenvalues().head(levels);
  e.array() -= e(0);
  return e;
}

MatrixXcd transmon_hamiltonian(const TransmonParams& p, int cutoff) {
  const int dim = 2 * cutoff + 1;
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  const complex<double> hop = -0.5 * (p.e_j1 + p.e_j2 * std::polar(1.0, -p.phi_ext));
  for (int i = 0; i < dim; ++i) {
    const double n = i - cutoff;
    h(i, i) = 4.0 * p.e_c * n * n;
    if (i + 1 < dim) {
      h(i + 1, i) = hop;
      h(i, i + 1) = std::conj(hop);
    }
  }
  return h;
}

void check_convergence(const VectorXd& kept, const VectorXd& refined, const char* what) {
  const double shift = (kept - refined).cwiseAbs().maxCoeff();
  if (shift > 1e-6) {
    throw Error(kModule, std::string("non-convergent spectrum: ") + what +
                             " shifts kept levels by " + std::to_string(shift) + " GHz");
  }
}

}  // namespace

ModeSpectrum build_fluxonium_mode(const FluxoniumParams& params, int levels_kept) {
  if (params.e_c <= 0.0) throw Error(kModule, "fluxonium e_c must be > 0");
  if (params.e_l <= 0.0) throw Error(kModule, "fluxonium e_l must be > 0");
  if (params.e_j < 0.0) throw Error(kModule, "fluxonium e_j must be >= 0");
  if (params.basis_size < 20) throw Error(kModule, "fluxonium basis_size must be >= 20");
  if (levels_kept < 1) throw Error(kModule, "levels_kept must be >= 1");
  if (levels_kept > params.basis_size / 3)
    throw Error(kModule, "levels_kept exceeds basis_size/3 truncation safety margin");

  const int dim = params.basis_size;
  const double phi_zpf = std::pow(2.0 * params.e_c / params.e_l, 0.25);
  const double n_zpf = std::pow(params.e_l / (32.0 * params.e_c), 0.25);
  MatrixXcd n_op = MatrixXcd::Zero(dim, dim);
  MatrixXcd phi_op = MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const double r = std::sqrt(n + 1.0);
    n_op(n + 1, n) = complex<double>(0.0, n_zpf * r);   // i n_zpf a^dag
    n_op(n, n + 1) = complex<double>(0.0, -n_zpf * r);  // -i n_zpf a
    phi_op(n + 1, n) = phi_zpf * r;
    phi_op(n, n + 1) = phi_zpf * r;
  }

  Diagonalized d = diagonalize(fluxonium_hamiltonian(params, dim), n_op);

  // Refine with a 25% larger basis; kept levels must be stable.
  const int dim_up = dim + (dim + 3) / 4;
  check_convergence(d.energies.head(levels_kept),
                    eigenvalues_only(fluxonium_hamiltonian(params, dim_up), levels_kept),
                    "basis_size +25%");

  const MatrixXcd v = d.vectors.leftCols(levels_kept);
  ModeSpectrum out;
  out.energies = d.energies.head(levels_kept);
  out.n_matrix = v.adjoint() * n_op * v;
  out.phi_matrix = v.adjoint() * phi_op * v;
  out.levels_kept = levels_kept;
  return out;
}

ModeSpectrum build_transmon_mode(const TransmonParams& params, int levels_kept) {
  if (params.e_c <= 0.0) throw Error(kModule, "transmon e_c must be > 0");
  if (params.e_j1 < 0.0 || params.e_j2 < 0.0) throw Error(kModule, "transmon e_j1, e_j2 must be >= 0");
  if (params.charge_cutoff < 15) throw Error(kModule, "transmon charge_cutoff must be >= 15");
  if (levels_kept < 1) throw Error(kModule, "levels_kept must be >= 1");
  if (levels_kept > params.charge_cutoff)
    throw Error(kModule, "levels_kept exceeds charge_cutoff");

  const int cutoff = params.charge_cutoff;
  const int dim = 2 * cutoff + 1;
  MatrixXcd n_op = MatrixXcd::Zero(dim, dim);
  MatrixXcd phi_op = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    n_op(i, i) = static_cast<double>(i - cutoff);
    for (int j = 0; j < dim; ++j) {
      if (i == j) continue;
      const int k = i - j;
      // Matrix elements of the phase variable on (-pi, pi].
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      phi_op(i, j) = complex<double>(0.0, sign / k);
    }
  }

  Diagonalized d = diagonalize(transmon_hamiltonian(params, cutoff), n_op);

  const int cutoff_up = cutoff + (cutoff + 3) / 4;
  check_convergence(d.energies.head(levels_kept),
                    eigenvalues_only(transmon_hamiltonian(params, cutoff_up), levels_kept),
                    "charge_cutoff +25%");

  const MatrixXcd v = d.vectors.leftCols(levels_kept);
  ModeSpectrum out;
  out.energies = d.energies.head(levels_kept);
  out.n_matrix = v.adjoint() * n_op * v;
  out.phi_matrix = v.adjoint() * phi_op * v;
  out.levels_kept = levels_kept;
  return out;
}

std::complex<double> charge_matrix_element(const ModeSpectrum& mode, int j, int k) {
  if (j < 0 || k < 0 || j >= mode.levels_kept || k >= mode.levels_kept)
    throw Error(kModule, "charge matrix element index out of range");
  return mode.n_matrix(j, k);
}

}  // namespace ftf

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ftf {

// Physical gates of the microwave gate set {I, +-X, +-Y, +-X/2, +-Y/2} plus
// CZ for two qubits.
struct Gate {
  enum class Kind { i, x, y, x_half, x_half_neg, y_half, y_half_neg, cz };
  Kind kind = Kind::i;
  int qubit = 0;  // ignored for cz

  std::string str() const;
};

Eigen::Matrix2cd gate_unitary_1q(Gate::Kind kind);

struct CliffordElement {
  Eigen::MatrixXcd unitary;
  std::vector<Gate> word;  // temporal order; unitary = product right-to-left
  int cz_count = 0;
  int single_qubit_gates = 0;
};

// Clifford group with a gate decomposition per element. Single-qubit
// decompositions are minimal words over the gate set; two-qubit elements
// use the class construction (single-qubit class, CNOT-like, iSWAP-like,
// SWAP-like) with CZ counts {0, 1, 2, 3}.
class CliffordGroup {
 public:
  static CliffordGroup build(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return n_qubits_ == 1 ? 2 : 4; }
  int size() const { return static_cast<int>(elements_.size()); }
  const CliffordElement& element(int i) const { return elements_.at(i); }

  // Index of the group element equal to u up to global phase; -1 if the
  // matrix is not a group member.
  int find(const Eigen::MatrixXcd& u) const;
  // Index of the inverse of u (u must be a group member up to phase).
  int inverse_index(const Eigen::MatrixXcd& u) const;

  double average_single_qubit_gates() const { return avg_singles_; }
  double average_cz_gates() const { return avg_cz_; }

 private:
  int n_qubits_ = 1;
  std::vector<CliffordElement> elements_;
  std::unordered_map<std::string, int> lookup_;
  double avg_singles_ = 0.0;
  double avg_cz_ = 0.0;

  void finalize();
};

// Kraus channel acting on the simulation space. The dimension may exceed
// the computational dimension (leakage levels); gates are embedded with
// identity on the extra levels.
struct NoiseChannel {
  std::vector<Eigen::MatrixXcd> kraus;

  long dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
  bool trace_preserving(double tol = 1e-10) const;

  static NoiseChannel depolarizing(int dim, double p);
  // Driven-state relaxation channel on {00, 01, 10, 11, alpha}: |11> and
  // |alpha> decay into each other at equal rates over t = x * T1_alpha.
  static NoiseChannel leakage(double t_over_t1);
};

struct RbOptions {
  std::vector<int> lengths;
  int randomizations = 20;
  std::uint64_t seed = 0;
  int shots = 0;  // 0: exact survival probabilities
  std::optional<NoiseChannel> per_clifford_noise;
  bool interleave_cz = false;
  std::optional<NoiseChannel> interleaved_noise;
};

struct RbPoint {
  int length = 0;
  double mean = 0.0;
  double sem = 0.0;
};

struct RbFit {
  double a = 0.0, p = 0.0, b = 0.0;
  double sigma_a = 0.0, sigma_p = 0.0, sigma_b = 0.0;
  double rms_residual = 0.0;
};

struct RBResult {
  std::vector<RbPoint> points;
  RbFit fit;
  int d = 2;  // computational Hilbert-space dimension
  double f_clifford = 0.0;
  double f_clifford_sigma = 0.0;
  // Per physical gate, using the decomposition-table average (1.875 for one
  // qubit).
  double f_per_gate = 0.0;
};

RBResult simulate_rb(const CliffordGroup& group, const RbOptions& options);

// Nonlinear least squares for p0(m) = A p^m + B. Standard errors follow
// from the weighted normal equations with the reported sems taken as
// absolute uncertainties (unweighted with residual scaling if sems are 0).
RbFit fit_rb(const std::vector<RbPoint>& points);

double clifford_fidelity(double p, int d);

struct InterleavedFidelity {
  double f_cz = 0.0;
  double sigma = 0.0;
};

InterleavedFidelity interleaved_gate_fidelity(const RbFit& reference, const RbFit& interleaved,
                                              int d);

}  // namespace ftf

#include "ftf/capnet.hpp"

#include <cmath>

#include "ftf/constants.hpp"
#include "ftf/errors.hpp"

namespace ftf {

namespace {

constexpr const char* kModule = "capnet";

using Eigen::MatrixXd;

// fF -> GHz for an inverse-capacitance entry: 4 e^2 / (h C).
double coupling_ghz_from_inverse_ff(double inv_ff) {
  return constants::four_e2_over_h * inv_ff * 1e15 / 1e9;
}

MatrixXd grounded_capacitance_matrix(const CapacitanceNetwork& n) {
  const double cf = n.c_f1 + n.c_f2;
  MatrixXd c(5, 5);
  c << cf, -n.c_f2, 0, 0, 0,
      -n.c_f2, cf + n.c_c, -n.c_c, 0, 0,
      0, -n.c_c, n.c_t + 2 * n.c_c, 0, -n.c_c,
      0, 0, 0, cf, -n.c_f2,
      0, 0, -n.c_c, -n.c_f2, cf + n.c_c;
  return c;
}

MatrixXd differential_capacitance_matrix(const CapacitanceNetwork& n) {
  const double cf = n.c_f1 + n.c_f2;
  const double ct = n.c_t1 + n.c_t2;
  MatrixXd c(6, 6);
  c << cf, -n.c_f2, 0, 0, 0, 0,
      -n.c_f2, cf + n.c_c, -n.c_c, 0, 0, 0,
      0, -n.c_c, ct + n.c_c, -n.c_t2, 0, 0,
      0, 0, -n.c_t2, ct + n.c_c, 0, -n.c_c,
      0, 0, 0, 0, cf, -n.c_f2,
      0, 0, 0, -n.c_c, -n.c_f2, cf + n.c_c;
  return c;
}

// Sum/difference transform for the differential qubits; identity on
// grounded nodes.
MatrixXd transform_matrix(TransmonTopology topology) {
  if (topology == TransmonTopology::grounded) {
    MatrixXd m = MatrixXd::Zero(5, 5);
    m(0, 0) = 1; m(0, 1) = 1;
    m(1, 0) = 1; m(1, 1) = -1;
    m(2, 2) = 1;
    m(3, 3) = 1; m(3, 4) = 1;
    m(4, 3) = 1; m(4, 4) = -1;
    return m;
  }
  MatrixXd m = MatrixXd::Zero(6, 6);
  m(0, 0) = 1; m(0, 1) = 1;
  m(1, 0) = 1; m(1, 1) = -1;
  m(2, 2) = 1; m(2, 3) = 1;
  m(3, 2) = 1; m(3, 3) = -1;
  m(4, 4) = 1; m(4, 5) = 1;
  m(5, 4) = 1; m(5, 5) = -1;
  return m;
}

void validate(const CapacitanceNetwork& n) {
  const bool grounded = n.topology == TransmonTopology::grounded;
  if (n.c_f1 <= 0 || n.c_f2 <= 0 || n.c_c <= 0)
    throw Error(kModule, "all capacitances must be > 0");
  if (grounded && n.c_t <= 0) throw Error(kModule, "grounded topology needs c_t > 0");
  if (!grounded && (n.c_t1 <= 0 || n.c_t2 <= 0))
    throw Error(kModule, "differential topology needs c_t1, c_t2 > 0");
}

}  // namespace

CapacitanceNetwork CapacitanceNetwork::grounded(double c_t, double c_f1, double c_f2, double c_c) {
  CapacitanceNetwork n;
  n.topology = TransmonTopology::grounded;
  n.c_t = c_t;
  n.c_f1 = c_f1;
  n.c_f2 = c_f2;
  n.c_c = c_c;
  return n;
}

CapacitanceNetwork CapacitanceNetwork::differential(double c_t1, double c_t2, double c_f1,
                                                    double c_f2, double c_c) {
  CapacitanceNetwork n;
  n.topology = TransmonTopology::differential;
  n.c_t1 = c_t1;
  n.c_t2 = c_t2;
  n.c_f1 = c_f1;
  n.c_f2 = c_f2;
  n.c_c = c_c;
  return n;
}

CouplingExtraction coupling_from_capacitance(const CapacitanceNetwork& net) {
  validate(net);
  const bool grounded = net.topology == TransmonTopology::grounded;
  const MatrixXd c =
      grounded ? grounded_capacitance_matrix(net) : differential_capacitance_matrix(net);
  const MatrixXd m = transform_matrix(net.topology);

  // C~ = (M^T)^-1 C M^-1, couplings from C~^-1 = M C^-1 M^T.
  Eigen::FullPivLU<MatrixXd> lu(c);
  if (!lu.isInvertible()) throw Error(kModule, "singular capacitance matrix");
  const MatrixXd ctil = m.transpose().inverse() * c * m.inverse();
  const MatrixXd cinv = m * lu.inverse() * m.transpose();

  // Qubit nodes: difference coordinates of the fluxonia plus the transmon
  // node(s); counting from 0 these are 1, 2, 4 (grounded) or 1, 3, 5
  // (differential, transmon difference mode at 3).
  const int q1 = 1;
  const int qc = grounded ? 2 : 3;
  const int q2 = grounded ? 4 : 5;

  CouplingExtraction out;
  out.j_1c_ghz = coupling_ghz_from_inverse_ff(cinv(q1, qc));
  out.j_2c_ghz = coupling_ghz_from_inverse_ff(cinv(qc, q2));
  out.j_12_ghz = coupling_ghz_from_inverse_ff(cinv(q1, q2));
  out.ratio_ghz = coupling_ghz_from_inverse_ff(cinv(q1, qc) * cinv(q1, qc) / cinv(q1, q2));

  // Discarding the free sum modes is exact: the retained block of the
  // inverse must match the inverse of the Schur-reduced matrix.
  const std::vector<int> qubits = {q1, qc, q2};
  std::vector<int> sums;
  for (int i = 0; i < ctil.rows(); ++i)
    if (i != q1 && i != qc && i != q2) sums.push_back(i);
  const long nq = static_cast<long>(qubits.size());
  const long ns = static_cast<long>(sums.size());
  MatrixXd qq(nq, nq), qs(nq, ns), ss(ns, ns), inv_qq(nq, nq);
  for (long i = 0; i < nq; ++i) {
    for (long j = 0; j < nq; ++j) {
      qq(i, j) = ctil(qubits[i], qubits[j]);
      inv_qq(i, j) = cinv(qubits[i], qubits[j]);
    }
    for (long j = 0; j < ns; ++j) qs(i, j) = ctil(qubits[i], sums[j]);
  }
  for (long i = 0; i < ns; ++i)
    for (long j = 0; j < ns; ++j) ss(i, j) = ctil(sums[i], sums[j]);
  const MatrixXd schur = qq - qs * ss.inverse() * qs.transpose();
  out.sum_mode_reduction_error = (inv_qq.inverse() - schur).norm() / schur.norm();
  return out;
}

double ratio_leading_order_ghz(const CapacitanceNetwork& net) {
  validate(net);
  if (net.topology == TransmonTopology::grounded)
    return coupling_ghz_from_inverse_ff(1.0 / net.c_t);
  return coupling_ghz_from_inverse_ff(1.0 / net.c_t2);
}

CcScanResult cc_insensitivity_scan(const CapacitanceNetwork& net,
                                   const std::vector<double>& c_c_grid) {
  if (c_c_grid.empty()) throw Error(kModule, "empty c_c grid");
  CcScanResult out;
  out.c_c = c_c_grid;
  for (double cc : c_c_grid) {
    CapacitanceNetwork n = net;
    n.c_c = cc;
    const CouplingExtraction e = coupling_from_capacitance(n);
    out.ratio_ghz.push_back(e.ratio_ghz);
    out.j_1c_ghz.push_back(e.j_1c_ghz);
  }
  auto span = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0], mean = 0.0;
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      mean += x;
    }
    mean /= static_cast<double>(v.size());
    return (hi - lo) / std::abs(mean);
  };
  out.ratio_relative_span = span(out.ratio_ghz);
  out.j_c_relative_span = span(out.j_1c_ghz);
  return out;
}

}  // namespace ftf

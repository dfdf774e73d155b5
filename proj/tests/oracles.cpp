#include "oracles.hpp"

#include <cmath>

#include "ftf/config.hpp"
#include "ftf/constants.hpp"

namespace ftf::oracles {

namespace {

Eigen::VectorXd grid_once(const FluxoniumParams& p, double phi_max, int npts, int levels) {
  const double h = 2.0 * phi_max / (npts + 1);
  Eigen::VectorXd diag(npts), sub(npts - 1);
  for (int i = 0; i < npts; ++i) {
    const double phi = -phi_max + (i + 1) * h;
    diag(i) = 8.0 * p.e_c / (h * h) + 0.5 * p.e_l * phi * phi -
              p.e_j * std::cos(phi - p.phi_ext);
  }
  sub.setConstant(-4.0 * p.e_c / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().head(levels);
}

}  // namespace

Eigen::VectorXd fluxonium_grid_levels(const FluxoniumParams& params, int levels) {
  const double phi_max = 8.0 * constants::pi;
  const Eigen::VectorXd coarse = grid_once(params, phi_max, 4000, levels);
  const Eigen::VectorXd fine = grid_once(params, phi_max, 8000, levels);
  Eigen::VectorXd out = (4.0 * fine - coarse) / 3.0;
  out.array() -= out(0);
  return out;
}

NestedLoopPt nested_loop_pt(const Eigen::VectorXd& e0, const Eigen::MatrixXcd& v, int n,
                            double degeneracy_guard) {
  const int dim = static_cast<int>(e0.size());
  auto valid = [&](int k) { return k != n && std::abs(e0(n) - e0(k)) >= degeneracy_guard; };

  NestedLoopPt out;
  for (int k = 0; k < dim; ++k) {
    if (!valid(k)) continue;
    out.e2 += (v(n, k) * v(k, n)).real() / (e0(n) - e0(k));
  }
  for (int k1 = 0; k1 < dim; ++k1) {
    if (!valid(k1)) continue;
    for (int k2 = 0; k2 < dim; ++k2) {
      if (!valid(k2)) continue;
      out.e3 += (v(n, k1) * v(k1, k2) * v(k2, n)).real() /
                ((e0(n) - e0(k1)) * (e0(n) - e0(k2)));
    }
  }
  double chain = 0.0;
  for (int k1 = 0; k1 < dim; ++k1) {
    if (!valid(k1)) continue;
    for (int k2 = 0; k2 < dim; ++k2) {
      if (!valid(k2)) continue;
      std::complex<double> inner = 0.0;
      for (int k3 = 0; k3 < dim; ++k3) {
        if (!valid(k3)) continue;
        inner += v(k2, k3) * v(k3, n) / (e0(n) - e0(k3));
      }
      chain += (v(n, k1) * v(k1, k2) * inner).real() /
               ((e0(n) - e0(k1)) * (e0(n) - e0(k2)));
    }
  }
  double s2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    if (!valid(k)) continue;
    const double d = e0(n) - e0(k);
    s2 += std::norm(v(n, k)) / (d * d);
  }
  out.e4 = chain - out.e2 * s2;
  return out;
}

DeviceSpec device_a(double coupler_flux_phi0) {
  DeviceSpec d = parse_device_config("device_a");
  d.transmon.phi_ext = constants::two_pi * coupler_flux_phi0;
  return d;
}

DeviceSpec device_b(double coupler_flux_phi0) {
  DeviceSpec d = parse_device_config("device_b");
  d.transmon.phi_ext = constants::two_pi * coupler_flux_phi0;
  return d;
}

}  // namespace ftf::oracles

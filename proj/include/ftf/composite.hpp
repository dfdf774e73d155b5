#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "ftf/qubit_models.hpp"

namespace ftf {

// Full FTF parameter set: two fluxonia, one tunable transmon, three n.n
// couplings, and the per-mode truncation (k1, kc, k2) of the product basis.
struct DeviceSpec {
  FluxoniumParams fluxonium1;
  FluxoniumParams fluxonium2;
  TransmonParams transmon;
  double j_1c = 0.0;  // GHz, coefficient of n1*nc
  double j_2c = 0.0;
  double j_12 = 0.0;
  std::array<int, 3> levels{8, 6, 8};  // (k1, kc, k2)
};

// Product-state label |j k l> = |fluxonium1, coupler, fluxonium2>.
struct StateLabel {
  int j = 0;
  int k = 0;
  int l = 0;

  auto operator<=>(const StateLabel&) const = default;
  std::string str() const {
    return std::to_string(j) + std::to_string(k) + std::to_string(l);
  }
};

StateLabel parse_state_label(const std::string& s);

// The labels followed by default: computational states plus the
// non-computational manifold used by the gate.
const std::vector<StateLabel>& default_tracked_labels();

// Coupled Hamiltonian and embedded operators in the truncated product basis
// of single-mode eigenstates.
struct FtfOperators {
  Eigen::MatrixXcd hamiltonian;
  Eigen::MatrixXcd n1;  // embedded drive operators
  Eigen::MatrixXcd n2;
  Eigen::MatrixXcd nc;
  Eigen::VectorXd product_energies;  // uncoupled energies, same index order
  std::array<int, 3> levels{};
  int dim = 0;

  int index_of(const StateLabel& s) const {
    return (s.j * levels[1] + s.k) * levels[2] + s.l;
  }
  StateLabel label_of(int idx) const {
    const int l = idx % levels[2];
    idx /= levels[2];
    return StateLabel{idx / levels[1], idx % levels[1], l};
  }
};

FtfOperators assemble_ftf(const DeviceSpec& device);
FtfOperators assemble_from_modes(const ModeSpectrum& f1, const ModeSpectrum& coupler,
                                 const ModeSpectrum& f2, double j_1c, double j_2c, double j_12);

struct LabelOptions {
  enum class Mode { direct, tracked };
  Mode mode = Mode::tracked;
  double flux_step = 0.005;  // tracking step, units of Phi_0
  std::vector<StateLabel> tracked = default_tracked_labels();
};

struct LabelAmbiguity {
  StateLabel label;
  int eigenindex_a = 0;
  int eigenindex_b = 0;
  double overlap_gap = 0.0;
};

// Coupled-system eigenvalues with |jkl> labels attached by max overlap at the
// reference coupler flux (integer Phi_0) and carried to the target flux by
// eigenvector-continuity tracking.
struct LabeledSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd eigenvectors;  // columns, product-basis components
  std::map<StateLabel, int> labels;
  std::map<StateLabel, double> overlaps;  // |<product|eigen>|^2 at the device flux
  // Overlap at the flux where the label was attached (the reference point
  // for tracked labeling). States hybridize strongly away from the
  // reference, so the at-flux overlap can be small while the assignment
  // itself is unambiguous.
  std::map<StateLabel, double> assignment_overlaps;
  std::vector<LabelAmbiguity> ambiguities;

  int index(const StateLabel& s) const;
  double energy(const StateLabel& s) const { return energies(index(s)); }
};

LabeledSpectrum diagonalize_and_label(const DeviceSpec& device, const LabelOptions& options = {});

// Labeled spectra at several coupler fluxes (units of Phi_0). Tracked mode
// performs a single continuity walk through all requested points, which is
// much cheaper than labeling each point from the reference flux.
std::vector<LabeledSpectrum> diagonalize_and_label_sweep(const DeviceSpec& device,
                                                         const std::vector<double>& flux_phi0,
                                                         const LabelOptions& options = {});

double transition_frequency(const LabeledSpectrum& spec, const StateLabel& from,
                            const StateLabel& to);

}  // namespace ftf

#pragma once

#include <optional>

#include "gst/dataset.hpp"
#include "gst/design.hpp"

namespace gst {

// Measured probability tables of the LGST block.  Row index i runs over
// effective effects (POVM-major, then measurement fiducial, then outcome);
// column index j over effective preps (prep-major, then prep fiducial).
struct LgstIntermediates {
  Eigen::MatrixXd gram;                             // Itilde, N_f1 x N_f2
  std::vector<Eigen::MatrixXd> Pk;                  // per gate, N_f1 x N_f2
  std::vector<Eigen::VectorXd> R;                   // per native prep, N_f1
  std::vector<std::vector<Eigen::VectorXd>> Q;      // [povm][outcome], N_f2
  Eigen::MatrixXd Pi;                               // d^2 x N_f2 (rows orthonormal)
  Eigen::MatrixXd B0;                               // d^2 x d^2
};

/// Fills the probability side (gram, Pk, R, Q) from observed frequencies.
/// Throws with the list of absent circuits when the dataset is incomplete.
LgstIntermediates estimate_probabilities(const DataSet& dataset, const ExperimentDesign& design,
                                         const GateSet& target);

/// Sorted (descending) singular values of the measured Gram matrix.
Eigen::VectorXd gram_spectrum(const DataSet& dataset, const ExperimentDesign& design,
                              const GateSet& target);

struct LgstOptions {
  // Gram feasibility: d^2-th singular value must exceed
  // max(1e-6, noise_floor_factor / sqrt(N_min)).
  double noise_floor_factor = 5.0;
  double absolute_floor = 1e-6;
  // Gauge choice; defaults to the target's effective-prep matrix.
  std::optional<Eigen::MatrixXd> b0_override;
};

struct LgstResult {
  GateSet gateset;
  Eigen::VectorXd gram_singular_values;
  double b0_condition = 0;
  LgstIntermediates intermediates;
};

LgstResult run_lgst_full(const DataSet& dataset, const ExperimentDesign& design,
                         const GateSet& target, const LgstOptions& options = {});

GateSet run_lgst(const DataSet& dataset, const ExperimentDesign& design, const GateSet& target,
                 const LgstOptions& options = {});

}  // namespace gst

#pragma once

#include "gst/circuit.hpp"

namespace gst {

// Preparation fiducials F_k and measurement fiducials H_k.  The empty
// fragment is always a member of both lists (index 0): LGST's state and
// measurement tomography rows reuse the fiducial-pair circuits through it.
struct FiducialSet {
  std::vector<Fragment> prep_fiducials;
  std::vector<Fragment> meas_fiducials;
  double score = 0;  // d^2-th singular value of the target-model Gram matrix
};

/// Columns are the effective preps tau(F_f)|rho_r>>, enumerated with
/// j = r * N_F + f.
Eigen::MatrixXd effective_prep_matrix(const GateSet& gs, const std::vector<Fragment>& prep_fiducials);

/// Rows are the effective effects <<E^(m)_t| tau(H_h), enumerated POVM-major,
/// then fiducial, then outcome: i = offset(m) + h * N_E(m) + t.
Eigen::MatrixXd effective_effect_matrix(const GateSet& gs, const std::vector<Fragment>& meas_fiducials);

/// d^2-th singular value of the Gram matrix A B under the target model.
double fiducial_score(const GateSet& target, const std::vector<Fragment>& prep_fiducials,
                      const std::vector<Fragment>& meas_fiducials);

/// All gate-label sequences of depth 0..max_depth (the depth-0 empty fragment
/// first).
std::vector<Fragment> fiducial_candidates(const GateSet& gs, int max_depth = 3);

struct FiducialOptions {
  int min_count = 0;   // defaults to d^2
  int max_count = 6;
  double ic_threshold = 1e-6;
  int swap_rounds = 2;
};

/// Greedy add/swap search maximizing the smallest of the top d^2 singular
/// values, independently for preps and effects.  Throws InfoIncompleteError
/// when no informationally complete set exists among the candidates.
FiducialSet select_fiducials(const GateSet& target, const std::vector<Fragment>& candidates,
                             const FiducialOptions& options = {});

/// Validate a hand-chosen fiducial set (computes the score, throws if not IC).
FiducialSet make_fiducials(const GateSet& target, std::vector<Fragment> prep_fiducials,
                           std::vector<Fragment> meas_fiducials, double ic_threshold = 1e-6);

}  // namespace gst

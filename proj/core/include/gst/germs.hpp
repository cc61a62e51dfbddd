#pragma once

#include "gst/circuit.hpp"
#include "gst/parameterization.hpp"

namespace gst {

struct GermSet {
  std::vector<Fragment> germs;
  std::vector<int> amplified_ranks;  // per-germ twirled-Jacobian rank
  double score = 0;                  // Tr[(J^T J)^-1] / N_g on the non-gauge space
};

struct GermOptions {
  int candidate_depth = 6;
  double perturbation = 1e-4;     // radians per generator axis
  std::uint64_t seed = 12321;
  double eig_cluster_tol = 1e-8;  // eigenvalue clustering for the commutant
  double rank_rel_tol = 1e-6;     // singular values below this (relative) count as zero
};

/// Germ-selection model: every gate replaced by its closest unitary channel,
/// then perturbed by a small seeded random rotation to break accidental
/// degeneracies.
GateSet prepare_germ_model(const GateSet& target, const GermOptions& options = {});

/// The closest unitary channel (leading Choi eigenvector, unitarized).
TransferMatrix closest_unitary_transfer(const TransferMatrix& S, const HSBasis& basis);

/// The p->infinity twirled Jacobian Pi_tau(g)[d tau(g)/d theta], restricted to
/// the gate-sector parameters of `param`.  Rows are the d^4 entries of tau(g),
/// columns the gate parameters.  Expects a prepared (unitary) model; throws
/// when tau(g) is not invertible.
Eigen::MatrixXd twirled_germ_jacobian(const Fragment& germ, const GateSet& gateset,
                                      const Parameterization& param,
                                      const GermOptions& options = {});

/// Plain (untwirled) germ Jacobian d tau(g)/d theta over gate parameters.
Eigen::MatrixXd germ_jacobian(const Fragment& germ, const GateSet& gateset,
                              const Parameterization& param);

/// Basis of real matrices commuting with tau (columns are vectorized).
Eigen::MatrixXd commutant_basis(const TransferMatrix& tau, double rank_rel_tol = 1e-6);

struct AcReport {
  bool complete = false;
  int achieved_rank = 0;
  int required_rank = 0;  // gate-sector non-gauge parameter count
  std::vector<int> per_germ_rank;
};

/// Stacks twirled Jacobians, projects out gate-sector gauge directions, and
/// compares the rank against the amplifiable parameter count.
AcReport is_amplificationally_complete(const std::vector<Fragment>& germs, const GateSet& target,
                                       const Parameterization& param, const GermOptions& options = {});

/// All label sequences of depth 1..max_depth, deduplicated under cyclic
/// rotation and with powers of shorter fragments removed.
std::vector<Fragment> germ_candidates(const GateSet& gs, int max_depth = 6);

/// Greedy-plus-swap search for a small amplificationally complete germ set.
/// Every single gate is always included.  Throws InfoIncompleteError when no
/// AC set exists within the candidates.
GermSet select_germs(const GateSet& target, const std::vector<Fragment>& candidates,
                     const Parameterization& param, const GermOptions& options = {});

/// Tr[(J^T J)^-1] / N_g on the non-gauge space (infinite for incomplete sets).
double germ_set_score(const std::vector<Fragment>& germs, const GateSet& target,
                      const Parameterization& param, const GermOptions& options = {});

}  // namespace gst

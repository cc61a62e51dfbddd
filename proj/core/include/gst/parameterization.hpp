#pragma once

#include <string>
#include <vector>

#include "gst/gateset.hpp"

namespace gst {

// Offsets into the flat element vector of a gate set: preps first (d^2 each),
// then gates (d^4 each, column-major), then POVM effects (d^2 each).
struct ElementLayout {
  int d2 = 0;
  int n_preps = 0;
  int n_gates = 0;
  std::vector<int> effects_per_povm;

  static ElementLayout of(const GateSet& gs);

  int prep_offset(int i) const { return i * d2; }
  int gate_offset(int k) const { return n_preps * d2 + k * d2 * d2; }
  int effects_base() const { return n_preps * d2 + n_gates * d2 * d2; }
  int effect_offset(int m, int t) const;
  int total() const;
};

Eigen::VectorXd element_vector(const GateSet& gs);
GateSet gateset_from_elements(const GateSet& structure, const Eigen::VectorXd& elements);

enum class ParamKind { Full, TP, CPTPLindblad };

std::string to_string(ParamKind kind);
ParamKind param_kind_from_string(const std::string& s);

// Mapping W between a parameter vector and matrix space.
//
//   Full          every element of every operation is a parameter.
//   TP            gate first rows and prep first elements are fixed; the last
//                 effect of each POVM is the complement of the others, so the
//                 POVM sums to the identity superbra by construction.
//   CPTPLindblad  each gate is exp(xi) G0 for a Lindbladian error generator
//                 xi = sum_i alpha_i H_i + sum_jk beta_jk S_jk with
//                 beta = T T^dag built from a lower-triangular factor;
//                 SPAM is parameterized as in TP.
//
// Note the complement convention makes the effective TP/CPTP parameter count
// d^2 per POVM smaller than the unconstrained-effects counting formula.
class Parameterization {
 public:
  static Parameterization full(const GateSet& structure);
  static Parameterization tp(const GateSet& structure);
  static Parameterization cptp_lindblad(const GateSet& ideal_reference);

  ParamKind kind() const { return kind_; }
  int param_count() const { return param_count_; }
  const GateSet& reference() const { return reference_; }
  const ElementLayout& layout() const { return layout_; }

  Eigen::VectorXd to_vector(const GateSet& gs) const;
  GateSet from_vector(const Eigen::VectorXd& theta) const;

  /// Element-space Jacobian dW/dtheta (N_e x N_p) at theta.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const;

  /// Indices of parameters that belong to gate blocks (used by germ tools).
  std::vector<int> gate_parameter_indices() const;

 private:
  Parameterization() = default;

  Eigen::VectorXd gate_params_from_matrix(int k, const TransferMatrix& g) const;
  TransferMatrix gate_matrix_from_params(int k, const Eigen::VectorXd& gate_theta) const;

  ParamKind kind_ = ParamKind::Full;
  GateSet reference_;
  ElementLayout layout_;
  int param_count_ = 0;

  // Lindblad generator basis (shared by all gates): Hamiltonian generators
  // followed by the real combinations of the stochastic generators, matching
  // the per-gate parameter packing.
  std::vector<TransferMatrix> ham_generators_;
  std::vector<TransferMatrix> stoch_diag_;              // S_jj
  std::vector<TransferMatrix> stoch_re_, stoch_im_;     // j<k combinations
  int lindblad_m_ = 0;                                  // d^2 - 1
  int gate_param_size_ = 0;

  friend struct ParamAccess;
};

}  // namespace gst

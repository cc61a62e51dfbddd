#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gst/basis.hpp"

namespace gst {

// A gate set: state preparations (superkets), gates (transfer matrices, in a
// fixed label order), and POVMs (lists of superbras), all expressed in one
// Hilbert-Schmidt basis.  Instances are immutable once built and safe to
// share across threads.
class GateSet {
 public:
  GateSet() = default;
  explicit GateSet(HSBasis basis) : basis_(std::move(basis)) {}

  const HSBasis& basis() const { return basis_; }
  int dim() const { return basis_.size(); }  // d^2

  void add_prep(SuperKet rho);
  void add_gate(const std::string& label, TransferMatrix g);
  void add_povm(std::vector<SuperBra> effects);

  int num_preps() const { return static_cast<int>(preps_.size()); }
  int num_gates() const { return static_cast<int>(gates_.size()); }
  int num_povms() const { return static_cast<int>(povms_.size()); }
  int num_effects(int m) const { return static_cast<int>(povms_[m].size()); }

  const SuperKet& prep(int i) const { return preps_[i]; }
  const TransferMatrix& gate(int k) const { return gates_[k]; }
  const TransferMatrix& gate(const std::string& label) const;
  const std::string& gate_label(int k) const { return labels_[k]; }
  const std::vector<std::string>& gate_labels() const { return labels_; }
  bool has_gate(const std::string& label) const;
  int gate_index(const std::string& label) const;  // -1 if absent
  const std::vector<SuperBra>& povm(int m) const { return povms_[m]; }

  SuperKet& prep(int i) { return preps_[i]; }
  TransferMatrix& gate(int k) { return gates_[k]; }
  std::vector<SuperBra>& povm(int m) { return povms_[m]; }

  /// Max deviation of each POVM's effect sum from the identity superbra.
  double povm_completeness_error() const;

  std::string to_json(std::optional<std::string> parameterization_kind = std::nullopt) const;
  static GateSet from_json(const std::string& text);

  std::uint64_t content_hash() const;

 private:
  HSBasis basis_;
  std::vector<SuperKet> preps_;
  std::vector<std::string> labels_;
  std::vector<TransferMatrix> gates_;
  std::vector<std::vector<SuperBra>> povms_;
};

struct GaugeElement {
  TransferMatrix matrix;
  std::optional<TransferMatrix> generator;  // matrix = exp(generator) when set

  static GaugeElement from_generator(const TransferMatrix& K);
  static GaugeElement identity(int n);
};

/// E -> E M^-1, rho -> M rho, G -> M G M^-1.  Throws on singular M.
GateSet apply_gauge(const GateSet& gateset, const TransferMatrix& M);
GateSet apply_gauge(const GateSet& gateset, const GaugeElement& gauge);

/// The standard 1-qubit target: Gi = 1l, Gx = X(pi/2), Gy = Y(pi/2),
/// |0> preparation and the {|0><0|, |1><1|} measurement.
GateSet standard_xyi_gateset();

}  // namespace gst

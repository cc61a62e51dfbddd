#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gst {

// States and effects live in the real d^2-dimensional Hilbert-Schmidt space;
// superoperators are real d^2 x d^2 matrices acting on it.
using SuperKet = Eigen::VectorXd;
using SuperBra = Eigen::RowVectorXd;
using TransferMatrix = Eigen::MatrixXd;
using ChoiMatrix = Eigen::MatrixXcd;

// Orthonormal Hermitian basis {B_i} with B_0 = 1l/sqrt(d) and Tr(B_i) = 0 for
// i > 0.  Element order is fixed: lexicographic over n-fold Pauli labels
// (II..I, II..X, ...), and serialization refers to it by name ("pp").
class HSBasis {
 public:
  HSBasis() = default;
  HSBasis(int dim_hilbert, std::vector<Eigen::MatrixXcd> elements, std::vector<std::string> labels);

  int dim() const { return dim_; }              // Hilbert-space dimension d
  int size() const { return static_cast<int>(elements_.size()); }  // d^2
  const Eigen::MatrixXcd& element(int i) const { return elements_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& name() const { return name_; }

  // Hermitian matrix <-> real Hilbert-Schmidt vector.
  SuperKet to_superket(const Eigen::MatrixXcd& op) const;
  Eigen::MatrixXcd from_superket(const SuperKet& v) const;

  // Superbra of the identity operator; effects of a complete POVM sum to it.
  SuperBra identity_superbra() const;
  SuperKet maximally_mixed() const;

 private:
  int dim_ = 0;
  std::vector<Eigen::MatrixXcd> elements_;
  std::vector<std::string> labels_;
  std::string name_ = "pp";
};

/// Normalized Pauli-product basis on n qubits (4^n elements).
HSBasis pauli_basis(int n_qubits);

}  // namespace gst

#include "gst/basis.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <stdexcept>

#include "gst/util.hpp"

namespace gst {

HSBasis::HSBasis(int dim_hilbert, std::vector<Eigen::MatrixXcd> elements,
                 std::vector<std::string> labels)
    : dim_(dim_hilbert), elements_(std::move(elements)), labels_(std::move(labels)) {
  const int n = static_cast<int>(elements_.size());
  if (n != dim_ * dim_) throw std::invalid_argument("HSBasis: need d^2 elements");
  for (int i = 0; i < n; ++i) {
    if ((elements_[i] - elements_[i].adjoint()).norm() > tol::structural)
      throw std::invalid_argument("HSBasis: element " + std::to_string(i) + " not Hermitian");
    for (int j = i; j < n; ++j) {
      double overlap = (elements_[i].adjoint() * elements_[j]).trace().real();
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(overlap - want) > tol::structural)
        throw std::invalid_argument("HSBasis: elements not orthonormal");
    }
    double tr = std::abs(elements_[i].trace());
    if (i == 0) {
      if (std::abs(tr - std::sqrt(static_cast<double>(dim_))) > tol::structural)
        throw std::invalid_argument("HSBasis: element 0 must be 1l/sqrt(d)");
    } else if (tr > tol::structural) {
      throw std::invalid_argument("HSBasis: element " + std::to_string(i) + " not traceless");
    }
  }
}

SuperKet HSBasis::to_superket(const Eigen::MatrixXcd& op) const {
  SuperKet v(size());
  for (int i = 0; i < size(); ++i) {
    std::complex<double> c = (elements_[i].adjoint() * op).trace();
    v[i] = c.real();
  }
  return v;
}

Eigen::MatrixXcd HSBasis::from_superket(const SuperKet& v) const {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < size(); ++i) op += v[i] * elements_[i];
  return op;
}

SuperBra HSBasis::identity_superbra() const {
  SuperBra b = SuperBra::Zero(size());
  b[0] = std::sqrt(static_cast<double>(dim_));
  return b;
}

SuperKet HSBasis::maximally_mixed() const {
  SuperKet v = SuperKet::Zero(size());
  v[0] = 1.0 / std::sqrt(static_cast<double>(dim_));
  return v;
}

HSBasis pauli_basis(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("pauli_basis: n_qubits must be >= 1");

  using Eigen::Matrix2cd;
  const std::complex<double> I(0, 1);
  Matrix2cd sI = Matrix2cd::Identity();
  Matrix2cd sX = Matrix2cd::Zero(), sY = Matrix2cd::Zero(), sZ = Matrix2cd::Zero();
  sX(0, 1) = 1;
  sX(1, 0) = 1;
  sY(0, 1) = -I;
  sY(1, 0) = I;
  sZ(0, 0) = 1;
  sZ(1, 1) = -1;

  const Matrix2cd singles[4] = {sI, sX, sY, sZ};
  const char single_labels[4] = {'I', 'X', 'Y', 'Z'};

  std::vector<Eigen::MatrixXcd> elements;
  std::vector<std::string> labels;
  elements.emplace_back(Eigen::MatrixXcd::Identity(1, 1));
  labels.emplace_back("");
  for (int q = 0; q < n_qubits; ++q) {
    std::vector<Eigen::MatrixXcd> next;
    std::vector<std::string> next_labels;
    next.reserve(elements.size() * 4);
    for (std::size_t e = 0; e < elements.size(); ++e) {
      for (int s = 0; s < 4; ++s) {
        next.push_back(Eigen::kroneckerProduct(elements[e], singles[s]).eval());
        next_labels.push_back(labels[e] + single_labels[s]);
      }
    }
    elements = std::move(next);
    labels = std::move(next_labels);
  }

  const int d = 1 << n_qubits;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& e : elements) e *= norm;
  return HSBasis(d, std::move(elements), std::move(labels));
}

}  // namespace gst

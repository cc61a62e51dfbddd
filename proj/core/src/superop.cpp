#include "gst/superop.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gst/util.hpp"

namespace gst {

namespace {

// T[(m,n),(i,j)] = Tr(B_m B_i B_n B_j) maps vec(chi) -> vec(S), where
// Lambda(rho) = sum_ij chi_ij B_i rho B_j and S_mn = Tr(B_m Lambda(B_n)).
// Cached per basis size together with its LU factorization.
struct ChoiTable {
  Eigen::MatrixXcd T;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
};

const ChoiTable& choi_table(const HSBasis& basis) {
  static std::map<int, ChoiTable> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(basis.size());
  if (it != cache.end()) return it->second;

  const int n = basis.size();
  Eigen::MatrixXcd T(n * n, n * n);
  for (int m = 0; m < n; ++m)
    for (int nn = 0; nn < n; ++nn)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          T(m + nn * n, i + j * n) =
              (basis.element(m) * basis.element(i) * basis.element(nn) * basis.element(j)).trace();
  ChoiTable tab{T, Eigen::PartialPivLU<Eigen::MatrixXcd>(T)};
  return cache.emplace(n, std::move(tab)).first->second;
}

}  // namespace

TransferMatrix unitary_to_transfer(const Eigen::MatrixXcd& U, const HSBasis& basis) {
  const int d = basis.dim();
  if (U.rows() != d || U.cols() != d)
    throw std::invalid_argument("unitary_to_transfer: dimension mismatch");
  if ((U * U.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm() > tol::unitary)
    throw std::invalid_argument("unitary_to_transfer: matrix is not unitary");

  const int n = basis.size();
  TransferMatrix S(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXcd mapped = U * basis.element(j) * U.adjoint();
    for (int i = 0; i < n; ++i) S(i, j) = (basis.element(i).adjoint() * mapped).trace().real();
  }
  return S;
}

ChoiMatrix transfer_to_choi(const TransferMatrix& S, const HSBasis& basis) {
  const int n = basis.size();
  if (S.rows() != n || S.cols() != n)
    throw std::invalid_argument("transfer_to_choi: dimension mismatch with basis");
  Eigen::VectorXcd s_vec = Eigen::Map<const Eigen::VectorXd>(S.data(), n * n).cast<std::complex<double>>();
  Eigen::VectorXcd chi_vec = choi_table(basis).lu.solve(s_vec);
  return Eigen::Map<ChoiMatrix>(chi_vec.data(), n, n);
}

TransferMatrix choi_to_transfer(const ChoiMatrix& chi, const HSBasis& basis) {
  const int n = basis.size();
  if (chi.rows() != n || chi.cols() != n)
    throw std::invalid_argument("choi_to_transfer: dimension mismatch with basis");
  Eigen::VectorXcd chi_vec = Eigen::Map<const Eigen::VectorXcd>(chi.data(), n * n);
  Eigen::VectorXcd s_vec = choi_table(basis).T * chi_vec;
  Eigen::MatrixXcd S = Eigen::Map<Eigen::MatrixXcd>(s_vec.data(), n, n);
  return S.real();
}

bool is_tp(const TransferMatrix& S, double tolerance) {
  if (S.rows() == 0) return false;
  Eigen::RowVectorXd first = S.row(0);
  first[0] -= 1.0;
  return first.cwiseAbs().maxCoeff() <= tolerance;
}

double choi_min_eigenvalue(const TransferMatrix& S, const HSBasis& basis) {
  ChoiMatrix chi = transfer_to_choi(S, basis);
  ChoiMatrix herm = 0.5 * (chi + chi.adjoint());
  Eigen::SelfAdjointEigenSolver<ChoiMatrix> es(herm);
  return es.eigenvalues().minCoeff();
}

bool is_cp(const TransferMatrix& S, const HSBasis& basis, double tolerance) {
  return choi_min_eigenvalue(S, basis) >= -tolerance;
}

TransferMatrix depolarizing(double rate) {
  if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("depolarizing: rate must lie in [0,1]");
  TransferMatrix S = TransferMatrix::Identity(4, 4);
  for (int i = 1; i < 4; ++i) S(i, i) = 1.0 - rate;
  return S;
}

TransferMatrix rotation(const Eigen::Vector3d& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > tol::unitary)
    throw std::invalid_argument("rotation: axis must be a unit vector");
  const std::complex<double> I(0, 1);
  Eigen::Matrix2cd n_sigma = Eigen::Matrix2cd::Zero();
  n_sigma(0, 0) = axis[2];
  n_sigma(1, 1) = -axis[2];
  n_sigma(0, 1) = std::complex<double>(axis[0], -axis[1]);
  n_sigma(1, 0) = std::complex<double>(axis[0], axis[1]);
  Eigen::Matrix2cd U =
      std::cos(angle / 2) * Eigen::Matrix2cd::Identity() - I * std::sin(angle / 2) * n_sigma;
  static const HSBasis basis = pauli_basis(1);
  return unitary_to_transfer(U, basis);
}

TransferMatrix transfer_exp(const TransferMatrix& K) { return K.exp(); }

TransferMatrix transfer_log(const TransferMatrix& S) {
  Eigen::EigenSolver<TransferMatrix> es(S);
  for (int i = 0; i < S.rows(); ++i) {
    std::complex<double> ev = es.eigenvalues()[i];
    if (ev.real() <= 0.0 && std::abs(ev.imag()) < 1e-12)
      throw NonPrincipalLogError("transfer_log: eigenvalue on the closed negative real axis");
  }
  Eigen::MatrixXcd L = S.cast<std::complex<double>>().log();
  if (L.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw NonPrincipalLogError("transfer_log: principal logarithm is not real");
  return L.real();
}

}  // namespace gst

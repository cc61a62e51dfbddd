#pragma once

#include "gst/basis.hpp"

namespace gst {

/// Transfer matrix of rho -> U rho U^dag:  S[i][j] = Tr(B_i U B_j U^dag).
TransferMatrix unitary_to_transfer(const Eigen::MatrixXcd& U, const HSBasis& basis);

// Choi-Jamiolkowski isomorphism, expressed in the given Hermitian basis so
// that Lambda(rho) = sum_ij chi_ij B_i rho B_j.  The reshaping convention is
// column-stacking of chi in basis-index order; transfer_to_choi and
// choi_to_transfer are exact mutual inverses under it.
ChoiMatrix transfer_to_choi(const TransferMatrix& S, const HSBasis& basis);
TransferMatrix choi_to_transfer(const ChoiMatrix& chi, const HSBasis& basis);

bool is_tp(const TransferMatrix& S, double tolerance = 1e-10);
bool is_cp(const TransferMatrix& S, const HSBasis& basis, double tolerance = 1e-9);

/// Smallest eigenvalue of the (Hermitized) Choi matrix; >= -tol means CP.
double choi_min_eigenvalue(const TransferMatrix& S, const HSBasis& basis);

/// diag(1, 1-rate, 1-rate, 1-rate) in the 1-qubit Pauli basis.
TransferMatrix depolarizing(double rate);

/// Transfer matrix of exp(-i angle/2 axis.sigma) for a unit 3-vector axis.
TransferMatrix rotation(const Eigen::Vector3d& axis, double angle);

TransferMatrix transfer_exp(const TransferMatrix& K);

/// Principal matrix logarithm; throws NonPrincipalLogError when the spectrum
/// touches the closed negative real axis.
TransferMatrix transfer_log(const TransferMatrix& S);

}  // namespace gst

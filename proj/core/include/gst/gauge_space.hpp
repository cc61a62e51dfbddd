#pragma once

#include "gst/parameterization.hpp"

namespace gst {

/// Basis of gauge-group generators K as d^2 x d^2 matrices: all elementary
/// matrices u_jk, or only those with zero first row when tp_restricted.
std::vector<TransferMatrix> gauge_generators(int n, bool tp_restricted);

/// Columns are the element-space velocities (u rho; [u, G_i]; -E u) of the
/// infinitesimal gauge transformations, one per generator.
Eigen::MatrixXd gauge_directions_matrix(const GateSet& gs, bool tp_restricted);

/// Orthonormal basis (N_p x rank) of the gauge subspace of parameter space,
/// from the nullspace of [dP | dQ].
Eigen::MatrixXd gauge_space_basis(const GateSet& gs, const Parameterization& param);

/// Idempotent symmetric projector onto the gauge subspace.
Eigen::MatrixXd gauge_space_projector(const GateSet& gs, const Parameterization& param);

int num_gauge_params(const GateSet& gs, const Parameterization& param);
int num_nongauge_params(const GateSet& gs, const Parameterization& param);

/// xi = log(G G0^-1), the gate's error generator relative to its ideal.
TransferMatrix error_generator(const TransferMatrix& gate, const TransferMatrix& ideal);
TransferMatrix generator_to_gate(const TransferMatrix& xi, const TransferMatrix& ideal);

}  // namespace gst

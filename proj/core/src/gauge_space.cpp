#include "gst/gauge_space.hpp"

#include "gst/superop.hpp"
#include "gst/util.hpp"

namespace gst {

std::vector<TransferMatrix> gauge_generators(int n, bool tp_restricted) {
  std::vector<TransferMatrix> gens;
  for (int r = tp_restricted ? 1 : 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      TransferMatrix u = TransferMatrix::Zero(n, n);
      u(r, c) = 1.0;
      gens.push_back(std::move(u));
    }
  return gens;
}

Eigen::MatrixXd gauge_directions_matrix(const GateSet& gs, bool tp_restricted) {
  const ElementLayout lay = ElementLayout::of(gs);
  const int n = lay.d2;
  auto gens = gauge_generators(n, tp_restricted);
  Eigen::MatrixXd dQ(lay.total(), gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const TransferMatrix& u = gens[g];
    Eigen::VectorXd col = Eigen::VectorXd::Zero(lay.total());
    for (int i = 0; i < gs.num_preps(); ++i)
      col.segment(lay.prep_offset(i), n) = u * gs.prep(i);
    for (int k = 0; k < gs.num_gates(); ++k) {
      TransferMatrix comm = u * gs.gate(k) - gs.gate(k) * u;
      col.segment(lay.gate_offset(k), n * n) =
          Eigen::Map<const Eigen::VectorXd>(comm.data(), comm.size());
    }
    for (int m = 0; m < gs.num_povms(); ++m)
      for (int t = 0; t < gs.num_effects(m); ++t)
        col.segment(lay.effect_offset(m, t), n) = (-gs.povm(m)[t] * u).transpose();
    dQ.col(g) = col;
  }
  return dQ;
}

Eigen::MatrixXd gauge_space_basis(const GateSet& gs, const Parameterization& param) {
  const bool tp_restricted = param.kind() != ParamKind::Full;
  Eigen::MatrixXd dQ = gauge_directions_matrix(gs, tp_restricted);
  Eigen::VectorXd theta = param.to_vector(gs);
  Eigen::MatrixXd dP = param.jacobian(theta);

  const int np = static_cast<int>(dP.cols());
  Eigen::MatrixXd combined(dP.rows(), np + dQ.cols());
  combined << dP, dQ;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(combined, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = (sv.size() ? sv[0] : 0.0) * 1e-7;

  // Parameter-space components of the nullspace vectors span the gauge space.
  std::vector<int> null_cols;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] <= cutoff) null_cols.push_back(i);
  for (int i = static_cast<int>(sv.size()); i < combined.cols(); ++i) null_cols.push_back(i);

  if (null_cols.empty()) return Eigen::MatrixXd::Zero(np, 0);
  Eigen::MatrixXd P(np, null_cols.size());
  for (std::size_t j = 0; j < null_cols.size(); ++j)
    P.col(j) = svd.matrixV().col(null_cols[j]).head(np);

  // Orthonormalize and drop numerically-zero directions (pure-w nullvectors
  // appear when some generator commutes with the whole gate set).
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(P, Eigen::ComputeThinU);
  const auto& psv = psvd.singularValues();
  double pcut = (psv.size() ? psv[0] : 0.0) * tol::rank_rel;
  int rank = 0;
  for (int i = 0; i < psv.size(); ++i)
    if (psv[i] > pcut && psv[i] > 1e-12) ++rank;
  return psvd.matrixU().leftCols(rank);
}

Eigen::MatrixXd gauge_space_projector(const GateSet& gs, const Parameterization& param) {
  Eigen::MatrixXd Q = gauge_space_basis(gs, param);
  return Q * Q.transpose();
}

int num_gauge_params(const GateSet& gs, const Parameterization& param) {
  return static_cast<int>(gauge_space_basis(gs, param).cols());
}

int num_nongauge_params(const GateSet& gs, const Parameterization& param) {
  return param.param_count() - num_gauge_params(gs, param);
}

TransferMatrix error_generator(const TransferMatrix& gate, const TransferMatrix& ideal) {
  return transfer_log(gate * ideal.inverse());
}

TransferMatrix generator_to_gate(const TransferMatrix& xi, const TransferMatrix& ideal) {
  return transfer_exp(xi) * ideal;
}

}  // namespace gst

#include "gst/parameterization.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "gst/superop.hpp"
#include "gst/util.hpp"

namespace gst {

ElementLayout ElementLayout::of(const GateSet& gs) {
  ElementLayout lay;
  lay.d2 = gs.dim();
  lay.n_preps = gs.num_preps();
  lay.n_gates = gs.num_gates();
  for (int m = 0; m < gs.num_povms(); ++m) lay.effects_per_povm.push_back(gs.num_effects(m));
  return lay;
}

int ElementLayout::effect_offset(int m, int t) const {
  int off = effects_base();
  for (int i = 0; i < m; ++i) off += effects_per_povm[i] * d2;
  return off + t * d2;
}

int ElementLayout::total() const {
  int n = n_preps * d2 + n_gates * d2 * d2;
  for (int e : effects_per_povm) n += e * d2;
  return n;
}

Eigen::VectorXd element_vector(const GateSet& gs) {
  ElementLayout lay = ElementLayout::of(gs);
  Eigen::VectorXd v(lay.total());
  for (int i = 0; i < gs.num_preps(); ++i) v.segment(lay.prep_offset(i), lay.d2) = gs.prep(i);
  for (int k = 0; k < gs.num_gates(); ++k) {
    const TransferMatrix& g = gs.gate(k);
    v.segment(lay.gate_offset(k), lay.d2 * lay.d2) =
        Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
  }
  for (int m = 0; m < gs.num_povms(); ++m)
    for (int t = 0; t < gs.num_effects(m); ++t)
      v.segment(lay.effect_offset(m, t), lay.d2) = gs.povm(m)[t].transpose();
  return v;
}

GateSet gateset_from_elements(const GateSet& structure, const Eigen::VectorXd& elements) {
  ElementLayout lay = ElementLayout::of(structure);
  if (elements.size() != lay.total())
    throw std::invalid_argument("gateset_from_elements: wrong element count");
  GateSet out(structure.basis());
  for (int i = 0; i < lay.n_preps; ++i) out.add_prep(elements.segment(lay.prep_offset(i), lay.d2));
  for (int k = 0; k < lay.n_gates; ++k) {
    TransferMatrix g =
        Eigen::Map<const Eigen::MatrixXd>(elements.data() + lay.gate_offset(k), lay.d2, lay.d2);
    out.add_gate(structure.gate_label(k), g);
  }
  for (int m = 0; m < structure.num_povms(); ++m) {
    std::vector<SuperBra> effects;
    for (int t = 0; t < lay.effects_per_povm[m]; ++t)
      effects.push_back(elements.segment(lay.effect_offset(m, t), lay.d2).transpose());
    out.add_povm(std::move(effects));
  }
  return out;
}

std::string to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::Full: return "full";
    case ParamKind::TP: return "tp";
    case ParamKind::CPTPLindblad: return "cptp";
  }
  return "full";
}

ParamKind param_kind_from_string(const std::string& s) {
  if (s == "full") return ParamKind::Full;
  if (s == "tp") return ParamKind::TP;
  if (s == "cptp" || s == "cptp-lindblad") return ParamKind::CPTPLindblad;
  throw std::invalid_argument("unknown parameterization kind: " + s);
}

namespace {

// Snap the structurally fixed TP entries so the reference carries them
// exactly: gate first rows [1,0,...,0] and prep first elements 1/sqrt(d).
GateSet snap_tp(const GateSet& gs, bool require_tp_gates) {
  GateSet out = gs;
  const int n = gs.dim();
  const double first = 1.0 / std::sqrt(static_cast<double>(gs.basis().dim()));
  for (int k = 0; k < out.num_gates(); ++k) {
    if (require_tp_gates && !is_tp(out.gate(k), 1e-6))
      throw std::invalid_argument("parameterization: gate " + out.gate_label(k) + " is not TP");
    out.gate(k).row(0).setZero();
    out.gate(k)(0, 0) = 1.0;
  }
  for (int i = 0; i < out.num_preps(); ++i) {
    if (require_tp_gates && std::abs(out.prep(i)[0] - first) > 1e-6)
      throw std::invalid_argument("parameterization: prep is not trace-normalized");
    out.prep(i)[0] = first;
  }
  (void)n;
  return out;
}

}  // namespace

Parameterization Parameterization::full(const GateSet& structure) {
  Parameterization p;
  p.kind_ = ParamKind::Full;
  p.reference_ = structure;
  p.layout_ = ElementLayout::of(structure);
  p.param_count_ = p.layout_.total();
  return p;
}

Parameterization Parameterization::tp(const GateSet& structure) {
  Parameterization p;
  p.kind_ = ParamKind::TP;
  p.reference_ = snap_tp(structure, true);
  p.layout_ = ElementLayout::of(structure);
  const int n = p.layout_.d2;
  p.param_count_ = p.layout_.n_preps * (n - 1) + p.layout_.n_gates * n * (n - 1);
  for (int e : p.layout_.effects_per_povm) p.param_count_ += (e - 1) * n;
  return p;
}

Parameterization Parameterization::cptp_lindblad(const GateSet& ideal_reference) {
  Parameterization p;
  p.kind_ = ParamKind::CPTPLindblad;
  p.reference_ = snap_tp(ideal_reference, true);
  p.layout_ = ElementLayout::of(ideal_reference);
  const HSBasis& basis = ideal_reference.basis();
  const int n = p.layout_.d2;
  const int m = n - 1;
  p.lindblad_m_ = m;
  p.gate_param_size_ = m + m * m;

  const std::complex<double> I(0, 1);
  auto superop_of = [&](auto&& action) {
    TransferMatrix S(n, n);
    for (int col = 0; col < n; ++col) {
      Eigen::MatrixXcd mapped = action(basis.element(col));
      for (int row = 0; row < n; ++row) {
        std::complex<double> tr = (basis.element(row).adjoint() * mapped).trace();
        S(row, col) = tr.real();
      }
    }
    return S;
  };

  for (int i = 1; i < n; ++i) {
    const Eigen::MatrixXcd& B = basis.element(i);
    p.ham_generators_.push_back(
        superop_of([&](const Eigen::MatrixXcd& rho) { return I * (rho * B - B * rho); }));
  }

  auto stoch = [&](int j, int k) {
    const Eigen::MatrixXcd& Bj = basis.element(j);
    const Eigen::MatrixXcd& Bk = basis.element(k);
    // Complex superoperator of rho -> Bj rho Bk - (Bk Bj rho + rho Bk Bj)/2.
    Eigen::MatrixXcd S(n, n);
    for (int col = 0; col < n; ++col) {
      const Eigen::MatrixXcd& B = basis.element(col);
      Eigen::MatrixXcd mapped = Bj * B * Bk - 0.5 * (Bk * Bj * B + B * Bk * Bj);
      for (int row = 0; row < n; ++row) S(row, col) = (basis.element(row).adjoint() * mapped).trace();
    }
    return S;
  };

  for (int j = 1; j < n; ++j) p.stoch_diag_.push_back(stoch(j, j).real());
  for (int j = 1; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd Sjk = stoch(j, k), Skj = stoch(k, j);
      p.stoch_re_.push_back((Sjk + Skj).real());
      p.stoch_im_.push_back((I * (Sjk - Skj)).real());
    }

  p.param_count_ = p.layout_.n_preps * (n - 1) + p.layout_.n_gates * p.gate_param_size_;
  for (int e : p.layout_.effects_per_povm) p.param_count_ += (e - 1) * n;
  return p;
}

namespace {

// Packing of the lower-triangular factor T: diagonal entries are real and
// stored directly; below-diagonal entries store (Re, Im).
Eigen::MatrixXcd unpack_tri(const Eigen::VectorXd& x, int m) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(m, m);
  int idx = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b <= a; ++b) {
      if (a == b) T(a, b) = x[idx++];
      else {
        double re = x[idx++], im = x[idx++];
        T(a, b) = std::complex<double>(re, im);
      }
    }
  return T;
}

Eigen::VectorXd pack_tri(const Eigen::MatrixXcd& T) {
  const int m = static_cast<int>(T.rows());
  Eigen::VectorXd x(m * (m + 1) / 2 + m * (m - 1) / 2);
  int idx = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b <= a; ++b) {
      if (a == b) x[idx++] = T(a, b).real();
      else {
        x[idx++] = T(a, b).real();
        x[idx++] = T(a, b).imag();
      }
    }
  return x;
}

}  // namespace

TransferMatrix Parameterization::gate_matrix_from_params(int k, const Eigen::VectorXd& gate_theta) const {
  const int m = lindblad_m_;
  const int n = layout_.d2;
  TransferMatrix xi = TransferMatrix::Zero(n, n);
  for (int i = 0; i < m; ++i) xi += gate_theta[i] * ham_generators_[i];

  Eigen::MatrixXcd T = unpack_tri(gate_theta.segment(m, m * m), m);
  Eigen::MatrixXcd beta = T * T.adjoint();
  for (int j = 0; j < m; ++j) xi += beta(j, j).real() * stoch_diag_[j];
  int idx = 0;
  for (int j = 0; j < m; ++j)
    for (int kk = j + 1; kk < m; ++kk, ++idx) {
      xi += beta(j, kk).real() * stoch_re_[idx];
      xi += beta(j, kk).imag() * stoch_im_[idx];
    }

  xi.row(0).setZero();  // analytically zero for Lindblad generators
  TransferMatrix g = transfer_exp(xi) * reference_.gate(k);
  g.row(0).setZero();
  g(0, 0) = 1.0;
  return g;
}

Eigen::VectorXd Parameterization::gate_params_from_matrix(int k, const TransferMatrix& g) const {
  const int m = lindblad_m_;
  const int n = layout_.d2;

  TransferMatrix quotient = g * reference_.gate(k).inverse();
  TransferMatrix xi = transfer_log(quotient);

  // Least-squares decomposition of xi onto the generator basis.
  const int n_dirs = m + m + static_cast<int>(stoch_re_.size()) * 2;
  Eigen::MatrixXd A(n * n, n_dirs);
  int col = 0;
  auto put = [&](const TransferMatrix& D) {
    A.col(col++) = Eigen::Map<const Eigen::VectorXd>(D.data(), D.size());
  };
  for (int i = 0; i < m; ++i) put(ham_generators_[i]);
  for (int j = 0; j < m; ++j) put(stoch_diag_[j]);
  for (std::size_t i = 0; i < stoch_re_.size(); ++i) {
    put(stoch_re_[i]);
    put(stoch_im_[i]);
  }
  Eigen::VectorXd coeffs =
      A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(
          Eigen::Map<const Eigen::VectorXd>(xi.data(), xi.size()));

  Eigen::MatrixXcd beta = Eigen::MatrixXcd::Zero(m, m);
  for (int j = 0; j < m; ++j) beta(j, j) = coeffs[m + j];
  int idx = 0;
  for (int j = 0; j < m; ++j)
    for (int kk = j + 1; kk < m; ++kk, ++idx) {
      double re = coeffs[2 * m + 2 * idx];
      double im = coeffs[2 * m + 2 * idx + 1];
      beta(j, kk) = std::complex<double>(re, im);
      beta(kk, j) = std::complex<double>(re, -im);
    }

  // Floor beta to PSD so the Cholesky-style factor exists; exact for gates
  // that genuinely lie on the CPTP-Lindblad manifold.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(beta);
  Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd beta_psd =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(beta_psd + 1e-14 * Eigen::MatrixXcd::Identity(m, m));
  Eigen::MatrixXcd T = llt.matrixL();

  Eigen::VectorXd theta(gate_param_size_);
  theta.head(m) = coeffs.head(m);
  theta.segment(m, m * m) = pack_tri(T);
  return theta;
}

Eigen::VectorXd Parameterization::to_vector(const GateSet& gs) const {
  const int n = layout_.d2;
  Eigen::VectorXd theta(param_count_);
  int idx = 0;

  switch (kind_) {
    case ParamKind::Full: return element_vector(gs);

    case ParamKind::TP:
      for (int i = 0; i < gs.num_preps(); ++i)
        theta.segment(idx, n - 1) = gs.prep(i).tail(n - 1), idx += n - 1;
      for (int k = 0; k < gs.num_gates(); ++k) {
        const TransferMatrix& g = gs.gate(k);
        for (int c = 0; c < n; ++c)
          for (int r = 1; r < n; ++r) theta[idx++] = g(r, c);
      }
      for (int m = 0; m < gs.num_povms(); ++m)
        for (int t = 0; t + 1 < gs.num_effects(m); ++t)
          theta.segment(idx, n) = gs.povm(m)[t].transpose(), idx += n;
      return theta;

    case ParamKind::CPTPLindblad:
      for (int i = 0; i < gs.num_preps(); ++i)
        theta.segment(idx, n - 1) = gs.prep(i).tail(n - 1), idx += n - 1;
      for (int k = 0; k < gs.num_gates(); ++k) {
        theta.segment(idx, gate_param_size_) = gate_params_from_matrix(k, gs.gate(k));
        idx += gate_param_size_;
      }
      for (int m = 0; m < gs.num_povms(); ++m)
        for (int t = 0; t + 1 < gs.num_effects(m); ++t)
          theta.segment(idx, n) = gs.povm(m)[t].transpose(), idx += n;
      return theta;
  }
  throw std::logic_error("unreachable");
}

GateSet Parameterization::from_vector(const Eigen::VectorXd& theta) const {
  if (theta.size() != param_count_)
    throw std::invalid_argument("from_vector: expected " + std::to_string(param_count_) +
                                " parameters, got " + std::to_string(theta.size()));
  const int n = layout_.d2;
  if (kind_ == ParamKind::Full) return gateset_from_elements(reference_, theta);

  GateSet out = reference_;
  int idx = 0;
  for (int i = 0; i < out.num_preps(); ++i) {
    out.prep(i).tail(n - 1) = theta.segment(idx, n - 1);
    idx += n - 1;
  }
  for (int k = 0; k < out.num_gates(); ++k) {
    if (kind_ == ParamKind::TP) {
      TransferMatrix& g = out.gate(k);
      for (int c = 0; c < n; ++c)
        for (int r = 1; r < n; ++r) g(r, c) = theta[idx++];
    } else {
      out.gate(k) = gate_matrix_from_params(k, theta.segment(idx, gate_param_size_));
      idx += gate_param_size_;
    }
  }
  SuperBra id = out.basis().identity_superbra();
  for (int m = 0; m < out.num_povms(); ++m) {
    SuperBra sum = SuperBra::Zero(n);
    const int ne = out.num_effects(m);
    for (int t = 0; t + 1 < ne; ++t) {
      out.povm(m)[t] = theta.segment(idx, n).transpose();
      sum += out.povm(m)[t];
      idx += n;
    }
    out.povm(m)[ne - 1] = id - sum;
  }
  return out;
}

Eigen::MatrixXd Parameterization::jacobian(const Eigen::VectorXd& theta) const {
  const int n = layout_.d2;
  const int ne = layout_.total();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ne, param_count_);
  int idx = 0;

  if (kind_ == ParamKind::Full) return Eigen::MatrixXd::Identity(ne, ne);

  for (int i = 0; i < layout_.n_preps; ++i)
    for (int r = 1; r < n; ++r) J(layout_.prep_offset(i) + r, idx++) = 1.0;

  for (int k = 0; k < layout_.n_gates; ++k) {
    if (kind_ == ParamKind::TP) {
      for (int c = 0; c < n; ++c)
        for (int r = 1; r < n; ++r) J(layout_.gate_offset(k) + c * n + r, idx++) = 1.0;
    } else {
      // dG = L_exp(xi, dxi) G0 by the block-matrix Frechet derivative.
      Eigen::VectorXd gate_theta = theta.segment(idx, gate_param_size_);
      const int m = lindblad_m_;
      TransferMatrix xi = TransferMatrix::Zero(n, n);
      for (int i = 0; i < m; ++i) xi += gate_theta[i] * ham_generators_[i];
      Eigen::MatrixXcd T = unpack_tri(gate_theta.segment(m, m * m), m);
      Eigen::MatrixXcd beta = T * T.adjoint();
      for (int j = 0; j < m; ++j) xi += beta(j, j).real() * stoch_diag_[j];
      {
        int sidx = 0;
        for (int j = 0; j < m; ++j)
          for (int kk = j + 1; kk < m; ++kk, ++sidx) {
            xi += beta(j, kk).real() * stoch_re_[sidx];
            xi += beta(j, kk).imag() * stoch_im_[sidx];
          }
      }
      xi.row(0).setZero();

      auto xi_from_dbeta = [&](const Eigen::MatrixXcd& dbeta) {
        TransferMatrix dxi = TransferMatrix::Zero(n, n);
        for (int j = 0; j < m; ++j) dxi += dbeta(j, j).real() * stoch_diag_[j];
        int sidx = 0;
        for (int j = 0; j < m; ++j)
          for (int kk = j + 1; kk < m; ++kk, ++sidx) {
            dxi += dbeta(j, kk).real() * stoch_re_[sidx];
            dxi += dbeta(j, kk).imag() * stoch_im_[sidx];
          }
        return dxi;
      };

      auto frechet_column = [&](const TransferMatrix& dxi_in) {
        TransferMatrix dxi = dxi_in;
        dxi.row(0).setZero();
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        block.topLeftCorner(n, n) = xi;
        block.bottomRightCorner(n, n) = xi;
        block.topRightCorner(n, n) = dxi;
        Eigen::MatrixXd eblock = block.exp();
        TransferMatrix dG = eblock.topRightCorner(n, n) * reference_.gate(k);
        dG.row(0).setZero();
        return dG;
      };

      int col = idx;
      for (int i = 0; i < m; ++i) {
        TransferMatrix dG = frechet_column(ham_generators_[i]);
        J.block(layout_.gate_offset(k), col++, n * n, 1) =
            Eigen::Map<const Eigen::VectorXd>(dG.data(), dG.size());
      }
      // Derivatives through beta = T T^dag for each packed entry of T.
      for (int a = 0; a < m; ++a)
        for (int b = 0; b <= a; ++b) {
          auto emit = [&](const Eigen::MatrixXcd& dT) {
            Eigen::MatrixXcd dbeta = dT * T.adjoint() + T * dT.adjoint();
            TransferMatrix dG = frechet_column(xi_from_dbeta(dbeta));
            J.block(layout_.gate_offset(k), col++, n * n, 1) =
                Eigen::Map<const Eigen::VectorXd>(dG.data(), dG.size());
          };
          Eigen::MatrixXcd dT = Eigen::MatrixXcd::Zero(m, m);
          if (a == b) {
            dT(a, b) = 1.0;
            emit(dT);
          } else {
            dT(a, b) = 1.0;
            emit(dT);
            dT(a, b) = std::complex<double>(0, 1);
            emit(dT);
          }
        }
      idx += gate_param_size_;
      continue;
    }
  }

  for (int m = 0; m < static_cast<int>(layout_.effects_per_povm.size()); ++m) {
    const int ne_m = layout_.effects_per_povm[m];
    const int last = layout_.effect_offset(m, ne_m - 1);
    for (int t = 0; t + 1 < ne_m; ++t)
      for (int c = 0; c < n; ++c) {
        J(layout_.effect_offset(m, t) + c, idx) = 1.0;
        J(last + c, idx) = -1.0;  // complement effect moves opposite
        ++idx;
      }
  }
  return J;
}

std::vector<int> Parameterization::gate_parameter_indices() const {
  const int n = layout_.d2;
  int prep_params = layout_.n_preps * (kind_ == ParamKind::Full ? n : n - 1);
  int per_gate = 0;
  switch (kind_) {
    case ParamKind::Full: per_gate = n * n; break;
    case ParamKind::TP: per_gate = n * (n - 1); break;
    case ParamKind::CPTPLindblad: per_gate = gate_param_size_; break;
  }
  std::vector<int> out;
  out.reserve(layout_.n_gates * per_gate);
  for (int i = 0; i < layout_.n_gates * per_gate; ++i) out.push_back(prep_params + i);
  return out;
}

}  // namespace gst

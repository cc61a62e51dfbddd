#include "gst/germs.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>

#include "gst/gauge_space.hpp"
#include "gst/superop.hpp"
#include "gst/util.hpp"

namespace gst {

namespace {

int rank_of(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++r;
  return r;
}

Eigen::MatrixXd orthonormal_colspace(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.cols() == 0) return Eigen::MatrixXd::Zero(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[0] > 0 && sv[i] > rel_tol * sv[0]) ++r;
  return svd.matrixU().leftCols(r);
}

struct GateParamCoords {
  // (gate, row, col) for each gate-sector parameter, in the same order as
  // Parameterization's gate blocks.
  std::vector<int> gate, row, col;
  int per_gate = 0;

  static GateParamCoords of(const GateSet& gs, ParamKind kind) {
    if (kind == ParamKind::CPTPLindblad)
      throw std::invalid_argument("germ tools operate on Full or TP parameterizations");
    GateParamCoords out;
    const int n = gs.dim();
    const int r0 = (kind == ParamKind::TP) ? 1 : 0;
    out.per_gate = n * (n - r0);
    for (int k = 0; k < gs.num_gates(); ++k)
      for (int c = 0; c < n; ++c)
        for (int r = r0; r < n; ++r) {
          out.gate.push_back(k);
          out.row.push_back(r);
          out.col.push_back(c);
        }
    return out;
  }

  int size() const { return static_cast<int>(gate.size()); }
};

}  // namespace

TransferMatrix closest_unitary_transfer(const TransferMatrix& S, const HSBasis& basis) {
  ChoiMatrix chi = transfer_to_choi(S, basis);
  Eigen::SelfAdjointEigenSolver<ChoiMatrix> es(0.5 * (chi + chi.adjoint()));
  Eigen::VectorXcd lead = es.eigenvectors().col(basis.size() - 1);

  const int d = basis.dim();
  Eigen::MatrixXcd kraus = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < basis.size(); ++i) kraus += lead[i] * basis.element(i);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(kraus, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXcd U = svd.matrixU() * svd.matrixV().adjoint();
  return unitary_to_transfer(U, basis);
}

GateSet prepare_germ_model(const GateSet& target, const GermOptions& options) {
  const HSBasis& basis = target.basis();
  SplitMix64 rng(options.seed);
  GateSet out = target;
  const std::complex<double> I(0, 1);
  for (int k = 0; k < out.num_gates(); ++k) {
    TransferMatrix unitary = closest_unitary_transfer(out.gate(k), basis);
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
    for (int i = 1; i < basis.size(); ++i)
      gen += rng.uniform(-options.perturbation, options.perturbation) * basis.element(i);
    Eigen::MatrixXcd V = Eigen::MatrixXcd(-I * gen).exp();
    out.gate(k) = unitary_to_transfer(V, basis) * unitary;
  }
  return out;
}

Eigen::MatrixXd germ_jacobian(const Fragment& germ, const GateSet& gateset,
                              const Parameterization& param) {
  const int n = gateset.dim();
  GateParamCoords coords = GateParamCoords::of(gateset, param.kind());

  Fragment labels = germ;
  std::vector<int> gate_of;
  for (const auto& l : labels) {
    int k = gateset.gate_index(l);
    if (k < 0) throw MissingGateError("germ_jacobian: unknown gate label " + l);
    gate_of.push_back(k);
  }
  const int L = static_cast<int>(labels.size());

  std::vector<TransferMatrix> prefix(L + 1), suffix(L + 1);
  prefix[0] = TransferMatrix::Identity(n, n);
  for (int t = 0; t < L; ++t) prefix[t + 1] = gateset.gate(gate_of[t]) * prefix[t];
  suffix[L] = TransferMatrix::Identity(n, n);
  for (int t = L - 1; t >= 0; --t) suffix[t] = suffix[t + 1] * gateset.gate(gate_of[t]);

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * n, coords.size());
  for (int t = 0; t < L; ++t) {
    const TransferMatrix& pre = prefix[t];        // gates before position t
    const TransferMatrix& post = suffix[t + 1];   // gates after position t
    for (int p = 0; p < coords.size(); ++p) {
      if (coords.gate[p] != gate_of[t]) continue;
      const int r = coords.row[p], c = coords.col[p];
      // d tau = post * u_rc * pre; entry (a,b) = post(a,r) pre(c,b).
      for (int b = 0; b < n; ++b) {
        double pcb = pre(c, b);
        if (pcb == 0.0) continue;
        for (int a = 0; a < n; ++a) J(a + n * b, p) += post(a, r) * pcb;
      }
    }
  }
  return J;
}

namespace {

// Spectral projectors of tau grouped by eigenvalue clusters; the twirl
// projects onto the commutant block by block.
struct CommutantProjector {
  std::vector<Eigen::MatrixXcd> blocks;

  explicit CommutantProjector(const TransferMatrix& tau, double cluster_tol) {
    Eigen::EigenSolver<TransferMatrix> es(tau);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    Eigen::VectorXcd evals = es.eigenvalues();
    Eigen::MatrixXcd V = es.eigenvectors();
    if (std::abs(evals.cwiseAbs().minCoeff()) < 1e-9)
      throw std::invalid_argument("twirled_germ_jacobian: tau(germ) is not invertible");
    Eigen::MatrixXcd W = V.inverse();

    const int n = static_cast<int>(evals.size());
    std::vector<int> cluster(n, -1);
    int n_clusters = 0;
    for (int i = 0; i < n; ++i) {
      if (cluster[i] >= 0) continue;
      cluster[i] = n_clusters++;
      for (int j = i + 1; j < n; ++j)
        if (cluster[j] < 0 && std::abs(evals[i] - evals[j]) <= cluster_tol) cluster[j] = cluster[i];
    }
    blocks.assign(n_clusters, Eigen::MatrixXcd::Zero(n, n));
    for (int i = 0; i < n; ++i) blocks[cluster[i]] += V.col(i) * W.row(i);
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXcd Xc = X.cast<std::complex<double>>();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(X.rows(), X.cols());
    for (const auto& P : blocks) out += P * Xc * P;
    return out.real();
  }
};

}  // namespace

Eigen::MatrixXd twirled_germ_jacobian(const Fragment& germ, const GateSet& gateset,
                                      const Parameterization& param, const GermOptions& options) {
  const int n = gateset.dim();
  Eigen::MatrixXd J = germ_jacobian(germ, gateset, param);
  CommutantProjector proj(compose_fragment(germ, gateset), options.eig_cluster_tol);
  for (int col = 0; col < J.cols(); ++col) {
    Eigen::MatrixXd X = Eigen::Map<Eigen::MatrixXd>(J.col(col).data(), n, n);
    Eigen::MatrixXd PX = proj.apply(X);
    J.col(col) = Eigen::Map<Eigen::VectorXd>(PX.data(), n * n);
  }
  return J;
}

Eigen::MatrixXd commutant_basis(const TransferMatrix& tau, double rank_rel_tol) {
  const int n = static_cast<int>(tau.rows());
  Eigen::MatrixXd comm(n * n, n * n);
  // vec(tau X - X tau) = (I (x) tau - tau^T (x) I) vec X, column-major.
  for (int cb = 0; cb < n; ++cb)
    for (int cr = 0; cr < n; ++cr)
      for (int rb = 0; rb < n; ++rb)
        for (int rr = 0; rr < n; ++rr) {
          double v = 0;
          if (rb == cb) v += tau(rr, cr);
          if (rr == cr) v -= tau(cb, rb);
          comm(rr + n * rb, cr + n * cb) = v;
        }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(comm, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = sv[0] * rank_rel_tol;
  int null_dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] <= cutoff) ++null_dim;
  return svd.matrixV().rightCols(null_dim);
}

namespace {

// Gauge directions restricted to the gate sector: columns are the stacked
// commutators [K, G_i] in gate-parameter coordinates.
Eigen::MatrixXd gate_sector_gauge_directions(const GateSet& gs, ParamKind kind) {
  const int n = gs.dim();
  GateParamCoords coords = GateParamCoords::of(gs, kind);
  auto gens = gauge_generators(n, kind != ParamKind::Full);
  Eigen::MatrixXd dQ(coords.size(), gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    for (int p = 0; p < coords.size(); ++p) {
      const TransferMatrix& G = gs.gate(coords.gate[p]);
      const TransferMatrix& u = gens[g];
      // ([u,G])(r,c)
      double v = 0;
      for (int s = 0; s < n; ++s) v += u(coords.row[p], s) * G(s, coords.col[p]) - G(coords.row[p], s) * u(s, coords.col[p]);
      dQ(p, g) = v;
    }
  }
  return dQ;
}

struct GermSearchContext {
  GateSet model;
  ParamKind kind;
  GermOptions options;
  Eigen::MatrixXd nongauge_basis;  // N_gp x required
  int required = 0;
  std::map<std::string, Eigen::MatrixXd> cache;  // germ text -> twirled Jacobian

  const Eigen::MatrixXd& twirled(const Fragment& germ, const Parameterization& param) {
    std::string key = fragment_text(germ);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, twirled_germ_jacobian(germ, model, param, options)).first->second;
  }

  Eigen::MatrixXd stack(const std::vector<Fragment>& germs, const Parameterization& param) {
    const int cols = static_cast<int>(nongauge_basis.rows());
    Eigen::MatrixXd J(static_cast<int>(germs.size()) * model.dim() * model.dim(), cols);
    int r = 0;
    for (const auto& g : germs) {
      const Eigen::MatrixXd& T = twirled(g, param);
      J.middleRows(r, T.rows()) = T;
      r += static_cast<int>(T.rows());
    }
    return J;
  }

  int projected_rank(const Eigen::MatrixXd& J) const {
    Eigen::MatrixXd Jng = J * nongauge_basis;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jng);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > options.rank_rel_tol * sv[0]) ++r;
    return r;
  }

  // Mean-squared-error style score; infinite while the set is incomplete.
  double score(const Eigen::MatrixXd& J, int n_germs) const {
    Eigen::MatrixXd Jng = J * nongauge_basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Jng.transpose() * Jng);
    const auto& ev = es.eigenvalues();
    double max = ev.size() ? ev[ev.size() - 1] : 0.0;
    if (max <= 0) return std::numeric_limits<double>::infinity();
    double sum = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev[i] < options.rank_rel_tol * options.rank_rel_tol * max)
        return std::numeric_limits<double>::infinity();
      sum += 1.0 / ev[i];
    }
    return sum / n_germs;
  }
};

GermSearchContext make_context(const GateSet& target, const Parameterization& param,
                               const GermOptions& options) {
  GermSearchContext ctx;
  ctx.model = prepare_germ_model(target, options);
  ctx.kind = param.kind();
  ctx.options = options;
  Eigen::MatrixXd dQ = gate_sector_gauge_directions(ctx.model, param.kind());
  Eigen::MatrixXd Qg = orthonormal_colspace(dQ, options.rank_rel_tol);
  const int ngp = static_cast<int>(dQ.rows());
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(ngp, ngp) - Qg * Qg.transpose();
  ctx.nongauge_basis = orthonormal_colspace(P, 0.5);  // projector: singular values are 0/1
  ctx.required = static_cast<int>(ctx.nongauge_basis.cols());
  return ctx;
}

}  // namespace

AcReport is_amplificationally_complete(const std::vector<Fragment>& germs, const GateSet& target,
                                       const Parameterization& param, const GermOptions& options) {
  GermSearchContext ctx = make_context(target, param, options);
  AcReport report;
  report.required_rank = ctx.required;
  if (germs.empty()) return report;
  for (const auto& g : germs)
    report.per_germ_rank.push_back(ctx.projected_rank(ctx.twirled(g, param)));
  report.achieved_rank = ctx.projected_rank(ctx.stack(germs, param));
  report.complete = report.achieved_rank >= report.required_rank;
  return report;
}

std::vector<Fragment> germ_candidates(const GateSet& gs, int max_depth) {
  const auto& labels = gs.gate_labels();
  std::vector<Fragment> out;

  // Cyclic rotations of a germ are kept: rotating conjugates tau(g) but does
  // not preserve the amplified subspace in parameter space.  Powers of
  // shorter fragments add nothing and are dropped.
  auto is_primitive = [](const Fragment& f) {
    for (std::size_t period = 1; period < f.size(); ++period) {
      if (f.size() % period) continue;
      bool repeats = true;
      for (std::size_t i = period; i < f.size() && repeats; ++i)
        if (f[i] != f[i % period]) repeats = false;
      if (repeats) return false;
    }
    return true;
  };

  std::vector<Fragment> frontier = {{}};
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<Fragment> next;
    for (const auto& f : frontier)
      for (const auto& l : labels) {
        Fragment g = f;
        g.push_back(l);
        next.push_back(g);
      }
    for (const auto& g : next)
      if (is_primitive(g)) out.push_back(g);
    frontier = std::move(next);
  }
  return out;
}

GermSet select_germs(const GateSet& target, const std::vector<Fragment>& candidates,
                     const Parameterization& param, const GermOptions& options) {
  GermSearchContext ctx = make_context(target, param, options);

  std::vector<Fragment> chosen;
  for (const auto& l : target.gate_labels()) chosen.push_back({l});  // mandatory singletons
  const std::size_t n_mandatory = chosen.size();

  std::vector<Fragment> pool;
  for (const auto& c : candidates)
    if (c.size() > 1) pool.push_back(c);

  auto rank_of_set = [&](const std::vector<Fragment>& set) {
    return ctx.projected_rank(ctx.stack(set, param));
  };
  auto score_of_set = [&](const std::vector<Fragment>& set) {
    return ctx.score(ctx.stack(set, param), static_cast<int>(set.size()));
  };
  // Greedy objective: number of directions amplified above a solid
  // threshold, tie-broken by the size of the next singular value being
  // built.  Counting at 1e-3 (rather than the 1e-6 rank cutoff) keeps the
  // search away from directions amplified only through the 1e-4
  // degeneracy-breaking perturbation, whose singular values hug the cutoff.
  const double solid_rel = 1e-3;
  auto solid_metrics = [&](const std::vector<Fragment>& set) -> std::pair<int, double> {
    Eigen::MatrixXd Jng = ctx.stack(set, param) * ctx.nongauge_basis;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jng);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0) return {0, 0.0};
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > solid_rel * sv[0]) ++r;
    double next = (r < sv.size() && r < ctx.required) ? sv[r] : 0.0;
    return {r, next};
  };

  int rank = rank_of_set(chosen);
  auto current_metrics = solid_metrics(chosen);
  while (rank < ctx.required && current_metrics.first < ctx.required) {
    std::pair<int, double> best = current_metrics;
    std::size_t best_idx = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      chosen.push_back(pool[i]);
      auto m = solid_metrics(chosen);
      chosen.pop_back();
      if (m.first > best.first || (m.first == best.first && m.second > best.second * (1 + 1e-9))) {
        best = m;
        best_idx = i;
      }
    }
    if (best_idx == pool.size()) {
      throw InfoIncompleteError("germ selection failed: rank " + std::to_string(rank) + " of " +
                                std::to_string(ctx.required) +
                                " amplifiable directions; candidate pool exhausted");
    }
    chosen.push_back(pool[best_idx]);
    pool.erase(pool.begin() + best_idx);
    current_metrics = solid_metrics(chosen);
    rank = rank_of_set(chosen);
  }

  // Local refinement: drop redundant germs, then try improving swaps.
  double current = score_of_set(chosen);
  for (std::size_t i = chosen.size(); i-- > n_mandatory;) {
    std::vector<Fragment> trial = chosen;
    trial.erase(trial.begin() + i);
    if (rank_of_set(trial) >= ctx.required) {
      double s = score_of_set(trial);
      if (s <= current * (1 + 1e-9)) {
        chosen = std::move(trial);
        current = s;
      }
    }
  }
  // Swap refinement against the short end of the pool only; deep candidates
  // rarely improve the score and dominate the cost.
  std::vector<std::size_t> swap_pool;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].size() <= 4) swap_pool.push_back(i);
  for (int round = 0; round < 2; ++round) {
    bool improved = false;
    for (std::size_t m = n_mandatory; m < chosen.size(); ++m) {
      for (std::size_t i : swap_pool) {
        std::swap(chosen[m], pool[i]);
        bool ok = rank_of_set(chosen) >= ctx.required;
        double s = ok ? score_of_set(chosen) : std::numeric_limits<double>::infinity();
        if (ok && s < current * (1 - 1e-9)) {
          current = s;
          improved = true;
        } else {
          std::swap(chosen[m], pool[i]);
        }
      }
    }
    if (!improved) break;
  }

  GermSet out;
  out.germs = std::move(chosen);
  out.score = current;
  for (const auto& g : out.germs) out.amplified_ranks.push_back(ctx.projected_rank(ctx.twirled(g, param)));
  return out;
}

double germ_set_score(const std::vector<Fragment>& germs, const GateSet& target,
                      const Parameterization& param, const GermOptions& options) {
  GermSearchContext ctx = make_context(target, param, options);
  return ctx.score(ctx.stack(germs, param), static_cast<int>(germs.size()));
}

}  // namespace gst

#include "gst/fiducials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gst/util.hpp"

namespace gst {

Eigen::MatrixXd effective_prep_matrix(const GateSet& gs, const std::vector<Fragment>& prep_fiducials) {
  const int n = gs.dim();
  Eigen::MatrixXd B(n, gs.num_preps() * prep_fiducials.size());
  int j = 0;
  for (int r = 0; r < gs.num_preps(); ++r)
    for (const auto& f : prep_fiducials) B.col(j++) = compose_fragment(f, gs) * gs.prep(r);
  return B;
}

Eigen::MatrixXd effective_effect_matrix(const GateSet& gs, const std::vector<Fragment>& meas_fiducials) {
  const int n = gs.dim();
  int rows = 0;
  for (int m = 0; m < gs.num_povms(); ++m) rows += gs.num_effects(m) * meas_fiducials.size();
  Eigen::MatrixXd A(rows, n);
  int i = 0;
  for (int m = 0; m < gs.num_povms(); ++m)
    for (const auto& h : meas_fiducials) {
      TransferMatrix th = compose_fragment(h, gs);
      for (int t = 0; t < gs.num_effects(m); ++t) A.row(i++) = gs.povm(m)[t] * th;
    }
  return A;
}

namespace {

double dsq_singular_value(const Eigen::MatrixXd& M, int d2) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() < d2) return 0.0;
  return sv[d2 - 1];
}

}  // namespace

double fiducial_score(const GateSet& target, const std::vector<Fragment>& prep_fiducials,
                      const std::vector<Fragment>& meas_fiducials) {
  Eigen::MatrixXd gram =
      effective_effect_matrix(target, meas_fiducials) * effective_prep_matrix(target, prep_fiducials);
  return dsq_singular_value(gram, target.dim());
}

std::vector<Fragment> fiducial_candidates(const GateSet& gs, int max_depth) {
  std::vector<Fragment> out = {{}};
  std::vector<Fragment> frontier = {{}};
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<Fragment> next;
    for (const auto& f : frontier)
      for (const auto& label : gs.gate_labels()) {
        Fragment g = f;
        g.push_back(label);
        next.push_back(g);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

namespace {

// Greedy growth plus swap refinement for one side.  `side_matrix` maps a
// fiducial list to the matrix whose d^2-th singular value we maximize.
std::vector<Fragment> select_side(
    const GateSet& target, const std::vector<Fragment>& candidates, const FiducialOptions& options,
    const std::function<Eigen::MatrixXd(const std::vector<Fragment>&)>& side_matrix) {
  const int d2 = target.dim();
  const int min_count = options.min_count > 0 ? options.min_count : d2;

  std::vector<Fragment> chosen = {{}};  // pinned empty fiducial
  std::vector<Fragment> pool;
  for (const auto& c : candidates)
    if (!c.empty()) pool.push_back(c);

  auto score_of = [&](const std::vector<Fragment>& set) {
    Eigen::MatrixXd M = side_matrix(set);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    // Before the set can span, reward the smallest current direction.
    int k = std::min<int>(d2, std::min<int>(static_cast<int>(sv.size()), static_cast<int>(set.size())));
    return k > 0 ? sv[k - 1] : 0.0;
  };

  while (static_cast<int>(chosen.size()) < options.max_count) {
    double best = -1.0;
    std::size_t best_idx = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      chosen.push_back(pool[i]);
      double s = score_of(chosen);
      chosen.pop_back();
      if (s > best + 1e-12) {
        best = s;
        best_idx = i;
      }
    }
    if (best_idx == pool.size()) break;
    double current = score_of(chosen);
    bool need_more = static_cast<int>(chosen.size()) < min_count;
    if (!need_more && best <= current * 1.01) break;  // diminishing returns
    chosen.push_back(pool[best_idx]);
    pool.erase(pool.begin() + best_idx);
  }

  for (int round = 0; round < options.swap_rounds; ++round) {
    bool improved = false;
    for (std::size_t m = 1; m < chosen.size(); ++m) {  // keep the empty fiducial pinned
      double current = score_of(chosen);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        std::swap(chosen[m], pool[i]);
        double s = score_of(chosen);
        if (s > current * (1 + 1e-9)) {
          current = s;
          improved = true;
        } else {
          std::swap(chosen[m], pool[i]);
        }
      }
    }
    if (!improved) break;
  }
  return chosen;
}

}  // namespace

FiducialSet select_fiducials(const GateSet& target, const std::vector<Fragment>& candidates,
                             const FiducialOptions& options) {
  FiducialSet out;
  out.prep_fiducials = select_side(target, candidates, options, [&](const std::vector<Fragment>& set) {
    return effective_prep_matrix(target, set);
  });
  out.meas_fiducials = select_side(target, candidates, options, [&](const std::vector<Fragment>& set) {
    return effective_effect_matrix(target, set);
  });
  out.score = fiducial_score(target, out.prep_fiducials, out.meas_fiducials);
  if (out.score < options.ic_threshold)
    throw InfoIncompleteError(
        "fiducial selection failed: d^2-th Gram singular value " + std::to_string(out.score) +
        " below threshold; different (or additional) fiducials are needed");
  return out;
}

FiducialSet make_fiducials(const GateSet& target, std::vector<Fragment> prep_fiducials,
                           std::vector<Fragment> meas_fiducials, double ic_threshold) {
  FiducialSet out{std::move(prep_fiducials), std::move(meas_fiducials), 0.0};
  out.score = fiducial_score(target, out.prep_fiducials, out.meas_fiducials);
  if (out.score < ic_threshold)
    throw InfoIncompleteError("fiducial set is not informationally complete (score " +
                              std::to_string(out.score) + ")");
  return out;
}

}  // namespace gst

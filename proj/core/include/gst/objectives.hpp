#pragma once

#include "gst/dataset.hpp"
#include "gst/parameterization.hpp"

namespace gst {

enum class ObjectiveKind { Chi2, LogLTP, LogLPoisson };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& s);

struct ObjectiveOptions {
  double p_min = 1e-4;   // regularization switch point
  int jobs = 0;
};

/// sum_s sum_b N_s (p-f)^2 / max(p, p_min): chi^2 with the least-squares
/// weight capped at 1/p_min.
double chi2(const GateSet& gateset, const DataSet& dataset, const ObjectiveOptions& options = {});

/// Regularized loglikelihood.  LogLTP: sum N_s f log p (requires per-circuit
/// probabilities summing to 1); LogLPoisson: sum N_s,b log p - N_s p with the
/// constant terms dropped.  Terms with p < p_min are replaced by their
/// second-order Taylor expansion so the function is defined for p <= 0.
double loglikelihood(const GateSet& gateset, const DataSet& dataset, ObjectiveKind kind,
                     const ObjectiveOptions& options = {});

/// logL of the maximal model: sum_s N_s sum_b f log f (0 log 0 = 0) in the TP
/// picture; the Poisson picture subtracts sum_s N_s.
double max_logl(const DataSet& dataset, ObjectiveKind kind = ObjectiveKind::LogLTP);

double two_delta_logl(const GateSet& gateset, const DataSet& dataset, ObjectiveKind kind,
                      const ObjectiveOptions& options = {});

/// Per-circuit 2(logLmax_s - logL_s), in dataset row order.
std::vector<double> per_circuit_two_delta_logl(const GateSet& gateset, const DataSet& dataset,
                                               ObjectiveKind kind,
                                               const ObjectiveOptions& options = {});

// Objective machinery bound to (dataset, parameterization).  Exposes scalar
// value/gradient plus the residual interface consumed by the least-squares
// optimizer.  The loglikelihood residuals are the Poisson-picture deficits
// r = sign(p-f) sqrt(2(term_max - term)), which reproduce 2(logLmax - logL)
// as a sum of squares and keep the optimization a least-squares problem.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const DataSet& dataset, const Parameterization& param, ObjectiveKind kind,
                     const ObjectiveOptions& options = {});

  int residual_count() const { return n_residuals_; }
  int param_count() const { return param_.param_count(); }
  ObjectiveKind kind() const { return kind_; }

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  void residuals(const Eigen::VectorXd& theta, Eigen::VectorXd& r) const;
  void residual_jacobian(const Eigen::VectorXd& theta, Eigen::MatrixXd& J) const;

 private:
  struct Row {
    std::vector<int> layers;  // gate indices, chronological
    int prep = 0;
    int povm = 0;
    std::vector<double> freq;
    double shots = 0;
  };

  struct Point;  // cached evaluation state at one theta
  const Point& at(const Eigen::VectorXd& theta) const;
  std::vector<double> row_probabilities(const Point& pt, const Row& row) const;

  Parameterization param_;
  ObjectiveKind kind_;
  ObjectiveOptions options_;
  std::vector<Row> rows_;
  int n_residuals_ = 0;
  mutable std::shared_ptr<const Point> cache_;
};

}  // namespace gst

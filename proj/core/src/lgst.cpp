#include "gst/lgst.hpp"

#include <cmath>
#include <sstream>

#include "gst/fiducials.hpp"
#include "gst/util.hpp"

namespace gst {

namespace {

// Circuit builders for the LGST block.  The empty fiducial is pinned at
// index 0 of both lists, so the prep/measurement tomography rows coincide
// with fiducial-pair circuits that the design already contains.
Circuit lgst_circuit(const ExperimentDesign& design, int a, int b, const std::string* gate_label) {
  std::vector<Circuit::Segment> segments;
  const Fragment& F = design.fiducials.prep_fiducials[design.layout.prep_f(b)];
  if (!F.empty()) segments.push_back({F, 1});
  if (gate_label) segments.push_back({{*gate_label}, 1});
  const Fragment& H = design.fiducials.meas_fiducials[design.layout.meas_h(a)];
  if (!H.empty()) segments.push_back({H, 1});
  return Circuit(design.layout.prep_r(b), std::move(segments), design.layout.meas_m(a));
}

struct FrequencyReader {
  const DataSet& dataset;
  std::vector<std::string> missing;

  double frequency(const Circuit& circuit, int outcome) {
    if (!dataset.has(circuit)) {
      missing.push_back(circuit.text());
      return 0.0;
    }
    const DataRow& row = dataset.row_for(circuit);
    if (row.total <= 0) return 0.0;
    return row.counts[outcome] / row.total;
  }
};

}  // namespace

LgstIntermediates estimate_probabilities(const DataSet& dataset, const ExperimentDesign& design,
                                         const GateSet& target) {
  const auto& lay = design.layout;
  const int n_f2 = lay.num_eff_preps();
  int n_f1 = 0;
  std::vector<int> effect_row_base(lay.num_eff_meas());
  for (int a = 0; a < lay.num_eff_meas(); ++a) {
    effect_row_base[a] = n_f1;
    n_f1 += target.num_effects(lay.meas_m(a));
  }

  LgstIntermediates out;
  out.gram.resize(n_f1, n_f2);
  FrequencyReader reader{dataset, {}};

  for (int a = 0; a < lay.num_eff_meas(); ++a) {
    const int n_out = target.num_effects(lay.meas_m(a));
    for (int b = 0; b < n_f2; ++b) {
      Circuit c = lgst_circuit(design, a, b, nullptr);
      for (int t = 0; t < n_out; ++t) out.gram(effect_row_base[a] + t, b) = reader.frequency(c, t);
    }
  }

  for (int k = 0; k < target.num_gates(); ++k) {
    Eigen::MatrixXd P(n_f1, n_f2);
    const std::string& label = target.gate_label(k);
    for (int a = 0; a < lay.num_eff_meas(); ++a) {
      const int n_out = target.num_effects(lay.meas_m(a));
      for (int b = 0; b < n_f2; ++b) {
        Circuit c = lgst_circuit(design, a, b, &label);
        for (int t = 0; t < n_out; ++t) P(effect_row_base[a] + t, b) = reader.frequency(c, t);
      }
    }
    out.Pk.push_back(std::move(P));
  }

  // State tomography rows: bare native prep l behind each effective effect.
  for (int l = 0; l < target.num_preps(); ++l) {
    Eigen::VectorXd R(n_f1);
    const int b0 = lay.eff_prep(l, 0);  // empty prep fiducial
    for (int a = 0; a < lay.num_eff_meas(); ++a) {
      const int n_out = target.num_effects(lay.meas_m(a));
      Circuit c = lgst_circuit(design, a, b0, nullptr);
      for (int t = 0; t < n_out; ++t) R[effect_row_base[a] + t] = reader.frequency(c, t);
    }
    out.R.push_back(std::move(R));
  }

  // Measurement tomography rows: bare native POVM m after each effective prep.
  for (int m = 0; m < target.num_povms(); ++m) {
    std::vector<Eigen::VectorXd> rows(target.num_effects(m), Eigen::VectorXd(n_f2));
    const int a0 = lay.eff_meas(m, 0);  // empty measurement fiducial
    for (int b = 0; b < n_f2; ++b) {
      Circuit c = lgst_circuit(design, a0, b, nullptr);
      for (int t = 0; t < target.num_effects(m); ++t) rows[t][b] = reader.frequency(c, t);
    }
    out.Q.push_back(std::move(rows));
  }

  if (!reader.missing.empty()) {
    std::sort(reader.missing.begin(), reader.missing.end());
    reader.missing.erase(std::unique(reader.missing.begin(), reader.missing.end()),
                         reader.missing.end());
    std::ostringstream msg;
    msg << "dataset is missing " << reader.missing.size() << " LGST circuit(s):";
    for (std::size_t i = 0; i < reader.missing.size() && i < 12; ++i) msg << " " << reader.missing[i];
    if (reader.missing.size() > 12) msg << " ...";
    throw std::out_of_range(msg.str());
  }
  return out;
}

Eigen::VectorXd gram_spectrum(const DataSet& dataset, const ExperimentDesign& design,
                              const GateSet& target) {
  LgstIntermediates inter = estimate_probabilities(dataset, design, target);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inter.gram);
  return svd.singularValues();
}

LgstResult run_lgst_full(const DataSet& dataset, const ExperimentDesign& design,
                         const GateSet& target, const LgstOptions& options) {
  const int d2 = target.dim();
  LgstResult result;
  result.intermediates = estimate_probabilities(dataset, design, target);
  LgstIntermediates& inter = result.intermediates;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inter.gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  result.gram_singular_values = svd.singularValues();

  double n_min = std::max(dataset.min_total(), 1.0);
  double threshold = std::max(options.absolute_floor, options.noise_floor_factor / std::sqrt(n_min));
  if (result.gram_singular_values.size() < d2 || result.gram_singular_values[d2 - 1] < threshold) {
    std::ostringstream msg;
    msg << "Gram matrix is not informationally complete: singular values [";
    for (int i = 0; i < result.gram_singular_values.size(); ++i)
      msg << (i ? ", " : "") << result.gram_singular_values[i];
    msg << "] vs threshold " << threshold;
    throw InfoIncompleteError(msg.str());
  }

  // Projector onto the d^2 dominant right singular vectors of the Gram.
  inter.Pi = svd.matrixV().leftCols(d2).transpose();

  Eigen::MatrixXd B_target = effective_prep_matrix(target, design.fiducials.prep_fiducials);
  inter.B0 = options.b0_override ? *options.b0_override
                                 : Eigen::MatrixXd(B_target * inter.Pi.transpose());
  Eigen::FullPivLU<Eigen::MatrixXd> b0_lu(inter.B0);
  if (!b0_lu.isInvertible()) throw InfoIncompleteError("LGST gauge matrix B0 is singular");
  Eigen::MatrixXd B0_inv = b0_lu.inverse();
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> b0_svd(inter.B0);
    result.b0_condition =
        b0_svd.singularValues()[0] / b0_svd.singularValues()[b0_svd.singularValues().size() - 1];
  }

  Eigen::MatrixXd core = inter.Pi * inter.gram.transpose() * inter.gram * inter.Pi.transpose();
  Eigen::MatrixXd core_inv = core.inverse();

  GateSet estimate(target.basis());
  for (int l = 0; l < target.num_preps(); ++l)
    estimate.add_prep(inter.B0 * core_inv * inter.Pi * inter.gram.transpose() * inter.R[l]);
  for (int k = 0; k < target.num_gates(); ++k)
    estimate.add_gate(target.gate_label(k),
                      inter.B0 * core_inv *
                          (inter.Pi * inter.gram.transpose() * inter.Pk[k] * inter.Pi.transpose()) *
                          B0_inv);
  for (int m = 0; m < target.num_povms(); ++m) {
    std::vector<SuperBra> effects;
    for (int t = 0; t < target.num_effects(m); ++t)
      effects.push_back(inter.Q[m][t].transpose() * inter.Pi.transpose() * B0_inv);
    estimate.add_povm(std::move(effects));
  }
  result.gateset = std::move(estimate);
  return result;
}

GateSet run_lgst(const DataSet& dataset, const ExperimentDesign& design, const GateSet& target,
                 const LgstOptions& options) {
  return run_lgst_full(dataset, design, target, options).gateset;
}

}  // namespace gst

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gst/lgst.hpp"
#include "gst/simulate.hpp"
#include "gst/superop.hpp"
#include "gst/util.hpp"

using namespace gst;

namespace {

std::vector<Fragment> standard_fiducials() {
  std::vector<std::string> texts = {"{}", "Gx", "Gy", "Gx Gx", "Gx Gx Gx", "Gy Gy Gy"};
  std::vector<Fragment> out;
  for (const auto& t : texts) out.push_back(parse_fragment(t));
  return out;
}

GateSet noisy_standard(double depol) {
  GateSet gs = standard_xyi_gateset();
  for (int k = 0; k < gs.num_gates(); ++k) gs.gate(k) = depolarizing(depol) * gs.gate(k);
  return gs;
}

// Gate set whose single measurement is a symmetric (tetrahedral) 4-outcome
// POVM, so one measurement fiducial already gives d^2 = 4 effect rows: the
// square LGST case.
GateSet sic_gateset() {
  GateSet std_gs = standard_xyi_gateset();
  GateSet gs(std_gs.basis());
  gs.add_prep(std_gs.prep(0));
  for (int k = 0; k < 3; ++k) gs.add_gate(std_gs.gate_label(k), std_gs.gate(k));

  const double s = 1.0 / std::sqrt(3.0);
  std::vector<Eigen::Vector3d> axes = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<SuperBra> effects;
  const double q = 1.0 / (2.0 * std::sqrt(2.0));  // superket coefficients of (1l + n.sigma)/4
  for (const auto& n : axes) {
    SuperBra e(4);
    e << q, q * n[0], q * n[1], q * n[2];
    effects.push_back(e);
  }
  gs.add_povm(std::move(effects));
  return gs;
}

double max_probability_deviation(const GateSet& a, const GateSet& b,
                                 const std::vector<Circuit>& circuits) {
  double worst = 0;
  for (const auto& c : circuits) {
    auto pa = probabilities(a, c);
    auto pb = probabilities(b, c);
    for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("gram frequencies reproduce A*B on exact data") {
  GateSet truth = noisy_standard(0.02);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = exact_dataset(truth, design.all_circuits(), 1e6);

  LgstIntermediates inter = estimate_probabilities(data, design, target);
  Eigen::MatrixXd A = effective_effect_matrix(truth, fids.meas_fiducials);
  Eigen::MatrixXd B = effective_prep_matrix(truth, fids.prep_fiducials);
  CHECK((inter.gram - A * B).cwiseAbs().maxCoeff() < 1e-12);

  for (int k = 0; k < 3; ++k)
    CHECK((inter.Pk[k] - A * truth.gate(k) * B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((inter.R[0] - A * truth.prep(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram entries of sampled data are frequencies in [0,1]") {
  GateSet truth = noisy_standard(0.01);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = simulate(truth, design.all_circuits(), 200, 5);

  LgstIntermediates inter = estimate_probabilities(data, design, target);
  CHECK(inter.gram.minCoeff() >= 0.0);
  CHECK(inter.gram.maxCoeff() <= 1.0);
}

TEST_CASE("estimate_probabilities lists missing circuits") {
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet empty;
  try {
    estimate_probabilities(empty, design, target);
    FAIL("expected an error for the empty dataset");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("gram spectrum: 4 large singular values, sorted, exact rank on ideal data") {
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = exact_dataset(target, design.all_circuits(), 1e6);

  Eigen::VectorXd sv = gram_spectrum(data, design, target);
  for (int i = 0; i + 1 < sv.size(); ++i) CHECK(sv[i] >= sv[i + 1]);
  int large = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-6) ++large;
  CHECK(large == 4);
}

TEST_CASE("rank-deficient fiducials produce fewer than d^2 large singular values") {
  GateSet target = standard_xyi_gateset();
  // Z-axis-only fiducials cannot span.
  std::vector<Fragment> weak = {{}, {"Gi"}, {"Gi", "Gi"}, {"Gi", "Gi", "Gi"}};
  FiducialSet fids{weak, weak, 0.0};
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = exact_dataset(target, design.all_circuits(), 1e6);
  Eigen::VectorXd sv = gram_spectrum(data, design, target);
  int large = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-6) ++large;
  CHECK(large < 4);
  CHECK_THROWS_AS(run_lgst(data, design, target), InfoIncompleteError);
}

TEST_CASE("LGST on exact overcomplete data is gauge-equivalent to the truth") {
  GateSet truth = noisy_standard(0.02);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = exact_dataset(truth, design.all_circuits(), 1e6);

  GateSet estimate = run_lgst(data, design, target);
  CHECK(max_probability_deviation(estimate, truth, design.all_circuits()) < 1e-10);
}

TEST_CASE("square case (SIC POVM): overcomplete path reduces to the square formula") {
  GateSet truth = sic_gateset();
  for (int k = 0; k < 3; ++k) truth.gate(k) = depolarizing(0.01) * truth.gate(k);
  GateSet target = sic_gateset();

  std::vector<Fragment> prep_fids = {{}, {"Gx"}, {"Gy"}, {"Gx", "Gx"}};
  std::vector<Fragment> meas_fids = {{}};
  FiducialSet fids = make_fiducials(target, prep_fids, meas_fids);
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = exact_dataset(truth, design.all_circuits(), 1e6);

  GateSet estimate = run_lgst(data, design, target);
  CHECK(max_probability_deviation(estimate, truth, design.all_circuits()) < 1e-10);

  // direct square-case formula G_k = B Itilde^-1 P_k B^-1 with B from the target
  LgstIntermediates inter = estimate_probabilities(data, design, target);
  REQUIRE(inter.gram.rows() == 4);
  REQUIRE(inter.gram.cols() == 4);
  Eigen::MatrixXd B = effective_prep_matrix(target, fids.prep_fiducials);
  Eigen::MatrixXd Binv = B.inverse();
  Eigen::MatrixXd Ginv = inter.gram.inverse();
  GateSet direct(target.basis());
  direct.add_prep(B * Ginv * inter.R[0]);
  for (int k = 0; k < 3; ++k)
    direct.add_gate(target.gate_label(k), B * Ginv * inter.Pk[k] * Binv);
  {
    std::vector<SuperBra> effects;
    for (int t = 0; t < 4; ++t) effects.push_back(inter.Q[0][t].transpose() * Binv);
    direct.add_povm(std::move(effects));
  }

  // also matches the pseudo-inverse path after the B0 gauge is aligned:
  // both must predict identical probabilities
  CHECK(max_probability_deviation(estimate, direct, design.all_circuits()) < 1e-10);
  // and the square formula itself reproduces the truth's probabilities
  CHECK(max_probability_deviation(direct, truth, design.all_circuits()) < 1e-10);
}

TEST_CASE("changing B0 changes the estimate only by a gauge transformation") {
  GateSet truth = noisy_standard(0.015);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = simulate(truth, design.all_circuits(), 2000, 17);

  GateSet est_default = run_lgst(data, design, target);

  LgstOptions opts;
  SplitMix64 rng(23);
  Eigen::MatrixXd K(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) K(r, c) = rng.uniform(-0.2, 0.2);
  opts.b0_override = transfer_exp(K);
  GateSet est_other = run_lgst(data, design, target, opts);

  CHECK(max_probability_deviation(est_default, est_other, design.all_circuits()) < 1e-10);
}

TEST_CASE("Pi minimizes the Gram reconstruction error over rank-d^2 projectors") {
  GateSet truth = noisy_standard(0.01);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);
  DataSet data = simulate(truth, design.all_circuits(), 500, 29);

  LgstResult result = run_lgst_full(data, design, target);
  const Eigen::MatrixXd& gram = result.intermediates.gram;
  const Eigen::MatrixXd& Pi = result.intermediates.Pi;
  double best = (gram - gram * Pi.transpose() * Pi).squaredNorm();

  SplitMix64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd X(gram.cols(), 4);
    for (int r = 0; r < X.rows(); ++r)
      for (int c = 0; c < 4; ++c) X(r, c) = rng.uniform(-1, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(gram.cols(), 4);
    Eigen::MatrixXd P = Q.transpose();  // random rank-4 projector rows
    double err = (gram - gram * P.transpose() * P).squaredNorm();
    CHECK(err >= best - 1e-12);
  }
}

TEST_CASE("sampled LGST converges toward the truth in probability") {
  GateSet truth = noisy_standard(0.01);
  GateSet target = standard_xyi_gateset();
  FiducialSet fids = make_fiducials(target, standard_fiducials(), standard_fiducials());
  ExperimentDesign design = lgst_design(fids, target);

  DataSet data = simulate(truth, design.all_circuits(), 10000, 41);
  GateSet estimate = run_lgst(data, design, target);
  // probabilities are gauge-invariant, so this is a gauge-free accuracy check
  CHECK(max_probability_deviation(estimate, truth, design.all_circuits()) < 0.05);

  DataSet more = simulate(truth, design.all_circuits(), 1000000, 43);
  GateSet better = run_lgst(more, design, target);
  CHECK(max_probability_deviation(better, truth, design.all_circuits()) <
        max_probability_deviation(estimate, truth, design.all_circuits()));
}

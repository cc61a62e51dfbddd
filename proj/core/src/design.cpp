#include "gst/design.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "gst/util.hpp"

namespace gst {

using json = nlohmann::ordered_json;

std::vector<Circuit> ExperimentDesign::all_circuits() const {
  std::vector<Circuit> out;
  out.reserve(circuits.size());
  for (const auto& dc : circuits) out.push_back(dc.circuit);
  return out;
}

Circuit ExperimentDesign::sandwich(int a, int b, int germ, int power) const {
  std::vector<Circuit::Segment> segments;
  const Fragment& F = fiducials.prep_fiducials[layout.prep_f(b)];
  if (!F.empty()) segments.push_back({F, 1});
  if (germ >= 0 && power >= 1) segments.push_back({germs.germs[germ], power});
  const Fragment& H = fiducials.meas_fiducials[layout.meas_h(a)];
  if (!H.empty()) segments.push_back({H, 1});
  return Circuit(layout.prep_r(b), std::move(segments), layout.meas_m(a));
}

ExperimentDesign ExperimentDesign::truncated(int max_depth) const {
  ExperimentDesign out = *this;
  out.circuits.clear();
  for (const auto& dc : circuits)
    if (dc.base_depth <= max_depth) out.circuits.push_back(dc);
  out.max_depths.clear();
  for (int l : max_depths)
    if (l <= max_depth) out.max_depths.push_back(l);
  return out;
}

std::vector<int> log_spaced_depths(int max_depth, int base) {
  std::vector<int> out;
  for (long l = 1; l <= max_depth; l *= base) out.push_back(static_cast<int>(l));
  return out;
}

ExperimentDesign lgst_design(const FiducialSet& fiducials, const GateSet& target) {
  GermSet singles;
  for (const auto& label : target.gate_labels()) {
    singles.germs.push_back({label});
    singles.amplified_ranks.push_back(0);
  }
  return build_design(singles, fiducials, {1}, target);
}

namespace {

std::string physical_key(const Circuit& c) {
  std::string key = "rho" + std::to_string(c.prep_index()) + "|";
  for (const auto& l : c.expanded_labels()) key += l + " ";
  key += "|M" + std::to_string(c.povm_index());
  return key;
}

}  // namespace

ExperimentDesign build_design(const GermSet& germs, const FiducialSet& fiducials,
                              const std::vector<int>& max_depths, const GateSet& target) {
  ExperimentDesign design;
  design.fiducials = fiducials;
  design.germs = germs;
  design.max_depths = max_depths;
  design.layout.n_preps = target.num_preps();
  design.layout.n_prep_fiducials = static_cast<int>(fiducials.prep_fiducials.size());
  design.layout.n_povms = target.num_povms();
  design.layout.n_meas_fiducials = static_cast<int>(fiducials.meas_fiducials.size());
  design.kept_pairs.assign(germs.germs.size(), {});

  for (const auto& g : germs.germs)
    for (const auto& l : g)
      if (!target.has_gate(l)) throw MissingGateError("build_design: unknown gate label " + l);

  std::set<std::string> seen;
  auto add = [&](DesignCircuit dc) {
    if (seen.insert(physical_key(dc.circuit)).second) design.circuits.push_back(std::move(dc));
  };

  // LGST block: bare fiducial-pair sandwiches.  With the empty fiducial
  // pinned at index 0 these include the state/measurement tomography rows.
  for (int a = 0; a < design.layout.num_eff_meas(); ++a)
    for (int b = 0; b < design.layout.num_eff_preps(); ++b)
      add({a, b, -1, -1, 0, 0, design.sandwich(a, b, -1, 0)});

  for (int i = 0; i < static_cast<int>(germs.germs.size()); ++i) {
    const int glen = static_cast<int>(germs.germs[i].size());
    for (int j = 0; j < static_cast<int>(max_depths.size()); ++j) {
      const int p = max_depths[j] / glen;
      if (p < 1) continue;
      for (int a = 0; a < design.layout.num_eff_meas(); ++a)
        for (int b = 0; b < design.layout.num_eff_preps(); ++b)
          add({a, b, i, j, p, glen * p, design.sandwich(a, b, i, p)});
    }
  }
  return design;
}

ExperimentDesign reduce_fiducial_pairs(const ExperimentDesign& design, const GateSet& target,
                                       const Parameterization& param, const GermOptions& options) {
  GateSet model = prepare_germ_model(target, options);
  Eigen::MatrixXd A = effective_effect_matrix(model, design.fiducials.meas_fiducials);
  Eigen::MatrixXd B = effective_prep_matrix(model, design.fiducials.prep_fiducials);
  const int n = model.dim();

  // Rows of the sensitivity matrix for pair (a,b): one row per outcome t,
  // d p / d eps_k = <<E_t| tau(H) (tau(g) D_k) tau(F) |rho>> over the
  // commutant directions D_k of tau(g).
  ExperimentDesign out = design;
  out.kept_pairs.assign(design.germs.germs.size(), {});

  const int n_meas = design.layout.num_eff_meas();
  const int n_prep = design.layout.num_eff_preps();
  std::vector<int> outcomes_of_meas(n_meas);
  {
    int i = 0;
    for (int a = 0; a < n_meas; ++a) outcomes_of_meas[a] = model.num_effects(design.layout.meas_m(a));
    (void)i;
  }

  for (std::size_t gi = 0; gi < design.germs.germs.size(); ++gi) {
    TransferMatrix tau = compose_fragment(design.germs.germs[gi], model);
    Eigen::MatrixXd D = commutant_basis(tau, options.rank_rel_tol);
    const int n_dirs = static_cast<int>(D.cols());

    // Sensitivity rows per (a, b) pair; each pair contributes its outcomes.
    std::vector<Eigen::MatrixXd> pair_rows(n_meas * n_prep);
    int row_offset_a = 0;
    for (int a = 0; a < n_meas; ++a) {
      const int n_out = outcomes_of_meas[a];
      for (int b = 0; b < n_prep; ++b) {
        Eigen::MatrixXd S(n_out, n_dirs);
        for (int k = 0; k < n_dirs; ++k) {
          Eigen::MatrixXd Dk = Eigen::Map<const Eigen::MatrixXd>(D.col(k).data(), n, n);
          Eigen::VectorXd mid = tau * Dk * B.col(b);
          for (int t = 0; t < n_out; ++t) S(t, k) = A.row(row_offset_a + t).dot(mid);
        }
        pair_rows[a * n_prep + b] = std::move(S);
      }
      row_offset_a += n_out;
    }

    auto stack_rank = [&](const std::vector<int>& pairs) {
      int rows = 0;
      for (int pi : pairs) rows += static_cast<int>(pair_rows[pi].rows());
      Eigen::MatrixXd S(rows, n_dirs);
      int r = 0;
      for (int pi : pairs) {
        S.middleRows(r, pair_rows[pi].rows()) = pair_rows[pi];
        r += static_cast<int>(pair_rows[pi].rows());
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
      const auto& sv = svd.singularValues();
      if (sv.size() == 0 || sv[0] <= 0) return 0;
      int rank = 0;
      for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > options.rank_rel_tol * sv[0]) ++rank;
      return rank;
    };

    std::vector<int> all_pairs(n_meas * n_prep);
    for (int i = 0; i < n_meas * n_prep; ++i) all_pairs[i] = i;
    const int full_rank = stack_rank(all_pairs);

    // Greedy by marginal rank gain, then prune redundant pairs.
    std::vector<int> selected;
    int current = 0;
    while (current < full_rank) {
      int best_gain = 0, best_pair = -1;
      for (int cand : all_pairs) {
        if (std::find(selected.begin(), selected.end(), cand) != selected.end()) continue;
        selected.push_back(cand);
        int r = stack_rank(selected);
        selected.pop_back();
        if (r - current > best_gain) {
          best_gain = r - current;
          best_pair = cand;
        }
      }
      if (best_pair < 0) break;  // cannot improve; keep what we have
      selected.push_back(best_pair);
      current += best_gain;
    }
    for (std::size_t i = selected.size(); i-- > 0;) {
      std::vector<int> trial = selected;
      trial.erase(trial.begin() + i);
      if (stack_rank(trial) == full_rank) selected = std::move(trial);
    }

    std::sort(selected.begin(), selected.end());
    for (int pi : selected) out.kept_pairs[gi].push_back({pi / n_prep, pi % n_prep});
  }

  // Rebuild the circuit list with only the kept pairs in germ plaquettes.
  std::vector<DesignCircuit> kept;
  std::set<std::string> seen;
  for (const auto& dc : design.circuits) {
    if (dc.germ >= 0) {
      const auto& pairs = out.kept_pairs[dc.germ];
      if (std::find(pairs.begin(), pairs.end(), std::make_pair(dc.eff_meas, dc.eff_prep)) ==
          pairs.end())
        continue;
    }
    if (seen.insert(physical_key(dc.circuit)).second) kept.push_back(dc);
  }
  out.circuits = std::move(kept);
  return out;
}

std::string ExperimentDesign::to_json() const {
  json j;
  j["format"] = "gst-design";
  j["format_version"] = kFormatVersion;
  j["prep_fiducials"] = json::array();
  for (const auto& f : fiducials.prep_fiducials) j["prep_fiducials"].push_back(fragment_text(f));
  j["meas_fiducials"] = json::array();
  for (const auto& f : fiducials.meas_fiducials) j["meas_fiducials"].push_back(fragment_text(f));
  j["fiducial_score"] = fiducials.score;
  j["germs"] = json::array();
  for (const auto& g : germs.germs) j["germs"].push_back(fragment_text(g));
  j["germ_ranks"] = germs.amplified_ranks;
  j["germ_score"] = germs.score;
  j["max_depths"] = max_depths;
  j["layout"] = {{"n_preps", layout.n_preps},
                 {"n_prep_fiducials", layout.n_prep_fiducials},
                 {"n_povms", layout.n_povms},
                 {"n_meas_fiducials", layout.n_meas_fiducials}};
  json kept = json::array();
  for (const auto& pairs : kept_pairs) {
    json plist = json::array();
    for (const auto& [a, b] : pairs) plist.push_back({a, b});
    kept.push_back(std::move(plist));
  }
  j["kept_pairs"] = std::move(kept);
  json rows = json::array();
  for (const auto& dc : circuits)
    rows.push_back({{"a", dc.eff_meas},
                    {"b", dc.eff_prep},
                    {"germ", dc.germ},
                    {"depth_index", dc.depth_index},
                    {"power", dc.power},
                    {"base_depth", dc.base_depth},
                    {"circuit", dc.circuit.text()}});
  j["circuits"] = std::move(rows);
  return j.dump(2);
}

ExperimentDesign ExperimentDesign::from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentDesign d;
  for (const auto& f : j.at("prep_fiducials"))
    d.fiducials.prep_fiducials.push_back(parse_fragment(f.get<std::string>()));
  for (const auto& f : j.at("meas_fiducials"))
    d.fiducials.meas_fiducials.push_back(parse_fragment(f.get<std::string>()));
  d.fiducials.score = j.value("fiducial_score", 0.0);
  for (const auto& g : j.at("germs")) d.germs.germs.push_back(parse_fragment(g.get<std::string>()));
  if (j.contains("germ_ranks"))
    d.germs.amplified_ranks = j["germ_ranks"].get<std::vector<int>>();
  d.germs.score = j.value("germ_score", 0.0);
  d.max_depths = j.at("max_depths").get<std::vector<int>>();
  d.layout.n_preps = j.at("layout").at("n_preps").get<int>();
  d.layout.n_prep_fiducials = j.at("layout").at("n_prep_fiducials").get<int>();
  d.layout.n_povms = j.at("layout").at("n_povms").get<int>();
  d.layout.n_meas_fiducials = j.at("layout").at("n_meas_fiducials").get<int>();
  for (const auto& plist : j.at("kept_pairs")) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& p : plist) pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    d.kept_pairs.push_back(std::move(pairs));
  }
  for (const auto& r : j.at("circuits"))
    d.circuits.push_back({r.at("a").get<int>(), r.at("b").get<int>(), r.at("germ").get<int>(),
                          r.at("depth_index").get<int>(), r.at("power").get<int>(),
                          r.at("base_depth").get<int>(),
                          Circuit::parse(r.at("circuit").get<std::string>())});
  return d;
}

void ExperimentDesign::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("could not open " + path + " for writing");
  out << to_json();
}

ExperimentDesign ExperimentDesign::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("could not open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace gst

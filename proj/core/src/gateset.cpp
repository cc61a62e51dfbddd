#include "gst/gateset.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

#include "gst/superop.hpp"
#include "gst/util.hpp"

namespace gst {

using json = nlohmann::ordered_json;

void GateSet::add_prep(SuperKet rho) {
  if (rho.size() != dim()) throw std::invalid_argument("GateSet::add_prep: dimension mismatch");
  preps_.push_back(std::move(rho));
}

void GateSet::add_gate(const std::string& label, TransferMatrix g) {
  if (g.rows() != dim() || g.cols() != dim())
    throw std::invalid_argument("GateSet::add_gate: dimension mismatch");
  if (has_gate(label)) throw std::invalid_argument("GateSet::add_gate: duplicate label " + label);
  labels_.push_back(label);
  gates_.push_back(std::move(g));
}

void GateSet::add_povm(std::vector<SuperBra> effects) {
  for (const auto& e : effects)
    if (e.size() != dim()) throw std::invalid_argument("GateSet::add_povm: dimension mismatch");
  povms_.push_back(std::move(effects));
}

bool GateSet::has_gate(const std::string& label) const { return gate_index(label) >= 0; }

int GateSet::gate_index(const std::string& label) const {
  for (int k = 0; k < num_gates(); ++k)
    if (labels_[k] == label) return k;
  return -1;
}

const TransferMatrix& GateSet::gate(const std::string& label) const {
  int k = gate_index(label);
  if (k < 0) throw MissingGateError("unknown gate label: " + label);
  return gates_[k];
}

double GateSet::povm_completeness_error() const {
  double worst = 0.0;
  SuperBra id = basis_.identity_superbra();
  for (const auto& povm : povms_) {
    SuperBra sum = SuperBra::Zero(dim());
    for (const auto& e : povm) sum += e;
    worst = std::max(worst, (sum - id).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

std::string GateSet::to_json(std::optional<std::string> parameterization_kind) const {
  json j;
  j["basis"] = basis_.name();
  j["dim"] = basis_.dim();
  j["preps"] = json::array();
  for (const auto& p : preps_) j["preps"].push_back(vector_to_json(p));
  j["gates"] = json::object();
  for (int k = 0; k < num_gates(); ++k) j["gates"][labels_[k]] = matrix_to_json(gates_[k]);
  j["povms"] = json::array();
  for (const auto& povm : povms_) {
    json effects = json::array();
    for (const auto& e : povm) effects.push_back(vector_to_json(e.transpose()));
    j["povms"].push_back(std::move(effects));
  }
  if (parameterization_kind) j["parameterization"] = {{"kind", *parameterization_kind}};
  return j.dump(2);
}

GateSet GateSet::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("basis").get<std::string>() != "pp")
    throw std::invalid_argument("GateSet::from_json: unsupported basis " + j["basis"].get<std::string>());
  int d = j.at("dim").get<int>();
  int n_qubits = 0;
  while ((1 << n_qubits) < d) ++n_qubits;
  if ((1 << n_qubits) != d) throw std::invalid_argument("GateSet::from_json: dim must be a power of 2");

  GateSet gs(pauli_basis(n_qubits));
  for (const auto& p : j.at("preps")) gs.add_prep(vector_from_json(p));
  for (const auto& [label, m] : j.at("gates").items()) gs.add_gate(label, matrix_from_json(m));
  for (const auto& povm : j.at("povms")) {
    std::vector<SuperBra> effects;
    for (const auto& e : povm) effects.push_back(vector_from_json(e).transpose());
    gs.add_povm(std::move(effects));
  }
  return gs;
}

std::uint64_t GateSet::content_hash() const { return fnv1a(to_json()); }

GaugeElement GaugeElement::from_generator(const TransferMatrix& K) {
  return GaugeElement{transfer_exp(K), K};
}

GaugeElement GaugeElement::identity(int n) {
  return GaugeElement{TransferMatrix::Identity(n, n), TransferMatrix::Zero(n, n)};
}

GateSet apply_gauge(const GateSet& gateset, const TransferMatrix& M) {
  Eigen::FullPivLU<TransferMatrix> lu(M);
  if (!lu.isInvertible()) throw std::invalid_argument("apply_gauge: singular gauge matrix");
  TransferMatrix Minv = lu.inverse();

  GateSet out(gateset.basis());
  for (int i = 0; i < gateset.num_preps(); ++i) out.add_prep(M * gateset.prep(i));
  for (int k = 0; k < gateset.num_gates(); ++k)
    out.add_gate(gateset.gate_label(k), M * gateset.gate(k) * Minv);
  for (int m = 0; m < gateset.num_povms(); ++m) {
    std::vector<SuperBra> effects;
    for (const auto& e : gateset.povm(m)) effects.push_back(e * Minv);
    out.add_povm(std::move(effects));
  }
  return out;
}

GateSet apply_gauge(const GateSet& gateset, const GaugeElement& gauge) {
  return apply_gauge(gateset, gauge.matrix);
}

GateSet standard_xyi_gateset() {
  HSBasis basis = pauli_basis(1);
  GateSet gs(basis);

  const double s = 1.0 / std::sqrt(2.0);
  SuperKet rho0(4);
  rho0 << s, 0, 0, s;  // |0><0|
  gs.add_prep(rho0);

  gs.add_gate("Gi", TransferMatrix::Identity(4, 4));
  gs.add_gate("Gx", rotation(Eigen::Vector3d(1, 0, 0), M_PI / 2));
  gs.add_gate("Gy", rotation(Eigen::Vector3d(0, 1, 0), M_PI / 2));

  SuperBra e0(4), e1(4);
  e0 << s, 0, 0, s;   // |0><0|
  e1 << s, 0, 0, -s;  // |1><1|
  gs.add_povm({e0, e1});
  return gs;
}

}  // namespace gst

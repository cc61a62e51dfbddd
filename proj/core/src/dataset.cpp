#include "gst/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gst/util.hpp"

namespace gst {

using json = nlohmann::ordered_json;

namespace {

std::string physical_key(const Circuit& c) {
  std::string key = "rho" + std::to_string(c.prep_index()) + "|";
  for (const auto& l : c.expanded_labels()) key += l + " ";
  key += "|M" + std::to_string(c.povm_index());
  return key;
}

}  // namespace

void DataSet::add_row(const Circuit& circuit, std::vector<double> counts) {
  double total = 0;
  for (double c : counts) {
    if (c < 0) throw std::invalid_argument("DataSet::add_row: negative count");
    total += c;
  }
  std::string key = physical_key(circuit);
  if (index_.count(key))
    throw std::invalid_argument("DataSet::add_row: duplicate circuit " + circuit.text());
  index_[key] = rows_.size();
  rows_.push_back({circuit, std::move(counts), total});
}

bool DataSet::has(const Circuit& circuit) const { return index_.count(physical_key(circuit)) > 0; }

const DataRow& DataSet::row_for(const Circuit& circuit) const {
  auto it = index_.find(physical_key(circuit));
  if (it == index_.end())
    throw std::out_of_range("DataSet: no data for circuit " + circuit.text());
  return rows_[it->second];
}

double DataSet::min_total() const {
  double m = rows_.empty() ? 0.0 : rows_[0].total;
  for (const auto& r : rows_) m = std::min(m, r.total);
  return m;
}

namespace {

std::string format_number(double v) {
  // Integers print bare so sampled data sets stay readable.
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<const DataRow*> sorted_rows(const std::vector<DataRow>& rows) {
  std::vector<const DataRow*> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(&r);
  std::sort(out.begin(), out.end(),
            [](const DataRow* a, const DataRow* b) { return a->circuit.text() < b->circuit.text(); });
  return out;
}

}  // namespace

std::string DataSet::to_text() const {
  std::ostringstream out;
  out << "# gst dataset v1\n";
  out << "# seed=" << seed << " gateset_hash=" << gateset_hash << "\n";
  for (const DataRow* r : sorted_rows(rows_)) {
    out << r->circuit.text() << "  ";
    for (std::size_t b = 0; b < r->counts.size(); ++b)
      out << b << ':' << format_number(r->counts[b]) << ' ';
    out << " total=" << format_number(r->total) << "\n";
  }
  return out.str();
}

DataSet DataSet::from_text(const std::string& text) {
  DataSet ds;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string tok;
      while (hdr >> tok) {
        if (tok.rfind("seed=", 0) == 0) ds.seed = std::stoull(tok.substr(5));
        if (tok.rfind("gateset_hash=", 0) == 0) ds.gateset_hash = std::stoull(tok.substr(13));
      }
      continue;
    }

    // Consume tokens from the right: total=..., then outcome:count pairs;
    // whatever remains is the circuit text (which may itself contain spaces).
    std::vector<std::string> tokens;
    {
      std::istringstream ts(line);
      std::string t;
      while (ts >> t) tokens.push_back(t);
    }
    if (tokens.empty()) continue;

    std::string last = tokens.back();
    if (last.rfind("total=", 0) != 0) throw ParseError("missing total= field", line_no);
    double total;
    try {
      total = std::stod(last.substr(6));
    } catch (const std::exception&) {
      throw ParseError("bad total value", line_no);
    }
    tokens.pop_back();

    std::vector<std::pair<int, double>> counts;
    while (!tokens.empty()) {
      const std::string& tok = tokens.back();
      auto colon = tok.rfind(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size()) break;
      std::string head = tok.substr(0, colon);
      std::string tail = tok.substr(colon + 1);
      bool head_numeric = !head.empty() && head.find_first_not_of("0123456789") == std::string::npos;
      if (!head_numeric) break;
      char* end = nullptr;
      double value = std::strtod(tail.c_str(), &end);
      if (end == tail.c_str() || *end != '\0') break;
      if (value < 0) throw ParseError("negative count", line_no);
      counts.emplace_back(std::stoi(head), value);
      tokens.pop_back();
    }
    if (counts.empty()) throw ParseError("no outcome counts", line_no);
    std::reverse(counts.begin(), counts.end());

    std::string circuit_text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) circuit_text += ' ';
      circuit_text += tokens[i];
    }
    Circuit circuit;
    try {
      circuit = Circuit::parse(circuit_text);
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }

    int max_outcome = 0;
    for (auto& [o, v] : counts) max_outcome = std::max(max_outcome, o);
    std::vector<double> row(max_outcome + 1, 0.0);
    double sum = 0;
    for (auto& [o, v] : counts) {
      row[o] = v;
      sum += v;
    }
    if (std::abs(sum - total) > 1e-6 * std::max(1.0, total))
      throw ParseError("counts do not sum to total", line_no);
    ds.add_row(circuit, std::move(row));
  }
  return ds;
}

std::string DataSet::to_json() const {
  json j;
  j["format"] = "gst-dataset";
  j["format_version"] = kFormatVersion;
  j["seed"] = seed;
  j["gateset_hash"] = gateset_hash;
  json rows = json::array();
  for (const DataRow* r : sorted_rows(rows_)) {
    json counts = json::array();
    for (double c : r->counts) counts.push_back(c);
    rows.push_back({{"circuit", r->circuit.text()}, {"counts", counts}, {"total", r->total}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

DataSet DataSet::from_json(const std::string& text) {
  json j = json::parse(text);
  DataSet ds;
  ds.seed = j.value("seed", 0ULL);
  ds.gateset_hash = j.value("gateset_hash", 0ULL);
  for (const auto& r : j.at("rows")) {
    std::vector<double> counts;
    for (const auto& c : r.at("counts")) counts.push_back(c.get<double>());
    double total = r.at("total").get<double>();
    double sum = 0;
    for (double c : counts) sum += c;
    if (std::abs(sum - total) > 1e-6 * std::max(1.0, total))
      throw std::invalid_argument("DataSet::from_json: counts do not sum to total");
    ds.add_row(Circuit::parse(r.at("circuit").get<std::string>()), std::move(counts));
  }
  return ds;
}

void DataSet::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("could not open " + path + " for writing");
  bool as_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  out << (as_json ? to_json() : to_text());
}

DataSet DataSet::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("could not open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  bool as_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  return as_json ? from_json(buf.str()) : from_text(buf.str());
}

}  // namespace gst

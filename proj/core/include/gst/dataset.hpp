#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gst/circuit.hpp"

namespace gst {

struct DataRow {
  Circuit circuit;
  std::vector<double> counts;  // indexed by outcome; doubles so that exact
                               // (infinite-N surrogate) data fits the same type
  double total = 0;
};

// Per-circuit outcome counts.  Rows keep insertion order; files are written
// with rows ordered by circuit text, so serialization is canonical.  Rows are
// keyed by physical circuit identity (expanded layers plus prep/POVM):
// `Gx^2` and `Gx Gx` name the same experiment.
class DataSet {
 public:
  void add_row(const Circuit& circuit, std::vector<double> counts);
  bool has(const Circuit& circuit) const;
  const DataRow& row_for(const Circuit& circuit) const;
  const DataRow& row(std::size_t i) const { return rows_[i]; }
  std::size_t size() const { return rows_.size(); }

  std::uint64_t seed = 0;
  std::uint64_t gateset_hash = 0;

  /// Smallest per-row total (used for Gram feasibility thresholds).
  double min_total() const;

  std::string to_text() const;
  static DataSet from_text(const std::string& text);
  std::string to_json() const;
  static DataSet from_json(const std::string& text);

  void write(const std::string& path) const;
  static DataSet read(const std::string& path);

 private:
  std::vector<DataRow> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace gst

#pragma once

#include <string>
#include <vector>

#include "gst/gateset.hpp"

namespace gst {

/// A circuit fragment: gate labels in chronological order.
using Fragment = std::vector<std::string>;

std::string fragment_text(const Fragment& f);
Fragment parse_fragment(const std::string& text);

// A circuit: preparation index, gate layers, measurement index.  Layers are
// stored as (labels, power) segments so that repetition structure survives
// text round trips; depth() counts expanded layers.
//
// Text form: `rho<i>:<middle>:M<m>` with `^` powers and `()` grouping, e.g.
// `rho0:(Gx Gy)^8 Gx:M0`.  Prefixes may be omitted when the indices are 0;
// an empty middle prints as `{}`.
class Circuit {
 public:
  struct Segment {
    Fragment labels;
    int power = 1;
    bool operator==(const Segment&) const = default;
  };

  Circuit() = default;
  Circuit(int prep_index, std::vector<Segment> segments, int povm_index);
  static Circuit from_labels(const Fragment& labels, int prep_index = 0, int povm_index = 0);

  int prep_index() const { return prep_; }
  int povm_index() const { return povm_; }
  const std::vector<Segment>& segments() const { return segments_; }

  Fragment expanded_labels() const;
  int depth() const;

  std::string text() const;
  static Circuit parse(const std::string& text);

  /// This circuit followed by `next` (prep/povm taken from this circuit).
  Circuit then(const Circuit& next) const;

  bool operator==(const Circuit& other) const { return text() == other.text(); }

 private:
  int prep_ = 0;
  int povm_ = 0;
  std::vector<Segment> segments_;
};

/// tau(S) = G_L ... G_2 G_1 (reverse chronological product).
TransferMatrix compose(const Circuit& circuit, const GateSet& gateset);
TransferMatrix compose_fragment(const Fragment& fragment, const GateSet& gateset);

}  // namespace gst

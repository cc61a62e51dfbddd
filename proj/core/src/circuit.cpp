#include "gst/circuit.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "gst/util.hpp"

namespace gst {

std::string fragment_text(const Fragment& f) {
  if (f.empty()) return "{}";
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ' ';
    out += f[i];
  }
  return out;
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("circuit parse error at position " + std::to_string(pos) + ": " +
                                msg + " in \"" + s + "\"");
  }
};

std::string parse_label(Cursor& c) {
  if (c.done() || c.peek() != 'G') c.fail("expected gate label");
  std::size_t start = c.pos++;
  while (!c.done() && (std::islower(static_cast<unsigned char>(c.peek())) ||
                       std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
    ++c.pos;
  return c.s.substr(start, c.pos - start);
}

int parse_int(Cursor& c) {
  if (c.done() || !std::isdigit(static_cast<unsigned char>(c.peek()))) c.fail("expected integer");
  int v = 0;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())))
    v = v * 10 + (c.s[c.pos++] - '0');
  return v;
}

std::vector<Circuit::Segment> parse_middle(Cursor& c, char terminator) {
  std::vector<Circuit::Segment> segments;
  Fragment pending;  // consecutive power-1 labels collapse into one segment
  auto flush = [&] {
    if (!pending.empty()) {
      segments.push_back({pending, 1});
      pending.clear();
    }
  };

  c.skip_ws();
  while (!c.done() && c.peek() != terminator) {
    if (c.peek() == '{') {
      ++c.pos;
      c.skip_ws();
      if (c.done() || c.peek() != '}') c.fail("expected }");
      ++c.pos;
    } else if (c.peek() == '(') {
      ++c.pos;
      Fragment group;
      c.skip_ws();
      while (!c.done() && c.peek() != ')') {
        group.push_back(parse_label(c));
        c.skip_ws();
      }
      if (c.done()) c.fail("unterminated group");
      ++c.pos;  // ')'
      int power = 1;
      if (!c.done() && c.peek() == '^') {
        ++c.pos;
        power = parse_int(c);
      }
      if (power == 1) {
        for (auto& l : group) pending.push_back(std::move(l));
      } else {
        flush();
        segments.push_back({std::move(group), power});
      }
    } else {
      std::string label = parse_label(c);
      if (!c.done() && c.peek() == '^') {
        ++c.pos;
        int power = parse_int(c);
        flush();
        segments.push_back({{std::move(label)}, power});
      } else {
        pending.push_back(std::move(label));
      }
    }
    c.skip_ws();
  }
  flush();
  return segments;
}

}  // namespace

Fragment parse_fragment(const std::string& text) {
  Cursor c{text};
  auto segments = parse_middle(c, '\0');
  Fragment out;
  for (const auto& seg : segments)
    for (int p = 0; p < seg.power; ++p) out.insert(out.end(), seg.labels.begin(), seg.labels.end());
  return out;
}

Circuit::Circuit(int prep_index, std::vector<Segment> segments, int povm_index)
    : prep_(prep_index), povm_(povm_index), segments_(std::move(segments)) {
  if (prep_ < 0 || povm_ < 0) throw std::invalid_argument("Circuit: negative prep/povm index");
  for (const auto& seg : segments_)
    if (seg.power < 1) throw std::invalid_argument("Circuit: segment power must be >= 1");
}

Circuit Circuit::from_labels(const Fragment& labels, int prep_index, int povm_index) {
  std::vector<Segment> segs;
  if (!labels.empty()) segs.push_back({labels, 1});
  return Circuit(prep_index, std::move(segs), povm_index);
}

Fragment Circuit::expanded_labels() const {
  Fragment out;
  for (const auto& seg : segments_)
    for (int p = 0; p < seg.power; ++p) out.insert(out.end(), seg.labels.begin(), seg.labels.end());
  return out;
}

int Circuit::depth() const {
  int d = 0;
  for (const auto& seg : segments_) d += seg.power * static_cast<int>(seg.labels.size());
  return d;
}

std::string Circuit::text() const {
  std::ostringstream out;
  out << "rho" << prep_ << ':';
  if (segments_.empty()) {
    out << "{}";
  } else {
    bool first = true;
    for (const auto& seg : segments_) {
      if (!first) out << ' ';
      first = false;
      if (seg.power == 1) {
        out << fragment_text(seg.labels);
      } else if (seg.labels.size() == 1) {
        out << seg.labels[0] << '^' << seg.power;
      } else {
        out << '(' << fragment_text(seg.labels) << ")^" << seg.power;
      }
    }
  }
  out << ":M" << povm_;
  return out.str();
}

Circuit Circuit::parse(const std::string& text) {
  Cursor c{text};
  c.skip_ws();

  int prep = 0, povm = 0;
  if (c.s.compare(c.pos, 3, "rho") == 0) {
    c.pos += 3;
    prep = parse_int(c);
    if (c.done() || c.peek() != ':') c.fail("expected ':' after prep prefix");
    ++c.pos;
  }
  auto segments = parse_middle(c, ':');
  if (!c.done() && c.peek() == ':') {
    ++c.pos;
    if (c.done() || c.peek() != 'M') c.fail("expected povm suffix after ':'");
    ++c.pos;
    povm = parse_int(c);
  }
  c.skip_ws();
  if (!c.done()) c.fail("trailing characters");
  return Circuit(prep, std::move(segments), povm);
}

Circuit Circuit::then(const Circuit& next) const {
  std::vector<Segment> segs = segments_;
  segs.insert(segs.end(), next.segments_.begin(), next.segments_.end());
  return Circuit(prep_, std::move(segs), povm_);
}

TransferMatrix compose_fragment(const Fragment& fragment, const GateSet& gateset) {
  TransferMatrix acc = TransferMatrix::Identity(gateset.dim(), gateset.dim());
  for (const auto& label : fragment) acc = gateset.gate(label) * acc;
  return acc;
}

TransferMatrix compose(const Circuit& circuit, const GateSet& gateset) {
  const int n = gateset.dim();
  TransferMatrix acc = TransferMatrix::Identity(n, n);
  for (const auto& seg : circuit.segments()) {
    TransferMatrix base = compose_fragment(seg.labels, gateset);
    // Repeated squaring on the segment keeps deep base circuits cheap.
    TransferMatrix pow = TransferMatrix::Identity(n, n);
    int p = seg.power;
    while (p > 0) {
      if (p & 1) pow = base * pow;
      base = base * base;
      p >>= 1;
    }
    acc = pow * acc;
  }
  return acc;
}

}  // namespace gst

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gst {

// Numerical tolerances used throughout: structural equality, unitarity/TP
// checks, and the eigenvalue floor below which a Choi matrix counts as non-CP.
namespace tol {
inline constexpr double structural = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr double cp_floor = 1e-9;
inline constexpr double rank_rel = 1e-6;
}  // namespace tol

struct MissingGateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfoIncompleteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
  int line_number;
};

struct SimulationDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPrincipalLogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counter-based splitmix64 stream.  Cheap to seed, so per-row substreams are
// derived as fresh generators from hash(seed, counter).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  SplitMix64 g(seed ^ (0x517cc1b727220a95ULL * (counter + 1)));
  return g.next();
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t counter) {
  return SplitMix64(mix_seed(seed, counter));
}

// FNV-1a, used for provenance hashes of input files and gate sets.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

// Index-chunked parallel loop.  Each worker writes to disjoint indices, so
// results land in fixed order and output is identical for any thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int jobs = 0) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::size_t nw = std::min<std::size_t>(jobs, n);
  workers.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += nw) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

}  // namespace gst

#include "gst/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "gst/util.hpp"

namespace gst {

std::vector<double> probabilities(const GateSet& gateset, const Circuit& circuit) {
  if (circuit.prep_index() >= gateset.num_preps())
    throw std::invalid_argument("probabilities: prep index out of range");
  if (circuit.povm_index() >= gateset.num_povms())
    throw std::invalid_argument("probabilities: povm index out of range");

  SuperKet state = gateset.prep(circuit.prep_index());
  for (const auto& seg : circuit.segments()) {
    if (seg.power >= 8 && seg.labels.size() * seg.power > 16) {
      state = compose(Circuit(0, {seg}, 0), gateset) * state;
    } else {
      for (int p = 0; p < seg.power; ++p)
        for (const auto& label : seg.labels) state = gateset.gate(label) * state;
    }
  }

  const auto& povm = gateset.povm(circuit.povm_index());
  std::vector<double> p(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k) p[k] = povm[k].dot(state.transpose());
  return p;
}

namespace {

std::vector<double> clipped_distribution(std::vector<double> p, const Circuit& circuit) {
  double sum = 0;
  for (double& v : p) {
    if (v < -1e-8)
      throw SimulationDomainError("negative probability " + std::to_string(v) + " for circuit " +
                                  circuit.text());
    v = std::min(std::max(v, 0.0), 1.0);
    sum += v;
  }
  if (sum <= 0) throw SimulationDomainError("vanishing distribution for circuit " + circuit.text());
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

DataSet simulate(const GateSet& gateset, const std::vector<Circuit>& circuits, long shots_per_circuit,
                 std::uint64_t seed, int jobs) {
  if (shots_per_circuit < 1) throw std::invalid_argument("simulate: shots must be >= 1");

  std::vector<std::vector<double>> counts(circuits.size());
  parallel_for(
      circuits.size(),
      [&](std::size_t i) {
        auto p = clipped_distribution(probabilities(gateset, circuits[i]), circuits[i]);
        // Cumulative thresholds, then one uniform draw per shot.
        std::vector<double> cdf(p.size());
        double acc = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
          acc += p[k];
          cdf[k] = acc;
        }
        cdf.back() = 1.0;
        SplitMix64 rng = substream(seed, i);
        std::vector<double> c(p.size(), 0.0);
        for (long s = 0; s < shots_per_circuit; ++s) {
          double u = rng.uniform();
          std::size_t k = 0;
          while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
          c[k] += 1.0;
        }
        counts[i] = std::move(c);
      },
      jobs);

  DataSet ds;
  ds.seed = seed;
  ds.gateset_hash = gateset.content_hash();
  for (std::size_t i = 0; i < circuits.size(); ++i) ds.add_row(circuits[i], std::move(counts[i]));
  return ds;
}

DataSet exact_dataset(const GateSet& gateset, const std::vector<Circuit>& circuits, double shots) {
  DataSet ds;
  ds.gateset_hash = gateset.content_hash();
  for (const auto& circuit : circuits) {
    auto p = clipped_distribution(probabilities(gateset, circuit), circuit);
    std::vector<double> counts(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) counts[k] = shots * p[k];
    ds.add_row(circuit, std::move(counts));
  }
  return ds;
}

}  // namespace gst

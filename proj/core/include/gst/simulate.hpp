#pragma once

#include "gst/dataset.hpp"

namespace gst {

/// Outcome probabilities <<E_k| tau(S) |rho>> for every effect of the
/// circuit's POVM.  Not clipped: non-CP models may yield values outside
/// [0,1], which the estimation objectives rely on seeing.
std::vector<double> probabilities(const GateSet& gateset, const Circuit& circuit);

/// Multinomial sampling, `shots` per circuit.  Row substreams are derived
/// from hash(seed, row index), so the result is reproducible and independent
/// of threading.  Probabilities below -1e-8 raise SimulationDomainError;
/// smaller negativity is clipped and the row renormalized before sampling.
DataSet simulate(const GateSet& gateset, const std::vector<Circuit>& circuits, long shots_per_circuit,
                 std::uint64_t seed, int jobs = 0);

/// Infinite-N surrogate: counts = shots * p (clipped/renormalized like the
/// sampler but without noise).
DataSet exact_dataset(const GateSet& gateset, const std::vector<Circuit>& circuits, double shots);

}  // namespace gst

#ifndef GRCERT_MINING_HPP
#define GRCERT_MINING_HPP

#include <vector>

#include "grcert/pipeline.hpp"

namespace grcert {

struct MiningConfig {
  double merge_radius = 1e-9;   // l_inf distance below which records merge
  int records_per_nominal = 10;
};

// Deduplicates and ranks harvested counterexamples: within each nominal,
// stronger margins win and near-duplicates (l_inf within merge_radius) are
// dropped, capped at records_per_nominal; the archive is ordered by the
// nominal's estimated local risk ascending, so the least- and greatest-risk
// neighbourhoods sit at the ends.
std::vector<CounterexampleRecord> mine_counterexamples(
    const std::vector<CounterexampleRecord>& raw, const MiningConfig& cfg);

}  // namespace grcert

#endif

#include "grcert/mining.hpp"

#include <algorithm>
#include <map>

#include "grcert/errors.hpp"

namespace grcert {

std::vector<CounterexampleRecord> mine_counterexamples(
    const std::vector<CounterexampleRecord>& raw, const MiningConfig& cfg) {
  if (cfg.records_per_nominal < 1) throw ConfigError("records_per_nominal must be >= 1");
  if (cfg.merge_radius < 0.0) throw ConfigError("merge_radius must be nonnegative");

  std::map<int, std::vector<CounterexampleRecord>> by_nominal;
  for (const CounterexampleRecord& rec : raw) by_nominal[rec.nominal_index].push_back(rec);

  std::vector<CounterexampleRecord> mined;
  for (auto& [index, group] : by_nominal) {
    std::stable_sort(group.begin(), group.end(),
                     [](const CounterexampleRecord& a, const CounterexampleRecord& b) {
                       return a.margin > b.margin;
                     });
    std::vector<CounterexampleRecord> kept;
    for (CounterexampleRecord& rec : group) {
      if (static_cast<int>(kept.size()) >= cfg.records_per_nominal) break;
      bool duplicate = false;
      for (const CounterexampleRecord& other : kept) {
        const double dist = (rec.perturbed - other.perturbed).cwiseAbs().maxCoeff();
        if (dist <= cfg.merge_radius) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) kept.push_back(std::move(rec));
    }
    mined.insert(mined.end(), kept.begin(), kept.end());
  }

  std::stable_sort(mined.begin(), mined.end(),
                   [](const CounterexampleRecord& a, const CounterexampleRecord& b) {
                     if (a.log_risk != b.log_risk) return a.log_risk < b.log_risk;
                     return a.nominal_index < b.nominal_index;
                   });
  return mined;
}

}  // namespace grcert

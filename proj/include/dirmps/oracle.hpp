#ifndef DIRMPS_ORACLE_HPP
#define DIRMPS_ORACLE_HPP

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "dirmps/planner.hpp"
#include "dirmps/relevance_model.hpp"
#include "dirmps/types.hpp"

namespace dirmps {
namespace oracle {

struct OraclePlan {
  RankingAction page1;
  std::map<Observation, RankingAction> page2;
};

/// Brute-force reference for the planner: enumerates every ordered page-1
/// selection, every observation in the full 2^M space, and every ordered
/// page-2 selection, evaluating the dynamic utility with its own
/// arithmetic (no planner code on the path). Guards: N <= 6, M <= 2,
/// T <= 2, obs_mass = 1.
std::pair<double, OraclePlan> exhaustive_bellman(const RelevanceBelief& belief,
                                                 const PlanConfig& config,
                                                 const RankBias& bias);

/// Brute-force expected search length: `joint` is a distribution over
/// relevance bit-vectors indexed by document (bit k = relevance of
/// document k), `ranking` is the displayed order of document indices.
/// Sums (first-relevant-rank - 1) weighted by probability.
double exhaustive_esl(const std::vector<double>& joint,
                      const std::vector<std::size_t>& ranking);

}  // namespace oracle
}  // namespace dirmps

#endif  // DIRMPS_ORACLE_HPP

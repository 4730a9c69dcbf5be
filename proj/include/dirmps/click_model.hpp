#ifndef DIRMPS_CLICK_MODEL_HPP
#define DIRMPS_CLICK_MODEL_HPP

#include <vector>

#include "dirmps/relevance_model.hpp"
#include "dirmps/types.hpp"

namespace dirmps {

/// Examination-hypothesis likelihood of a click vector on a ranked page:
///   P(o | a, r) = prod_i (b_i r_i)^{o_i} (1 - b_i r_i)^{1 - o_i}
/// where r_i is the belief mean of the document at rank i.
double click_likelihood(const Observation& obs, const RankingAction& action,
                        const RelevanceBelief& belief, const RankBias& bias);

struct WeightedObservation {
  Observation obs;
  double probability = 0.0;
};

/// Maximum page length accepted by enumerate_truncated (2^M blow-up guard).
inline constexpr std::size_t kMaxEnumerablePage = 20;

/// Enumerates click vectors in non-increasing probability order and keeps
/// the shortest prefix whose cumulative probability reaches `mass`
/// (mass = 1 returns the full 2^M space). Probabilities are the raw
/// likelihoods, not renormalized. Ties are broken by the click vector read
/// as a binary integer, ascending. Uses best-first expansion over per-rank
/// flips rather than sorting all 2^M vectors.
std::vector<WeightedObservation> enumerate_truncated(
    const RankingAction& action, const RelevanceBelief& belief,
    const RankBias& bias, double mass);

}  // namespace dirmps

#endif  // DIRMPS_CLICK_MODEL_HPP

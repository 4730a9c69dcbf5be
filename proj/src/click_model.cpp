#include "dirmps/click_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dirmps {

namespace {

// Per-rank click probabilities b_i * r_i for the ranked documents.
std::vector<double> rank_click_probs(const RankingAction& action,
                                     const RelevanceBelief& belief,
                                     const RankBias& bias) {
  if (bias.size() < action.size())
    throw InvalidInputError("rank bias shorter than the page");
  std::vector<double> p;
  p.reserve(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    const std::ptrdiff_t idx = belief.index_of(action.page[i]);
    if (idx < 0)
      throw InvalidInputError("ranked document not in belief: " +
                              action.page[i]);
    p.push_back(bias.biases[i] * belief.mean[idx]);
  }
  return p;
}

double product_likelihood(const std::vector<double>& p,
                          const Observation& obs) {
  double prob = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    prob *= obs.clicks[i] ? p[i] : (1.0 - p[i]);
  return prob;
}

}  // namespace

double click_likelihood(const Observation& obs, const RankingAction& action,
                        const RelevanceBelief& belief, const RankBias& bias) {
  if (obs.size() != action.size())
    throw InvalidInputError("observation length does not match action");
  return product_likelihood(rank_click_probs(action, belief, bias), obs);
}

std::vector<WeightedObservation> enumerate_truncated(
    const RankingAction& action, const RelevanceBelief& belief,
    const RankBias& bias, double mass) {
  if (!(mass > 0.0 && mass <= 1.0))
    throw InvalidInputError("truncation mass must be in (0,1]");
  const std::size_t m = action.size();
  if (m > kMaxEnumerablePage)
    throw CapacityError("page too long for observation enumeration");

  const std::vector<double> p = rank_click_probs(action, belief, bias);

  auto ordered = [](std::vector<WeightedObservation> v) {
    std::sort(v.begin(), v.end(),
              [](const WeightedObservation& a, const WeightedObservation& b) {
                if (a.probability != b.probability)
                  return a.probability > b.probability;
                return a.obs.as_integer() < b.obs.as_integer();
              });
    return v;
  };

  if (mass == 1.0) {
    // Full observation space, no truncation.
    std::vector<WeightedObservation> all;
    all.reserve(std::size_t{1} << m);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
      Observation o = Observation::from_integer(v, m);
      all.push_back({o, product_likelihood(p, o)});
    }
    return ordered(std::move(all));
  }

  // Best-first expansion: start from the modal click vector, then flip
  // ranks away from their preferred outcome. A node is the set of flipped
  // ranks; children only flip ranks beyond the node's last flip, so each
  // vector is generated exactly once and never before its parent.
  std::vector<std::uint8_t> preferred(m);
  for (std::size_t i = 0; i < m; ++i) preferred[i] = p[i] >= 0.5 ? 1 : 0;

  struct Node {
    double probability;
    std::uint64_t key;  // tie-break: click vector as integer, ascending
    Observation obs;
    int last_flip;  // -1 for the modal vector
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.probability != b.probability) return a.probability < b.probability;
    return a.key > b.key;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(
      worse);

  Observation modal;
  modal.clicks = preferred;
  frontier.push({product_likelihood(p, modal), modal.as_integer(), modal, -1});

  std::vector<WeightedObservation> kept;
  double cumulative = 0.0;
  while (!frontier.empty() && cumulative < mass) {
    Node node = frontier.top();
    frontier.pop();
    kept.push_back({node.obs, node.probability});
    cumulative += node.probability;
    for (std::size_t i = static_cast<std::size_t>(node.last_flip + 1); i < m;
         ++i) {
      Observation child = node.obs;
      child.clicks[i] = static_cast<std::uint8_t>(1 - child.clicks[i]);
      frontier.push({product_likelihood(p, child), child.as_integer(),
                     std::move(child), static_cast<int>(i)});
    }
  }
  return ordered(std::move(kept));
}

}  // namespace dirmps

#include "dirmps/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dirmps {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Candidate comparison: higher utility wins, exact ties go to the smaller
// document id. Used by every argmax in this module so runs reproduce.
bool improves(double u, const DocId& doc, double best_u, const DocId& best) {
  if (u != best_u) return u > best_u;
  return best.empty() || doc < best;
}

RankingAction top_k_by(const RelevanceBelief& belief, std::size_t k,
                       const std::vector<double>& score) {
  std::vector<std::size_t> order(belief.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return belief.doc_ids[a] < belief.doc_ids[b];
  });
  RankingAction action;
  action.page.reserve(std::min(k, order.size()));
  for (std::size_t i = 0; i < order.size() && i < k; ++i)
    action.page.push_back(belief.doc_ids[order[i]]);
  return action;
}

std::vector<double> gains_of(const RelevanceBelief& belief) {
  std::vector<double> g(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i)
    g[i] = variance_adjusted_gain(belief.mean[static_cast<Eigen::Index>(i)],
                                  belief.cov(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(i)));
  return g;
}

double page_discount(std::size_t rank) {
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

// Value of ranking the remaining documents for the final stage: the best
// single page is the gain sort.
double final_stage_value(const RelevanceBelief& belief, int page_size) {
  const RankingAction page =
      gain_rank(belief, static_cast<std::size_t>(page_size));
  return expected_dcg(page, belief);
}

struct StageOutcome {
  double value = 0.0;
  RankingAction page;
};

// Plans stages t..T from `belief` by sequential ranking growth; every
// candidate document is scored with full lookahead over the truncated
// observation space of the partial page.
StageOutcome plan_stage_sequential(const RelevanceBelief& belief, int t,
                                   const PlanConfig& config,
                                   const RankBias& bias) {
  if (t == config.pages)
    return {final_stage_value(belief, config.page_size),
            gain_rank(belief, static_cast<std::size_t>(config.page_size))};

  RankingAction prefix;
  double value = 0.0;
  for (int pos = 0; pos < config.page_size; ++pos) {
    double best_u = kNegInf;
    DocId best_doc;
    for (const DocId& cand : belief.doc_ids) {
      if (std::find(prefix.page.begin(), prefix.page.end(), cand) !=
          prefix.page.end())
        continue;
      RankingAction attempt = prefix;
      attempt.page.push_back(cand);
      double u = expected_dcg(attempt, belief);
      if (config.lambda > 0.0) {
        for (const auto& [obs, prob] :
             enumerate_truncated(attempt, belief, bias, config.obs_mass)) {
          const RelevanceBelief child =
              condition_on_observation(belief, attempt, obs);
          u += config.lambda * prob *
               plan_stage_sequential(child, t + 1, config, bias).value;
        }
      }
      if (improves(u, cand, best_u, best_doc)) {
        best_u = u;
        best_doc = cand;
      }
    }
    prefix.page.push_back(best_doc);
    value = best_u;
  }
  return {value, prefix};
}

// Exhaustive maximization over every ordered page selection.
StageOutcome plan_stage_exact(const RelevanceBelief& belief, int t,
                              const PlanConfig& config, const RankBias& bias) {
  if (t == config.pages)
    return {final_stage_value(belief, config.page_size),
            gain_rank(belief, static_cast<std::size_t>(config.page_size))};

  StageOutcome best;
  best.value = kNegInf;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(belief.size(), false);

  auto evaluate = [&]() {
    RankingAction action;
    for (std::size_t idx : chosen) action.page.push_back(belief.doc_ids[idx]);
    double u = expected_dcg(action, belief);
    if (config.lambda > 0.0) {
      for (const auto& [obs, prob] :
           enumerate_truncated(action, belief, bias, config.obs_mass)) {
        const RelevanceBelief child =
            condition_on_observation(belief, action, obs);
        u += config.lambda * prob *
             plan_stage_exact(child, t + 1, config, bias).value;
      }
    }
    if (u > best.value ||
        (u == best.value && action.page < best.page.page)) {
      best.value = u;
      best.page = action;
    }
  };

  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == config.page_size) {
      evaluate();
      return;
    }
    for (std::size_t i = 0; i < belief.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      chosen.push_back(i);
      self(self, depth + 1);
      chosen.pop_back();
      used[i] = false;
    }
  };
  recurse(recurse, 0);
  return best;
}

double exact_action_space_size(std::size_t n, int pages, int page_size) {
  double size = 1.0;
  std::size_t remaining = n;
  for (int t = 0; t < pages; ++t) {
    for (int i = 0; i < page_size; ++i) {
      size *= static_cast<double>(remaining);
      if (remaining > 0) --remaining;
      if (size > 1e18) return size;
    }
  }
  return size;
}

}  // namespace

void PlanConfig::validate(std::size_t pool_size) const {
  if (pages < 1) throw InvalidInputError("pages must be >= 1");
  if (page_size < 1) throw InvalidInputError("page_size must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidInputError("lambda must be in [0,1]");
  if (!(obs_mass > 0.0 && obs_mass <= 1.0))
    throw InvalidInputError("obs_mass must be in (0,1]");
  if (static_cast<std::size_t>(pages) * static_cast<std::size_t>(page_size) >
      pool_size)
    throw CapacityError("pages * page_size exceeds the document pool");
}

RankingAction prp_rank(const RelevanceBelief& belief, std::size_t k) {
  std::vector<double> means(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i)
    means[i] = belief.mean[static_cast<Eigen::Index>(i)];
  return top_k_by(belief, k, means);
}

RankingAction gain_rank(const RelevanceBelief& belief, std::size_t k) {
  return top_k_by(belief, k, gains_of(belief));
}

PlanResult dir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& bias) {
  config.validate(belief.size());
  const StageOutcome first =
      config.mode == PlanMode::exact
          ? plan_stage_exact(belief, 1, config, bias)
          : plan_stage_sequential(belief, 1, config, bias);

  PlanResult result;
  result.page1 = first.page;
  result.expected_utility = first.value;
  if (config.pages > 1) {
    for (const auto& [obs, prob] :
         enumerate_truncated(first.page, belief, bias, config.obs_mass))
      result.contingency[obs] =
          dir_mps_page2(belief, first.page, obs, config, bias);
  }
  return result;
}

PlanResult dir_mps_exact(const RelevanceBelief& belief,
                         const PlanConfig& config, const RankBias& bias) {
  config.validate(belief.size());
  if (exact_action_space_size(belief.size(), config.pages, config.page_size) >
      1e6)
    throw CapacityError("exact planning action space exceeds 10^6");
  PlanConfig exact = config;
  exact.mode = PlanMode::exact;
  return dir_mps(belief, exact, bias);
}

RankingAction dir_mps_page2(const RelevanceBelief& belief,
                            const RankingAction& page1, const Observation& obs,
                            const PlanConfig& config, const RankBias& bias) {
  const RelevanceBelief posterior =
      condition_on_observation(belief, page1, obs);
  if (config.pages <= 2)
    return gain_rank(posterior, static_cast<std::size_t>(config.page_size));
  // Deeper horizons re-plan on demand instead of materializing the
  // exponential policy tree.
  PlanConfig rest = config;
  rest.pages = config.pages - 1;
  const StageOutcome next =
      config.mode == PlanMode::exact
          ? plan_stage_exact(posterior, 1, rest, bias)
          : plan_stage_sequential(posterior, 1, rest, bias);
  return next.page;
}

RankingAction prp_page2(const RelevanceBelief& belief,
                        const RankingAction& page1, const Observation& obs,
                        std::size_t page_size) {
  return prp_rank(condition_on_observation(belief, page1, obs), page_size);
}

std::vector<RankingAction> iir_prp_mps(const RelevanceBelief& belief,
                                       const PlanConfig& config) {
  config.validate(belief.size());
  const std::size_t total = static_cast<std::size_t>(config.pages) *
                            static_cast<std::size_t>(config.page_size);
  const std::vector<double> gains = gains_of(belief);

  std::vector<std::size_t> ranked;
  std::vector<bool> used(belief.size(), false);
  double prefix_utility = 0.0;   // U_S of the ranked prefix
  double miss_product = 1.0;     // prod (1 - r_j) over the prefix
  for (std::size_t pos = 0; pos < total; ++pos) {
    double best_rho = kNegInf;
    double best_gain_term = 0.0;
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < belief.size(); ++i) {
      if (used[i]) continue;
      const double r = belief.mean[static_cast<Eigen::Index>(i)];
      const double gain_term = gains[i] * page_discount(pos + 1);
      const double rho = r > 0.0
                             ? prefix_utility + gain_term -
                                   config.lambda / r * miss_product
                             : kNegInf;
      const bool better =
          rho > best_rho ||
          (rho == best_rho &&
           (best < 0 || belief.doc_ids[i] <
                            belief.doc_ids[static_cast<std::size_t>(best)]));
      if (better) {
        best_rho = rho;
        best_gain_term = gain_term;
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    const auto chosen = static_cast<std::size_t>(best);
    ranked.push_back(chosen);
    used[chosen] = true;
    prefix_utility += best_gain_term;
    miss_product *= 1.0 - belief.mean[static_cast<Eigen::Index>(chosen)];
  }

  std::vector<RankingAction> pages(static_cast<std::size_t>(config.pages));
  for (std::size_t i = 0; i < ranked.size(); ++i)
    pages[i / static_cast<std::size_t>(config.page_size)].page.push_back(
        belief.doc_ids[ranked[i]]);
  return pages;
}

std::vector<RankingAction> s_mps(const RelevanceBelief& belief,
                                 const PlanConfig& config) {
  config.validate(belief.size());
  const std::vector<double> gains = gains_of(belief);

  // Slot weights lambda^{t-1} / log2(i+1). The objective is a sum of
  // weight * gain over disjoint slots, so matching gain-sorted documents
  // to weight-sorted slots is the exact maximizer.
  struct Slot {
    double weight;
    int page;
    int rank;
  };
  std::vector<Slot> slots;
  for (int t = 0; t < config.pages; ++t)
    for (int i = 0; i < config.page_size; ++i)
      slots.push_back({std::pow(config.lambda, t) *
                           page_discount(static_cast<std::size_t>(i) + 1),
                       t, i});
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.page != b.page) return a.page < b.page;
    return a.rank < b.rank;
  });

  std::vector<std::size_t> order(belief.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (gains[a] != gains[b]) return gains[a] > gains[b];
    return belief.doc_ids[a] < belief.doc_ids[b];
  });

  std::vector<RankingAction> pages(static_cast<std::size_t>(config.pages));
  for (auto& p : pages)
    p.page.resize(static_cast<std::size_t>(config.page_size));
  for (std::size_t s = 0; s < slots.size(); ++s)
    pages[static_cast<std::size_t>(slots[s].page)]
        .page[static_cast<std::size_t>(slots[s].rank)] =
        belief.doc_ids[order[s]];
  return pages;
}

PlanResult iir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& bias) {
  config.validate(belief.size());
  PlanResult result;
  result.page1 =
      prp_rank(belief, static_cast<std::size_t>(config.page_size));
  result.expected_utility = expected_dcg(result.page1, belief);
  if (config.pages < 2) return result;
  for (const auto& [obs, prob] :
       enumerate_truncated(result.page1, belief, bias, config.obs_mass)) {
    const RelevanceBelief posterior =
        condition_on_observation(belief, result.page1, obs);
    RankingAction page2 =
        prp_rank(posterior, static_cast<std::size_t>(config.page_size));
    result.expected_utility +=
        config.lambda * prob * expected_dcg(page2, posterior);
    result.contingency[obs] = std::move(page2);
  }
  return result;
}

PlanResult iir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& /*bias*/, const Observation& clicks) {
  config.validate(belief.size());
  PlanResult result;
  result.page1 =
      prp_rank(belief, static_cast<std::size_t>(config.page_size));
  const RelevanceBelief posterior =
      condition_on_observation(belief, result.page1, clicks);
  RankingAction page2 =
      prp_rank(posterior, static_cast<std::size_t>(config.page_size));
  result.expected_utility = expected_dcg(result.page1, belief) +
                            config.lambda * expected_dcg(page2, posterior);
  result.contingency[clicks] = std::move(page2);
  return result;
}

Observation perfect_click_observation(const RankingAction& page1,
                                      const Judgments& judgments,
                                      const std::string& topic) {
  Observation obs;
  obs.clicks.reserve(page1.size());
  for (const DocId& d : page1.page)
    obs.clicks.push_back(judgments.grade(topic, d) >= 1 ? 1 : 0);
  return obs;
}

std::vector<RankingAction> realized_pages(const PlanResult& plan,
                                          const RelevanceBelief& belief,
                                          const PlanConfig& config,
                                          const RankBias& bias,
                                          const Observation& obs,
                                          Page2Policy policy) {
  std::vector<RankingAction> pages{plan.page1};
  if (config.pages < 2) return pages;
  if (auto it = plan.contingency.find(obs); it != plan.contingency.end()) {
    pages.push_back(it->second);
    return pages;
  }
  // Observation fell outside the truncated planning set; evaluation must
  // not depend on planning-time pruning, so compute page 2 on demand.
  pages.push_back(
      policy == Page2Policy::dynamic_gain
          ? dir_mps_page2(belief, plan.page1, obs, config, bias)
          : prp_page2(belief, plan.page1, obs,
                      static_cast<std::size_t>(config.page_size)));
  return pages;
}

std::vector<RankingAction> perfect_click_variant(
    const PlanResult& plan, const RelevanceBelief& belief,
    const PlanConfig& config, const RankBias& bias, const Judgments& judgments,
    const std::string& topic, Page2Policy policy) {
  return realized_pages(plan, belief, config, bias,
                        perfect_click_observation(plan.page1, judgments, topic),
                        policy);
}

double evaluate_plan(const RelevanceBelief& belief,
                     const std::vector<RankingAction>& pages,
                     const PlanConfig& config, const RankBias& bias) {
  if (pages.empty()) return 0.0;
  double value = expected_dcg(pages.front(), belief);
  if (pages.size() == 1 || config.lambda == 0.0) return value;
  const std::vector<RankingAction> rest(pages.begin() + 1, pages.end());
  for (const auto& [obs, prob] :
       enumerate_truncated(pages.front(), belief, bias, config.obs_mass)) {
    const RelevanceBelief posterior =
        condition_on_observation(belief, pages.front(), obs);
    value +=
        config.lambda * prob * evaluate_plan(posterior, rest, config, bias);
  }
  return value;
}

}  // namespace dirmps

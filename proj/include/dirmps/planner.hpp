#ifndef DIRMPS_PLANNER_HPP
#define DIRMPS_PLANNER_HPP

#include <map>
#include <string>
#include <vector>

#include "dirmps/click_model.hpp"
#include "dirmps/metrics.hpp"
#include "dirmps/relevance_model.hpp"
#include "dirmps/types.hpp"

namespace dirmps {

enum class PlanMode { sequential, exact };

struct PlanConfig {
  int pages = 2;        // T
  int page_size = 10;   // M
  double lambda = 0.5;  // per-stage discount; geometric through the recursion
  double obs_mass = 0.95;
  PlanMode mode = PlanMode::sequential;

  /// T >= 1, M >= 1, lambda in [0,1], obs_mass in (0,1], T*M <= pool_size.
  void validate(std::size_t pool_size) const;
};

/// Outcome of planning: the first page, the per-observation second-page
/// policy, and the dynamic utility the plan achieves. Contingency keys are
/// exactly the truncated observation set used during planning.
struct PlanResult {
  RankingAction page1;
  std::map<Observation, RankingAction> contingency;
  double expected_utility = 0.0;
};

/// Top-k documents by belief mean, descending; ties by doc id ascending.
RankingAction prp_rank(const RelevanceBelief& belief, std::size_t k);

/// Top-k documents by variance-adjusted gain, descending; ties by doc id.
/// Sorting by this gain maximizes the expected-DCG utility of a single
/// page, so it is the final-stage ranking rule.
RankingAction gain_rank(const RelevanceBelief& belief, std::size_t k);

/// Recursive multi-page planner. Maximizes
///   U_D(r_t, t) = max_a [ U_S(a, r_t)
///                         + lambda sum_o P(o|a, r_t) U_D(tau(a, r_t, o), t+1) ]
/// with U_S = expected_dcg, P = click_likelihood over the truncated
/// observation set, tau = condition_on_observation, and the final stage
/// ranked by gain_rank. Sequential mode grows each page one document at a
/// time, scoring every candidate by full lookahead; exact mode enumerates
/// every ordered page selection (guarded).
PlanResult dir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& bias);

/// dir_mps with mode forced to exact. Guard: N!/(N-TM)! <= 10^6.
PlanResult dir_mps_exact(const RelevanceBelief& belief,
                         const PlanConfig& config, const RankBias& bias);

/// Second-page ranking for a given first page and observation, using the
/// planner's rule: condition, then gain_rank (or a recursive re-plan when
/// more than one page remains). Contingency entries come from this path.
RankingAction dir_mps_page2(const RelevanceBelief& belief,
                            const RankingAction& page1, const Observation& obs,
                            const PlanConfig& config, const RankBias& bias);

/// Second-page ranking by PRP over the conditioned belief.
RankingAction prp_page2(const RelevanceBelief& belief,
                        const RankingAction& page1, const Observation& obs,
                        std::size_t page_size);

/// Cost/benefit ranking rule: grows one global ranking of T*M documents,
/// appending the argmax of
///   rho(prefix+a) = U_S(prefix+a) - (lambda / r_a) prod_{j in prefix} (1 - r_j)
/// then splits it into T pages. Static: no belief update anywhere. A
/// candidate with zero mean relevance gets rho = -inf and ranks last.
std::vector<RankingAction> iir_prp_mps(const RelevanceBelief& belief,
                                       const PlanConfig& config);

/// Static multi-page objective: maximizes
///   sum_t lambda^{t-1} U_S(a_t, r)
/// with no feedback. The objective is separable per slot, so the exact
/// maximizer assigns gain-sorted documents to slots sorted by discounted
/// weight (page ascending, then rank, on ties).
std::vector<RankingAction> s_mps(const RelevanceBelief& belief,
                                 const PlanConfig& config);

/// Interactive variant: page 1 by PRP, then one PRP page 2 per observation
/// in the truncated space of page 1.
PlanResult iir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& bias);

/// Interactive replay: page 2 for the single supplied click vector.
PlanResult iir_mps(const RelevanceBelief& belief, const PlanConfig& config,
                   const RankBias& bias, const Observation& clicks);

/// Which rule produces on-demand second pages during replay.
enum class Page2Policy { dynamic_gain, prp };

/// The click vector implied by hidden judgments: o_i = 1 iff the document
/// at rank i has grade >= 1.
Observation perfect_click_observation(const RankingAction& page1,
                                      const Judgments& judgments,
                                      const std::string& topic);

/// Replays perfect clicks through a plan: looks the observation up in the
/// contingency table, or computes page 2 on demand (conditioning plus the
/// policy's final-page rule) when planning-time truncation dropped it.
std::vector<RankingAction> perfect_click_variant(
    const PlanResult& plan, const RelevanceBelief& belief,
    const PlanConfig& config, const RankBias& bias, const Judgments& judgments,
    const std::string& topic, Page2Policy policy);

/// Replays an arbitrary observation through a plan (same lookup rule).
std::vector<RankingAction> realized_pages(const PlanResult& plan,
                                          const RelevanceBelief& belief,
                                          const PlanConfig& config,
                                          const RankBias& bias,
                                          const Observation& obs,
                                          Page2Policy policy);

/// Dynamic-objective value of a fixed (non-adaptive) sequence of pages:
///   U_S(a_1) + lambda sum_o P(o|a_1) [ U_S(a_2 | posterior) + ... ]
/// Used to compare static plans against adaptive policies under the same
/// objective.
double evaluate_plan(const RelevanceBelief& belief,
                     const std::vector<RankingAction>& pages,
                     const PlanConfig& config, const RankBias& bias);

}  // namespace dirmps

#endif  // DIRMPS_PLANNER_HPP

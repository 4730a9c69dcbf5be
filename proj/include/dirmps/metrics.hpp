#ifndef DIRMPS_METRICS_HPP
#define DIRMPS_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "dirmps/relevance_model.hpp"
#include "dirmps/types.hpp"

namespace dirmps {

/// Graded relevance judgments, optionally with binary subtopic judgments
/// for diversity evaluation.
struct Judgments {
  // topic -> doc -> grade (>= 0)
  std::map<std::string, std::map<DocId, int>> grades;
  // topic -> subtopic -> doc -> {0,1}
  std::map<std::string, std::map<std::string, std::map<DocId, int>>> subtopics;

  int grade(const std::string& topic, const DocId& doc) const;
  bool has_subtopics(const std::string& topic) const;
  /// Highest grade anywhere in the collection (0 if empty).
  int max_grade() const;
};

/// Per-document gain of the expected-DCG utility:
///   g = 2^r - 1 + 2^{r-1} ln^2(2) var
/// The variance term is the second-order correction of E[2^R - 1] for
/// R ~ N(r, var).
double variance_adjusted_gain(double mean, double var);

/// Expected DCG of a page under the belief:
///   sum_i g(mean_i, var_i) / log2(i + 1)
double expected_dcg(const RankingAction& action, const RelevanceBelief& belief);

/// DCG with exponential gain: sum_i (2^{grade_i} - 1) / log2(i + 1).
double dcg(const RankingAction& action, const Judgments& judgments,
           const std::string& topic);

/// DCG / ideal DCG; the ideal reorders the topic's judged pool by grade
/// and is cut off at the ranking length. 0 when the ideal is 0.
double ndcg(const RankingAction& action, const Judgments& judgments,
            const std::string& topic);

/// Binary AP (grade >= 1 is relevant); denominator is the number of
/// relevant documents in the topic's judged pool.
double average_precision(const RankingAction& action,
                         const Judgments& judgments, const std::string& topic);

/// Expected reciprocal rank with stop probability (2^g - 1) / 2^{g_max},
/// g_max taken over the whole collection.
double err(const RankingAction& action, const Judgments& judgments,
           const std::string& topic);

/// Expected number of documents examined before the first relevant one,
/// under independent per-rank relevance probabilities:
///   sum_i (i - 1) r_i prod_{j<i} (1 - r_j)
double expected_search_length(const std::vector<double>& ranking_relevances);

/// Joint-distribution variant: `joint` has 2^n entries summing to 1; bit k
/// of an entry's index is the relevance of the document at rank k+1. A
/// vector with no relevant document contributes 0.
double expected_search_length(const std::vector<double>& ranking_relevances,
                              const std::vector<double>& joint);

/// Session weight of page t: ln(t+1) / ln(2t). Equals 1 at t = 1 and stays
/// below 1 afterwards.
double session_page_weight(int t);

/// Session DCG: sum_t session_page_weight(t) * dcg(page_t).
double sdcg(const std::vector<RankingAction>& per_page_actions,
            const Judgments& judgments, const std::string& topic);

/// Alpha-nDCG: per-subtopic gain is discounted by (1-alpha)^(times the
/// subtopic was already covered); normalized by the greedy ideal. The
/// normalizer is never below the evaluated ranking's own score, so the
/// result stays in [0,1].
double alpha_ndcg(const RankingAction& action, const Judgments& judgments,
                  const std::string& topic, double alpha);

/// Intent-aware ERR: weighted average of per-subtopic binary ERR.
/// An empty weight map means uniform weights over the topic's subtopics.
double err_ia(const RankingAction& action, const Judgments& judgments,
              const std::string& topic,
              const std::map<std::string, double>& intent_weights = {});

/// Intent-aware precision at `cutoff`.
double ia_precision(const RankingAction& action, const Judgments& judgments,
                    const std::string& topic,
                    const std::map<std::string, double>& intent_weights,
                    std::size_t cutoff);

}  // namespace dirmps

#endif  // DIRMPS_METRICS_HPP

#include "dirmps/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace dirmps {

namespace {
const double kLn2Sq = std::numbers::ln2 * std::numbers::ln2;

double rank_discount(std::size_t rank) {
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}
}  // namespace

int Judgments::grade(const std::string& topic, const DocId& doc) const {
  auto t = grades.find(topic);
  if (t == grades.end()) return 0;
  auto d = t->second.find(doc);
  return d == t->second.end() ? 0 : d->second;
}

bool Judgments::has_subtopics(const std::string& topic) const {
  auto t = subtopics.find(topic);
  return t != subtopics.end() && !t->second.empty();
}

int Judgments::max_grade() const {
  int g = 0;
  for (const auto& [topic, docs] : grades)
    for (const auto& [doc, grade] : docs) g = std::max(g, grade);
  return g;
}

double variance_adjusted_gain(double mean, double var) {
  return std::exp2(mean) - 1.0 + std::exp2(mean - 1.0) * kLn2Sq * var;
}

double expected_dcg(const RankingAction& action,
                    const RelevanceBelief& belief) {
  double total = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const std::ptrdiff_t idx = belief.index_of(action.page[i]);
    if (idx < 0)
      throw InvalidInputError("ranked document not in belief: " +
                              action.page[i]);
    total += variance_adjusted_gain(belief.mean[idx], belief.cov(idx, idx)) *
             rank_discount(i + 1);
  }
  return total;
}

double dcg(const RankingAction& action, const Judgments& judgments,
           const std::string& topic) {
  double total = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i)
    total += (std::exp2(judgments.grade(topic, action.page[i])) - 1.0) *
             rank_discount(i + 1);
  return total;
}

double ndcg(const RankingAction& action, const Judgments& judgments,
            const std::string& topic) {
  if (action.empty()) return 0.0;
  std::vector<int> pool_grades;
  if (auto t = judgments.grades.find(topic); t != judgments.grades.end())
    for (const auto& [doc, g] : t->second) pool_grades.push_back(g);
  std::sort(pool_grades.rbegin(), pool_grades.rend());
  double ideal = 0.0;
  for (std::size_t i = 0; i < action.size() && i < pool_grades.size(); ++i)
    ideal += (std::exp2(pool_grades[i]) - 1.0) * rank_discount(i + 1);
  if (ideal <= 0.0) return 0.0;
  return dcg(action, judgments, topic) / ideal;
}

double average_precision(const RankingAction& action,
                         const Judgments& judgments,
                         const std::string& topic) {
  std::size_t total_relevant = 0;
  if (auto t = judgments.grades.find(topic); t != judgments.grades.end())
    for (const auto& [doc, g] : t->second) total_relevant += g >= 1;
  if (total_relevant == 0) return 0.0;

  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (judgments.grade(topic, action.page[i]) >= 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double err(const RankingAction& action, const Judgments& judgments,
           const std::string& topic) {
  const int g_max = judgments.max_grade();
  if (g_max <= 0) return 0.0;
  const double denom = std::exp2(g_max);
  double total = 0.0;
  double not_stopped = 1.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double stop =
        (std::exp2(judgments.grade(topic, action.page[i])) - 1.0) / denom;
    total += not_stopped * stop / static_cast<double>(i + 1);
    not_stopped *= 1.0 - stop;
  }
  return total;
}

double expected_search_length(const std::vector<double>& ranking_relevances) {
  double none_before = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ranking_relevances.size(); ++i) {
    const double r = ranking_relevances[i];
    if (!(r >= 0.0 && r <= 1.0))
      throw InvalidInputError("relevance probability outside [0,1]");
    total += static_cast<double>(i) * r * none_before;
    none_before *= 1.0 - r;
  }
  return total;
}

double expected_search_length(const std::vector<double>& ranking_relevances,
                              const std::vector<double>& joint) {
  const std::size_t n = ranking_relevances.size();
  if (joint.size() != (std::size_t{1} << n))
    throw InvalidInputError("joint table must have 2^n entries");
  double sum = 0.0;
  for (double p : joint) {
    if (!(p >= 0.0)) throw InvalidInputError("negative joint probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInputError("joint table does not sum to 1");

  double total = 0.0;
  for (std::size_t v = 0; v < joint.size(); ++v) {
    if (v == 0) continue;  // no relevant document: contributes nothing
    std::size_t first = 0;
    while (((v >> first) & 1u) == 0) ++first;
    total += joint[v] * static_cast<double>(first);
  }
  return total;
}

double session_page_weight(int t) {
  if (t < 1) throw InvalidInputError("page index must be >= 1");
  return std::log(static_cast<double>(t) + 1.0) /
         std::log(2.0 * static_cast<double>(t));
}

double sdcg(const std::vector<RankingAction>& per_page_actions,
            const Judgments& judgments, const std::string& topic) {
  if (per_page_actions.empty())
    throw InvalidInputError("sdcg needs at least one page");
  double total = 0.0;
  for (std::size_t t = 0; t < per_page_actions.size(); ++t)
    total += session_page_weight(static_cast<int>(t) + 1) *
             dcg(per_page_actions[t], judgments, topic);
  return total;
}

namespace {

const std::map<std::string, std::map<DocId, int>>& topic_subtopics(
    const Judgments& judgments, const std::string& topic) {
  auto t = judgments.subtopics.find(topic);
  if (t == judgments.subtopics.end() || t->second.empty())
    throw UnsupportedMetricError("no subtopic judgments for topic " + topic);
  return t->second;
}

// Weighted intents for a topic; empty input means uniform weights.
std::map<std::string, double> resolve_intent_weights(
    const Judgments& judgments, const std::string& topic,
    const std::map<std::string, double>& weights) {
  const auto& subs = topic_subtopics(judgments, topic);
  if (weights.empty()) {
    std::map<std::string, double> uniform;
    for (const auto& [s, docs] : subs)
      uniform[s] = 1.0 / static_cast<double>(subs.size());
    return uniform;
  }
  double sum = 0.0;
  for (const auto& [s, w] : weights) {
    if (w < 0.0) throw InvalidInputError("negative intent weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInputError("intent weights must sum to 1");
  return weights;
}

double alpha_dcg_of(const std::vector<DocId>& order,
                    const std::map<std::string, std::map<DocId, int>>& subs,
                    double alpha) {
  std::map<std::string, int> covered;
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    double gain = 0.0;
    for (const auto& [s, docs] : subs) {
      auto d = docs.find(order[i]);
      if (d != docs.end() && d->second >= 1) {
        gain += std::pow(1.0 - alpha, covered[s]);
        covered[s] += 1;
      }
    }
    total += gain * rank_discount(i + 1);
  }
  return total;
}

}  // namespace

double alpha_ndcg(const RankingAction& action, const Judgments& judgments,
                  const std::string& topic, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidInputError("alpha must be in (0,1)");
  const auto& subs = topic_subtopics(judgments, topic);

  const double actual = alpha_dcg_of(action.page, subs, alpha);

  // Greedy ideal: pick the max marginal-gain document at each rank from
  // the topic's judged pool.
  std::set<DocId> pool;
  for (const auto& [s, docs] : subs)
    for (const auto& [doc, g] : docs)
      if (g >= 1) pool.insert(doc);

  std::vector<DocId> ideal_order;
  std::map<std::string, int> covered;
  while (ideal_order.size() < action.size() && !pool.empty()) {
    DocId best;
    double best_gain = -1.0;
    for (const DocId& doc : pool) {
      double gain = 0.0;
      for (const auto& [s, docs] : subs) {
        auto d = docs.find(doc);
        if (d != docs.end() && d->second >= 1)
          gain += std::pow(1.0 - alpha, covered[s]);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = doc;
      }
    }
    if (best_gain <= 0.0) break;
    ideal_order.push_back(best);
    pool.erase(best);
    for (const auto& [s, docs] : subs) {
      auto d = docs.find(best);
      if (d != docs.end() && d->second >= 1) covered[s] += 1;
    }
  }
  double ideal = alpha_dcg_of(ideal_order, subs, alpha);
  // The greedy ideal is only an approximation of the true maximum; taking
  // the max with the evaluated ranking keeps the ratio within [0,1].
  ideal = std::max(ideal, actual);
  if (ideal <= 0.0) return 0.0;
  return actual / ideal;
}

double err_ia(const RankingAction& action, const Judgments& judgments,
              const std::string& topic,
              const std::map<std::string, double>& intent_weights) {
  const auto& subs = topic_subtopics(judgments, topic);
  const auto weights = resolve_intent_weights(judgments, topic, intent_weights);

  double total = 0.0;
  for (const auto& [s, w] : weights) {
    auto sub = subs.find(s);
    if (sub == subs.end()) continue;
    double intent_err = 0.0;
    double not_stopped = 1.0;
    for (std::size_t i = 0; i < action.size(); ++i) {
      auto d = sub->second.find(action.page[i]);
      const double stop = (d != sub->second.end() && d->second >= 1) ? 0.5 : 0.0;
      intent_err += not_stopped * stop / static_cast<double>(i + 1);
      not_stopped *= 1.0 - stop;
    }
    total += w * intent_err;
  }
  return total;
}

double ia_precision(const RankingAction& action, const Judgments& judgments,
                    const std::string& topic,
                    const std::map<std::string, double>& intent_weights,
                    std::size_t cutoff) {
  if (cutoff == 0) throw InvalidInputError("cutoff must be >= 1");
  const auto& subs = topic_subtopics(judgments, topic);
  const auto weights = resolve_intent_weights(judgments, topic, intent_weights);

  double total = 0.0;
  for (const auto& [s, w] : weights) {
    auto sub = subs.find(s);
    if (sub == subs.end()) continue;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < action.size() && i < cutoff; ++i) {
      auto d = sub->second.find(action.page[i]);
      if (d != sub->second.end() && d->second >= 1) ++hits;
    }
    total += w * static_cast<double>(hits) / static_cast<double>(cutoff);
  }
  return total;
}

}  // namespace dirmps

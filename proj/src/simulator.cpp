#include "dirmps/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace dirmps {

UserModel::UserModel(UserKind kind, std::uint64_t seed, RankBias bias)
    : kind_(kind), bias_(std::move(bias)), rng_(seed) {
  bias_.validate();
}

Observation UserModel::simulate_clicks(const RankingAction& action,
                                       const Judgments& judgments,
                                       const std::string& topic) {
  if (kind_ == UserKind::perfect) {
    Observation obs;
    obs.clicks.reserve(action.size());
    for (const DocId& d : action.page)
      obs.clicks.push_back(judgments.grade(topic, d) >= 1 ? 1 : 0);
    return obs;
  }

  if (bias_.size() < action.size())
    throw InvalidInputError("rank bias shorter than the page");
  const int g_max = judgments.max_grade();
  Observation obs;
  obs.clicks.reserve(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    double rel = 0.0;
    if (g_max > 0)
      rel = std::min(
          1.0, static_cast<double>(judgments.grade(topic, action.page[i])) /
                   static_cast<double>(g_max));
    obs.clicks.push_back(rng_.bernoulli(bias_.biases[i] * rel) ? 1 : 0);
  }
  return obs;
}

std::pair<ScoreEnsemble, Judgments> synth_ensemble(std::size_t n_docs,
                                                   std::size_t n_methods,
                                                   std::uint64_t seed,
                                                   double noise_level,
                                                   double relevance_prob,
                                                   const std::string& topic) {
  if (n_docs < 1) throw InvalidInputError("need at least one document");
  if (n_methods < 2)
    throw InsufficientSamplesError("need at least two methods");

  Rng rng(seed);
  ScoreEnsemble ensemble;
  Judgments judgments;
  ensemble.scores.resize(static_cast<Eigen::Index>(n_docs),
                         static_cast<Eigen::Index>(n_methods));

  for (std::size_t d = 0; d < n_docs; ++d) {
    char name[32];
    std::snprintf(name, sizeof name, "D%04zu", d);
    ensemble.doc_ids.emplace_back(name);
    const int latent = rng.bernoulli(relevance_prob) ? 1 : 0;
    judgments.grades[topic][ensemble.doc_ids.back()] = latent;
    for (std::size_t m = 0; m < n_methods; ++m)
      ensemble.scores(static_cast<Eigen::Index>(d),
                      static_cast<Eigen::Index>(m)) =
          static_cast<double>(latent) + noise_level * rng.normal();
  }
  return {std::move(ensemble), std::move(judgments)};
}

RelevanceBelief random_belief(std::size_t n, std::uint64_t seed, double sd) {
  Rng rng(seed);
  RelevanceBelief belief;
  belief.mean.resize(static_cast<Eigen::Index>(n));
  for (std::size_t d = 0; d < n; ++d) {
    char name[32];
    std::snprintf(name, sizeof name, "D%02zu", d);
    belief.doc_ids.emplace_back(name);
    belief.mean[static_cast<Eigen::Index>(d)] = rng.uniform(0.05, 0.95);
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) w(i, j) = rng.normal();
  Eigen::MatrixXd gram = w * w.transpose() / static_cast<double>(n);
  // Blend toward the identity to keep every principal submatrix
  // comfortably invertible.
  gram = 0.7 * gram + 0.3 * Eigen::MatrixXd::Identity(ni, ni);
  const double scale = sd * sd / gram.diagonal().maxCoeff();
  belief.cov = scale * gram;
  belief.cov = 0.5 * (belief.cov + belief.cov.transpose());
  return belief;
}

}  // namespace dirmps

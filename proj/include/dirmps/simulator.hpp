#ifndef DIRMPS_SIMULATOR_HPP
#define DIRMPS_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "dirmps/metrics.hpp"
#include "dirmps/relevance_model.hpp"
#include "dirmps/rng.hpp"
#include "dirmps/types.hpp"

namespace dirmps {

enum class UserKind { examination, perfect };

/// Click generator over hidden judgments. The examination user clicks
/// rank i with probability b_i * grade_i / g_max; the perfect user clicks
/// exactly the relevant documents. One instance owns one RNG stream, so a
/// fixed seed fully determines the click sequence for a given sequence of
/// rankings. Not shareable across threads.
class UserModel {
 public:
  UserModel(UserKind kind, std::uint64_t seed, RankBias bias);

  Observation simulate_clicks(const RankingAction& action,
                              const Judgments& judgments,
                              const std::string& topic);

  UserKind kind() const { return kind_; }

 private:
  UserKind kind_;
  RankBias bias_;
  Rng rng_;
};

/// Synthetic topic: latent binary relevance per document, per-method score
/// = latent + noise_level * N(0,1), judgments = the latent labels. All
/// draws come from the seeded portable RNG, so output is bitwise
/// reproducible.
std::pair<ScoreEnsemble, Judgments> synth_ensemble(
    std::size_t n_docs, std::size_t n_methods, std::uint64_t seed,
    double noise_level, double relevance_prob = 0.3,
    const std::string& topic = "synth");

/// Random correlated belief for small-instance verification: means drawn
/// uniformly inside (0,1), covariance built as a well-conditioned random
/// Gram matrix scaled so standard deviations are about `sd`.
RelevanceBelief random_belief(std::size_t n, std::uint64_t seed,
                              double sd = 0.2);

}  // namespace dirmps

#endif  // DIRMPS_SIMULATOR_HPP

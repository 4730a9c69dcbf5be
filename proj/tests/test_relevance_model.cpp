#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dirmps/relevance_model.hpp"
#include "dirmps/simulator.hpp"
#include "test_support.hpp"

using namespace dirmps;
using test_support::action;
using test_support::make_belief;
using test_support::obs;

namespace {

ScoreEnsemble ensemble_of(const std::vector<std::vector<double>>& rows) {
  ScoreEnsemble e;
  e.scores.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t d = 0; d < rows.size(); ++d) {
    e.doc_ids.push_back("d" + std::to_string(d));
    for (std::size_t m = 0; m < rows[d].size(); ++m)
      e.scores(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)) =
          rows[d][m];
  }
  return e;
}

}  // namespace

TEST_CASE("min_max_normalize column examples") {
  // Column [2,4,6] maps to [0, 0.5, 1] (duplicated so the ensemble has the
  // required two methods).
  auto out = min_max_normalize(ensemble_of({{2, 2}, {4, 4}, {6, 6}}));
  for (int c = 0; c < 2; ++c) {
    CHECK(out.scores(0, c) == doctest::Approx(0.0));
    CHECK(out.scores(1, c) == doctest::Approx(0.5));
    CHECK(out.scores(2, c) == doctest::Approx(1.0));
  }

  // Degenerate column [5,5,5] maps to the uninformative midpoint.
  auto flat = min_max_normalize(ensemble_of({{5, 1}, {5, 2}, {5, 3}}));
  CHECK(flat.scores(0, 0) == 0.5);
  CHECK(flat.scores(1, 0) == 0.5);
  CHECK(flat.scores(2, 0) == 0.5);

  // Columns normalize independently.
  auto ind = min_max_normalize(ensemble_of({{0, 10}, {10, 0}}));
  CHECK(ind.scores(0, 0) == 0.0);
  CHECK(ind.scores(0, 1) == 1.0);
  CHECK(ind.scores(1, 0) == 1.0);
  CHECK(ind.scores(1, 1) == 0.0);
}

TEST_CASE("min_max_normalize rejects non-finite input") {
  auto e = ensemble_of({{1, 2}, {3, 4}});
  e.scores(0, 0) = std::nan("");
  CHECK_THROWS_AS(min_max_normalize(e), InvalidInputError);
}

TEST_CASE("min_max_normalize is idempotent on non-degenerate columns") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreEnsemble e;
    e.scores.resize(6, 4);
    for (int d = 0; d < 6; ++d) {
      e.doc_ids.push_back("d" + std::to_string(d));
      for (int m = 0; m < 4; ++m) e.scores(d, m) = rng.uniform(-5.0, 20.0);
    }
    const auto once = min_max_normalize(e);
    const auto twice = min_max_normalize(once);
    CHECK((once.scores - twice.scores).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("build_belief mean and unbiased variance") {
  const auto belief = build_belief(ensemble_of({{0.4, 0.6}}), false);
  CHECK(belief.mean[0] == doctest::Approx(0.5).epsilon(1e-12));
  // ((0.4-0.5)^2 + (0.6-0.5)^2) / 1 = 0.02
  CHECK(belief.cov(0, 0) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("build_belief constant row has zero variance") {
  const auto belief =
      build_belief(ensemble_of({{0.7, 0.7, 0.7, 0.7, 0.7}}), false);
  CHECK(belief.cov(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("build_belief cross-document covariance of identical rows") {
  const auto belief = build_belief(ensemble_of({{0, 1}, {0, 1}}), true);
  CHECK(belief.cov(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(belief.cov(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  belief.validate();
}

TEST_CASE("build_belief needs two methods") {
  ScoreEnsemble e;
  e.doc_ids = {"d0"};
  e.scores.resize(1, 1);
  e.scores(0, 0) = 0.5;
  CHECK_THROWS_AS(build_belief(e, false), InsufficientSamplesError);
}

TEST_CASE("conditioning: two-document hand example") {
  Eigen::MatrixXd cov(2, 2);
  cov << 0.04, 0.02, 0.02, 0.04;
  const auto belief = make_belief({0.5, 0.5}, cov);

  // Rank d1, observe a click: remaining mean 0.5 + (0.02/0.04)(1 - 0.5),
  // remaining variance 0.04 - 0.02^2/0.04.
  const auto post = condition_on_observation(belief, action({"d1"}), obs({1}));
  REQUIRE(post.size() == 1);
  CHECK(post.doc_ids[0] == "d0");
  CHECK(std::abs(post.mean[0] - 0.75) < 1e-12);
  CHECK(std::abs(post.cov(0, 0) - 0.03) < 1e-12);

  // No click: same shrink, mean moves the other way.
  const auto post0 = condition_on_observation(belief, action({"d1"}), obs({0}));
  CHECK(std::abs(post0.mean[0] - 0.25) < 1e-12);
  CHECK(std::abs(post0.cov(0, 0) - 0.03) < 1e-12);
}

TEST_CASE("conditioning with diagonal covariance transfers nothing") {
  const auto belief =
      make_belief({0.3, 0.6, 0.9}, std::vector<double>{0.04, 0.05, 0.06});
  for (int click = 0; click <= 1; ++click) {
    const auto post =
        condition_on_observation(belief, action({"d1"}), obs({click}));
    REQUIRE(post.size() == 2);
    CHECK(post.mean[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(post.mean[1] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(post.cov(0, 0) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(post.cov(1, 1) == doctest::Approx(0.06).epsilon(1e-12));
  }
}

TEST_CASE("zero-innovation observation leaves the mean alone") {
  Eigen::MatrixXd cov(2, 2);
  cov << 0.04, 0.02, 0.02, 0.04;
  // The ranked document's mean equals the observation exactly: o = 1.
  const auto belief = make_belief({0.5, 1.0}, cov);
  const auto post = condition_on_observation(belief, action({"d1"}), obs({1}));
  CHECK(std::abs(post.mean[0] - 0.5) < 1e-12);
  CHECK(std::abs(post.cov(0, 0) - 0.03) < 1e-12);
}

TEST_CASE("conditioning rejects mismatched observation length") {
  const auto belief = make_belief({0.5, 0.5}, std::vector<double>{0.1, 0.1});
  CHECK_THROWS_AS(
      condition_on_observation(belief, action({"d0"}), obs({1, 0})),
      InvalidInputError);
}

TEST_CASE("conditioning on an unknown document fails") {
  const auto belief = make_belief({0.5}, std::vector<double>{0.1});
  CHECK_THROWS_AS(condition_on_observation(belief, action({"zz"}), obs({1})),
                  InvalidInputError);
}

TEST_CASE("singular ranked covariance resolves via ridge, not an error") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(0, 0) = 0.05;  // ranked document has zero variance
  const auto belief = make_belief({0.4, 0.6}, cov);
  const auto post = condition_on_observation(belief, action({"d1"}), obs({1}));
  CHECK(post.mean[0] == doctest::Approx(0.4));
  CHECK(std::isfinite(post.cov(0, 0)));
}

TEST_CASE("conditioning consumes every ranked document") {
  const auto belief = random_belief(6, 31);
  const auto post =
      condition_on_observation(belief, action({"D01", "D04"}), obs({1, 0}));
  CHECK(post.size() == 4);
  CHECK(post.index_of("D01") == -1);
  CHECK(post.index_of("D04") == -1);
  const auto none = condition_on_observation(
      belief, action({"D00", "D01", "D02", "D03", "D04", "D05"}),
      obs({1, 0, 1, 0, 1, 0}));
  CHECK(none.size() == 0);
}

TEST_CASE("posterior stays PSD and variances never grow") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto belief = random_belief(5, 1000 + seed);
    Rng rng(2000 + seed);
    const auto o =
        obs({rng.bernoulli(0.5) ? 1 : 0, rng.bernoulli(0.5) ? 1 : 0});
    const auto post =
        condition_on_observation(belief, action({"D01", "D03"}), o);

    CHECK(post.size() == belief.size() - 2);
    CHECK((post.cov - post.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(min_eigenvalue(post.cov) >= -1e-9);
    CHECK(post.cov(0, 0) <= belief.cov(0, 0) + 1e-12);  // D00
    CHECK(post.cov(1, 1) <= belief.cov(2, 2) + 1e-12);  // D02
    CHECK(post.cov(2, 2) <= belief.cov(4, 4) + 1e-12);  // D04
    for (Eigen::Index i = 0; i < post.mean.size(); ++i) {
      CHECK(post.mean[i] >= 0.0);
      CHECK(post.mean[i] <= 1.0);
    }
  }
}

TEST_CASE("conditioned mean matches the Monte Carlo regression estimate") {
  // Sample the joint Gaussian, keep draws whose ranked coordinate exceeds
  // its mean (the thresholded "observation"), and compare the selected
  // averages against the conditional-mean line at the same point.
  Eigen::MatrixXd cov(3, 3);
  cov << 0.040, 0.018, 0.012,
         0.018, 0.050, 0.020,
         0.012, 0.020, 0.045;
  const auto belief = make_belief({0.5, 0.4, 0.6}, cov);

  const std::size_t samples = 100000;
  test_support::MvnSampler sampler(belief.mean, belief.cov, 4242);
  std::vector<Eigen::VectorXd> kept;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd x = sampler.draw();
    if (x[0] > belief.mean[0]) kept.push_back(std::move(x));
  }
  REQUIRE(kept.size() > 10000);

  Eigen::Vector3d sel_mean = Eigen::Vector3d::Zero();
  for (const auto& x : kept) sel_mean += x;
  sel_mean /= static_cast<double>(kept.size());

  // The implementation's regression slope, recovered from a unit click.
  const auto post1 = condition_on_observation(belief, action({"d0"}), obs({1}));
  const Eigen::Vector2d slope{
      (post1.mean[0] - belief.mean[1]) / (1.0 - belief.mean[0]),
      (post1.mean[1] - belief.mean[2]) / (1.0 - belief.mean[0])};

  for (int i = 0; i < 2; ++i) {
    const double predicted =
        belief.mean[i + 1] + slope[i] * (sel_mean[0] - belief.mean[0]);
    // The residual x_{i+1} - slope * x_0 is independent of the selection,
    // so its spread gives the standard error of the comparison.
    double sq = 0.0;
    for (const auto& x : kept) {
      const double resid = x[i + 1] - slope[i] * x[0] -
                           (belief.mean[i + 1] - slope[i] * belief.mean[0]);
      sq += resid * resid;
    }
    const double se = std::sqrt(sq / static_cast<double>(kept.size())) /
                      std::sqrt(static_cast<double>(kept.size()));
    CHECK(std::abs(sel_mean[i + 1] - predicted) <= 3.0 * se);
  }
}

TEST_CASE("project_to_psd clips negative directions") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  const auto p = project_to_psd(m);
  CHECK(min_eigenvalue(p) >= -1e-12);
  CHECK(p(0, 1) == doctest::Approx(p(1, 0)));
}

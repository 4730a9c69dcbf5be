#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirmps/experiment.hpp"

using namespace dirmps;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_synth_config() {
  ExperimentConfig c;
  c.synthetic = true;
  c.synth_topics = 5;
  c.synth_docs = 12;
  c.synth_methods = 4;
  c.synth_noise = 0.25;
  c.plan.pages = 2;
  c.plan.page_size = 2;
  c.plan.obs_mass = 0.95;
  c.lambdas = {0.0, 0.8};
  c.seed = 11;
  c.workers = 2;
  return c;
}

}  // namespace

TEST_CASE("config validation rejects conflicts up front") {
  ExperimentConfig c = small_synth_config();
  c.run_paths = {"a.run", "b.run"};
  CHECK_THROWS_AS(c.validate(), InvalidInputError);

  c = small_synth_config();
  c.algorithms = {};
  CHECK_THROWS_AS(c.validate(), InvalidInputError);

  c = small_synth_config();
  c.algorithms = {"NOT-AN-ALGORITHM"};
  CHECK_THROWS_AS(c.validate(), InvalidInputError);

  c = small_synth_config();
  c.lambdas = {1.5};
  CHECK_THROWS_AS(c.validate(), InvalidInputError);

  c = small_synth_config();
  c.synth_docs = 3;  // below pages * page_size
  CHECK_THROWS_AS(c.validate(), InvalidInputError);

  c = ExperimentConfig{};  // neither synthetic nor enough run files
  CHECK_THROWS_AS(c.validate(), InvalidInputError);
}

TEST_CASE("wilcoxon signed-rank sanity") {
  CHECK(wilcoxon_signed_rank({1, 2, 3}, {1, 2, 3}) == 1.0);

  std::vector<double> a, b;
  for (int i = 0; i < 40; ++i) {
    a.push_back(i);
    b.push_back(i + 1.0);  // constant shift
  }
  CHECK(wilcoxon_signed_rank(a, b) < 0.001);

  // Symmetric differences should not look significant.
  std::vector<double> c, d;
  for (int i = 0; i < 40; ++i) {
    c.push_back(i);
    d.push_back(i + ((i % 2) ? 0.5 : -0.5));
  }
  CHECK(wilcoxon_signed_rank(c, d) > 0.5);

  CHECK_THROWS_AS(wilcoxon_signed_rank({1.0}, {1.0, 2.0}), InvalidInputError);
}

TEST_CASE("synthetic sweep produces a complete, deterministic table") {
  const ExperimentConfig config = small_synth_config();
  const ExperimentResult r1 = run_experiment(config);
  const ExperimentResult r2 = run_experiment(config);
  CHECK(r1.per_topic_tsv == r2.per_topic_tsv);
  CHECK(r1.summary_tsv == r2.summary_tsv);
  CHECK(r1.summary_json == r2.summary_json);

  // Every (topic, algorithm, lambda) cell exists, with page-1 metrics for
  // all algorithms and explicit fields on every row.
  for (const std::string& alg : config.algorithms)
    for (double lambda : config.lambdas)
      for (std::size_t t = 0; t < config.synth_topics; ++t) {
        char topic[32];
        std::snprintf(topic, sizeof topic, "synth-%04zu", t);
        bool found = false;
        for (const ResultRow& row : r1.rows)
          if (row.topic == topic && row.algorithm == alg &&
              row.lambda == lambda && row.page == "1" && row.metric == "ndcg")
            found = true;
        CHECK_MESSAGE(found, alg, " lambda=", lambda, " topic=", topic);
      }

  for (const ResultRow& row : r1.rows) {
    CHECK(!row.topic.empty());
    CHECK(!row.algorithm.empty());
    CHECK(!row.page.empty());
    CHECK(!row.metric.empty());
    if (row.metric == "ndcg" || row.metric == "ap" || row.metric == "err") {
      CHECK(row.value >= 0.0);
      CHECK(row.value <= 1.0);
    }
  }

  CHECK(r1.summary_tsv.find("sap: unavailable") != std::string::npos);
  CHECK(std::isfinite(r1.mean_of("PRP", 0.8, "1", "ndcg")));
  CHECK(std::isfinite(r1.mean_of("DIR-MPS", 0.8, "plan", "dynamic_utility")));
}

TEST_CASE("worker count does not change results") {
  ExperimentConfig config = small_synth_config();
  config.synth_topics = 3;
  config.workers = 1;
  const auto serial = run_experiment(config);
  config.workers = 3;
  const auto parallel = run_experiment(config);
  CHECK(serial.per_topic_tsv == parallel.per_topic_tsv);
}

TEST_CASE("degenerate sweep: PRP only") {
  ExperimentConfig config = small_synth_config();
  config.algorithms = {"PRP"};
  config.lambdas = {0.5};
  const auto result = run_experiment(config);
  bool page1 = false, page2 = false, session = false;
  for (const ResultRow& row : result.rows) {
    CHECK(row.algorithm == "PRP");
    page1 |= row.page == "1";
    page2 |= row.page == "2";
    session |= row.page == "session";
  }
  CHECK(page1);
  CHECK(page2);
  CHECK(session);
}

TEST_CASE("noise-free all-relevant corpus gives NDCG 1 everywhere") {
  ExperimentConfig config = small_synth_config();
  config.synth_noise = 0.0;
  config.synth_relevance_prob = 1.0;
  config.lambdas = {0.5};
  const auto result = run_experiment(config);
  int checked = 0;
  for (const ResultRow& row : result.rows)
    if (row.metric == "ndcg") {
      CHECK(row.value == doctest::Approx(1.0));
      ++checked;
    }
  CHECK(checked > 0);
}

TEST_CASE("uniform page-2 weighting is accepted and deterministic") {
  ExperimentConfig config = small_synth_config();
  config.uniform_page2_weights = true;
  config.algorithms = {"DIR-MPS", "IIR-MPS"};
  const auto result = run_experiment(config);
  CHECK(result.summary_tsv.find("uniform") != std::string::npos);
}

TEST_CASE("examination click source replays stochastic but seeded clicks") {
  ExperimentConfig config = small_synth_config();
  config.user_kind = UserKind::examination;
  config.algorithms = {"DIR-MPS", "DIR-MPS-C"};
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  CHECK(a.per_topic_tsv == b.per_topic_tsv);
}

TEST_CASE("file-based experiment with diversity judgments") {
  const fs::path dir =
      fs::temp_directory_path() / ("dirmps-exp-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    return (dir / name).string();
  };
  const auto run_a = write("a.run",
                           "1 Q0 D1 1 9.0 a\n1 Q0 D2 2 7.0 a\n"
                           "1 Q0 D3 3 5.0 a\n1 Q0 D4 4 1.0 a\n");
  const auto run_b = write("b.run",
                           "1 Q0 D2 1 8.0 b\n1 Q0 D1 2 6.0 b\n"
                           "1 Q0 D4 3 4.0 b\n1 Q0 D3 4 2.0 b\n");
  const auto qrels = write("j.qrels", "1 0 D1 1\n1 0 D3 1\n1 0 D4 0\n");
  const auto div = write("d.qrels", "1 s1 D1 1\n1 s2 D3 1\n1 s1 D2 0\n");

  ExperimentConfig config;
  config.run_paths = {run_a, run_b};
  config.qrels_path = qrels;
  config.diversity_qrels_path = div;
  config.plan.pages = 2;
  config.plan.page_size = 1;
  config.lambdas = {0.5};
  config.algorithms = {"PRP", "DIR-MPS", "DIR-MPS-C"};
  config.keep_top = 4;
  config.output_dir = (dir / "out").string();

  const auto result = run_experiment(config);
  bool saw_diversity = false;
  for (const ResultRow& row : result.rows)
    saw_diversity |= row.metric == "alpha_ndcg";
  CHECK(saw_diversity);

  write_result_files(result, config.output_dir);
  CHECK(fs::exists(fs::path(config.output_dir) / "per_topic.tsv"));
  CHECK(fs::exists(fs::path(config.output_dir) / "summary.tsv"));
  CHECK(fs::exists(fs::path(config.output_dir) / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("built-in verification passes on a fresh build") {
  std::ostringstream out;
  CHECK(verify(out) == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);
}

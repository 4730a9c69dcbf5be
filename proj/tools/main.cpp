// Command-line front end: `run` executes the multi-page ranking experiment,
// `verify` runs the built-in cross-checks, `synth` writes a synthetic
// corpus (run files + qrels) to disk.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>

#include "dirmps/data_ingest.hpp"
#include "dirmps/experiment.hpp"
#include "dirmps/rng.hpp"
#include "dirmps/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void add_run_options(CLI::App* cmd, dirmps::ExperimentConfig& config,
                     std::string& mode, std::string& user) {
  cmd->set_config("--config", "", "declarative config file (ini format)");
  cmd->add_option("--run", config.run_paths,
                  "retrieval run file, one per method (repeatable)");
  cmd->add_option("--qrels", config.qrels_path, "relevance judgments file");
  cmd->add_option("--diversity-qrels", config.diversity_qrels_path,
                  "subtopic judgments file");
  cmd->add_flag("--synthetic", config.synthetic,
                "generate a synthetic corpus instead of reading files");
  cmd->add_option("--synth-topics", config.synth_topics);
  cmd->add_option("--synth-docs", config.synth_docs);
  cmd->add_option("--synth-methods", config.synth_methods);
  cmd->add_option("--synth-noise", config.synth_noise);
  cmd->add_option("--synth-relevance-prob", config.synth_relevance_prob);
  cmd->add_option("--algorithms", config.algorithms,
                  "subset of PRP IIR-PRP-MPS S-MPS IIR-MPS IIR-MPS-C "
                  "DIR-MPS DIR-MPS-C");
  cmd->add_option("--lambdas", config.lambdas, "discount values to sweep");
  cmd->add_option("--pages", config.plan.pages, "result pages (T)");
  cmd->add_option("--page-size", config.plan.page_size,
                  "documents per page (M)");
  cmd->add_option("--obs-mass", config.plan.obs_mass,
                  "observation-space truncation mass");
  cmd->add_option("--mode", mode, "planner mode: sequential or exact")
      ->check(CLI::IsMember({"sequential", "exact"}));
  cmd->add_option("--pool-depth", config.pool_depth,
                  "per-method pooling depth");
  cmd->add_option("--keep-top", config.keep_top,
                  "pool size kept by mean relevance");
  cmd->add_flag("!--no-cross-covariance", config.cross_doc_covariance,
                "diagonal-only belief covariance");
  cmd->add_option("--metrics", config.metrics, "page metrics: ndcg ap err");
  cmd->add_flag("--uniform-page2-weights", config.uniform_page2_weights,
                "average page-2 metrics uniformly instead of by likelihood");
  cmd->add_option("--alpha", config.alpha, "alpha-nDCG parameter");
  cmd->add_option("--ia-cutoff", config.ia_cutoff, "IA-precision cutoff");
  cmd->add_option("--user", user,
                  "click source for the -C variants: perfect or examination")
      ->check(CLI::IsMember({"perfect", "examination"}));
  cmd->add_option("--seed", config.seed, "master seed");
  cmd->add_option("--workers", config.workers,
                  "parallel topic workers (0 = hardware)");
  cmd->add_option("--output", config.output_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic multi-page search ranking experiments"};
  app.require_subcommand(1);

  dirmps::ExperimentConfig config;
  std::string mode = "sequential";
  std::string user = "perfect";
  CLI::App* run = app.add_subcommand("run", "run the experiment sweep");
  add_run_options(run, config, mode, user);

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the built-in cross-checks");

  struct SynthArgs {
    std::size_t topics = 10, docs = 30, methods = 5;
    double noise = 0.2, relevance_prob = 0.3;
    std::uint64_t seed = 42;
    std::string output = "synth_corpus";
  } synth_args;
  CLI::App* synth =
      app.add_subcommand("synth", "write a synthetic corpus to disk");
  synth->add_option("--topics", synth_args.topics);
  synth->add_option("--docs", synth_args.docs);
  synth->add_option("--methods", synth_args.methods);
  synth->add_option("--noise", synth_args.noise);
  synth->add_option("--relevance-prob", synth_args.relevance_prob);
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--output", synth_args.output, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      config.plan.mode = mode == "exact" ? dirmps::PlanMode::exact
                                         : dirmps::PlanMode::sequential;
      config.user_kind = user == "examination"
                             ? dirmps::UserKind::examination
                             : dirmps::UserKind::perfect;
      const dirmps::ExperimentResult result = dirmps::run_experiment(config);
      if (!config.output_dir.empty()) {
        dirmps::write_result_files(result, config.output_dir);
        std::cout << "wrote per_topic.tsv, summary.tsv, summary.json to "
                  << config.output_dir << '\n';
      } else {
        std::cout << result.summary_tsv;
      }
      return kExitOk;
    }
    if (verify_cmd->parsed())
      return dirmps::verify(std::cout) == 0 ? kExitOk : kExitCheckFailure;
    if (synth->parsed()) {
      namespace fs = std::filesystem;
      fs::create_directories(synth_args.output);
      dirmps::Rng master(synth_args.seed);
      std::vector<dirmps::RunFile> runs(synth_args.methods);
      dirmps::Judgments all_judgments;
      for (std::size_t t = 0; t < synth_args.topics; ++t) {
        char topic[32];
        std::snprintf(topic, sizeof topic, "synth-%04zu", t);
        auto [ensemble, judgments] = dirmps::synth_ensemble(
            synth_args.docs, synth_args.methods, master.next_u64(),
            synth_args.noise, synth_args.relevance_prob, topic);
        all_judgments.grades.merge(judgments.grades);
        for (std::size_t m = 0; m < synth_args.methods; ++m) {
          std::vector<std::size_t> order(ensemble.doc_ids.size());
          for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
          const auto col = static_cast<Eigen::Index>(m);
          std::sort(order.begin(), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa =
                          ensemble.scores(static_cast<Eigen::Index>(a), col);
                      const double sb =
                          ensemble.scores(static_cast<Eigen::Index>(b), col);
                      if (sa != sb) return sa > sb;
                      return ensemble.doc_ids[a] < ensemble.doc_ids[b];
                    });
          for (std::size_t i = 0; i < order.size(); ++i)
            runs[m].records.push_back(
                {topic, topic + std::string("-") + ensemble.doc_ids[order[i]],
                 static_cast<long>(i + 1),
                 ensemble.scores(static_cast<Eigen::Index>(order[i]), col),
                 "method" + std::to_string(m)});
        }
        // Prefix doc ids with the topic so qrels stay per-topic unique.
        std::map<dirmps::DocId, int> prefixed;
        for (const auto& [doc, grade] : all_judgments.grades[topic])
          prefixed[topic + std::string("-") + doc] = grade;
        all_judgments.grades[topic] = std::move(prefixed);
      }
      for (std::size_t m = 0; m < synth_args.methods; ++m)
        dirmps::write_run(fs::path(synth_args.output) /
                              ("method" + std::to_string(m) + ".run"),
                          runs[m]);
      dirmps::write_qrels(fs::path(synth_args.output) / "synth.qrels",
                          all_judgments);
      std::cout << "wrote " << synth_args.methods << " run files and qrels to "
                << synth_args.output << '\n';
      return kExitOk;
    }
  } catch (const dirmps::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return kExitUsage;
}

#ifndef DIRMPS_EXPERIMENT_HPP
#define DIRMPS_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dirmps/planner.hpp"
#include "dirmps/simulator.hpp"

namespace dirmps {

/// Everything the `run` subcommand needs: inputs (files or the synthetic
/// generator), the algorithm and lambda sweep, planning parameters, user
/// model, and output options.
struct ExperimentConfig {
  // File inputs (mutually exclusive with synthetic).
  std::vector<std::string> run_paths;
  std::string qrels_path;
  std::string diversity_qrels_path;

  // Synthetic generator.
  bool synthetic = false;
  std::size_t synth_topics = 100;
  std::size_t synth_docs = 30;
  std::size_t synth_methods = 5;
  double synth_noise = 0.2;
  double synth_relevance_prob = 0.3;

  // Sweep.
  std::vector<std::string> algorithms = {"PRP",     "IIR-PRP-MPS", "S-MPS",
                                         "IIR-MPS", "IIR-MPS-C",   "DIR-MPS",
                                         "DIR-MPS-C"};
  std::vector<double> lambdas = {0.0, 0.5, 0.8, 1.0};

  // Planning.
  PlanConfig plan;  // lambda is taken from the sweep, not from here
  std::size_t pool_depth = 100;
  std::size_t keep_top = 30;
  bool cross_doc_covariance = true;

  // Click source for the -C replay variants (perfect reproduces the
  // hidden labels; examination draws stochastic clicks from the seed).
  UserKind user_kind = UserKind::perfect;
  std::uint64_t seed = 42;

  // Evaluation.
  std::vector<std::string> metrics = {"ndcg", "ap", "err"};
  bool uniform_page2_weights = false;  // else weighted by P(o)
  double alpha = 0.5;                  // alpha-nDCG parameter
  std::size_t ia_cutoff = 10;          // IA-precision cutoff

  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string output_dir;   // empty = do not write files

  void validate() const;
};

/// One output cell. Pages are "1", "2", "session", or "plan" (plan-level
/// dynamic utility).
struct ResultRow {
  std::string topic;
  std::string algorithm;
  double lambda = 0.0;
  std::string page;
  std::string metric;
  double value = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // per-topic, deterministic order
  std::string per_topic_tsv;
  std::string summary_tsv;  // means over topics + Wilcoxon significance
  std::string summary_json;

  /// Mean over topics of a metric cell; NaN when absent.
  double mean_of(const std::string& algorithm, double lambda,
                 const std::string& page, const std::string& metric) const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes per_topic.tsv, summary.tsv and summary.json under dir.
void write_result_files(const ExperimentResult& result,
                        const std::string& dir);

/// Two-sided Wilcoxon signed-rank test (normal approximation, zeros
/// dropped, tie-corrected). Returns the p-value; 1.0 when no non-zero
/// differences exist.
double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b);

/// Runs the built-in cross-checks (reference numbers, oracle equivalences,
/// degeneration identities), printing one pass/fail line per check.
/// Returns the number of failed checks.
int verify(std::ostream& out);

}  // namespace dirmps

#endif  // DIRMPS_EXPERIMENT_HPP

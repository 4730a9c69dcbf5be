#include "dirmps/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dirmps/data_ingest.hpp"
#include "dirmps/oracle.hpp"
#include "dirmps/rng.hpp"

namespace dirmps {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::set<std::string> kKnownAlgorithms = {
    "PRP",       "IIR-PRP-MPS", "S-MPS",    "IIR-MPS",
    "IIR-MPS-C", "DIR-MPS",     "DIR-MPS-C"};

struct TopicInput {
  std::string topic;
  RelevanceBelief belief;
};

std::vector<RankingAction> split_pages(const RankingAction& flat,
                                       int pages, int page_size) {
  std::vector<RankingAction> out(static_cast<std::size_t>(pages));
  for (std::size_t i = 0; i < flat.size(); ++i)
    out[i / static_cast<std::size_t>(page_size)].page.push_back(flat.page[i]);
  return out;
}

// Normalized weights over a contingency table: observation likelihood by
// default, uniform when requested.
std::vector<std::pair<const Observation*, double>> contingency_weights(
    const PlanResult& plan, const RelevanceBelief& belief,
    const RankBias& bias, bool uniform) {
  std::vector<std::pair<const Observation*, double>> weights;
  double total = 0.0;
  for (const auto& [obs, page2] : plan.contingency) {
    const double w =
        uniform ? 1.0 : click_likelihood(obs, plan.page1, belief, bias);
    weights.push_back({&obs, w});
    total += w;
  }
  if (total > 0.0)
    for (auto& [obs, w] : weights) w /= total;
  return weights;
}

class TopicEvaluator {
 public:
  TopicEvaluator(const ExperimentConfig& config, const Judgments& judgments,
                 const TopicInput& input)
      : config_(config),
        judgments_(judgments),
        topic_(input.topic),
        belief_(input.belief),
        bias_(RankBias::dcg_default(
            static_cast<std::size_t>(config.plan.page_size))) {}

  std::vector<ResultRow> evaluate() {
    for (double lambda : config_.lambdas) {
      plan_ = config_.plan;
      plan_.lambda = lambda;
      dir_plan_.reset();
      iir_plan_.reset();
      for (const std::string& alg : config_.algorithms) evaluate_cell(alg);
    }
    return std::move(rows_);
  }

 private:
  void emit(const std::string& page, const std::string& metric, double value) {
    rows_.push_back({topic_, alg_, plan_.lambda, page, metric, value});
  }

  void emit_page_metrics(const std::string& page, const RankingAction& a) {
    for (const std::string& m : config_.metrics) emit_one(page, m, a);
    if (judgments_.has_subtopics(topic_)) {
      emit(page, "alpha_ndcg", alpha_ndcg(a, judgments_, topic_, config_.alpha));
      emit(page, "err_ia", err_ia(a, judgments_, topic_));
      emit(page, "ia_precision",
           ia_precision(a, judgments_, topic_, {}, config_.ia_cutoff));
    }
  }

  void emit_one(const std::string& page, const std::string& metric,
                const RankingAction& a) {
    if (metric == "ndcg")
      emit(page, "ndcg", ndcg(a, judgments_, topic_));
    else if (metric == "ap")
      emit(page, "ap", average_precision(a, judgments_, topic_));
    else if (metric == "err")
      emit(page, "err", err(a, judgments_, topic_));
    else
      throw InvalidInputError("unknown metric: " + metric);
  }

  double page_metric(const std::string& metric, const RankingAction& a) {
    if (metric == "ndcg") return ndcg(a, judgments_, topic_);
    if (metric == "ap") return average_precision(a, judgments_, topic_);
    if (metric == "err") return err(a, judgments_, topic_);
    if (metric == "alpha_ndcg")
      return alpha_ndcg(a, judgments_, topic_, config_.alpha);
    if (metric == "err_ia") return err_ia(a, judgments_, topic_);
    if (metric == "ia_precision")
      return ia_precision(a, judgments_, topic_, {}, config_.ia_cutoff);
    throw InvalidInputError("unknown metric: " + metric);
  }

  std::vector<std::string> page_metric_names() const {
    std::vector<std::string> names = config_.metrics;
    if (judgments_.has_subtopics(topic_)) {
      names.push_back("alpha_ndcg");
      names.push_back("err_ia");
      names.push_back("ia_precision");
    }
    return names;
  }

  // Fixed multi-page plan: direct metrics per page plus session sDCG.
  void emit_static(const std::vector<RankingAction>& pages) {
    for (std::size_t t = 0; t < pages.size(); ++t)
      emit_page_metrics(std::to_string(t + 1), pages[t]);
    emit("session", "sdcg", sdcg(pages, judgments_, topic_));
  }

  // Contingency plan: page 1 direct, page 2 and session averaged over the
  // observation table.
  void emit_policy(const PlanResult& plan) {
    emit_page_metrics("1", plan.page1);
    const auto weights = contingency_weights(plan, belief_, bias_,
                                             config_.uniform_page2_weights);
    if (weights.empty()) return;
    for (const std::string& m : page_metric_names()) {
      double avg = 0.0;
      for (const auto& [obs, w] : weights)
        avg += w * page_metric(m, plan.contingency.at(*obs));
      emit("2", m, avg);
    }
    double avg_sdcg = 0.0;
    for (const auto& [obs, w] : weights)
      avg_sdcg += w * sdcg({plan.page1, plan.contingency.at(*obs)},
                           judgments_, topic_);
    emit("session", "sdcg", avg_sdcg);
  }

  const PlanResult& dir_plan() {
    if (!dir_plan_) dir_plan_ = dir_mps(belief_, plan_, bias_);
    return *dir_plan_;
  }

  const PlanResult& iir_plan() {
    if (!iir_plan_) iir_plan_ = iir_mps(belief_, plan_, bias_);
    return *iir_plan_;
  }

  // Replayed second page for the -C variants: perfect clicks by default,
  // stochastic examination clicks when configured.
  std::vector<RankingAction> replayed(const PlanResult& plan,
                                      Page2Policy policy) {
    if (config_.user_kind == UserKind::perfect)
      return perfect_click_variant(plan, belief_, plan_, bias_, judgments_,
                                   topic_, policy);
    const std::uint64_t seed =
        splitmix64(config_.seed ^ fnv1a64(topic_) ^ fnv1a64(alg_) ^
                   static_cast<std::uint64_t>(plan_.lambda * 1e6));
    UserModel user(UserKind::examination, seed, bias_);
    const Observation obs =
        user.simulate_clicks(plan.page1, judgments_, topic_);
    return realized_pages(plan, belief_, plan_, bias_, obs, policy);
  }

  // Static multi-page objective value of a fixed plan under the prior:
  // sum_t lambda^{t-1} U_S(page_t).
  double static_objective(const std::vector<RankingAction>& pages) const {
    double value = 0.0;
    double weight = 1.0;
    for (const auto& p : pages) {
      value += weight * expected_dcg(p, belief_);
      weight *= plan_.lambda;
    }
    return value;
  }

  void emit_plan_utilities(const std::vector<RankingAction>& pages) {
    emit("plan", "dynamic_utility", evaluate_plan(belief_, pages, plan_, bias_));
    emit("plan", "static_utility", static_objective(pages));
  }

  void evaluate_cell(const std::string& alg) {
    alg_ = alg;
    if (alg == "PRP") {
      const std::size_t want = static_cast<std::size_t>(plan_.pages) *
                               static_cast<std::size_t>(plan_.page_size);
      const auto pages = split_pages(prp_rank(belief_, want), plan_.pages,
                                     plan_.page_size);
      emit_static(pages);
      emit_plan_utilities(pages);
    } else if (alg == "IIR-PRP-MPS") {
      const auto pages = iir_prp_mps(belief_, plan_);
      emit_static(pages);
      emit_plan_utilities(pages);
    } else if (alg == "S-MPS") {
      const auto pages = s_mps(belief_, plan_);
      emit_static(pages);
      emit_plan_utilities(pages);
    } else if (alg == "IIR-MPS") {
      emit_policy(iir_plan());
      emit("plan", "dynamic_utility", iir_plan().expected_utility);
    } else if (alg == "IIR-MPS-C") {
      emit_static(replayed(iir_plan(), Page2Policy::prp));
    } else if (alg == "DIR-MPS") {
      emit_policy(dir_plan());
      emit("plan", "dynamic_utility", dir_plan().expected_utility);
    } else if (alg == "DIR-MPS-C") {
      emit_static(replayed(dir_plan(), Page2Policy::dynamic_gain));
    } else {
      throw InvalidInputError("unknown algorithm: " + alg);
    }
  }

  const ExperimentConfig& config_;
  const Judgments& judgments_;
  std::string topic_;
  const RelevanceBelief& belief_;
  RankBias bias_;
  PlanConfig plan_;
  std::string alg_;
  std::optional<PlanResult> dir_plan_;
  std::optional<PlanResult> iir_plan_;
  std::vector<ResultRow> rows_;
};

std::pair<std::vector<TopicInput>, Judgments> load_inputs(
    const ExperimentConfig& config) {
  std::vector<TopicInput> topics;
  Judgments judgments;

  if (config.synthetic) {
    Rng master(config.seed);
    std::vector<std::uint64_t> seeds(config.synth_topics);
    for (auto& s : seeds) s = master.next_u64();
    for (std::size_t t = 0; t < config.synth_topics; ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "synth-%04zu", t);
      auto [ensemble, topic_judgments] =
          synth_ensemble(config.synth_docs, config.synth_methods, seeds[t],
                         config.synth_noise, config.synth_relevance_prob,
                         name);
      judgments.grades.merge(topic_judgments.grades);
      topics.push_back({name, build_belief(min_max_normalize(ensemble),
                                           config.cross_doc_covariance)});
    }
    return {std::move(topics), std::move(judgments)};
  }

  std::vector<RunFile> runs;
  runs.reserve(config.run_paths.size());
  for (const std::string& p : config.run_paths) runs.push_back(parse_run(p));
  if (!config.qrels_path.empty()) judgments = parse_qrels(config.qrels_path);
  if (!config.diversity_qrels_path.empty())
    judgments.subtopics =
        parse_diversity_qrels(config.diversity_qrels_path).subtopics;

  const std::size_t need = static_cast<std::size_t>(config.plan.pages) *
                           static_cast<std::size_t>(config.plan.page_size);
  for (const std::string& topic : topics_in(runs)) {
    ScoreEnsemble pool =
        assemble_pool(runs, topic, config.pool_depth, config.keep_top);
    if (pool.num_docs() < need) {
      std::cerr << "warning: topic " << topic << " pool has "
                << pool.num_docs() << " documents, needs " << need
                << "; skipping\n";
      continue;
    }
    topics.push_back(
        {topic, build_belief(pool, config.cross_doc_covariance)});
  }
  return {std::move(topics), std::move(judgments)};
}

struct SummaryCell {
  std::string algorithm;
  double lambda = 0.0;
  std::string page;
  std::string metric;
  double mean = 0.0;
  std::size_t n = 0;
  double p_vs_prp = std::numeric_limits<double>::quiet_NaN();
  double p_vs_iir_prp = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

void ExperimentConfig::validate() const {
  if (synthetic && !run_paths.empty())
    throw InvalidInputError("synthetic input and run files are exclusive");
  if (!synthetic && run_paths.size() < 2)
    throw InvalidInputError("need at least 2 run files (or --synthetic)");
  if (algorithms.empty()) throw InvalidInputError("no algorithms selected");
  for (const std::string& a : algorithms)
    if (!kKnownAlgorithms.count(a))
      throw InvalidInputError("unknown algorithm: " + a);
  if (lambdas.empty()) throw InvalidInputError("no lambda values");
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0))
      throw InvalidInputError("lambda must be in [0,1]");
  if (metrics.empty()) throw InvalidInputError("no metrics selected");
  if (plan.pages < 1 || plan.page_size < 1)
    throw InvalidInputError("pages and page_size must be >= 1");
  if (!(plan.obs_mass > 0.0 && plan.obs_mass <= 1.0))
    throw InvalidInputError("obs_mass must be in (0,1]");
  if (synthetic &&
      synth_docs < static_cast<std::size_t>(plan.pages) *
                       static_cast<std::size_t>(plan.page_size))
    throw InvalidInputError("synth_docs smaller than pages * page_size");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidInputError("alpha must be in (0,1)");
}

double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != b.size())
    throw InvalidInputError("paired samples must have equal length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);
  const std::size_t n = diffs.size();
  if (n == 0) return 1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });

  std::vector<double> rank(n);
  double tie_correction = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n &&
           std::abs(diffs[order[j]]) == std::abs(diffs[order[i]]))
      ++j;
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j)) /
                            2.0;
    const double t = static_cast<double>(j - i);
    tie_correction += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg_rank;
    i = j;
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0.0) w_plus += rank[i];

  const double nn = static_cast<double>(n);
  const double mu = nn * (nn + 1.0) / 4.0;
  const double var =
      nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction / 48.0;
  if (var <= 0.0) return 1.0;
  double z = w_plus - mu;
  z -= z > 0 ? 0.5 : (z < 0 ? -0.5 : 0.0);  // continuity correction
  z /= std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

double ExperimentResult::mean_of(const std::string& algorithm, double lambda,
                                 const std::string& page,
                                 const std::string& metric) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const ResultRow& r : rows)
    if (r.algorithm == algorithm && r.lambda == lambda && r.page == page &&
        r.metric == metric) {
      sum += r.value;
      ++n;
    }
  return n ? sum / static_cast<double>(n)
           : std::numeric_limits<double>::quiet_NaN();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto [topics, judgments] = load_inputs(config);

  std::vector<std::vector<ResultRow>> per_topic(topics.size());
  std::size_t workers =
      config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, topics.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= topics.size()) break;
      try {
        per_topic[i] =
            TopicEvaluator(config, judgments, topics[i]).evaluate();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        break;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (auto& rows : per_topic)
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());

  // Per-topic long-format table.
  std::ostringstream per;
  per << "topic\talgorithm\tlambda\tpage\tmetric\tvalue\n";
  for (const ResultRow& r : result.rows)
    per << r.topic << '\t' << r.algorithm << '\t' << fmt(r.lambda, "%.3g")
        << '\t' << r.page << '\t' << r.metric << '\t' << fmt(r.value) << '\n';
  result.per_topic_tsv = per.str();

  // Mean-over-topics summary with Wilcoxon significance against the two
  // static baselines.
  std::map<std::tuple<std::string, double, std::string, std::string>,
           std::map<std::string, double>>
      cells;  // (alg, lambda, page, metric) -> topic -> value
  for (const ResultRow& r : result.rows)
    cells[{r.algorithm, r.lambda, r.page, r.metric}][r.topic] = r.value;

  auto paired = [&](const std::map<std::string, double>& a,
                    const std::map<std::string, double>& b) {
    std::vector<double> xs, ys;
    for (const auto& [topic, v] : a) {
      auto it = b.find(topic);
      if (it == b.end()) continue;
      xs.push_back(v);
      ys.push_back(it->second);
    }
    return std::pair{xs, ys};
  };

  std::vector<SummaryCell> summary;
  for (double lambda : config.lambdas) {
    for (const std::string& alg : config.algorithms) {
      std::set<std::pair<std::string, std::string>> pages_metrics;
      for (const ResultRow& r : result.rows)
        if (r.algorithm == alg && r.lambda == lambda)
          pages_metrics.insert({r.page, r.metric});
      for (const auto& [page, metric] : pages_metrics) {
        const auto& values = cells[{alg, lambda, page, metric}];
        SummaryCell cell;
        cell.algorithm = alg;
        cell.lambda = lambda;
        cell.page = page;
        cell.metric = metric;
        cell.n = values.size();
        for (const auto& [topic, v] : values) cell.mean += v;
        if (cell.n) cell.mean /= static_cast<double>(cell.n);
        for (const char* base_name : {"PRP", "IIR-PRP-MPS"}) {
          const std::string base(base_name);
          if (alg == base) continue;
          auto it = cells.find({base, lambda, page, metric});
          if (it == cells.end()) continue;
          auto [xs, ys] = paired(values, it->second);
          if (xs.empty()) continue;
          const double p = wilcoxon_signed_rank(xs, ys);
          (base == "PRP" ? cell.p_vs_prp : cell.p_vs_iir_prp) = p;
        }
        summary.push_back(std::move(cell));
      }
    }
  }

  std::ostringstream sum;
  sum << "# page-2 weighting: "
      << (config.uniform_page2_weights ? "uniform" : "observation likelihood")
      << "\n# sap: unavailable (no implementation)\n";
  sum << "algorithm\tlambda\tpage\tmetric\tmean\ttopics\tp_vs_prp\tsig_prp\t"
         "p_vs_iirprp\tsig_iirprp\n";
  for (const SummaryCell& c : summary) {
    auto pcol = [&](double p) {
      if (std::isnan(p)) return std::string("-\t-");
      return fmt(p, "%.4g") + '\t' + (p < 0.05 ? "*" : ".");
    };
    sum << c.algorithm << '\t' << fmt(c.lambda, "%.3g") << '\t' << c.page
        << '\t' << c.metric << '\t' << fmt(c.mean) << '\t' << c.n << '\t'
        << pcol(c.p_vs_prp) << '\t' << pcol(c.p_vs_iir_prp) << '\n';
  }
  result.summary_tsv = sum.str();

  nlohmann::json j;
  j["config"] = {
      {"synthetic", config.synthetic},
      {"topics", topics.size()},
      {"algorithms", config.algorithms},
      {"lambdas", config.lambdas},
      {"pages", config.plan.pages},
      {"page_size", config.plan.page_size},
      {"obs_mass", config.plan.obs_mass},
      {"mode",
       config.plan.mode == PlanMode::exact ? "exact" : "sequential"},
      {"cross_doc_covariance", config.cross_doc_covariance},
      {"seed", config.seed},
      {"page2_weights",
       config.uniform_page2_weights ? "uniform" : "likelihood"},
      {"click_source",
       config.user_kind == UserKind::perfect ? "perfect" : "examination"},
  };
  j["notes"] = {{"sap", "unavailable (no implementation)"}};
  auto& cells_json = j["summary"];
  cells_json = nlohmann::json::array();
  for (const SummaryCell& c : summary) {
    nlohmann::json e = {{"algorithm", c.algorithm}, {"lambda", c.lambda},
                        {"page", c.page},           {"metric", c.metric},
                        {"mean", c.mean},           {"topics", c.n}};
    if (!std::isnan(c.p_vs_prp)) e["p_vs_prp"] = c.p_vs_prp;
    if (!std::isnan(c.p_vs_iir_prp)) e["p_vs_iirprp"] = c.p_vs_iir_prp;
    cells_json.push_back(std::move(e));
  }
  result.summary_json = j.dump(2) + "\n";
  return result;
}

void write_result_files(const ExperimentResult& result,
                        const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + name + " under " + dir);
    out << content;
  };
  write("per_topic.tsv", result.per_topic_tsv);
  write("summary.tsv", result.summary_tsv);
  write("summary.json", result.summary_json);
}

namespace {

struct CheckReporter {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "PASS" : "FAIL") << " — " << name;
    if (!ok && !detail.empty()) out << " (" << detail << ")";
    out << '\n';
    if (!ok) ++failures;
  }
};

}  // namespace

int verify(std::ostream& out) {
  CheckReporter rep{out};

  // Reference expected-search-length values.
  {
    const double a = expected_search_length({2.0 / 3, 2.0 / 3, 1.0 / 3});
    rep.check("esl independence, relevance-sorted order = 8/27",
              std::abs(a - 8.0 / 27) < 1e-12, fmt(a, "%.15g"));
    const double b = expected_search_length({2.0 / 3, 1.0 / 3, 2.0 / 3});
    rep.check("esl independence, diversified order = 11/27",
              std::abs(b - 11.0 / 27) < 1e-12, fmt(b, "%.15g"));
    // Two user classes: (d0,d1 relevant) w.p. 2/3, (d2 relevant) w.p. 1/3.
    std::vector<double> joint(8, 0.0);
    joint[0b011] = 2.0 / 3;
    joint[0b100] = 1.0 / 3;
    const double c =
        oracle::exhaustive_esl(joint, {0, 1, 2});
    rep.check("esl joint, relevance-sorted order = 2/3",
              std::abs(c - 2.0 / 3) < 1e-12, fmt(c, "%.15g"));
    const double d = oracle::exhaustive_esl(joint, {0, 2, 1});
    rep.check("esl joint, diversified order = 1/3",
              std::abs(d - 1.0 / 3) < 1e-12, fmt(d, "%.15g"));
  }

  // Two-document conditioning by hand.
  {
    RelevanceBelief belief;
    belief.doc_ids = {"a", "b"};
    belief.mean = Eigen::Vector2d(0.5, 0.5);
    belief.cov.resize(2, 2);
    belief.cov << 0.04, 0.02, 0.02, 0.04;
    const RelevanceBelief post = condition_on_observation(
        belief, RankingAction{{"b"}}, Observation{{1}});
    rep.check("conditioning hand example: mean 0.75, variance 0.03",
              std::abs(post.mean[0] - 0.75) < 1e-12 &&
                  std::abs(post.cov(0, 0) - 0.03) < 1e-12,
              fmt(post.mean[0], "%.15g") + ", " + fmt(post.cov(0, 0), "%.15g"));
  }

  // Click-likelihood normalization over the full observation space.
  {
    bool ok = true;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100 && ok; ++s) {
      const RelevanceBelief belief = random_belief(8, 9000 + s);
      const RankBias bias = RankBias::dcg_default(8);
      RankingAction page;
      page.page = belief.doc_ids;
      double total = 0.0;
      for (const auto& [obs, p] :
           enumerate_truncated(page, belief, bias, 1.0))
        total += p;
      worst = std::max(worst, std::abs(total - 1.0));
      ok = worst < 1e-12;
    }
    rep.check("click model normalization (100 draws, M=8)", ok,
              "worst " + fmt(worst, "%.3g"));
  }

  // Truncation soundness.
  {
    bool ok = true;
    for (std::uint64_t s = 0; s < 100 && ok; ++s) {
      const RelevanceBelief belief = random_belief(10, 9100 + s);
      const RankBias bias = RankBias::dcg_default(10);
      RankingAction page;
      page.page = belief.doc_ids;
      const auto kept = enumerate_truncated(page, belief, bias, 0.95);
      double mass = 0.0;
      for (const auto& [obs, p] : kept) mass += p;
      ok = mass >= 0.95 && mass - kept.back().probability < 0.95;
    }
    rep.check("truncation mass >= 0.95 and minimality (100 draws, M=10)", ok);
  }

  // Exact planner against the independent exhaustive reference.
  {
    double worst = 0.0;
    const double lambdas[] = {0.0, 0.5, 0.8, 1.0};
    const std::pair<std::size_t, int> sizes[] = {
        {3, 1}, {4, 1}, {5, 1}, {4, 2}, {5, 2}};
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto [n, m] = sizes[s % 5];
      PlanConfig config;
      config.pages = 2;
      config.page_size = m;
      config.lambda = lambdas[s % 4];
      config.obs_mass = 1.0;
      const RelevanceBelief belief = random_belief(n, 7000 + s);
      const RankBias bias =
          RankBias::dcg_default(static_cast<std::size_t>(m));
      const PlanResult exact = dir_mps_exact(belief, config, bias);
      const double reference =
          oracle::exhaustive_bellman(belief, config, bias).first;
      worst =
          std::max(worst, std::abs(exact.expected_utility - reference));
    }
    rep.check("exact planner matches exhaustive reference (50 instances)",
              worst < 1e-9, "worst " + fmt(worst, "%.3g"));
  }

  // Sequential approximation never beats exact.
  {
    bool ok = true;
    for (std::uint64_t s = 0; s < 30 && ok; ++s) {
      PlanConfig config;
      config.pages = 2;
      config.page_size = 2;
      config.lambda = 0.8;
      config.obs_mass = 1.0;
      const RelevanceBelief belief = random_belief(5, 7500 + s);
      const RankBias bias = RankBias::dcg_default(2);
      const double seq = dir_mps(belief, config, bias).expected_utility;
      const double exact =
          dir_mps_exact(belief, config, bias).expected_utility;
      ok = seq <= exact + 1e-9;
    }
    rep.check("sequential utility <= exact utility (30 instances)", ok);
  }

  // Discount-free degenerations.
  {
    bool ok = true;
    for (std::uint64_t s = 0; s < 20 && ok; ++s) {
      const RelevanceBelief belief = random_belief(8, 7800 + s);
      PlanConfig config;
      config.pages = 2;
      config.page_size = 3;
      config.lambda = 0.0;
      const RankBias bias = RankBias::dcg_default(3);
      const PlanResult plan = dir_mps(belief, config, bias);
      ok = plan.page1.page == gain_rank(belief, 3).page &&
           iir_prp_mps(belief, config)[0].page == gain_rank(belief, 3).page;
    }
    rep.check("lambda = 0 degenerates to the gain sort (20 instances)", ok);
  }

  out << (rep.failures == 0 ? "all checks passed\n"
                            : std::to_string(rep.failures) +
                                  " check(s) failed\n");
  return rep.failures;
}

}  // namespace dirmps

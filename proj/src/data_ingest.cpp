#include "dirmps/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace dirmps {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> fields;
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line_no,
                       const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                   what);
}

double parse_double(const std::string& s, const std::filesystem::path& path,
                    std::size_t line_no) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &consumed);
  } catch (const std::exception&) {
    fail(path, line_no, "bad number: " + s);
  }
  if (consumed != s.size() || !std::isfinite(v))
    fail(path, line_no, "bad number: " + s);
  return v;
}

long parse_long(const std::string& s, const std::filesystem::path& path,
                std::size_t line_no) {
  std::size_t consumed = 0;
  long v = 0;
  try {
    v = std::stol(s, &consumed);
  } catch (const std::exception&) {
    fail(path, line_no, "bad integer: " + s);
  }
  if (consumed != s.size()) fail(path, line_no, "bad integer: " + s);
  return v;
}

template <typename LineFn>
void for_each_line(const std::filesystem::path& path, LineFn&& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, line_no);
  }
}

}  // namespace

RunFile parse_run(const std::filesystem::path& path) {
  RunFile run;
  std::set<std::pair<std::string, DocId>> seen;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const auto fields = split_fields(line);
    if (fields.size() != 6)
      fail(path, line_no,
           "expected 6 fields (topic Q0 doc rank score tag), got " +
               std::to_string(fields.size()));
    RunRecord rec;
    rec.topic = fields[0];
    rec.doc = fields[2];
    rec.rank = parse_long(fields[3], path, line_no);
    rec.score = parse_double(fields[4], path, line_no);
    rec.tag = fields[5];
    if (!seen.insert({rec.topic, rec.doc}).second)
      fail(path, line_no, "duplicate (topic, doc): " + rec.topic + " " +
                              rec.doc);
    run.records.push_back(std::move(rec));
  });
  return run;
}

void write_run(const std::filesystem::path& path, const RunFile& run) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[64];
  for (const RunRecord& r : run.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.score);
    out << r.topic << " Q0 " << r.doc << ' ' << r.rank << ' ' << buf << ' '
        << r.tag << '\n';
  }
}

Judgments parse_qrels(const std::filesystem::path& path) {
  Judgments j;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      fail(path, line_no, "expected 4 fields (topic 0 doc grade), got " +
                              std::to_string(fields.size()));
    const long grade = parse_long(fields[3], path, line_no);
    auto& topic = j.grades[fields[0]];
    if (topic.count(fields[2]))
      std::cerr << "warning: " << path.string() << ":" << line_no
                << ": duplicate judgment for (" << fields[0] << ", "
                << fields[2] << "), keeping the last\n";
    topic[fields[2]] = static_cast<int>(std::max(0L, grade));
  });
  return j;
}

void write_qrels(const std::filesystem::path& path,
                 const Judgments& judgments) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [topic, docs] : judgments.grades)
    for (const auto& [doc, grade] : docs)
      out << topic << " 0 " << doc << ' ' << grade << '\n';
}

Judgments parse_diversity_qrels(const std::filesystem::path& path) {
  Judgments j;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      fail(path, line_no,
           "expected 4 fields (topic subtopic doc grade), got " +
               std::to_string(fields.size()));
    const long grade = parse_long(fields[3], path, line_no);
    auto& sub = j.subtopics[fields[0]][fields[1]];
    if (sub.count(fields[2]))
      std::cerr << "warning: " << path.string() << ":" << line_no
                << ": duplicate judgment for (" << fields[0] << ", "
                << fields[1] << ", " << fields[2] << "), keeping the last\n";
    sub[fields[2]] = grade >= 1 ? 1 : 0;
  });
  return j;
}

std::vector<std::string> topics_in(const std::vector<RunFile>& runs) {
  std::set<std::string> topics;
  for (const RunFile& run : runs)
    for (const RunRecord& rec : run.records) topics.insert(rec.topic);
  return {topics.begin(), topics.end()};
}

ScoreEnsemble assemble_pool(const std::vector<RunFile>& runs,
                            const std::string& topic, std::size_t pool_depth,
                            std::size_t keep_top) {
  if (runs.size() < 2)
    throw InsufficientSamplesError("pooling needs at least 2 run files");
  if (pool_depth < 1 || keep_top < 1)
    throw InvalidInputError("pool_depth and keep_top must be >= 1");

  struct MethodView {
    std::map<DocId, double> score;
    double min_score = 0.0;
    bool has_topic = false;
  };
  std::vector<MethodView> methods(runs.size());
  std::set<DocId> pooled;

  for (std::size_t m = 0; m < runs.size(); ++m) {
    std::vector<const RunRecord*> recs;
    for (const RunRecord& r : runs[m].records)
      if (r.topic == topic) recs.push_back(&r);
    if (recs.empty()) continue;
    methods[m].has_topic = true;
    methods[m].min_score = std::numeric_limits<double>::infinity();
    for (const RunRecord* r : recs) {
      methods[m].score[r->doc] = r->score;
      methods[m].min_score = std::min(methods[m].min_score, r->score);
    }
    std::sort(recs.begin(), recs.end(),
              [](const RunRecord* a, const RunRecord* b) {
                if (a->rank != b->rank) return a->rank < b->rank;
                if (a->score != b->score) return a->score > b->score;
                return a->doc < b->doc;
              });
    for (std::size_t i = 0; i < recs.size() && i < pool_depth; ++i)
      pooled.insert(recs[i]->doc);
  }
  if (pooled.empty()) throw EmptyPoolError("no runs contain topic " + topic);

  ScoreEnsemble ensemble;
  ensemble.doc_ids.assign(pooled.begin(), pooled.end());
  ensemble.scores.resize(static_cast<Eigen::Index>(ensemble.doc_ids.size()),
                         static_cast<Eigen::Index>(runs.size()));
  for (std::size_t d = 0; d < ensemble.doc_ids.size(); ++d) {
    for (std::size_t m = 0; m < runs.size(); ++m) {
      double score = 0.0;  // method never saw this topic: flat column
      if (methods[m].has_topic) {
        auto it = methods[m].score.find(ensemble.doc_ids[d]);
        // Documents a method did not retrieve take its per-topic minimum.
        score = it != methods[m].score.end() ? it->second
                                             : methods[m].min_score;
      }
      ensemble.scores(static_cast<Eigen::Index>(d),
                      static_cast<Eigen::Index>(m)) = score;
    }
  }

  ScoreEnsemble normalized = min_max_normalize(ensemble);
  const Eigen::VectorXd means = normalized.scores.rowwise().mean();

  std::vector<std::size_t> order(normalized.doc_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = means[static_cast<Eigen::Index>(a)];
    const double mb = means[static_cast<Eigen::Index>(b)];
    if (ma != mb) return ma > mb;
    return normalized.doc_ids[a] < normalized.doc_ids[b];
  });
  const std::size_t kept = std::min(keep_top, order.size());

  ScoreEnsemble out;
  out.scores.resize(static_cast<Eigen::Index>(kept),
                    normalized.scores.cols());
  for (std::size_t i = 0; i < kept; ++i) {
    out.doc_ids.push_back(normalized.doc_ids[order[i]]);
    out.scores.row(static_cast<Eigen::Index>(i)) =
        normalized.scores.row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

}  // namespace dirmps

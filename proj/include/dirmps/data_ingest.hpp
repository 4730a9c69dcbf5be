#ifndef DIRMPS_DATA_INGEST_HPP
#define DIRMPS_DATA_INGEST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dirmps/metrics.hpp"
#include "dirmps/relevance_model.hpp"

namespace dirmps {

/// One line of a retrieval run: "topic Q0 doc_id rank score tag".
struct RunRecord {
  std::string topic;
  DocId doc;
  long rank = 0;
  double score = 0.0;
  std::string tag;
};

/// One retrieval method's run. (topic, doc) pairs are unique.
struct RunFile {
  std::vector<RunRecord> records;
};

/// Parses a whitespace-delimited run file (UTF-8, LF or CRLF). Malformed
/// lines and duplicate (topic, doc) pairs raise ParseError naming the line.
RunFile parse_run(const std::filesystem::path& path);

void write_run(const std::filesystem::path& path, const RunFile& run);

/// Parses "topic 0 doc_id grade" judgments. Negative grades clamp to 0;
/// a duplicated (topic, doc) keeps the last line and warns on stderr.
Judgments parse_qrels(const std::filesystem::path& path);

void write_qrels(const std::filesystem::path& path, const Judgments& judgments);

/// Parses "topic subtopic doc_id grade" diversity judgments into binary
/// subtopic labels (grade >= 1 counts as relevant).
Judgments parse_diversity_qrels(const std::filesystem::path& path);

/// Sorted unique topics present in any run.
std::vector<std::string> topics_in(const std::vector<RunFile>& runs);

/// Pools each method's top `pool_depth` documents for the topic, imputes a
/// method's per-topic minimum score for documents it did not retrieve,
/// min-max normalizes per method, and keeps the `keep_top` documents by
/// mean normalized score. The returned scores are the normalized ones
/// (normalization happens over the full pool, before the top cut).
ScoreEnsemble assemble_pool(const std::vector<RunFile>& runs,
                            const std::string& topic,
                            std::size_t pool_depth = 100,
                            std::size_t keep_top = 30);

}  // namespace dirmps

#endif  // DIRMPS_DATA_INGEST_HPP

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "arcllm/llm_gateway.hpp"
#include "arcllm/object_graph.hpp"
#include "arcllm/prompting.hpp"

namespace arcllm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a table is requested for an incomplete matrix.
class AggregationError : public std::runtime_error {
 public:
  AggregationError(const std::string& what, std::vector<std::string> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

enum class Verdict { Solved, Unsolved, ParseFailure };

std::string to_string(Verdict v);
Verdict parse_verdict(std::string_view tag);

struct RunConfig {
  std::filesystem::path dataset;
  std::vector<EncoderConfig> encodings;
  std::vector<PromptStrategy> strategies;
  std::vector<std::string> models;
  BackendKind backend = BackendKind::Replay;
  std::filesystem::path output_dir;
  /// Optional per-task abstraction overrides for object encodings.
  std::optional<std::filesystem::path> overrides;
  int workers = 4;
  int max_output_tokens = CompletionRequest::kDefaultMaxOutputTokens;

  /// ConfigError on empty lists, duplicate entries or workers < 1.
  void validate() const;
};

/// One test input of a trial.
struct TestOutcome {
  std::string prompt_hash;
  std::string raw_completion;
  std::optional<Grid> parsed;
  std::string decode_note;  // where the answer was found, or why parsing failed
  Grid expected;
  Verdict verdict = Verdict::ParseFailure;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct RunRecord {
  std::string task_id;
  std::string encoding;
  std::string strategy;
  std::string model;
  std::string template_hash;
  std::optional<std::string> abstraction;  // object encodings only
  std::vector<TestOutcome> tests;
  Verdict verdict = Verdict::ParseFailure;
  std::optional<std::string> error;  // gateway failure, scored as unsolved
  std::string started_at;
  std::string finished_at;

  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  Key key() const { return {task_id, encoding, strategy, model}; }

  std::string to_json_line() const;
  static RunRecord from_json_line(std::string_view line);
};

/// Equal in every field except the timestamps.
bool same_outcome(const RunRecord& a, const RunRecord& b);

struct ScoreResult {
  Verdict verdict;
  DecodeResult decoded;
};

/// Decodes `raw` with the decoder matching `encoder` and compares to `expected`.
/// `fallback_dims` is used by object decoding when the answer omits its size.
ScoreResult score(std::string_view raw, const EncoderConfig& encoder, const Grid& expected, GridDims fallback_dims,
                  const Palette& palette = Palette::canonical());

/// A record set is a matrix over these axes.
struct MatrixSpec {
  std::vector<std::string> task_ids;
  std::vector<std::string> encodings;
  std::vector<std::string> strategies;
  std::vector<std::string> models;
};

struct MatrixResult {
  /// Persisted and new records for the configured matrix, in matrix order.
  std::vector<RunRecord> records;
  /// Cells that could not be run (replay misses), as "task/encoding/strategy/model".
  std::vector<std::string> missing;
  bool complete() const { return missing.empty(); }
};

/// Loads records.jsonl; throws SchemaError naming the line on corrupt input.
std::vector<RunRecord> load_records(const std::filesystem::path& path);

/// Runs every (task, encoding, strategy, model) cell not already present in
/// output_dir/records.jsonl and appends one line per finished cell.
MatrixResult run_matrix(const RunConfig& cfg, Backend& backend, const PromptTemplates& templates);

struct ResultTable {
  std::vector<std::string> rows;                               // encoding tags
  std::vector<std::pair<std::string, std::string>> columns;    // (strategy, model)
  std::map<std::pair<std::string, std::size_t>, int> counts;   // (encoding, column) -> solved
  int total = 0;
  /// Per column; present only when both direct and object encodings were run.
  std::vector<std::string> ratios;
  /// suite -> (encoding, column) -> solved, for datasets with a manifest.
  std::map<std::string, std::map<std::pair<std::string, std::size_t>, int>> by_suite;
  std::map<std::string, int> suite_sizes;

  int count(const std::string& encoding, std::size_t column) const;
  std::string to_markdown() const;
  std::string to_csv() const;
};

/// "(obj*100)/direct" truncated to two decimals with trailing zeros dropped,
/// then "×"; "∞" for direct = 0 < obj, "-" for both zero.
std::string format_ratio(int object_count, int direct_count);

/// Pure fold over `records`. `suites` maps task id to suite for the per-family
/// breakdown and may be empty. AggregationError lists missing cells.
ResultTable aggregate(const std::vector<RunRecord>& records, const MatrixSpec& spec,
                      const std::map<std::string, std::string>& suites = {});

MatrixSpec matrix_spec(const RunConfig& cfg, const std::vector<Task>& tasks);

/// task id -> suite, from dataset_dir/manifest.json if present.
std::map<std::string, std::string> load_suites(const std::filesystem::path& dataset_dir);

}  // namespace arcllm

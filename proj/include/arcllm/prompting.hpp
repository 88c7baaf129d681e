#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "arcllm/direct_encoding.hpp"
#include "arcllm/object_encoding.hpp"
#include "arcllm/object_graph.hpp"

namespace arcllm {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PromptStrategy { FewShot, InContextCoT };

/// "fewshot" or "cot".
std::string to_string(PromptStrategy s);
PromptStrategy parse_prompt_strategy(std::string_view tag);

enum class EncoderKind { Direct, Object };

using EncoderConfig = std::variant<DirectEncodingConfig, ObjectEncodingConfig>;

EncoderKind kind_of(const EncoderConfig& cfg);
/// e.g. "word-pipe", "object-json-edges".
std::string encoding_tag(const EncoderConfig& cfg);
EncoderConfig parse_encoding(std::string_view tag);

struct Prompt {
  std::string instructions;
  std::optional<std::string> examples;
  std::string task;
  std::string answer_cue;

  /// instructions, examples, task, answer_cue in that order.
  std::string text() const;
};

/// A small worked task used only inside CoT prompts.
struct InContextExample {
  Task task;
  std::string reasoning_direct;
  std::string reasoning_object;
};

/// Instruction templates and in-context examples loaded from a directory:
///   {fewshot,cot}_{direct,object}.txt   instructions followed by placeholders
///   incontext_examples.json             the two worked examples
/// A template is the instruction text, then {{EXAMPLES}} (cot only), then {{TASK}}.
class PromptTemplates {
 public:
  static PromptTemplates load(const std::filesystem::path& dir);
  /// Directory the build installed the bundled templates to.
  static std::filesystem::path default_dir();

  const std::string& instructions(PromptStrategy s, EncoderKind k) const;
  const std::vector<InContextExample>& examples() const { return examples_; }
  /// SHA-256 over every template file (name and bytes), in name order.
  const std::string& hash() const { return hash_; }

 private:
  std::map<std::string, std::string> instructions_;
  std::vector<InContextExample> examples_;
  std::string hash_;
};

/// Renders `t` under `encoder`. Object encoders use `abstraction` when given and
/// the best-fit strategy otherwise. `test_index` picks the test input to ask for.
Prompt build_prompt(const Task& t, PromptStrategy strategy, const EncoderConfig& encoder,
                    const PromptTemplates& templates, std::optional<AbstractionStrategy> abstraction = std::nullopt,
                    std::size_t test_index = 0, const Palette& palette = Palette::canonical());

/// Text of a single grid under `encoder`, as it appears in prompts.
std::string encode_for_prompt(const Grid& g, const EncoderConfig& encoder, AbstractionStrategy abstraction,
                              const Palette& palette = Palette::canonical());

/// ceil(characters / 3); a cheap upper bound used for budget warnings.
std::size_t token_estimate(const Prompt& p);
std::size_t token_estimate(std::string_view text);

}  // namespace arcllm

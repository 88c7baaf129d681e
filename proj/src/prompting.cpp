#include "arcllm/prompting.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arcllm/hash.hpp"
#include "text_util.hpp"

#ifndef ARCLLM_TEMPLATE_DIR
#define ARCLLM_TEMPLATE_DIR "templates"
#endif

namespace arcllm {

namespace {

constexpr std::string_view kExamplesSlot = "{{EXAMPLES}}";
constexpr std::string_view kTaskSlot = "{{TASK}}";

std::string template_name(PromptStrategy s, EncoderKind k) {
  return to_string(s) + (k == EncoderKind::Direct ? "_direct.txt" : "_object.txt");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("cannot read template " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool only_space(std::string_view s) {
  for (char c : s) {
    if (!text::is_space(c)) return false;
  }
  return true;
}

// Returns the instruction text, i.e. everything before the first placeholder.
std::string split_template(const std::string& name, const std::string& body, PromptStrategy s) {
  const auto task = body.find(kTaskSlot);
  const auto examples = body.find(kExamplesSlot);
  if (task == std::string::npos) throw TemplateError(name + ": missing {{TASK}}");
  if (s == PromptStrategy::FewShot) {
    if (examples != std::string::npos) throw TemplateError(name + ": few-shot templates take no {{EXAMPLES}}");
    if (!only_space(std::string_view(body).substr(task + kTaskSlot.size()))) {
      throw TemplateError(name + ": text after {{TASK}}");
    }
    return body.substr(0, task);
  }
  if (examples == std::string::npos || examples > task) throw TemplateError(name + ": {{EXAMPLES}} must precede {{TASK}}");
  const std::string_view rest(body);
  if (!only_space(rest.substr(examples + kExamplesSlot.size(), task - examples - kExamplesSlot.size())) ||
      !only_space(rest.substr(task + kTaskSlot.size()))) {
    throw TemplateError(name + ": text between or after placeholders");
  }
  return body.substr(0, examples);
}

std::string label_block(const std::string& label, const std::string& encoded, EncoderKind kind) {
  return label + (kind == EncoderKind::Direct ? " " : "\n") + encoded + "\n";
}

AbstractionStrategy resolve_abstraction(const Task& t, const EncoderConfig& encoder,
                                        std::optional<AbstractionStrategy> abstraction) {
  if (abstraction) return *abstraction;
  if (kind_of(encoder) == EncoderKind::Object) return select_best_fit(t);
  return AbstractionStrategy::SameColor4;
}

std::string task_section(const Task& t, const EncoderConfig& encoder, AbstractionStrategy abstraction,
                         std::size_t test_index, const Palette& palette) {
  const EncoderKind kind = kind_of(encoder);
  std::string out = "Demonstrations:\n";
  for (std::size_t i = 0; i < t.train.size(); ++i) {
    const std::string n = std::to_string(i + 1);
    out += label_block("Input Grid " + n + ":", encode_for_prompt(t.train[i].input, encoder, abstraction, palette), kind);
    out += label_block("Output Grid " + n + ":", encode_for_prompt(t.train[i].output, encoder, abstraction, palette),
                       kind);
  }
  out += label_block("Test Input Grid:", encode_for_prompt(t.test.at(test_index).input, encoder, abstraction, palette),
                     kind);
  return out;
}

std::string answer_cue(const EncoderConfig& encoder) {
  if (const auto* obj = std::get_if<ObjectEncodingConfig>(&encoder)) {
    if (obj->style == ObjectStyle::Json) {
      return "Reply with the test output as a single JSON object in the same format, including \"grid_size\".\n"
             "Test Output Grid:";
    }
    return "Reply with the test output in the same object format, starting with the \"Grid size\" line.\n"
           "Test Output Grid:";
  }
  return "Test Output Grid:";
}

std::string examples_section(const PromptTemplates& templates, const EncoderConfig& encoder,
                             const Palette& palette) {
  const EncoderKind kind = kind_of(encoder);
  std::string out;
  int n = 0;
  for (const auto& ex : templates.examples()) {
    const AbstractionStrategy abstraction = resolve_abstraction(ex.task, encoder, std::nullopt);
    out += "Example " + std::to_string(++n) + ":\n";
    out += task_section(ex.task, encoder, abstraction, 0, palette);
    out += kind == EncoderKind::Direct ? ex.reasoning_direct : ex.reasoning_object;
    out += "\n";
    out += label_block("Test Output Grid:", encode_for_prompt(ex.task.test.at(0).output, encoder, abstraction, palette),
                       kind);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string to_string(PromptStrategy s) { return s == PromptStrategy::FewShot ? "fewshot" : "cot"; }

PromptStrategy parse_prompt_strategy(std::string_view tag) {
  if (tag == "fewshot") return PromptStrategy::FewShot;
  if (tag == "cot") return PromptStrategy::InContextCoT;
  throw std::invalid_argument("unknown prompt strategy '" + std::string(tag) + "'");
}

EncoderKind kind_of(const EncoderConfig& cfg) {
  return std::holds_alternative<DirectEncodingConfig>(cfg) ? EncoderKind::Direct : EncoderKind::Object;
}

std::string encoding_tag(const EncoderConfig& cfg) {
  return std::visit([](const auto& c) { return c.tag(); }, cfg);
}

EncoderConfig parse_encoding(std::string_view tag) {
  if (text::starts_with(tag, "object-")) return ObjectEncodingConfig::from_tag(tag);
  return DirectEncodingConfig::from_tag(tag);
}

std::string Prompt::text() const { return instructions + examples.value_or("") + task + answer_cue; }

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  std::map<std::string, std::string> files;
  for (auto s : {PromptStrategy::FewShot, PromptStrategy::InContextCoT}) {
    for (auto k : {EncoderKind::Direct, EncoderKind::Object}) {
      const std::string name = template_name(s, k);
      files[name] = read_file(dir / name);
      t.instructions_[name] = split_template(name, files[name], s);
    }
  }

  const std::string examples_name = "incontext_examples.json";
  files[examples_name] = read_file(dir / examples_name);
  const auto doc = nlohmann::json::parse(files[examples_name], nullptr, false);
  if (doc.is_discarded() || !doc.contains("examples") || !doc["examples"].is_array()) {
    throw TemplateError(examples_name + ": malformed");
  }
  for (const auto& e : doc["examples"]) {
    try {
      nlohmann::json task_json = {{"train", e.at("train")}, {"test", e.at("test")}};
      InContextExample ex{load_task(task_json.dump(), e.at("id").get<std::string>()),
                          e.at("reasoning_direct").get<std::string>(), e.at("reasoning_object").get<std::string>()};
      t.examples_.push_back(std::move(ex));
    } catch (const std::exception& err) {
      throw TemplateError(examples_name + ": " + err.what());
    }
  }
  if (t.examples_.size() != 2) throw TemplateError(examples_name + ": expected exactly two examples");

  std::string all;
  for (const auto& [name, body] : files) {
    all += name;
    all += '\0';
    all += body;
    all += '\0';
  }
  t.hash_ = sha256_hex(all);
  return t;
}

std::filesystem::path PromptTemplates::default_dir() { return ARCLLM_TEMPLATE_DIR; }

const std::string& PromptTemplates::instructions(PromptStrategy s, EncoderKind k) const {
  return instructions_.at(template_name(s, k));
}

std::string encode_for_prompt(const Grid& g, const EncoderConfig& encoder, AbstractionStrategy abstraction,
                              const Palette& palette) {
  if (const auto* direct = std::get_if<DirectEncodingConfig>(&encoder)) return encode_grid(g, *direct, palette);
  return encode_object_text(abstract(g, abstraction), std::get<ObjectEncodingConfig>(encoder), palette);
}

Prompt build_prompt(const Task& t, PromptStrategy strategy, const EncoderConfig& encoder,
                    const PromptTemplates& templates, std::optional<AbstractionStrategy> abstraction,
                    std::size_t test_index, const Palette& palette) {
  const AbstractionStrategy chosen = resolve_abstraction(t, encoder, abstraction);
  Prompt p;
  p.instructions = templates.instructions(strategy, kind_of(encoder));
  if (strategy == PromptStrategy::InContextCoT) p.examples = examples_section(templates, encoder, palette);
  p.task = task_section(t, encoder, chosen, test_index, palette);
  p.answer_cue = answer_cue(encoder);
  return p;
}

std::size_t token_estimate(std::string_view text) { return (text.size() + 2) / 3; }

std::size_t token_estimate(const Prompt& p) { return token_estimate(p.text()); }

}  // namespace arcllm

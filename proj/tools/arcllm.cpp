// Command-line front end: dataset generation, prompt inspection, evaluation
// runs and the solvability report.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "arcllm/bench_gen.hpp"
#include "arcllm/eval_harness.hpp"
#include "arcllm/solvability_analysis.hpp"

using namespace arcllm;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<TaskFamily> parse_families(const std::string& spec) {
  std::vector<TaskFamily> out;
  for (const auto& name : split_list(spec)) {
    if (name == "all" || name == "1d") out.insert(out.end(), k1DFamilies.begin(), k1DFamilies.end());
    if (name == "all" || name == "2d") out.insert(out.end(), k2DFamilies.begin(), k2DFamilies.end());
    if (name != "all" && name != "1d" && name != "2d") out.push_back(parse_family(name));
  }
  if (out.empty()) throw std::invalid_argument("no families selected");
  return out;
}

int cmd_verify(const std::filesystem::path& dataset) {
  const Manifest m = Manifest::load(dataset);
  int failures = 0;
  for (const auto& e : m.entries) {
    const Task t = load_task_file(dataset / e.path);
    if (!verify_task(t, e.family, e.orientation.value_or(Orientation::Horizontal))) {
      std::cerr << "FAIL " << e.path << "\n";
      ++failures;
    }
  }
  std::cout << m.entries.size() - failures << "/" << m.entries.size() << " tasks verified\n";
  return failures == 0 ? 0 : 1;
}

// Builds a replay store from hand-written completions keyed by matrix cell.
int cmd_replay_build(const std::filesystem::path& completions, const std::filesystem::path& dataset,
                     const std::filesystem::path& templates_dir, const std::filesystem::path& store_path,
                     const std::optional<std::filesystem::path>& overrides_path) {
  std::ifstream in(completions);
  if (!in) throw std::runtime_error("cannot read " + completions.string());
  const auto doc = nlohmann::json::parse(in);
  const auto templates = PromptTemplates::load(templates_dir);
  std::map<std::string, Task> tasks;
  for (auto& t : load_dataset(dataset)) tasks.emplace(t.id, std::move(t));
  StrategyOverrides overrides;
  if (overrides_path) overrides = load_overrides(*overrides_path);

  if (std::filesystem::exists(store_path)) std::filesystem::remove(store_path);
  ReplayStore store(store_path);
  for (const auto& c : doc.at("completions")) {
    const Task& t = tasks.at(c.at("task_id").get<std::string>());
    const EncoderConfig enc = parse_encoding(c.at("encoding").get<std::string>());
    std::optional<AbstractionStrategy> abstraction;
    if (kind_of(enc) == EncoderKind::Object) abstraction = select_best_fit(t, &overrides);
    const auto prompt = build_prompt(t, parse_prompt_strategy(c.at("strategy").get<std::string>()), enc, templates,
                                     abstraction, c.value("test_index", 0));
    CompletionRequest req{c.at("model").get<std::string>(), prompt.text()};
    store.record(req, {c.at("raw_text").get<std::string>(), req.model, 0.0, std::nullopt, BackendKind::Replay});
  }
  std::cout << store.size() << " recordings written to " << store_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-model evaluation harness for abstract grid-reasoning tasks"};
  app.require_subcommand(1);
  std::string templates_dir = PromptTemplates::default_dir().string();
  app.add_option("--templates", templates_dir, "Prompt template directory")->check(CLI::ExistingDirectory);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate task families");
  std::string families = "all";
  std::string out_dir;
  GenParams params;
  gen->add_option("--families", families, "Comma list of families, or all/1d/2d")->capture_default_str();
  gen->add_option("--seed", params.seed, "Base seed")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--per-type", params.tasks_per_type, "Tasks per family")->capture_default_str();
  gen->add_option("--num-train", params.num_train, "Train pairs per task")->capture_default_str();
  gen->add_option("--width", params.width, "Maximum width (0 = family default)");
  gen->add_option("--num-objects", params.num_objects, "Object count (0 = family default)");
  gen->add_option("--size-min", params.object_size_range.first, "Minimum object size");
  gen->add_option("--size-max", params.object_size_range.second, "Maximum object size");

  // verify
  auto* verify = app.add_subcommand("verify", "Check every task of a generated dataset against its transform");
  std::string dataset;
  verify->add_option("--dataset", dataset, "Dataset directory")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "Print every grid of a task in one encoding");
  std::string task_file, encoding = "word-pipe", abstraction_tag;
  encode->add_option("--task", task_file, "Task JSON file")->required()->check(CLI::ExistingFile);
  encode->add_option("--encoding", encoding, "Encoding tag")->capture_default_str();
  encode->add_option("--abstraction", abstraction_tag, "Abstraction strategy (default: best fit)");

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Print the prompt for a task");
  std::string strategy = "fewshot";
  prompt->add_option("--task", task_file, "Task JSON file")->required()->check(CLI::ExistingFile);
  prompt->add_option("--encoding", encoding, "Encoding tag")->capture_default_str();
  prompt->add_option("--strategy", strategy, "fewshot or cot")->capture_default_str();
  prompt->add_option("--abstraction", abstraction_tag, "Abstraction strategy (default: best fit)");

  // eval
  auto* eval = app.add_subcommand("eval", "Run the task x encoding x strategy x model matrix");
  std::string encodings, strategies, models, backend = "replay", store, endpoint, overrides, key_env = "OPENAI_API_KEY";
  int workers = 4;
  int max_tokens = CompletionRequest::kDefaultMaxOutputTokens;
  eval->add_option("--dataset", dataset, "Dataset directory")->required();
  eval->add_option("--encodings", encodings, "Comma list of encoding tags")->required();
  eval->add_option("--strategies", strategies, "Comma list: fewshot,cot")->required();
  eval->add_option("--models", models, "Comma list of model names")->required();
  eval->add_option("--backend", backend, "replay or live")->capture_default_str();
  eval->add_option("--out", out_dir, "Output directory")->required();
  eval->add_option("--store", store, "Replay store (JSON lines); live runs record into it");
  eval->add_option("--endpoint", endpoint, "Chat completion URL (live only)");
  eval->add_option("--api-key-env", key_env, "Environment variable holding the API key (live only)");
  eval->add_option("--workers", workers, "Concurrent requests")->capture_default_str();
  eval->add_option("--max-tokens", max_tokens, "max_tokens per completion")->capture_default_str();
  eval->add_option("--overrides", overrides, "Abstraction overrides JSON");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Fit the solvability model on run records");
  std::string records, report_path, sel_encoding, sel_strategy, sel_model;
  FitOptions fit_opts;
  analyze->add_option("--records", records, "records.jsonl")->required()->check(CLI::ExistingFile);
  analyze->add_option("--dataset", dataset, "Dataset directory")->required();
  analyze->add_option("--out", report_path, "Report path (markdown)")->required();
  analyze->add_option("--encoding", sel_encoding, "Select one encoding");
  analyze->add_option("--strategy", sel_strategy, "Select one strategy");
  analyze->add_option("--model", sel_model, "Select one model");
  analyze->add_option("--l2", fit_opts.l2)->capture_default_str();
  analyze->add_option("--lr", fit_opts.lr)->capture_default_str();
  analyze->add_option("--iters", fit_opts.iters)->capture_default_str();

  // replay-build
  auto* rbuild = app.add_subcommand("replay-build", "Build a replay store from hand-written completions");
  std::string completions;
  rbuild->add_option("--completions", completions, "completions.json")->required()->check(CLI::ExistingFile);
  rbuild->add_option("--dataset", dataset, "Dataset directory")->required();
  rbuild->add_option("--store", store, "Output store (overwritten)")->required();
  rbuild->add_option("--overrides", overrides, "Abstraction overrides JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto m = generate_dataset(parse_families(families), params, out_dir);
      std::cout << m.entries.size() << " tasks written to " << out_dir << "\n";
      return 0;
    }
    if (*verify) return cmd_verify(dataset);

    if (*encode || *prompt) {
      const Task t = load_task_file(task_file);
      const EncoderConfig enc = parse_encoding(encoding);
      const AbstractionStrategy abs = abstraction_tag.empty() ? select_best_fit(t) : parse_strategy(abstraction_tag);
      if (*encode) {
        int i = 0;
        for (const auto& p : t.train) {
          ++i;
          std::cout << "Input Grid " << i << ":\n" << encode_for_prompt(p.input, enc, abs) << "\n";
          std::cout << "Output Grid " << i << ":\n" << encode_for_prompt(p.output, enc, abs) << "\n";
        }
        for (const auto& p : t.test) std::cout << "Test Input Grid:\n" << encode_for_prompt(p.input, enc, abs) << "\n";
        return 0;
      }
      const auto templates = PromptTemplates::load(templates_dir);
      const auto p = build_prompt(t, parse_prompt_strategy(strategy), enc, templates,
                                  kind_of(enc) == EncoderKind::Object ? std::optional(abs) : std::nullopt);
      std::cout << p.text() << "\n";
      std::cerr << "template " << templates.hash() << ", ~" << token_estimate(p) << " tokens\n";
      return 0;
    }

    if (*eval) {
      RunConfig cfg;
      cfg.dataset = dataset;
      for (const auto& e : split_list(encodings)) cfg.encodings.push_back(parse_encoding(e));
      for (const auto& s : split_list(strategies)) cfg.strategies.push_back(parse_prompt_strategy(s));
      cfg.models = split_list(models);
      cfg.backend = parse_backend(backend);
      cfg.output_dir = out_dir;
      cfg.workers = workers;
      cfg.max_output_tokens = max_tokens;
      if (!overrides.empty()) cfg.overrides = overrides;

      std::unique_ptr<Backend> impl;
      if (cfg.backend == BackendKind::Replay) {
        if (!endpoint.empty()) throw ConfigError("--endpoint is only valid with --backend live");
        if (store.empty()) throw ConfigError("--backend replay needs --store");
        impl = std::make_unique<ReplayBackend>(std::make_shared<ReplayStore>(store));
      } else {
        LiveOptions opts;
        if (!endpoint.empty()) opts.endpoint = endpoint;
        opts.api_key_env = key_env;
        opts.max_in_flight = workers;
        impl = LiveBackend::from_env(opts, store.empty() ? nullptr : std::make_shared<ReplayStore>(store));
      }

      const auto templates = PromptTemplates::load(templates_dir);
      const auto result = run_matrix(cfg, *impl, templates);
      if (!result.complete()) {
        std::cerr << result.missing.size() << " cell(s) have no recorded completion:\n";
        for (const auto& m : result.missing) std::cerr << "  " << m << "\n";
        return 2;
      }
      const auto tasks = load_dataset(cfg.dataset);
      const auto table = aggregate(result.records, matrix_spec(cfg, tasks), load_suites(cfg.dataset));
      write_text(std::filesystem::path(out_dir) / "table.md", table.to_markdown());
      write_text(std::filesystem::path(out_dir) / "table.csv", table.to_csv());
      std::cout << table.to_markdown();
      return 0;
    }

    if (*analyze) {
      const auto set = label_tasks(load_records(records), load_dataset(dataset), sel_encoding, sel_strategy, sel_model);
      const auto model = fit(set.features, set.solved, fit_opts);
      for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
      const std::string md = "# Solvability analysis: " + set.combination + "\n\n" +
                             report(model, to_rows(set.features), set.solved);
      write_text(report_path, md);
      std::cout << md;
      return 0;
    }

    if (*rbuild) {
      return cmd_replay_build(completions, dataset, templates_dir, store,
                              overrides.empty() ? std::nullopt : std::optional<std::filesystem::path>(overrides));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

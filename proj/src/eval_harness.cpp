#include "arcllm/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "arcllm/bench_gen.hpp"
#include "arcllm/hash.hpp"

namespace arcllm {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

ordered_json grid_json(const Grid& g) { return g.rows(); }

Grid grid_from(const nlohmann::json& j) { return Grid::from_rows(j.get<std::vector<std::vector<int>>>()); }

std::string cell_name(const RunRecord::Key& k) {
  return std::get<0>(k) + "/" + std::get<1>(k) + "/" + std::get<2>(k) + "/" + std::get<3>(k);
}

Verdict overall_verdict(const RunRecord& r) {
  if (r.error) return Verdict::Unsolved;
  for (const auto& t : r.tests) {
    if (t.verdict != Verdict::Solved) return t.verdict;
  }
  return r.tests.empty() ? Verdict::ParseFailure : Verdict::Solved;
}

template <typename T>
void require_unique(const std::vector<T>& items, const std::string& what) {
  std::set<T> seen(items.begin(), items.end());
  if (items.empty()) throw ConfigError("no " + what + " given");
  if (seen.size() != items.size()) throw ConfigError("duplicate " + what);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Solved:
      return "solved";
    case Verdict::Unsolved:
      return "unsolved";
    case Verdict::ParseFailure:
      return "parse_failure";
  }
  return "?";
}

Verdict parse_verdict(std::string_view tag) {
  if (tag == "solved") return Verdict::Solved;
  if (tag == "unsolved") return Verdict::Unsolved;
  if (tag == "parse_failure") return Verdict::ParseFailure;
  throw std::invalid_argument("unknown verdict '" + std::string(tag) + "'");
}

void RunConfig::validate() const {
  std::vector<std::string> tags;
  for (const auto& e : encodings) tags.push_back(encoding_tag(e));
  require_unique(tags, "encodings");
  std::vector<std::string> strategy_tags;
  for (auto s : strategies) strategy_tags.push_back(to_string(s));
  require_unique(strategy_tags, "strategies");
  require_unique(models, "models");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
  if (output_dir.empty()) throw ConfigError("no output directory given");
}

// --- records -------------------------------------------------------------

std::string RunRecord::to_json_line() const {
  ordered_json j;
  j["task_id"] = task_id;
  j["encoding"] = encoding;
  j["strategy"] = strategy;
  j["model"] = model;
  j["template_hash"] = template_hash;
  j["abstraction"] = abstraction ? ordered_json(*abstraction) : ordered_json(nullptr);
  auto arr = ordered_json::array();
  for (const auto& t : tests) {
    ordered_json o;
    o["prompt_hash"] = t.prompt_hash;
    o["raw_completion"] = t.raw_completion;
    o["parsed"] = t.parsed ? grid_json(*t.parsed) : ordered_json(nullptr);
    o["decode_note"] = t.decode_note;
    o["expected"] = grid_json(t.expected);
    o["verdict"] = to_string(t.verdict);
    arr.push_back(std::move(o));
  }
  j["tests"] = std::move(arr);
  j["verdict"] = to_string(verdict);
  j["error"] = error ? ordered_json(*error) : ordered_json(nullptr);
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  return j.dump();
}

RunRecord RunRecord::from_json_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw SchemaError("record: malformed JSON");
  try {
    RunRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.encoding = j.at("encoding").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.template_hash = j.at("template_hash").get<std::string>();
    if (j.at("abstraction").is_string()) r.abstraction = j["abstraction"].get<std::string>();
    for (const auto& o : j.at("tests")) {
      TestOutcome t{o.at("prompt_hash").get<std::string>(),
                    o.at("raw_completion").get<std::string>(),
                    std::nullopt,
                    o.at("decode_note").get<std::string>(),
                    grid_from(o.at("expected")),
                    parse_verdict(o.at("verdict").get<std::string>())};
      if (!o.at("parsed").is_null()) t.parsed = grid_from(o["parsed"]);
      r.tests.push_back(std::move(t));
    }
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (j.at("error").is_string()) r.error = j["error"].get<std::string>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("record: ") + e.what());
  }
}

bool same_outcome(const RunRecord& a, const RunRecord& b) {
  return a.key() == b.key() && a.template_hash == b.template_hash && a.abstraction == b.abstraction &&
         a.tests == b.tests && a.verdict == b.verdict && a.error == b.error;
}

std::vector<RunRecord> load_records(const std::filesystem::path& path) {
  std::vector<RunRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(RunRecord::from_json_line(line));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// --- scoring -------------------------------------------------------------

ScoreResult score(std::string_view raw, const EncoderConfig& encoder, const Grid& expected, GridDims fallback_dims,
                  const Palette& palette) {
  DecodeResult decoded = std::holds_alternative<DirectEncodingConfig>(encoder)
                             ? decode_grid(raw, std::get<DirectEncodingConfig>(encoder), palette)
                             : decode_object_answer(raw, std::get<ObjectEncodingConfig>(encoder), fallback_dims,
                                                    kBlack, palette);
  Verdict v = Verdict::ParseFailure;
  if (decoded.ok()) v = grids_equal(decoded.grid(), expected) ? Verdict::Solved : Verdict::Unsolved;
  return {v, std::move(decoded)};
}

// --- matrix --------------------------------------------------------------

MatrixSpec matrix_spec(const RunConfig& cfg, const std::vector<Task>& tasks) {
  MatrixSpec spec;
  for (const auto& t : tasks) spec.task_ids.push_back(t.id);
  for (const auto& e : cfg.encodings) spec.encodings.push_back(encoding_tag(e));
  for (auto s : cfg.strategies) spec.strategies.push_back(to_string(s));
  spec.models = cfg.models;
  return spec;
}

MatrixResult run_matrix(const RunConfig& cfg, Backend& backend, const PromptTemplates& templates) {
  cfg.validate();
  if (backend.kind() != cfg.backend) throw ConfigError("backend does not match the configured kind");
  const std::vector<Task> tasks = load_dataset(cfg.dataset);
  if (tasks.empty()) throw ConfigError("dataset " + cfg.dataset.string() + " has no tasks");
  for (const auto& ex : templates.examples()) {
    for (const auto& t : tasks) {
      if (t.id == ex.task.id || (t.train == ex.task.train && t.test == ex.task.test)) {
        throw ConfigError("task " + t.id + " coincides with an in-context example");
      }
    }
  }

  StrategyOverrides overrides;
  if (cfg.overrides) overrides = load_overrides(*cfg.overrides);
  const bool any_object = std::any_of(cfg.encodings.begin(), cfg.encodings.end(),
                                      [](const EncoderConfig& e) { return kind_of(e) == EncoderKind::Object; });
  std::map<std::string, AbstractionStrategy> abstraction;
  if (any_object) {
    for (const auto& t : tasks) abstraction[t.id] = select_best_fit(t, &overrides);
  }

  std::filesystem::create_directories(cfg.output_dir);
  const auto records_path = cfg.output_dir / "records.jsonl";
  std::map<RunRecord::Key, RunRecord> done;
  for (auto& r : load_records(records_path)) {
    const auto k = r.key();
    done.emplace(k, std::move(r));
  }

  struct Cell {
    const Task* task;
    const EncoderConfig* encoding;
    PromptStrategy strategy;
    const std::string* model;
    RunRecord::Key key;
  };
  std::vector<Cell> order;
  std::vector<std::size_t> pending;
  for (const auto& t : tasks) {
    for (const auto& e : cfg.encodings) {
      for (auto s : cfg.strategies) {
        for (const auto& m : cfg.models) {
          RunRecord::Key key{t.id, encoding_tag(e), to_string(s), m};
          if (!done.count(key)) pending.push_back(order.size());
          order.push_back({&t, &e, s, &m, std::move(key)});
        }
      }
    }
  }

  auto run_cell = [&](const Cell& c) {
    RunRecord r;
    std::tie(r.task_id, r.encoding, r.strategy, r.model) = c.key;
    r.template_hash = templates.hash();
    std::optional<AbstractionStrategy> chosen;
    if (kind_of(*c.encoding) == EncoderKind::Object) {
      chosen = abstraction.at(c.task->id);
      r.abstraction = to_string(*chosen);
    }
    r.started_at = now_utc();
    for (std::size_t i = 0; i < c.task->test.size(); ++i) {
      const auto& pair = c.task->test[i];
      const std::string prompt = build_prompt(*c.task, c.strategy, *c.encoding, templates, chosen, i).text();
      TestOutcome outcome{sha256_hex(prompt), "", std::nullopt, "", pair.output, Verdict::Unsolved};
      try {
        outcome.raw_completion = backend.complete({*c.model, prompt, cfg.max_output_tokens}).raw_text;
      } catch (const GatewayError& e) {
        r.error = e.what();
        outcome.decode_note = "no completion";
        r.tests.push_back(std::move(outcome));
        break;
      }
      auto scored = score(outcome.raw_completion, *c.encoding, pair.output, pair.input.dims());
      outcome.verdict = scored.verdict;
      outcome.decode_note = scored.decoded.note();
      if (scored.decoded.ok()) outcome.parsed = scored.decoded.grid();
      r.tests.push_back(std::move(outcome));
    }
    r.verdict = overall_verdict(r);
    r.finished_at = now_utc();
    return r;
  };

  std::mutex mu;
  std::ofstream out;
  std::set<std::size_t> missed;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next++;
      if (k >= pending.size()) return;
      const Cell& c = order[pending[k]];
      try {
        RunRecord r = run_cell(c);
        std::lock_guard lock(mu);
        if (!out.is_open()) out.open(records_path, std::ios::binary | std::ios::app);
        out << r.to_json_line() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("cannot append to " + records_path.string());
        done.emplace(c.key, std::move(r));
      } catch (const ReplayMiss&) {
        std::lock_guard lock(mu);
        missed.insert(pending[k]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = pending.size();
      }
    }
  };
  const int n_workers = static_cast<int>(std::min<std::size_t>(cfg.workers, pending.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  MatrixResult result;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (missed.count(i)) {
      result.missing.push_back(cell_name(order[i].key));
    } else {
      result.records.push_back(done.at(order[i].key));
    }
  }
  return result;
}

// --- aggregation ---------------------------------------------------------

std::string format_ratio(int object_count, int direct_count) {
  if (direct_count == 0) return object_count > 0 ? "∞" : "-";
  const long v = static_cast<long>(object_count) * 100 / direct_count;
  const long whole = v / 100;
  const long frac = v % 100;
  std::string s = std::to_string(whole);
  if (frac != 0) {
    s += '.';
    s += static_cast<char>('0' + frac / 10);
    if (frac % 10 != 0) s += static_cast<char>('0' + frac % 10);
  }
  return s + "×";
}

int ResultTable::count(const std::string& encoding, std::size_t column) const {
  const auto it = counts.find({encoding, column});
  return it == counts.end() ? 0 : it->second;
}

ResultTable aggregate(const std::vector<RunRecord>& records, const MatrixSpec& spec,
                      const std::map<std::string, std::string>& suites) {
  std::map<RunRecord::Key, const RunRecord*> index;
  for (const auto& r : records) index[r.key()] = &r;

  ResultTable table;
  table.rows = spec.encodings;
  for (const auto& s : spec.strategies) {
    for (const auto& m : spec.models) table.columns.emplace_back(s, m);
  }
  table.total = static_cast<int>(spec.task_ids.size());

  std::vector<std::string> missing;
  for (const auto& task : spec.task_ids) {
    const auto suite = suites.find(task);
    if (suite != suites.end()) ++table.suite_sizes[suite->second];
    for (const auto& enc : spec.encodings) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const RunRecord::Key key{task, enc, table.columns[c].first, table.columns[c].second};
        const auto it = index.find(key);
        if (it == index.end()) {
          missing.push_back(cell_name(key));
          continue;
        }
        const int solved = it->second->verdict == Verdict::Solved ? 1 : 0;
        table.counts[{enc, c}] += solved;
        if (suite != suites.end()) table.by_suite[suite->second][{enc, c}] += solved;
      }
    }
  }
  if (!missing.empty()) {
    std::string what = "incomplete matrix: " + std::to_string(missing.size()) + " missing cell(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) what += " " + missing[i];
    if (missing.size() > 20) what += " ...";
    throw AggregationError(what, std::move(missing));
  }

  std::vector<std::string> direct, object;
  for (const auto& enc : spec.encodings) {
    (kind_of(parse_encoding(enc)) == EncoderKind::Direct ? direct : object).push_back(enc);
  }
  if (!direct.empty() && !object.empty()) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      int best_direct = 0, best_object = 0;
      for (const auto& e : direct) best_direct = std::max(best_direct, table.count(e, c));
      for (const auto& e : object) best_object = std::max(best_object, table.count(e, c));
      table.ratios.push_back(format_ratio(best_object, best_direct));
    }
  }
  return table;
}

std::string ResultTable::to_markdown() const {
  auto header = [&](const std::string& first) {
    std::string s = "| " + first + " |";
    for (const auto& [strategy, model] : columns) s += " " + strategy + " / " + model + " |";
    s += "\n|---|";
    for (std::size_t c = 0; c < columns.size(); ++c) s += "---:|";
    return s + "\n";
  };
  std::ostringstream md;
  md << "Solved tasks out of " << total << ".\n\n" << header("Encoding");
  for (const auto& enc : rows) {
    md << "| " << enc << " |";
    for (std::size_t c = 0; c < columns.size(); ++c) md << " " << count(enc, c) << " |";
    md << "\n";
  }
  if (!ratios.empty()) {
    md << "| object / direct |";
    for (const auto& r : ratios) md << " " << r << " |";
    md << "\n";
  }
  for (const auto& [suite, cells] : by_suite) {
    md << "\n### " << suite << " (out of " << suite_sizes.at(suite) << ")\n\n" << header("Encoding");
    for (const auto& enc : rows) {
      md << "| " << enc << " |";
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto it = cells.find({enc, c});
        md << " " << (it == cells.end() ? 0 : it->second) << " |";
      }
      md << "\n";
    }
  }
  return md.str();
}

std::string ResultTable::to_csv() const {
  std::ostringstream csv;
  csv << "encoding";
  for (const auto& [strategy, model] : columns) csv << "," << strategy << "/" << model;
  csv << "\n";
  for (const auto& enc : rows) {
    csv << enc;
    for (std::size_t c = 0; c < columns.size(); ++c) csv << "," << count(enc, c);
    csv << "\n";
  }
  if (!ratios.empty()) {
    csv << "ratio";
    for (const auto& r : ratios) csv << "," << r;
    csv << "\n";
  }
  return csv.str();
}

std::map<std::string, std::string> load_suites(const std::filesystem::path& dataset_dir) {
  std::map<std::string, std::string> out;
  if (!std::filesystem::exists(dataset_dir / "manifest.json")) return out;
  for (const auto& e : Manifest::load(dataset_dir).entries) out[e.id] = e.suite;
  return out;
}

}  // namespace arcllm

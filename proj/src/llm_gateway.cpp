#include "arcllm/llm_gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "arcllm/hash.hpp"

namespace arcllm {

namespace {

using json = nlohmann::json;

std::optional<Usage> usage_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  const auto p = j.find("prompt_tokens");
  const auto c = j.find("completion_tokens");
  if (p == j.end() || c == j.end() || !p->is_number_integer() || !c->is_number_integer()) return std::nullopt;
  return Usage{p->get<int>(), c->get<int>()};
}

json usage_to_json(const std::optional<Usage>& u) {
  if (!u) return nullptr;
  return json{{"prompt_tokens", u->prompt_tokens}, {"completion_tokens", u->completion_tokens}};
}

std::string clip(const std::string& s, std::size_t n = 200) { return s.size() <= n ? s : s.substr(0, n) + "..."; }

}  // namespace

std::string to_string(BackendKind b) { return b == BackendKind::Live ? "live" : "replay"; }

BackendKind parse_backend(std::string_view tag) {
  if (tag == "live") return BackendKind::Live;
  if (tag == "replay") return BackendKind::Replay;
  throw std::invalid_argument("unknown backend '" + std::string(tag) + "'");
}

std::string request_hash(std::string_view model, std::string_view prompt) {
  std::string key(model);
  key += '\0';
  key += prompt;
  return sha256_hex(key);
}

// --- replay store --------------------------------------------------------

ReplayStore::ReplayStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = path_->string() + ":" + std::to_string(lineno) + ": ";
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IntegrityError(where + "malformed record");
    std::string hash, model, prompt, text;
    try {
      hash = j.at("hash").get<std::string>();
      model = j.at("model").get<std::string>();
      prompt = j.at("prompt").get<std::string>();
      text = j.at("raw_text").get<std::string>();
    } catch (const json::exception&) {
      throw IntegrityError(where + "missing field");
    }
    if (request_hash(model, prompt) != hash) throw IntegrityError(where + "hash does not match model and prompt");
    auto [it, inserted] = entries_.try_emplace(hash, Entry{model, text, usage_from_json(j.value("usage", json()))});
    if (!inserted && it->second.raw_text != text) throw IntegrityError(where + "conflicting recording for " + hash);
  }
}

std::optional<CompletionResult> ReplayStore::find(const std::string& hash) const {
  std::shared_lock lock(mu_);
  const auto it = entries_.find(hash);
  if (it == entries_.end()) return std::nullopt;
  return CompletionResult{it->second.raw_text, it->second.model, 0.0, it->second.usage, BackendKind::Replay};
}

void ReplayStore::record(const CompletionRequest& req, const CompletionResult& result) {
  const std::string hash = request_hash(req.model, req.prompt);
  std::unique_lock lock(mu_);
  if (const auto it = entries_.find(hash); it != entries_.end()) {
    if (it->second.raw_text != result.raw_text) {
      throw IntegrityError("refusing to overwrite recording " + hash + " with different text");
    }
    return;
  }
  if (path_) {
    json line;
    line["hash"] = hash;
    line["model"] = req.model;
    line["prompt"] = req.prompt;
    line["raw_text"] = result.raw_text;
    line["usage"] = usage_to_json(result.usage);
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot append to replay store " + path_->string());
  }
  entries_.emplace(hash, Entry{req.model, result.raw_text, result.usage});
}

std::size_t ReplayStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

CompletionResult ReplayBackend::complete(const CompletionRequest& req) {
  const std::string hash = request_hash(req.model, req.prompt);
  auto hit = store_->find(hash);
  if (!hit) throw ReplayMiss(hash);
  return *hit;
}

// --- live backend --------------------------------------------------------

std::string build_request_body(const CompletionRequest& req) {
  json body;
  body["model"] = req.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", req.prompt}}});
  body["temperature"] = CompletionRequest::kTemperature;
  body["max_tokens"] = req.max_output_tokens;
  return body.dump();
}

ParsedResponse parse_response_body(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw GatewayError("response is not JSON: " + clip(body));
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return {content.is_string() ? content.get<std::string>() : std::string(), usage_from_json(j.value("usage", json()))};
  } catch (const json::exception&) {
    throw GatewayError("response has no choices[0].message.content: " + clip(body));
  }
}

HttpTransport make_http_transport(const std::string& endpoint_url, std::string api_key,
                                  std::chrono::seconds timeout) {
  const auto scheme_end = endpoint_url.find("://");
  const auto path_start = endpoint_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = endpoint_url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint_url.substr(path_start);
  auto client = std::make_shared<httplib::Client>(origin);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  auto mu = std::make_shared<std::mutex>();
  return [client, mu, path, key = std::move(api_key)](const std::string& body) {
    httplib::Headers headers = {{"Authorization", "Bearer " + key}};
    httplib::Result res;
    {
      // httplib::Client is not safe for concurrent requests on one connection.
      std::lock_guard lock(*mu);
      res = client->Post(path, headers, body, "application/json");
    }
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    HttpResponse out{res->status, res->body, std::nullopt};
    if (res->has_header("Retry-After")) {
      char* end = nullptr;
      const std::string v = res->get_header_value("Retry-After");
      const double s = std::strtod(v.c_str(), &end);
      if (end != v.c_str() && std::isfinite(s) && s >= 0) out.retry_after_s = s;
    }
    return out;
  };
}

LiveBackend::LiveBackend(LiveOptions options, HttpTransport transport, std::shared_ptr<ReplayStore> recorder)
    : options_(std::move(options)), transport_(std::move(transport)), recorder_(std::move(recorder)) {
  if (options_.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
  if (options_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (!options_.sleep) {
    options_.sleep = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
  if (!options_.clock) options_.clock = [] { return std::chrono::steady_clock::now(); };
}

std::unique_ptr<LiveBackend> LiveBackend::from_env(LiveOptions options, std::shared_ptr<ReplayStore> recorder) {
  const char* key = std::getenv(options.api_key_env.c_str());
  if (key == nullptr || *key == '\0') throw GatewayError("environment variable " + options.api_key_env + " is not set");
  auto transport = make_http_transport(options.endpoint, key);
  return std::make_unique<LiveBackend>(std::move(options), std::move(transport), std::move(recorder));
}

void LiveBackend::acquire_slot() {
  std::unique_lock lock(mu_);
  slot_free_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
  ++in_flight_;
}

void LiveBackend::release_slot() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

void LiveBackend::wait_for_cooldown() {
  std::chrono::steady_clock::time_point until;
  {
    std::lock_guard lock(mu_);
    until = cooldown_until_;
  }
  const auto now = options_.clock();
  if (until > now) options_.sleep(std::chrono::duration<double>(until - now).count());
}

void LiveBackend::extend_cooldown(double seconds) {
  const auto until = options_.clock() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
  std::lock_guard lock(mu_);
  if (until > cooldown_until_) cooldown_until_ = until;
}

CompletionResult LiveBackend::complete(const CompletionRequest& req) {
  acquire_slot();
  struct Release {
    LiveBackend* self;
    ~Release() { self->release_slot(); }
  } release{this};

  const std::string body = build_request_body(req);
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    wait_for_cooldown();
    const auto start = std::chrono::steady_clock::now();
    std::optional<HttpResponse> resp;
    try {
      resp = transport_(body);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
    const double latency = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (resp && resp->status == 200) {
      auto parsed = parse_response_body(resp->body);
      CompletionResult result{std::move(parsed.text), req.model, latency, parsed.usage, BackendKind::Live};
      if (recorder_) recorder_->record(req, result);
      return result;
    }
    const bool rate_limited = resp && resp->status == 429;
    if (resp && !rate_limited && resp->status < 500) {
      throw GatewayError("HTTP " + std::to_string(resp->status) + ": " + clip(resp->body));
    }
    if (resp) last_error = "HTTP " + std::to_string(resp->status);
    if (attempt == options_.max_attempts) break;

    double delay = options_.backoff_base_s * std::pow(2.0, attempt - 1);
    if (resp && resp->retry_after_s && *resp->retry_after_s > delay) delay = *resp->retry_after_s;
    if (rate_limited) {
      // Shared: every worker holds off until the window passes.
      extend_cooldown(delay);
    } else {
      options_.sleep(delay);
    }
  }
  throw GatewayError("giving up after " + std::to_string(options_.max_attempts) + " attempts: " + last_error);
}

}  // namespace arcllm

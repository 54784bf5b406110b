#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "smishaug/error.hpp"
#include "smishaug/hash.hpp"

namespace smishaug {

inline constexpr double kDefaultTemperature = 0.85;

struct GenerationRequest {
  std::string model;
  double temperature = kDefaultTemperature;
  std::string prompt;
  std::optional<int> max_tokens;
  std::optional<std::string> system_prompt;
  std::string prompt_id;

  void validate() const {
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
      throw Error(ErrorKind::Invalid, "temperature must lie in [0, 2]");
    }
    if (prompt_id.empty()) throw Error(ErrorKind::Invalid, "generation request without prompt_id");
  }
};

enum class Transport { Live, Record, Replay };

inline std::string_view transport_name(Transport t) {
  switch (t) {
    case Transport::Live: return "live";
    case Transport::Record: return "record";
    case Transport::Replay: return "replay";
  }
  return "?";
}

inline std::optional<Transport> parse_transport(std::string_view s) {
  for (auto t : {Transport::Live, Transport::Record, Transport::Replay}) {
    if (s == transport_name(t)) return t;
  }
  return std::nullopt;
}

struct TransportMode {
  Transport mode = Transport::Replay;
  std::filesystem::path fixture_path;  // required for Record and Replay
};

// Chat-completion request body: {model, temperature, messages:[...], max_tokens?}.
inline nlohmann::ordered_json serialize_request(const GenerationRequest& req) {
  nlohmann::ordered_json body;
  body["model"] = req.model;
  body["temperature"] = req.temperature;
  body["messages"] = nlohmann::ordered_json::array();
  if (req.system_prompt && !req.system_prompt->empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", *req.system_prompt}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", req.prompt}});
  if (req.max_tokens) body["max_tokens"] = *req.max_tokens;
  return body;
}

// Assistant text of the first choice.
inline std::string extract_response_text(std::string_view body) {
  try {
    auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorKind::MalformedResponse, "response content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("malformed chat-completion response: ") + e.what());
  }
}

struct HttpResult {
  int status = 0;  // 0 means the request never produced an HTTP status
  std::string body;
  std::string error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;
using HttpPoster = std::function<HttpResult(const std::string& url, const HttpHeaders& headers,
                                            const std::string& body)>;

// Plain HTTP(S) POST via cpp-httplib. HTTPS needs CPPHTTPLIB_OPENSSL_SUPPORT.
inline HttpResult http_post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                            std::chrono::seconds timeout = std::chrono::seconds(120)) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, url_re)) return {0, {}, "unsupported endpoint URL: " + url};
  httplib::Client client(m[1].str());
  if (!client.is_valid()) return {0, {}, "cannot create HTTP client for " + m[1].str()};
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Post(path, h, body, "application/json");
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

inline bool is_transient_status(int status) {
  return status == 0 || status == 408 || status == 409 || status == 429 || (status >= 500 && status <= 599);
}

struct GatewayConfig {
  std::string endpoint_url;
  std::string api_key;
  std::size_t max_inflight = 4;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{30000};
  double requests_per_second = 0.0;  // 0 disables the token bucket

  std::chrono::milliseconds backoff_delay(int retry) const {
    auto d = backoff_base.count();
    for (int i = 0; i < retry && d < backoff_cap.count(); ++i) d *= 2;
    return std::chrono::milliseconds(std::min<long long>(d, backoff_cap.count()));
  }

  // Endpoint, key, and model come from the environment when not set explicitly.
  static GatewayConfig from_env() {
    GatewayConfig c;
    if (const char* v = std::getenv("SMISHAUG_ENDPOINT")) c.endpoint_url = v;
    if (const char* v = std::getenv("SMISHAUG_API_KEY")) c.api_key = v;
    return c;
  }
};

struct GatewayStats {
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t replayed = 0;
  std::size_t max_observed_inflight = 0;
};

// Fixture file: JSONL lines {prompt_id, response, ...}. Repeated prompt ids are
// served in recorded order; once exhausted the last response repeats.
class ReplayFixture {
 public:
  ReplayFixture() = default;

  static ReplayFixture load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open replay fixture " + path.string());
    ReplayFixture f;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto j = nlohmann::json::parse(line);
        f.entries_[j.at("prompt_id").get<std::string>()].push_back(j.at("response").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + " line " + std::to_string(n) + ": " + e.what());
      }
    }
    return f;
  }

  void add(const std::string& prompt_id, std::string response) {
    entries_[prompt_id].push_back(std::move(response));
  }

  bool contains(const std::string& prompt_id) const { return entries_.count(prompt_id) > 0; }
  std::size_t size() const { return entries_.size(); }

  std::string next(const std::string& prompt_id) {
    std::lock_guard lock(mu_);
    auto it = entries_.find(prompt_id);
    if (it == entries_.end()) {
      throw Error(ErrorKind::ReplayMiss, "replay fixture has no response for prompt_id " + prompt_id);
    }
    auto& cursor = cursor_[prompt_id];
    const auto& responses = it->second;
    const auto& r = responses[std::min(cursor, responses.size() - 1)];
    ++cursor;
    return r;
  }

  ReplayFixture(ReplayFixture&& other) noexcept
      : entries_(std::move(other.entries_)), cursor_(std::move(other.cursor_)) {}
  ReplayFixture& operator=(ReplayFixture&& other) noexcept {
    entries_ = std::move(other.entries_);
    cursor_ = std::move(other.cursor_);
    return *this;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::size_t> cursor_;
  std::mutex mu_;
};

// Shared, thread-safe gateway. Owns the in-flight bound, the token bucket, and
// all retries; callers see a blocking complete().
class LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LlmGateway(GatewayConfig config, TransportMode transport, HttpPoster poster = {}, Sleeper sleeper = {})
      : config_(std::move(config)), transport_(std::move(transport)), poster_(std::move(poster)),
        sleeper_(std::move(sleeper)) {
    if (config_.max_inflight == 0) throw Error(ErrorKind::Invalid, "max_inflight must be positive");
    if (config_.max_retries < 0) throw Error(ErrorKind::Invalid, "max_retries must be non-negative");
    if (transport_.mode != Transport::Live && transport_.fixture_path.empty()) {
      throw Error(ErrorKind::Invalid, "record and replay transports need a fixture path");
    }
    if (transport_.mode == Transport::Replay) {
      fixture_ = ReplayFixture::load(transport_.fixture_path);
      return;
    }
    if (!poster_) {
      if (config_.endpoint_url.empty()) {
        throw Error(ErrorKind::Invalid, "live transport needs an endpoint URL (SMISHAUG_ENDPOINT)");
      }
      poster_ = [](const std::string& url, const HttpHeaders& h, const std::string& body) {
        return http_post(url, h, body);
      };
    }
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (transport_.mode == Transport::Record && transport_.fixture_path.has_parent_path()) {
      std::filesystem::create_directories(transport_.fixture_path.parent_path());
    }
    last_refill_ = std::chrono::steady_clock::now();
    tokens_ = 1.0;
  }

  const TransportMode& transport() const { return transport_; }
  const GatewayConfig& config() const { return config_; }

  GatewayStats stats() const {
    std::lock_guard lock(stats_mu_);
    return stats_;
  }

  std::string complete(const GenerationRequest& req) {
    req.validate();
    if (transport_.mode == Transport::Replay) {
      auto r = fixture_.next(req.prompt_id);
      std::lock_guard lock(stats_mu_);
      ++stats_.replayed;
      return r;
    }

    const auto body = serialize_request(req);
    const auto body_text = body.dump();
    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        {
          std::lock_guard lock(stats_mu_);
          ++stats_.retries;
        }
        sleeper_(config_.backoff_delay(attempt - 1));
      }
      take_rate_token();
      HttpResult res;
      {
        InflightSlot slot(*this);
        res = poster_(config_.endpoint_url, headers, body_text);
      }
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.requests;
      }
      if (res.status >= 200 && res.status < 300) {
        auto content = extract_response_text(res.body);
        if (transport_.mode == Transport::Record) append_fixture(req, body, content);
        return content;
      }
      last_error = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
      if (!is_transient_status(res.status)) {
        throw Error(ErrorKind::Gateway, "endpoint rejected request " + req.prompt_id + ": " + last_error);
      }
    }
    throw Error(ErrorKind::Gateway, "retries exhausted for " + req.prompt_id + " after " +
                                        std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
  }

 private:
  class InflightSlot {
   public:
    explicit InflightSlot(LlmGateway& g) : g_(g) {
      std::unique_lock lock(g_.slot_mu_);
      g_.slot_cv_.wait(lock, [&] { return g_.inflight_ < g_.config_.max_inflight; });
      ++g_.inflight_;
      std::lock_guard s(g_.stats_mu_);
      g_.stats_.max_observed_inflight = std::max(g_.stats_.max_observed_inflight, g_.inflight_);
    }
    ~InflightSlot() {
      {
        std::lock_guard lock(g_.slot_mu_);
        --g_.inflight_;
      }
      g_.slot_cv_.notify_one();
    }
    InflightSlot(const InflightSlot&) = delete;
    InflightSlot& operator=(const InflightSlot&) = delete;

   private:
    LlmGateway& g_;
  };

  void take_rate_token() {
    if (config_.requests_per_second <= 0.0) return;
    std::unique_lock lock(rate_mu_);
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      const std::chrono::duration<double> elapsed = now - last_refill_;
      tokens_ = std::min(1.0, tokens_ + elapsed.count() * config_.requests_per_second);
      last_refill_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / config_.requests_per_second);
      lock.unlock();
      sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(wait) + std::chrono::milliseconds(1));
      lock.lock();
    }
  }

  // The request body never contains the credential, which travels only in headers.
  void append_fixture(const GenerationRequest& req, const nlohmann::ordered_json& body,
                      const std::string& content) {
    nlohmann::ordered_json line;
    line["prompt_id"] = req.prompt_id;
    line["model"] = req.model;
    line["temperature"] = req.temperature;
    line["request"] = body;
    line["response"] = content;
    std::lock_guard lock(fixture_mu_);
    std::ofstream out(transport_.fixture_path, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot append to fixture " + transport_.fixture_path.string());
    out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }

  GatewayConfig config_;
  TransportMode transport_;
  HttpPoster poster_;
  Sleeper sleeper_;
  ReplayFixture fixture_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t inflight_ = 0;

  std::mutex rate_mu_;
  double tokens_ = 1.0;
  std::chrono::steady_clock::time_point last_refill_{};

  std::mutex fixture_mu_;
  mutable std::mutex stats_mu_;
  GatewayStats stats_;
};

}  // namespace smishaug

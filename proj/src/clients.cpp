#include "bazaar/clients.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace bazaar {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t hash = 1469598103934665603ull;
  for (char c : s) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

void normalize(Embedding& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  } else if (!v.empty()) {
    v[0] = 1.0;  // empty text maps to a fixed unit vector
  }
}

}  // namespace

std::vector<Embedding> HashEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    Embedding v(dimension_, 0.0);
    for (const std::string& token : tokenize(text)) {
      std::uint64_t h = mix_seed(fnv1a(token), seed_);
      int slot = static_cast<int>(h % static_cast<std::uint64_t>(dimension_));
      double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
      v[slot] += sign;
    }
    normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Embedding> HttpEmbedder::embed(const std::vector<std::string>& texts) {
  json body{{"model", config_.model}, {"input", texts}};
  httplib::Client client(config_.base_url);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw BazaarError("embedding endpoint failure" +
                      (res ? ": status " + std::to_string(res->status) : ""));
  }
  json reply = json::parse(res->body);
  std::vector<Embedding> out;
  for (const json& item : reply.at("data")) {
    Embedding v = item.at("embedding").get<Embedding>();
    normalize(v);
    out.push_back(std::move(v));
  }
  if (out.size() != texts.size()) throw BazaarError("embedding response length mismatch");
  return out;
}

std::vector<double> OverlapReranker::score(const std::string& query,
                                           const std::vector<std::string>& passages) {
  auto query_tokens = tokenize(query);
  std::set<std::string> q(query_tokens.begin(), query_tokens.end());
  std::vector<double> scores;
  scores.reserve(passages.size());
  for (const std::string& passage : passages) {
    auto passage_tokens = tokenize(passage);
    std::set<std::string> p(passage_tokens.begin(), passage_tokens.end());
    size_t common = 0;
    for (const auto& t : q) common += p.count(t);
    size_t unioned = q.size() + p.size() - common;
    scores.push_back(unioned == 0 ? 0.0 : static_cast<double>(common) / unioned);
  }
  return scores;
}

std::vector<double> HttpReranker::score(const std::string& query,
                                        const std::vector<std::string>& passages) {
  json body{{"model", config_.model}, {"query", query}, {"passages", passages}};
  httplib::Client client(config_.base_url);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post("/rerank", headers, body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw BazaarError("reranker endpoint failure" +
                      (res ? ": status " + std::to_string(res->status) : ""));
  }
  json reply = json::parse(res->body);
  auto scores = reply.at("scores").get<std::vector<double>>();
  if (scores.size() != passages.size()) throw BazaarError("reranker response length mismatch");
  return scores;
}

}  // namespace bazaar

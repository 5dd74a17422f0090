#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bazaar/clients.hpp"
#include "bazaar/corpus.hpp"
#include "bazaar/gateway.hpp"
#include "bazaar/market.hpp"
#include "bazaar/query_tree.hpp"
#include "bazaar/retrieval.hpp"
#include "bazaar/selection.hpp"

namespace bazaar {

struct ProviderConfig {
  std::string mode = "mock";  // mock | live
  std::string mock_script_path;
  LiveProviderConfig chat;
  HttpEmbedderConfig embedding;
  HttpRerankerConfig reranker;
};

struct SimConfig {
  Credits budget = 100;
  int max_depth = 3;
  int max_followups = 3;
  int node_cap = 40;
  int n_shortlist = 50;  // N, post-dedup cut
  int m_shortlist = 3;   // M, decision shortlist
  bool inspection = true;
  Strategy strategy = Strategy::Debate;
  RetrievalConfig retrieval;
  PricingConfig pricing;
  ProviderConfig provider;
  std::uint64_t seed = 0;

  json to_json() const;
  static SimConfig from_json(const json& j);
};

struct Event {
  int round = 0;
  std::string type;
  json payload;
};

// Append-only trace of one simulation; replayable and byte-stable.
// wall_time_ms is informational and never serialized.
struct RunRecord {
  json config;
  std::string query_id;
  std::vector<Event> events;
  std::string final_answer;
  Credits total_spent = 0;
  double wall_time_ms = 0.0;

  std::string to_jsonl() const;
  static RunRecord from_jsonl(const std::string& text);
  void save(const std::string& path) const;
};

RunRecord run_simulation(const QuerySpec& query, const Corpus& corpus, const SimConfig& config,
                         ChatProvider& gateway, EmbeddingClient& embedder, RerankClient& reranker,
                         const EmbeddingIndex* index = nullptr);

}  // namespace bazaar

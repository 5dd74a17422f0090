#pragma once

#include <map>
#include <string>
#include <vector>

#include "bazaar/clients.hpp"
#include "bazaar/corpus.hpp"
#include "bazaar/gateway.hpp"
#include "bazaar/market.hpp"

namespace bazaar {

struct RetrievalConfig {
  double bm25_k1 = 1.5;
  double bm25_b = 0.75;
  int bm25_top = 100;
  double cosine_threshold = 0.3;
  int top_k = 5;
  bool hyde_enabled = false;
  int per_tender_quote_limit = 3;
};

struct EmbeddingIndex {
  std::map<std::string, Embedding> vectors;  // passage id -> unit vector
  int dimension = 0;
};

EmbeddingIndex build_embedding_index(const Corpus& corpus, EmbeddingClient& embedder);
EmbeddingIndex load_embedding_index(const std::string& path);
void save_embedding_index(const EmbeddingIndex& index, const std::string& path);

double cosine(const Embedding& a, const Embedding& b);

// Okapi BM25 over the vendor's inventory; pass an empty vendor id to score
// the whole corpus.
std::map<std::string, double> bm25_scores(const std::string& query, const Corpus& corpus,
                                          const RetrievalConfig& config,
                                          const std::string& vendor = "");

// HyDE: embed a hypothetical answer instead of the raw query. Pass-through
// when disabled.
std::string hyde_transform(const std::string& query, ChatProvider& gateway,
                           const RetrievalConfig& config, const std::string& model = "");

struct ScoredPassage {
  std::string passage_id;
  double score = 0.0;
};

// Two-stage retrieval: BM25 prefilter, cosine over the (HyDE-transformed)
// query embedding, threshold, then top-k. Ties break by passage id ascending;
// result is sorted descending by score.
std::vector<ScoredPassage> retrieve_candidates(const std::string& query, const std::string& vendor,
                                               const Corpus& corpus, const EmbeddingIndex& index,
                                               EmbeddingClient& embedder, ChatProvider& gateway,
                                               const RetrievalConfig& config,
                                               const std::string& model = "");

std::vector<std::string> issue_quotes(const Tender& tender,
                                      const std::vector<ScoredPassage>& candidates,
                                      const std::string& vendor, const Corpus& corpus,
                                      BulletinBoard& board, int per_tender_limit);

}  // namespace bazaar

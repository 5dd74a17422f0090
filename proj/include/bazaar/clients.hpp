#pragma once

#include <string>
#include <vector>

#include "bazaar/common.hpp"

namespace bazaar {

using Embedding = std::vector<double>;

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  // Returns one unit-normalized vector per input text, in order.
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
};

// Deterministic offline embedder: token hashes scattered into a fixed-dim
// vector, L2-normalized. Similar texts get similar vectors, identical texts
// identical ones; good enough for mock-driven runs.
class HashEmbedder : public EmbeddingClient {
 public:
  explicit HashEmbedder(int dimension = 64, std::uint64_t seed = 0)
      : dimension_(dimension), seed_(seed) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  int dimension_;
  std::uint64_t seed_;
};

struct HttpEmbedderConfig {
  std::string base_url;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "bge-large-en";
};

// OpenAI-compatible /v1/embeddings client.
class HttpEmbedder : public EmbeddingClient {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

 private:
  HttpEmbedderConfig config_;
};

class RerankClient {
 public:
  virtual ~RerankClient() = default;
  // One relevance score per passage for the given query.
  virtual std::vector<double> score(const std::string& query,
                                    const std::vector<std::string>& passages) = 0;
};

// Token-overlap (Jaccard) scorer; the deterministic stand-in for a
// cross-encoder reranker.
class OverlapReranker : public RerankClient {
 public:
  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& passages) override;
};

struct HttpRerankerConfig {
  std::string base_url;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "cross-encoder/ms-marco-MiniLM-L-12-v2";
};

// POST /rerank with {query, passages}; response {scores: [...]}.
class HttpReranker : public RerankClient {
 public:
  explicit HttpReranker(HttpRerankerConfig config) : config_(std::move(config)) {}
  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& passages) override;

 private:
  HttpRerankerConfig config_;
};

}  // namespace bazaar

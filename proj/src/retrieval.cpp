#include "bazaar/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace bazaar {

EmbeddingIndex build_embedding_index(const Corpus& corpus, EmbeddingClient& embedder) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const Passage& p : corpus.passages()) texts.push_back(p.content);
  auto vectors = embedder.embed(texts);
  EmbeddingIndex index;
  for (size_t i = 0; i < vectors.size(); ++i) {
    index.dimension = static_cast<int>(vectors[i].size());
    index.vectors[corpus.passages()[i].id] = std::move(vectors[i]);
  }
  return index;
}

EmbeddingIndex load_embedding_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open vectors file: " + path);
  EmbeddingIndex index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": malformed vector record");
    }
    Embedding v = record.at("vector").get<Embedding>();
    if (index.dimension != 0 && static_cast<int>(v.size()) != index.dimension) {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": inconsistent vector dimension");
    }
    index.dimension = static_cast<int>(v.size());
    index.vectors[record.at("id").get<std::string>()] = std::move(v);
  }
  return index;
}

void save_embedding_index(const EmbeddingIndex& index, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BazaarError("cannot write vectors file: " + path);
  for (const auto& [id, vector] : index.vectors) {
    out << json{{"id", id}, {"vector", vector}}.dump() << '\n';
  }
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw BazaarError("embedding dimension mismatch");
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot;  // vectors are unit-normalized
}

std::map<std::string, double> bm25_scores(const std::string& query, const Corpus& corpus,
                                          const RetrievalConfig& config,
                                          const std::string& vendor) {
  const TermStats& stats = corpus.term_stats();
  auto query_terms = tokenize(query);

  std::map<std::string, double> scores;
  for (const Passage& p : corpus.passages()) {
    if (!vendor.empty() && p.owner_vendor != vendor) continue;
    std::unordered_map<std::string, int> tf;
    for (const auto& token : tokenize(p.content)) ++tf[token];
    double dl = static_cast<double>(stats.doc_len.at(p.id));
    double score = 0.0;
    for (const auto& term : query_terms) {
      auto df_it = stats.doc_freq.find(term);
      if (df_it == stats.doc_freq.end()) continue;
      auto tf_it = tf.find(term);
      if (tf_it == tf.end()) continue;
      double df = static_cast<double>(df_it->second);
      double n = static_cast<double>(stats.n_docs);
      double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      double freq = static_cast<double>(tf_it->second);
      double denom = freq + config.bm25_k1 *
                                (1.0 - config.bm25_b +
                                 config.bm25_b * dl / std::max(stats.avg_doc_len, 1e-9));
      score += idf * freq * (config.bm25_k1 + 1.0) / denom;
    }
    scores[p.id] = score;
  }
  return scores;
}

std::string hyde_transform(const std::string& query, ChatProvider& gateway,
                           const RetrievalConfig& config, const std::string& model) {
  if (!config.hyde_enabled) return query;
  ChatRequest req = render("closed_book", json{{"question", query}}, model);
  return gateway.complete(req);
}

std::vector<ScoredPassage> retrieve_candidates(const std::string& query, const std::string& vendor,
                                               const Corpus& corpus, const EmbeddingIndex& index,
                                               EmbeddingClient& embedder, ChatProvider& gateway,
                                               const RetrievalConfig& config,
                                               const std::string& model) {
  auto inventory = corpus.vendor_assignment().find(vendor);
  if (inventory == corpus.vendor_assignment().end() || inventory->second.empty()) return {};
  if (config.top_k <= 0) return {};

  // Stage 1: BM25 prefilter over the vendor's inventory.
  auto scores = bm25_scores(query, corpus, config, vendor);
  std::vector<ScoredPassage> stage1;
  stage1.reserve(scores.size());
  for (const auto& [id, score] : scores) stage1.push_back({id, score});
  std::sort(stage1.begin(), stage1.end(), [](const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
  });
  if (static_cast<int>(stage1.size()) > config.bm25_top) stage1.resize(config.bm25_top);

  // Stage 2: cosine between the (HyDE-transformed) query embedding and the
  // passage vectors, thresholded, top-k.
  std::string embed_text = hyde_transform(query, gateway, config, model);
  Embedding query_vec = embedder.embed({embed_text}).at(0);

  std::vector<ScoredPassage> kept;
  for (const ScoredPassage& sp : stage1) {
    auto it = index.vectors.find(sp.passage_id);
    if (it == index.vectors.end()) {
      throw BazaarError("embedding index missing passage: " + sp.passage_id);
    }
    double sim = cosine(query_vec, it->second);
    if (sim >= config.cosine_threshold) kept.push_back({sp.passage_id, sim});
  }
  std::sort(kept.begin(), kept.end(), [](const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
  });
  if (static_cast<int>(kept.size()) > config.top_k) kept.resize(config.top_k);
  return kept;
}

std::vector<std::string> issue_quotes(const Tender& tender,
                                      const std::vector<ScoredPassage>& candidates,
                                      const std::string& vendor, const Corpus& corpus,
                                      BulletinBoard& board, int per_tender_limit) {
  std::vector<std::string> issued;
  for (const ScoredPassage& candidate : candidates) {
    if (static_cast<int>(issued.size()) >= per_tender_limit) break;
    const Passage& passage = corpus.at(candidate.passage_id);
    Quote quote;
    quote.tender_id = tender.id;
    quote.vendor = vendor;
    quote.passage = passage;
    quote.price = passage.price;
    quote.relevance_score = candidate.score;
    if (board.submit_quote(quote, per_tender_limit)) issued.push_back(quote.id);
  }
  return issued;
}

}  // namespace bazaar

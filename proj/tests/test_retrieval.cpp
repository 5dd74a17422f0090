#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "bazaar/retrieval.hpp"
#include "doctest.h"

using namespace bazaar;

namespace {

Corpus tiny_corpus() {
  std::istringstream in(
      R"({"id": "a", "content": "sparse attention pruning attention heads", "vendor": "v1"}
{"id": "b", "content": "dense retrieval hard negatives", "vendor": "v1"}
{"id": "c", "content": "sparse coding and dictionaries", "vendor": "v2"}
)");
  return parse_corpus(in, CorpusConfig{}, "inline");
}

// Independent Okapi BM25 recomputation, straight from the formula.
double bm25_oracle(const std::string& query, const Corpus& corpus, const std::string& doc_id,
                   double k1, double b) {
  const TermStats& stats = corpus.term_stats();
  double score = 0.0;
  for (const std::string& term : tokenize(query)) {
    auto df_it = stats.doc_freq.find(term);
    if (df_it == stats.doc_freq.end()) continue;
    double idf = std::log((stats.n_docs - df_it->second + 0.5) / (df_it->second + 0.5) + 1.0);
    auto tokens = tokenize(corpus.at(doc_id).content);
    double tf = std::count(tokens.begin(), tokens.end(), term);
    double dl = stats.doc_len.at(doc_id);
    score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / stats.avg_doc_len));
  }
  return score;
}

// Deterministic pseudo-random unit vectors, keyed only by the text.
class ScatterEmbedder : public EmbeddingClient {
 public:
  explicit ScatterEmbedder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override {
    std::vector<Embedding> out;
    for (const std::string& text : texts) {
      std::mt19937_64 rng(mix_seed(seed_, std::hash<std::string>{}(text)));
      std::normal_distribution<double> gauss;
      Embedding v(dim_);
      double norm = 0.0;
      for (double& x : v) {
        x = gauss(rng);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  int dim_;
  std::uint64_t seed_;
};

}  // namespace

TEST_CASE("bm25 matches an independent recomputation") {
  Corpus corpus = tiny_corpus();
  RetrievalConfig cfg;
  auto scores = bm25_scores("sparse attention heads", corpus, cfg);
  for (const std::string id : {"a", "b", "c"}) {
    CHECK(scores.at(id) ==
          doctest::Approx(bm25_oracle("sparse attention heads", corpus, id, cfg.bm25_k1,
                                      cfg.bm25_b)));
  }
  CHECK(scores.at("a") > scores.at("c"));
  CHECK(scores.at("b") == 0.0);

  SUBCASE("vendor scoping restricts the inventory") {
    auto vendor_scores = bm25_scores("sparse attention heads", corpus, cfg, "v2");
    CHECK(vendor_scores.size() == 1);
    CHECK(vendor_scores.count("c") == 1);
  }
}

TEST_CASE("cosine similarity basics") {
  CHECK(cosine({1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine({1, 0}, {-1, 0}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine({1, 0}, {1, 0, 0}), BazaarError);
}

TEST_CASE("embedding index build and persistence") {
  Corpus corpus = tiny_corpus();
  ScatterEmbedder embedder(16, 7);
  EmbeddingIndex index = build_embedding_index(corpus, embedder);
  CHECK(index.vectors.size() == 3);
  CHECK(index.dimension == 16);
  for (const auto& [id, v] : index.vectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    CHECK(norm == doctest::Approx(1.0));
  }
  std::string tmp = "index_tmp.jsonl";
  save_embedding_index(index, tmp);
  EmbeddingIndex again = load_embedding_index(tmp);
  CHECK(again.dimension == 16);
  CHECK(again.vectors.at("a") == index.vectors.at("a"));
  std::remove(tmp.c_str());
}

TEST_CASE("hyde transform is pass-through when disabled, generative when enabled") {
  RetrievalConfig cfg;
  FnProvider provider([](const ChatRequest& req) {
    CHECK(req.template_id == "closed_book");
    return "A hypothetical answer about sparse attention.";
  });
  CHECK(hyde_transform("what is sparse attention", provider, cfg) == "what is sparse attention");
  CHECK(provider.call_count() == 0);

  cfg.hyde_enabled = true;
  CHECK(hyde_transform("what is sparse attention", provider, cfg) ==
        "A hypothetical answer about sparse attention.");
  CHECK(provider.call_count() == 1);
}

TEST_CASE("two-stage retrieval equals the brute-force oracle on random corpora") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta", "epsilon",
                                          "zeta",  "eta",   "theta", "iota",  "kappa",
                                          "lambda", "mu",   "nu",    "xi",    "omicron"};
  FnProvider no_llm([](const ChatRequest&) -> std::string {
    throw BazaarError("retrieval must not call the LLM when HyDE is off");
  });

  for (int corpus_round = 0; corpus_round < 10; ++corpus_round) {
    int n = std::uniform_int_distribution<int>(5, 60)(rng);
    std::vector<Passage> passages;
    for (int i = 0; i < n; ++i) {
      Passage p;
      p.id = "p" + std::to_string(100 + i);
      int len = std::uniform_int_distribution<int>(3, 12)(rng);
      for (int t = 0; t < len; ++t) {
        p.content += vocab[std::uniform_int_distribution<size_t>(0, vocab.size() - 1)(rng)] + " ";
      }
      p.price = 5;
      p.owner_vendor = "v" + std::to_string(i % 3);
      passages.push_back(std::move(p));
    }
    Corpus corpus(std::move(passages));
    ScatterEmbedder embedder(24, corpus_round);
    EmbeddingIndex index = build_embedding_index(corpus, embedder);

    for (int setting = 0; setting < 5; ++setting) {
      RetrievalConfig cfg;
      cfg.bm25_top = std::uniform_int_distribution<int>(1, n)(rng);
      cfg.top_k = std::uniform_int_distribution<int>(0, 8)(rng);
      cfg.cosine_threshold = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      std::string query;
      for (int t = 0; t < 4; ++t) {
        query += vocab[std::uniform_int_distribution<size_t>(0, vocab.size() - 1)(rng)] + " ";
      }
      std::string vendor = "v" + std::to_string(setting % 3);

      // Brute-force oracle: BM25 stage, then thresholded cosine stage.
      auto scores = bm25_scores(query, corpus, cfg, vendor);
      std::vector<std::pair<double, std::string>> stage1(scores.size());
      std::transform(scores.begin(), scores.end(), stage1.begin(), [](const auto& kv) {
        return std::make_pair(kv.second, kv.first);
      });
      std::sort(stage1.begin(), stage1.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      if (static_cast<int>(stage1.size()) > cfg.bm25_top) stage1.resize(cfg.bm25_top);
      Embedding qv = embedder.embed({query})[0];
      std::vector<std::pair<double, std::string>> stage2;
      for (const auto& [_, id] : stage1) {
        double sim = cosine(qv, index.vectors.at(id));
        if (sim >= cfg.cosine_threshold) stage2.emplace_back(sim, id);
      }
      std::sort(stage2.begin(), stage2.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      if (cfg.top_k >= 0 && static_cast<int>(stage2.size()) > cfg.top_k) stage2.resize(cfg.top_k);

      auto got = retrieve_candidates(query, vendor, corpus, index, embedder, no_llm, cfg);
      REQUIRE(got.size() == stage2.size());
      for (size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].passage_id == stage2[i].second);
        CHECK(got[i].score == doctest::Approx(stage2[i].first));
      }
    }
  }
}

TEST_CASE("retrieval edge cases") {
  Corpus corpus = tiny_corpus();
  ScatterEmbedder embedder(16, 1);
  EmbeddingIndex index = build_embedding_index(corpus, embedder);
  FnProvider no_llm([](const ChatRequest&) { return std::string("unused"); });
  RetrievalConfig cfg;

  SUBCASE("top_k zero yields nothing") {
    cfg.top_k = 0;
    CHECK(retrieve_candidates("sparse", "v1", corpus, index, embedder, no_llm, cfg).empty());
  }
  SUBCASE("unknown vendor has an empty inventory") {
    CHECK(retrieve_candidates("sparse", "v9", corpus, index, embedder, no_llm, cfg).empty());
  }
  SUBCASE("index missing a passage is an error") {
    EmbeddingIndex partial = index;
    partial.vectors.erase("a");
    cfg.cosine_threshold = -1.0;
    CHECK_THROWS_AS(retrieve_candidates("sparse attention", "v1", corpus, partial, embedder,
                                        no_llm, cfg),
                    BazaarError);
  }
}

TEST_CASE("issue_quotes respects the per-tender limit and copies prices") {
  Corpus corpus = tiny_corpus();
  Ledger ledger;
  ledger.open_account("buyer", 100);
  BulletinBoard board;
  std::string tid = board.post_tender(ledger, "buyer", "sparse?", 100, 1);

  std::vector<ScoredPassage> candidates{{"a", 0.9}, {"b", 0.5}, {"c", 0.2}};
  auto issued = issue_quotes(board.tender(tid), candidates, "v1", corpus, board, 2);
  CHECK(issued.size() == 2);
  auto quotes = board.quotes_for(tid);
  REQUIRE(quotes.size() == 2);
  CHECK(quotes[0].passage.id == "a");
  CHECK(quotes[0].price == corpus.at("a").price);
  CHECK(quotes[0].relevance_score == doctest::Approx(0.9));
  CHECK(quotes[0].vendor == "v1");
}

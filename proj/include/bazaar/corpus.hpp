#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bazaar/common.hpp"

namespace bazaar {

struct PricingConfig {
  double scale = 0.01;
  Credits min_price = 1;
  Credits max_price = 100;
};

struct CorpusConfig {
  PricingConfig pricing;
  std::string default_vendor = "vendor_0";
};

// The unit information good: a text excerpt with its paper/section metadata
// and a listed price in credits.
struct Passage {
  std::string id;
  std::string paper_title;
  std::string section_title;
  std::string content;
  Credits price = 0;
  std::string owner_vendor;
  double first_author_mean_citations = 0.0;
};

struct QuerySpec {
  std::string id;
  std::string question;
  std::string gold_passage_id;
  Credits budget = 100;
};

// Per-term document frequencies and per-document lengths, as needed by BM25.
struct TermStats {
  std::unordered_map<std::string, int> doc_freq;
  std::unordered_map<std::string, int> doc_len;
  double avg_doc_len = 0.0;
  int n_docs = 0;
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Passage> passages);

  const std::vector<Passage>& passages() const { return passages_; }
  const TermStats& term_stats() const { return stats_; }
  const std::map<std::string, std::vector<std::string>>& vendor_assignment() const {
    return vendors_;
  }

  const Passage* find(const std::string& passage_id) const;
  const Passage& at(const std::string& passage_id) const;
  size_t size() const { return passages_.size(); }

 private:
  std::vector<Passage> passages_;
  std::unordered_map<std::string, size_t> by_id_;
  std::map<std::string, std::vector<std::string>> vendors_;
  TermStats stats_;
};

Credits price_passage(double mean_citations, const PricingConfig& config);

TermStats build_term_stats(const std::vector<Passage>& passages);

// Line-delimited JSON, one passage per line. Explicit "price" overrides the
// citation heuristic.
Corpus load_corpus(const std::string& path, const CorpusConfig& config = {});
Corpus parse_corpus(std::istream& in, const CorpusConfig& config, const std::string& origin);
void save_corpus(const Corpus& corpus, const std::string& path);

std::vector<QuerySpec> load_queries(const std::string& path, const Corpus& corpus);
std::vector<QuerySpec> parse_queries(std::istream& in, const Corpus& corpus,
                                     const std::string& origin);

}  // namespace bazaar

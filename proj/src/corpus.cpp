#include "bazaar/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace bazaar {

Corpus::Corpus(std::vector<Passage> passages) : passages_(std::move(passages)) {
  for (size_t i = 0; i < passages_.size(); ++i) {
    const Passage& p = passages_[i];
    if (!by_id_.emplace(p.id, i).second) {
      throw BazaarError("duplicate passage id: " + p.id);
    }
    vendors_[p.owner_vendor].push_back(p.id);
  }
  for (auto& [vendor, ids] : vendors_) std::sort(ids.begin(), ids.end());
  stats_ = build_term_stats(passages_);
}

const Passage* Corpus::find(const std::string& passage_id) const {
  auto it = by_id_.find(passage_id);
  return it == by_id_.end() ? nullptr : &passages_[it->second];
}

const Passage& Corpus::at(const std::string& passage_id) const {
  const Passage* p = find(passage_id);
  if (!p) throw BazaarError("unknown passage id: " + passage_id);
  return *p;
}

Credits price_passage(double mean_citations, const PricingConfig& config) {
  Credits raw = static_cast<Credits>(std::llround(config.scale * mean_citations));
  return std::clamp(raw, config.min_price, config.max_price);
}

TermStats build_term_stats(const std::vector<Passage>& passages) {
  TermStats stats;
  stats.n_docs = static_cast<int>(passages.size());
  double total_len = 0.0;
  for (const Passage& p : passages) {
    auto tokens = tokenize(p.content);
    stats.doc_len[p.id] = static_cast<int>(tokens.size());
    total_len += static_cast<double>(tokens.size());
    std::set<std::string> seen(tokens.begin(), tokens.end());
    for (const auto& term : seen) ++stats.doc_freq[term];
  }
  stats.avg_doc_len = stats.n_docs > 0 ? total_len / stats.n_docs : 0.0;
  return stats;
}

namespace {

json parse_record(const std::string& line, const std::string& origin, int line_no) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw BazaarError(origin + ":" + std::to_string(line_no) + ": malformed record");
  }
  return record;
}

std::string require_string(const json& record, const char* field, const std::string& origin,
                           int line_no) {
  if (!record.contains(field) || !record[field].is_string()) {
    throw BazaarError(origin + ":" + std::to_string(line_no) + ": missing field '" + field + "'");
  }
  return record[field].get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, const CorpusConfig& config, const std::string& origin) {
  std::vector<Passage> passages;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = parse_record(line, origin, line_no);
    Passage p;
    p.id = require_string(record, "id", origin, line_no);
    p.paper_title = record.value("paper_title", "");
    p.section_title = record.value("section_title", "");
    p.content = require_string(record, "content", origin, line_no);
    if (p.content.empty()) {
      throw BazaarError(origin + ":" + std::to_string(line_no) + ": empty content for passage '" +
                        p.id + "'");
    }
    p.first_author_mean_citations = record.value("mean_citations", 0.0);
    if (p.first_author_mean_citations < 0.0) {
      throw BazaarError(origin + ":" + std::to_string(line_no) + ": negative mean_citations");
    }
    p.owner_vendor = record.value("vendor", config.default_vendor);
    if (record.contains("price")) {
      p.price = record["price"].get<Credits>();
      if (p.price < config.pricing.min_price) {
        throw BazaarError(origin + ":" + std::to_string(line_no) + ": price below minimum for '" +
                          p.id + "'");
      }
    } else {
      p.price = price_passage(p.first_author_mean_citations, config.pricing);
    }
    for (const Passage& seen : passages) {
      if (seen.id == p.id) {
        throw BazaarError(origin + ":" + std::to_string(line_no) + ": duplicate passage id: " +
                          p.id);
      }
    }
    passages.push_back(std::move(p));
  }
  if (passages.empty()) throw BazaarError(origin + ": empty corpus");
  return Corpus(std::move(passages));
}

Corpus load_corpus(const std::string& path, const CorpusConfig& config) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open passages file: " + path);
  return parse_corpus(in, config, path);
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BazaarError("cannot write passages file: " + path);
  for (const Passage& p : corpus.passages()) {
    json record{{"id", p.id},
                {"paper_title", p.paper_title},
                {"section_title", p.section_title},
                {"content", p.content},
                {"mean_citations", p.first_author_mean_citations},
                {"vendor", p.owner_vendor},
                {"price", p.price}};
    out << record.dump() << '\n';
  }
}

std::vector<QuerySpec> parse_queries(std::istream& in, const Corpus& corpus,
                                     const std::string& origin) {
  std::vector<QuerySpec> queries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = parse_record(line, origin, line_no);
    QuerySpec q;
    q.id = require_string(record, "id", origin, line_no);
    q.question = require_string(record, "question", origin, line_no);
    q.gold_passage_id = require_string(record, "gold_passage_id", origin, line_no);
    q.budget = record.value("budget", Credits{100});
    if (!corpus.find(q.gold_passage_id)) {
      throw BazaarError(origin + ":" + std::to_string(line_no) + ": query '" + q.id +
                        "' references unknown gold passage '" + q.gold_passage_id + "'");
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

std::vector<QuerySpec> load_queries(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open queries file: " + path);
  return parse_queries(in, corpus, path);
}

}  // namespace bazaar

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bazaar/clients.hpp"
#include "bazaar/gateway.hpp"
#include "bazaar/market.hpp"

namespace bazaar {

enum class Strategy { Debate, ChainOfThought, Direct };

const char* strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);

enum class ShortlistMode { Inspection, MetadataOnly };

struct ShortlistEntry {
  Quote quote;
  std::optional<double> rerank_score;  // absent in metadata-only mode
};

struct Shortlist {
  std::vector<ShortlistEntry> entries;
  ShortlistMode mode = ShortlistMode::Inspection;
};

// What the decision prompt sees for one entry: full content under
// inspection, titles only otherwise.
std::string option_text(const ShortlistEntry& entry, ShortlistMode mode);

struct PurchaseDecision {
  std::vector<Verdict> verdicts;  // one per shortlist entry
  Strategy strategy = Strategy::Debate;
  std::string raw_transcript;
  bool parse_failed = false;      // all-Pass fallback after a failed retry
  int demoted = 0;                // Buy verdicts demoted to fit the balance
};

// Dedup by byte-identical content (keep cheapest, tie-break smallest vendor
// id), sort descending by relevance score (tie-break quote id), keep top n.
std::vector<Quote> dedup_and_rank(std::vector<Quote> quotes, int n);

Shortlist rerank(const std::string& query, const std::vector<Quote>& quotes,
                 RerankClient& reranker, int m);

Shortlist build_metadata_shortlist(const std::vector<Quote>& quotes, int m);

PurchaseDecision decide_purchases(const std::string& question, const Shortlist& shortlist,
                                  Credits balance, Strategy strategy, ChatProvider& gateway,
                                  const std::string& model = "");

}  // namespace bazaar

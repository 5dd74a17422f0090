#include "bazaar/selection.hpp"

#include <algorithm>
#include <map>

namespace bazaar {

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::Debate: return "debate";
    case Strategy::ChainOfThought: return "cot";
    case Strategy::Direct: return "direct";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "debate") return Strategy::Debate;
  if (name == "cot" || name == "chain_of_thought") return Strategy::ChainOfThought;
  if (name == "direct") return Strategy::Direct;
  throw BazaarError("unknown strategy: " + name);
}

std::string option_text(const ShortlistEntry& entry, ShortlistMode mode) {
  if (mode == ShortlistMode::Inspection) return entry.quote.passage.content;
  return "Paper: " + entry.quote.passage.paper_title +
         " | Section: " + entry.quote.passage.section_title;
}

std::vector<Quote> dedup_and_rank(std::vector<Quote> quotes, int n) {
  // Among byte-identical contents keep the cheapest (tie: smallest vendor id).
  std::map<std::string, size_t> best_by_content;
  std::vector<Quote> kept;
  for (Quote& q : quotes) {
    auto [it, inserted] = best_by_content.emplace(q.passage.content, kept.size());
    if (inserted) {
      kept.push_back(std::move(q));
      continue;
    }
    Quote& held = kept[it->second];
    if (q.price < held.price || (q.price == held.price && q.vendor < held.vendor)) {
      held = std::move(q);
    }
  }
  std::sort(kept.begin(), kept.end(), [](const Quote& a, const Quote& b) {
    if (a.relevance_score != b.relevance_score) return a.relevance_score > b.relevance_score;
    return a.id < b.id;
  });
  if (n >= 0 && static_cast<int>(kept.size()) > n) kept.resize(n);
  return kept;
}

namespace {

Shortlist take_top_m(std::vector<ShortlistEntry> entries, int m, ShortlistMode mode,
                     bool by_rerank) {
  std::sort(entries.begin(), entries.end(),
            [by_rerank](const ShortlistEntry& a, const ShortlistEntry& b) {
              double sa = by_rerank ? *a.rerank_score : a.quote.relevance_score;
              double sb = by_rerank ? *b.rerank_score : b.quote.relevance_score;
              if (sa != sb) return sa > sb;
              return a.quote.id < b.quote.id;
            });
  if (m >= 0 && static_cast<int>(entries.size()) > m) entries.resize(m);
  return Shortlist{std::move(entries), mode};
}

}  // namespace

Shortlist rerank(const std::string& query, const std::vector<Quote>& quotes,
                 RerankClient& reranker, int m) {
  if (m <= 0 || quotes.empty()) return Shortlist{{}, ShortlistMode::Inspection};
  std::vector<std::string> texts;
  texts.reserve(quotes.size());
  for (const Quote& q : quotes) texts.push_back(q.passage.content);
  auto scores = reranker.score(query, texts);
  if (scores.size() != quotes.size()) throw BazaarError("reranker returned wrong score count");
  std::vector<ShortlistEntry> entries;
  entries.reserve(quotes.size());
  for (size_t i = 0; i < quotes.size(); ++i) entries.push_back({quotes[i], scores[i]});
  return take_top_m(std::move(entries), m, ShortlistMode::Inspection, true);
}

Shortlist build_metadata_shortlist(const std::vector<Quote>& quotes, int m) {
  std::vector<ShortlistEntry> entries;
  entries.reserve(quotes.size());
  for (const Quote& q : quotes) entries.push_back({q, std::nullopt});
  return take_top_m(std::move(entries), std::max(m, 0), ShortlistMode::MetadataOnly, false);
}

PurchaseDecision decide_purchases(const std::string& question, const Shortlist& shortlist,
                                  Credits balance, Strategy strategy, ChatProvider& gateway,
                                  const std::string& model) {
  if (shortlist.entries.empty()) throw BazaarError("decide_purchases on empty shortlist");

  json options = json::array();
  for (const ShortlistEntry& entry : shortlist.entries) {
    options.push_back({{"answer_block", option_text(entry, shortlist.mode)},
                       {"price", entry.quote.price}});
  }
  const char* template_id = strategy == Strategy::Debate     ? "quote_debate"
                            : strategy == Strategy::Direct   ? "quote_direct"
                                                             : "quote_cot";
  json slots{{"question", question}, {"options", options}, {"balance", balance}};
  ChatRequest request = render(template_id, slots, model);

  PurchaseDecision decision;
  decision.strategy = strategy;
  int n = static_cast<int>(shortlist.entries.size());

  decision.raw_transcript = gateway.complete(request);
  try {
    decision.verdicts = parse_verdict(decision.raw_transcript, n);
  } catch (const ParseError&) {
    // One structured re-ask before the all-Pass fallback.
    ChatRequest retry = request;
    retry.messages.push_back({Role::Assistant, decision.raw_transcript});
    retry.messages.push_back({Role::User, "Print the VERDICT block exactly as specified."});
    decision.raw_transcript = gateway.complete(retry);
    try {
      decision.verdicts = parse_verdict(decision.raw_transcript, n);
    } catch (const ParseError&) {
      decision.verdicts.assign(n, Verdict::Pass);
      decision.parse_failed = true;
    }
  }

  // Affordability: demote Buy verdicts from the lowest-ranked upward until
  // the total fits the balance.
  Credits total = 0;
  for (int i = 0; i < n; ++i) {
    if (decision.verdicts[i] == Verdict::Buy) total += shortlist.entries[i].quote.price;
  }
  for (int i = n - 1; i >= 0 && total > balance; --i) {
    if (decision.verdicts[i] == Verdict::Buy) {
      decision.verdicts[i] = Verdict::Pass;
      total -= shortlist.entries[i].quote.price;
      ++decision.demoted;
    }
  }
  return decision;
}

}  // namespace bazaar

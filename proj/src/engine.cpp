#include "bazaar/engine.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace bazaar {

json SimConfig::to_json() const {
  return json{{"budget", budget},
              {"max_depth", max_depth},
              {"max_followups", max_followups},
              {"node_cap", node_cap},
              {"n_shortlist", n_shortlist},
              {"m_shortlist", m_shortlist},
              {"inspection", inspection},
              {"strategy", strategy_name(strategy)},
              {"retrieval",
               {{"bm25_k1", retrieval.bm25_k1},
                {"bm25_b", retrieval.bm25_b},
                {"bm25_top", retrieval.bm25_top},
                {"cosine_threshold", retrieval.cosine_threshold},
                {"top_k", retrieval.top_k},
                {"hyde_enabled", retrieval.hyde_enabled},
                {"per_tender_quote_limit", retrieval.per_tender_quote_limit}}},
              {"pricing",
               {{"scale", pricing.scale},
                {"min_price", pricing.min_price},
                {"max_price", pricing.max_price}}},
              {"provider",
               {{"mode", provider.mode},
                {"mock_script", provider.mock_script_path},
                {"base_url", provider.chat.base_url},
                {"api_key_env", provider.chat.api_key_env},
                {"model", provider.chat.model},
                {"embedding_base_url", provider.embedding.base_url},
                {"embedding_model", provider.embedding.model},
                {"reranker_base_url", provider.reranker.base_url},
                {"reranker_model", provider.reranker.model}}},
              {"seed", seed}};
}

SimConfig SimConfig::from_json(const json& j) {
  SimConfig c;
  c.budget = j.value("budget", c.budget);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.max_followups = j.value("max_followups", c.max_followups);
  c.node_cap = j.value("node_cap", c.node_cap);
  c.n_shortlist = j.value("n_shortlist", c.n_shortlist);
  c.m_shortlist = j.value("m_shortlist", c.m_shortlist);
  c.inspection = j.value("inspection", c.inspection);
  if (j.contains("strategy")) c.strategy = strategy_from_name(j["strategy"].get<std::string>());
  if (j.contains("retrieval")) {
    const json& r = j["retrieval"];
    c.retrieval.bm25_k1 = r.value("bm25_k1", c.retrieval.bm25_k1);
    c.retrieval.bm25_b = r.value("bm25_b", c.retrieval.bm25_b);
    c.retrieval.bm25_top = r.value("bm25_top", c.retrieval.bm25_top);
    c.retrieval.cosine_threshold = r.value("cosine_threshold", c.retrieval.cosine_threshold);
    c.retrieval.top_k = r.value("top_k", c.retrieval.top_k);
    c.retrieval.hyde_enabled = r.value("hyde_enabled", c.retrieval.hyde_enabled);
    c.retrieval.per_tender_quote_limit =
        r.value("per_tender_quote_limit", c.retrieval.per_tender_quote_limit);
  }
  if (j.contains("pricing")) {
    const json& p = j["pricing"];
    c.pricing.scale = p.value("scale", c.pricing.scale);
    c.pricing.min_price = p.value("min_price", c.pricing.min_price);
    c.pricing.max_price = p.value("max_price", c.pricing.max_price);
  }
  if (j.contains("provider")) {
    const json& p = j["provider"];
    c.provider.mode = p.value("mode", c.provider.mode);
    c.provider.mock_script_path = p.value("mock_script", c.provider.mock_script_path);
    c.provider.chat.base_url = p.value("base_url", c.provider.chat.base_url);
    c.provider.chat.api_key_env = p.value("api_key_env", c.provider.chat.api_key_env);
    c.provider.chat.model = p.value("model", c.provider.chat.model);
    c.provider.embedding.base_url = p.value("embedding_base_url", c.provider.embedding.base_url);
    c.provider.embedding.model = p.value("embedding_model", c.provider.embedding.model);
    c.provider.reranker.base_url = p.value("reranker_base_url", c.provider.reranker.base_url);
    c.provider.reranker.model = p.value("reranker_model", c.provider.reranker.model);
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

std::string RunRecord::to_jsonl() const {
  std::ostringstream out;
  out << json{{"schema", "bazaar.run/1"}, {"query_id", query_id}, {"config", config}}.dump()
      << '\n';
  for (const Event& e : events) {
    out << json{{"round", e.round}, {"type", e.type}, {"payload", e.payload}}.dump() << '\n';
  }
  out << json{{"final_answer", final_answer}, {"total_spent", total_spent}}.dump() << '\n';
  return out.str();
}

RunRecord RunRecord::from_jsonl(const std::string& text) {
  RunRecord record;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    if (!have_header) {
      record.config = j.at("config");
      record.query_id = j.value("query_id", "");
      have_header = true;
    } else if (j.contains("final_answer")) {
      record.final_answer = j["final_answer"].get<std::string>();
      record.total_spent = j.value("total_spent", Credits{0});
    } else {
      record.events.push_back(
          Event{j.at("round").get<int>(), j.at("type").get<std::string>(), j.at("payload")});
    }
  }
  if (!have_header) throw BazaarError("empty run record");
  return record;
}

void RunRecord::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BazaarError("cannot write run record: " + path);
  out << to_jsonl();
}

namespace {

// Forwards to the real provider while journaling every prompt/response pair.
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(ChatProvider& inner, std::vector<Event>& events, const int& round)
      : inner_(inner), events_(events), round_(round) {}

  std::string complete(const ChatRequest& request) override {
    json messages = json::array();
    for (const Message& m : request.messages) {
      messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    events_.push_back(Event{round_, "prompt",
                            json{{"template", request.template_id}, {"messages", messages}}});
    std::string reply = inner_.complete(request);
    events_.push_back(
        Event{round_, "response", json{{"template", request.template_id}, {"text", reply}}});
    return reply;
  }

 private:
  ChatProvider& inner_;
  std::vector<Event>& events_;
  const int& round_;
};

}  // namespace

RunRecord run_simulation(const QuerySpec& query, const Corpus& corpus, const SimConfig& config,
                         ChatProvider& gateway, EmbeddingClient& embedder, RerankClient& reranker,
                         const EmbeddingIndex* index) {
  auto start = std::chrono::steady_clock::now();

  RunRecord record;
  record.config = config.to_json();
  record.query_id = query.id;
  int round = 0;
  RecordingProvider recorded(gateway, record.events, round);

  EmbeddingIndex local_index;
  if (!index) {
    local_index = build_embedding_index(corpus, embedder);
    index = &local_index;
  }

  const std::string buyer = "buyer";
  Ledger ledger;
  ledger.open_account(buyer, config.budget);
  std::vector<std::string> vendors;
  for (const auto& [vendor, ids] : corpus.vendor_assignment()) {
    vendors.push_back(vendor);
    ledger.open_account(vendor, 0);
  }
  std::sort(vendors.begin(), vendors.end());

  BulletinBoard board;
  // Market-regulator rule: passages whose quotes this buyer rejected (or
  // already bought) are not re-offered within the run, so forgotten content
  // cannot resurface through a later tender.
  std::set<std::string> barred_passages;

  const std::string& model = config.provider.chat.model;
  bool include_content = config.inspection;

  auto process_node = [&](const std::string& question) -> NodeOutcome {
    ++round;
    Credits balance = ledger.balance(buyer);
    std::string tender_id = board.post_tender(ledger, buyer, question, balance, round);
    record.events.push_back(Event{round, "tender_posted",
                                  json{{"tender_id", tender_id},
                                       {"buyer", buyer},
                                       {"query", question},
                                       {"max_budget", balance}}});

    // Vendors respond in sorted-id order; candidates already sorted by score.
    for (const std::string& vendor : vendors) {
      auto candidates = retrieve_candidates(question, vendor, corpus, *index, embedder, recorded,
                                            config.retrieval, model);
      std::erase_if(candidates, [&](const ScoredPassage& sp) {
        return barred_passages.count(sp.passage_id) > 0;
      });
      auto issued = issue_quotes(board.tender(tender_id), candidates, vendor, corpus, board,
                                 config.retrieval.per_tender_quote_limit);
      for (const std::string& quote_id : issued) {
        for (const Quote& q : board.quotes_for(tender_id)) {
          if (q.id != quote_id) continue;
          record.events.push_back(Event{round, "quote_submitted",
                                        json{{"quote_id", q.id},
                                             {"tender_id", tender_id},
                                             {"vendor", q.vendor},
                                             {"passage_id", q.passage.id},
                                             {"price", q.price},
                                             {"relevance_score", q.relevance_score},
                                             {"content", q.passage.content}}});
        }
      }
    }

    std::vector<Quote> quotes = board.quotes_for(tender_id);
    std::vector<Quote> ranked = dedup_and_rank(quotes, config.n_shortlist);
    Shortlist shortlist =
        config.inspection ? rerank(question, ranked, reranker, config.m_shortlist)
                          : build_metadata_shortlist(ranked, config.m_shortlist);

    NodeOutcome outcome;
    std::vector<Passage> purchased;
    std::set<std::string> purchased_quote_ids;
    if (!shortlist.entries.empty()) {
      PurchaseDecision decision = decide_purchases(question, shortlist, balance, config.strategy,
                                                   recorded, model);
      json verdicts = json::array();
      for (Verdict v : decision.verdicts) verdicts.push_back(v == Verdict::Buy ? "Buy" : "Pass");
      record.events.push_back(Event{round, "decision",
                                    json{{"tender_id", tender_id},
                                         {"strategy", strategy_name(decision.strategy)},
                                         {"verdicts", verdicts},
                                         {"parse_failed", decision.parse_failed},
                                         {"demoted", decision.demoted}}});

      for (size_t i = 0; i < shortlist.entries.size(); ++i) {
        const Quote& q = shortlist.entries[i].quote;
        if (decision.verdicts[i] != Verdict::Buy) continue;
        Transaction tx = ledger.settle_purchase(q, buyer, round);
        record.events.push_back(Event{round, "purchase_settled",
                                      json{{"quote_id", q.id},
                                           {"vendor", q.vendor},
                                           {"passage_id", q.passage.id},
                                           {"price", q.price},
                                           {"buyer_balance", ledger.balance(buyer)}}});
        purchased.push_back(q.passage);
        purchased_quote_ids.insert(q.id);
        outcome.purchased_quote_ids.push_back(q.id);
        barred_passages.insert(q.passage.id);
      }
    }

    // Every unpurchased quote is forgotten, shortlisted or not.
    for (const Quote& q : quotes) {
      if (purchased_quote_ids.count(q.id)) continue;
      board.reject_quote(q.id, round);
      barred_passages.insert(q.passage.id);
      record.events.push_back(Event{round, "quote_rejected",
                                    json{{"quote_id", q.id},
                                         {"passage_id", q.passage.id},
                                         {"price", q.price}}});
    }
    board.close_tender(tender_id);

    SynthesisResult synthesis =
        synthesize_answer(question, purchased, recorded, include_content, model);
    outcome.preliminary_answer = synthesis.answer;
    outcome.flagged = synthesis.flagged;
    record.events.push_back(Event{round, "answer_synthesized",
                                  json{{"question", question},
                                       {"answer", synthesis.answer},
                                       {"flagged", synthesis.flagged},
                                       {"purchased_quotes", outcome.purchased_quote_ids}}});
    return outcome;
  };

  // Root round, then recursive expansion.
  QueryTree tree(query.question, config.max_depth);
  NodeOutcome root_outcome = process_node(query.question);
  tree.root().preliminary_answer = root_outcome.preliminary_answer;
  tree.root().purchased_quotes = root_outcome.purchased_quote_ids;
  tree.root().answer_flagged = root_outcome.flagged;
  record.events.push_back(Event{round, "node_created",
                                json{{"node_id", 0}, {"depth", 0}, {"question", query.question}}});

  expand_node(0, tree, recorded,
              [&](const std::string& question) {
                NodeOutcome outcome = process_node(question);
                record.events.push_back(
                    Event{round, "node_created",
                          json{{"node_id", tree.size() - 1}, {"question", question}}});
                return outcome;
              },
              config.max_followups, config.node_cap,
              [&]() { return ledger.balance(buyer); }, model);

  record.events.push_back(Event{round, "stop",
                                json{{"budget_exhausted", ledger.balance(buyer) <= 0},
                                     {"node_cap_reached", tree.size() >= config.node_cap},
                                     {"node_count", tree.size()}}});

  // Bottom-up refinement, post-order.
  ++round;
  std::string final_answer = refine_tree(tree, recorded, model, [&](const QueryNode& node) {
    record.events.push_back(Event{round, "refinement",
                                  json{{"node_id", node.id},
                                       {"depth", node.depth},
                                       {"refined_answer", node.refined_answer.value_or("")}}});
  });

  record.final_answer = final_answer;
  record.total_spent = config.budget - ledger.balance(buyer);
  record.events.push_back(Event{round, "final",
                                json{{"answer", final_answer},
                                     {"total_spent", record.total_spent},
                                     {"balances", ledger.balances()},
                                     {"transactions", ledger.transactions().size()}}});
  record.wall_time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return record;
}

}  // namespace bazaar

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bazaar/corpus.hpp"

namespace bazaar {

struct Tender {
  std::string id;
  std::string buyer;
  std::string query;
  Credits max_budget = 0;
  int round_posted = 0;
  bool open = true;
};

struct Quote {
  std::string id;
  std::string tender_id;
  std::string vendor;
  Passage passage;          // full content rides along with the quote
  Credits price = 0;        // equals passage.price at issuance
  double relevance_score = 0.0;
};

struct Transaction {
  std::string buyer;
  std::string vendor;
  std::string quote_id;
  Credits price = 0;
  int round = 0;
};

// Content-free trace of a rejected quote; all that survives forgetting.
struct RejectionRecord {
  std::string quote_id;
  std::string passage_id;
  Credits price = 0;
  int round = 0;
};

class Ledger {
 public:
  void open_account(const std::string& agent, Credits initial);
  Credits balance(const std::string& agent) const;
  const std::map<std::string, Credits>& balances() const { return balances_; }
  const std::vector<Transaction>& transactions() const { return transactions_; }
  Credits total_credits() const;

  // Settles at the instant of acceptance; throws without mutating on
  // insufficient balance.
  Transaction settle_purchase(const Quote& quote, const std::string& buyer, int round);

 private:
  std::map<std::string, Credits> balances_;
  std::vector<Transaction> transactions_;
};

class BulletinBoard {
 public:
  std::string post_tender(Ledger& ledger, const std::string& buyer, const std::string& query,
                          Credits max_budget, int round);

  // Assigns quote.id when empty. Returns false (board unchanged) when the
  // vendor is over its per-tender quota; throws on unknown or closed tenders.
  bool submit_quote(Quote& quote, int per_tender_limit);

  // Erases passage content from the stored quote, leaving a content-free
  // rejection record. Idempotent.
  void reject_quote(const std::string& quote_id, int round);

  void close_tender(const std::string& tender_id);

  const Tender& tender(const std::string& tender_id) const;
  const std::vector<Quote>& quotes_for(const std::string& tender_id) const;
  std::vector<const Tender*> open_tenders() const;
  const std::vector<RejectionRecord>& rejections() const { return rejections_; }
  bool is_rejected(const std::string& quote_id) const { return rejected_.count(quote_id) > 0; }

 private:
  std::map<std::string, Tender> tenders_;
  std::map<std::string, std::vector<Quote>> quotes_by_tender_;
  std::map<std::string, std::string> quote_to_tender_;
  std::set<std::string> rejected_;
  std::vector<RejectionRecord> rejections_;
  int next_tender_ = 0;
  int next_quote_ = 0;
};

}  // namespace bazaar

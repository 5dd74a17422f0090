#include "bazaar/market.hpp"

#include <algorithm>

namespace bazaar {

void Ledger::open_account(const std::string& agent, Credits initial) {
  if (initial < 0) throw BazaarError("negative initial balance for " + agent);
  balances_[agent] = initial;
}

Credits Ledger::balance(const std::string& agent) const {
  auto it = balances_.find(agent);
  return it == balances_.end() ? 0 : it->second;
}

Credits Ledger::total_credits() const {
  Credits total = 0;
  for (const auto& [agent, amount] : balances_) total += amount;
  return total;
}

Transaction Ledger::settle_purchase(const Quote& quote, const std::string& buyer, int round) {
  Credits buyer_balance = balance(buyer);
  if (quote.price > buyer_balance) {
    throw BazaarError("insufficient balance: buyer " + buyer + " has " +
                      std::to_string(buyer_balance) + ", quote " + quote.id + " costs " +
                      std::to_string(quote.price));
  }
  balances_[buyer] = buyer_balance - quote.price;
  balances_[quote.vendor] += quote.price;
  Transaction tx{buyer, quote.vendor, quote.id, quote.price, round};
  transactions_.push_back(tx);
  return tx;
}

std::string BulletinBoard::post_tender(Ledger& ledger, const std::string& buyer,
                                       const std::string& query, Credits max_budget, int round) {
  if (max_budget > ledger.balance(buyer)) {
    throw BazaarError("tender budget " + std::to_string(max_budget) + " exceeds balance of " +
                      buyer);
  }
  std::string id = "t" + std::to_string(next_tender_++);
  tenders_[id] = Tender{id, buyer, query, max_budget, round, true};
  quotes_by_tender_[id];
  return id;
}

bool BulletinBoard::submit_quote(Quote& quote, int per_tender_limit) {
  auto it = tenders_.find(quote.tender_id);
  if (it == tenders_.end()) throw BazaarError("unknown tender id: " + quote.tender_id);
  if (!it->second.open) throw BazaarError("tender is closed: " + quote.tender_id);
  auto& quotes = quotes_by_tender_[quote.tender_id];
  int vendor_count = static_cast<int>(std::count_if(
      quotes.begin(), quotes.end(), [&](const Quote& q) { return q.vendor == quote.vendor; }));
  if (vendor_count >= per_tender_limit) return false;
  if (quote.id.empty()) quote.id = "q" + std::to_string(next_quote_++);
  quote_to_tender_[quote.id] = quote.tender_id;
  quotes.push_back(quote);
  return true;
}

void BulletinBoard::reject_quote(const std::string& quote_id, int round) {
  auto it = quote_to_tender_.find(quote_id);
  if (it == quote_to_tender_.end()) throw BazaarError("unknown quote id: " + quote_id);
  if (!rejected_.insert(quote_id).second) return;  // idempotent
  auto& quotes = quotes_by_tender_[it->second];
  for (Quote& q : quotes) {
    if (q.id != quote_id) continue;
    rejections_.push_back(RejectionRecord{q.id, q.passage.id, q.price, round});
    q.passage.content.clear();
    q.passage.paper_title.clear();
    q.passage.section_title.clear();
    break;
  }
}

void BulletinBoard::close_tender(const std::string& tender_id) {
  auto it = tenders_.find(tender_id);
  if (it == tenders_.end()) throw BazaarError("unknown tender id: " + tender_id);
  it->second.open = false;
}

const Tender& BulletinBoard::tender(const std::string& tender_id) const {
  auto it = tenders_.find(tender_id);
  if (it == tenders_.end()) throw BazaarError("unknown tender id: " + tender_id);
  return it->second;
}

const std::vector<Quote>& BulletinBoard::quotes_for(const std::string& tender_id) const {
  auto it = quotes_by_tender_.find(tender_id);
  if (it == quotes_by_tender_.end()) throw BazaarError("unknown tender id: " + tender_id);
  return it->second;
}

std::vector<const Tender*> BulletinBoard::open_tenders() const {
  std::vector<const Tender*> open;
  for (const auto& [id, tender] : tenders_) {
    if (tender.open) open.push_back(&tender);
  }
  return open;
}

}  // namespace bazaar

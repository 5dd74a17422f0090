#include "bazaar/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

namespace bazaar {

double expected_score(double rating, double opponent_rating) {
  return 1.0 / (1.0 + std::pow(10.0, (opponent_rating - rating) / 400.0));
}

double update_rating(double rating, double k, double score, double expected) {
  return rating + k * (score - expected);
}

EloReport elo_tournament(const std::vector<MatchResult>& results, int n_orderings,
                         std::uint64_t seed, double k) {
  if (results.empty()) throw BazaarError("elo_tournament needs at least one match result");
  if (n_orderings < 1) throw BazaarError("n_orderings must be positive");

  std::set<std::string> contestants;
  for (const MatchResult& r : results) {
    contestants.insert(r.contestant_a);
    contestants.insert(r.contestant_b);
  }

  std::map<std::string, double> sum;
  std::map<std::string, double> sum_sq;
  for (const auto& c : contestants) sum[c] = sum_sq[c] = 0.0;

  std::vector<size_t> order(results.size());
  for (int ordering = 0; ordering < n_orderings; ++ordering) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(ordering)));
    std::shuffle(order.begin(), order.end(), rng);

    std::map<std::string, double> rating;
    for (const auto& c : contestants) rating[c] = 1500.0;
    for (size_t idx : order) {
      const MatchResult& match = results[idx];
      double ra = rating[match.contestant_a];
      double rb = rating[match.contestant_b];
      double ea = expected_score(ra, rb);
      double eb = expected_score(rb, ra);
      double sa = match.winner == 'A' ? 1.0 : 0.0;
      rating[match.contestant_a] = update_rating(ra, k, sa, ea);
      rating[match.contestant_b] = update_rating(rb, k, 1.0 - sa, eb);
    }
    for (const auto& [c, r] : rating) {
      sum[c] += r;
      sum_sq[c] += r * r;
    }
  }

  EloReport report;
  report.n_orderings = n_orderings;
  report.seed = seed;
  for (const auto& c : contestants) {
    double mean = sum[c] / n_orderings;
    double variance = std::max(0.0, sum_sq[c] / n_orderings - mean * mean);
    report.ratings[c] = EloStats{mean, std::sqrt(variance)};
  }
  return report;
}

JudgedMatch pairwise_evaluate(const std::string& question_id, const std::string& question,
                              const std::string& label_a, const std::string& answer_a,
                              const std::string& label_b, const std::string& answer_b,
                              const std::string& gold_answer, ChatProvider& gateway,
                              std::uint64_t seed, const std::string& model) {
  std::mt19937_64 rng(seed);
  bool a_shown_first = std::uniform_int_distribution<int>(0, 1)(rng) == 0;

  json slots{{"question", question},
             {"answer_a", a_shown_first ? answer_a : answer_b},
             {"answer_b", a_shown_first ? answer_b : answer_a},
             {"answer_gold", gold_answer}};
  ChatRequest request = render("evaluator", slots, model);
  std::string transcript = gateway.complete(request);

  char shown_winner;
  try {
    shown_winner = parse_eval_verdict(transcript);
  } catch (const ParseError&) {
    ChatRequest retry = request;
    retry.messages.push_back({Role::Assistant, transcript});
    retry.messages.push_back(
        {Role::User,
         "Print the verdict exactly as specified: VERDICT: Better answer from student <A or B>"});
    transcript = gateway.complete(retry);
    shown_winner = parse_eval_verdict(transcript);  // propagates on second failure
  }

  JudgedMatch judged;
  judged.a_shown_first = a_shown_first;
  judged.transcript = transcript;
  judged.result.contestant_a = label_a;
  judged.result.contestant_b = label_b;
  judged.result.question_id = question_id;
  bool first_shown_won = shown_winner == 'A';
  judged.result.winner = (first_shown_won == a_shown_first) ? 'A' : 'B';
  return judged;
}

std::map<std::string, std::map<std::string, std::optional<double>>> win_matrix(
    const std::vector<MatchResult>& results) {
  std::set<std::string> contestants;
  std::map<std::pair<std::string, std::string>, int> wins;
  std::map<std::pair<std::string, std::string>, int> games;
  for (const MatchResult& r : results) {
    contestants.insert(r.contestant_a);
    contestants.insert(r.contestant_b);
    ++games[{r.contestant_a, r.contestant_b}];
    ++games[{r.contestant_b, r.contestant_a}];
    const std::string& winner = r.winner == 'A' ? r.contestant_a : r.contestant_b;
    const std::string& loser = r.winner == 'A' ? r.contestant_b : r.contestant_a;
    ++wins[{winner, loser}];
  }

  std::map<std::string, std::map<std::string, std::optional<double>>> matrix;
  for (const auto& row : contestants) {
    for (const auto& col : contestants) {
      if (row == col) continue;
      auto it = games.find({row, col});
      if (it == games.end() || it->second == 0) {
        matrix[row][col] = std::nullopt;
      } else {
        matrix[row][col] = static_cast<double>(wins[{row, col}]) / it->second;
      }
    }
  }
  return matrix;
}

TheoremOutcome check_inspection_theorem(const InspectionInstance& instance) {
  for (const InspectionGood& good : instance.goods) {
    if (good.g_value < good.f_value) return TheoremOutcome::AssumptionViolated;
  }
  double with_inspection = 0.0;
  double metadata_only = 0.0;
  for (const InspectionGood& good : instance.goods) {
    if (!good.purchased) continue;
    with_inspection += good.g_value * good.utility;
    metadata_only += good.f_value * good.utility;
  }
  return with_inspection >= metadata_only ? TheoremOutcome::Holds : TheoremOutcome::Violated;
}

std::vector<MatchResult> load_match_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open match results: " + path);
  std::vector<MatchResult> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": malformed match record");
    }
    MatchResult r;
    r.contestant_a = record.at("contestant_a").get<std::string>();
    r.contestant_b = record.at("contestant_b").get<std::string>();
    std::string winner = record.at("winner").get<std::string>();
    if (winner != "A" && winner != "B") {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": winner must be A or B");
    }
    r.winner = winner[0];
    r.question_id = record.value("question_id", "");
    results.push_back(std::move(r));
  }
  return results;
}

void save_match_results(const std::vector<MatchResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BazaarError("cannot write match results: " + path);
  for (const MatchResult& r : results) {
    out << json{{"contestant_a", r.contestant_a},
                {"contestant_b", r.contestant_b},
                {"winner", std::string(1, r.winner)},
                {"question_id", r.question_id}}
               .dump()
        << '\n';
  }
}

}  // namespace bazaar

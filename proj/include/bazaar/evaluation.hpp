#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bazaar/gateway.hpp"

namespace bazaar {

struct MatchResult {
  std::string contestant_a;
  std::string contestant_b;
  char winner = 'A';  // never a tie
  std::string question_id;
};

struct EloStats {
  double mean = 1500.0;
  double stddev = 0.0;
};

struct EloReport {
  std::map<std::string, EloStats> ratings;
  int n_orderings = 1000;
  std::uint64_t seed = 0;
};

// E = 1 / (1 + 10^((r_opp - r) / 400))
double expected_score(double rating, double opponent_rating);

// R' = R + K * (S - E); default K = 32.
double update_rating(double rating, double k, double score, double expected);

// Replays all matches from fresh 1500 ratings once per seeded shuffle and
// reports per-contestant mean and standard deviation.
EloReport elo_tournament(const std::vector<MatchResult>& results, int n_orderings,
                         std::uint64_t seed, double k = 32.0);

struct JudgedMatch {
  MatchResult result;
  bool a_shown_first = true;  // the randomized A/B presentation, for replay
  std::string transcript;
};

// Renders the evaluator debate prompt with a per-match randomized A/B
// assignment and maps the judged letter back to the contestants.
// Throws ParseError when the judge output cannot be parsed after one retry.
JudgedMatch pairwise_evaluate(const std::string& question_id, const std::string& question,
                              const std::string& label_a, const std::string& answer_a,
                              const std::string& label_b, const std::string& answer_b,
                              const std::string& gold_answer, ChatProvider& gateway,
                              std::uint64_t seed, const std::string& model = "");

// Entry (i, j) = wins of i over j / matches between i and j; absent when the
// pair never met.
std::map<std::string, std::map<std::string, std::optional<double>>> win_matrix(
    const std::vector<MatchResult>& results);

struct InspectionGood {
  double f_value = 0.0;   // metadata-only desirability, in [0, 1]
  double g_value = 0.0;   // desirability with content, in [0, 1]
  double utility = 0.0;   // non-negative
  bool purchased = false;
};

struct InspectionInstance {
  std::vector<InspectionGood> goods;
};

enum class TheoremOutcome { Holds, Violated, AssumptionViolated };

// Checks that inspecting content never lowers expected utility, given the
// monotonicity assumption g >= f per good.
TheoremOutcome check_inspection_theorem(const InspectionInstance& instance);

std::vector<MatchResult> load_match_results(const std::string& path);
void save_match_results(const std::vector<MatchResult>& results, const std::string& path);

}  // namespace bazaar

#include "bazaar/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bazaar/retrieval.hpp"
#include "bazaar/selection.hpp"

namespace bazaar {

const char* experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::RationalSamePrice: return "rational_same_price";
    case ExperimentKind::RationalDiffPrice: return "rational_diff_price";
    case ExperimentKind::PriceSweep: return "price_sweep";
    case ExperimentKind::PositionalBias: return "positional_bias";
    case ExperimentKind::BudgetSweep: return "budget_sweep";
    case ExperimentKind::InspectionCompare: return "inspection_compare";
    case ExperimentKind::ModelCompare: return "model_compare";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::RationalSamePrice, ExperimentKind::RationalDiffPrice,
        ExperimentKind::PriceSweep, ExperimentKind::PositionalBias, ExperimentKind::BudgetSweep,
        ExperimentKind::InspectionCompare, ExperimentKind::ModelCompare}) {
    if (name == experiment_kind_name(kind)) return kind;
  }
  throw BazaarError("unknown experiment kind: " + name);
}

namespace {

const std::map<ExperimentKind, std::set<std::string>>& allowed_parameters() {
  static const std::map<ExperimentKind, std::set<std::string>> allowed{
      {ExperimentKind::RationalSamePrice, {"price", "balance"}},
      {ExperimentKind::RationalDiffPrice, {"price_low", "price_high", "balance"}},
      {ExperimentKind::PriceSweep, {"prices", "alt_price", "modes", "balance"}},
      {ExperimentKind::PositionalBias, {"price", "balance"}},
      {ExperimentKind::BudgetSweep, {"budgets", "n_orderings"}},
      {ExperimentKind::InspectionCompare, {"budgets"}},
      {ExperimentKind::ModelCompare, {"models", "budget"}},
  };
  return allowed;
}

}  // namespace

void ExperimentSpec::validate() const {
  const auto& allowed = allowed_parameters().at(kind);
  for (const auto& [key, value] : parameters.items()) {
    if (!allowed.count(key)) {
      throw BazaarError(std::string("unknown parameter '") + key + "' for experiment " +
                        experiment_kind_name(kind));
    }
  }
  if (repetitions < 1) throw BazaarError("repetitions must be positive");
  auto check_positive_list = [&](const char* key) {
    if (!parameters.contains(key)) return;
    if (!parameters[key].is_array() || parameters[key].empty()) {
      throw BazaarError(std::string(key) + " must be a non-empty array");
    }
    for (const json& v : parameters[key]) {
      if (!v.is_number() || v.get<double>() < 0) {
        throw BazaarError(std::string(key) + " entries must be non-negative numbers");
      }
    }
  };
  check_positive_list("prices");
  check_positive_list("budgets");
  if (kind == ExperimentKind::PriceSweep && parameters.contains("modes")) {
    for (const json& mode : parameters["modes"]) {
      std::string m = mode.get<std::string>();
      if (m != "inspection" && m != "metadata") {
        throw BazaarError("modes entries must be 'inspection' or 'metadata'");
      }
    }
  }
  if (kind == ExperimentKind::ModelCompare && parameters.contains("models")) {
    if (!parameters["models"].is_array() || parameters["models"].size() < 2) {
      throw BazaarError("models must list at least two model names");
    }
  }
}

std::map<std::string, std::vector<std::string>> load_paraphrases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open paraphrase file: " + path);
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": malformed paraphrase record");
    }
    out[record.at("query_id").get<std::string>()] =
        record.at("paraphrases").get<std::vector<std::string>>();
  }
  return out;
}

namespace {

struct Option {
  std::string label;  // gold / alt1 / alt2 / paraphrase_a ...
  std::string content;
  Credits price = 0;
};

Shortlist make_shortlist(const std::vector<Option>& options) {
  Shortlist shortlist;
  shortlist.mode = ShortlistMode::Inspection;
  int index = 0;
  for (const Option& opt : options) {
    Quote q;
    q.id = "opt" + std::to_string(index++);
    q.vendor = "fixture";
    q.passage.id = opt.label;
    q.passage.content = opt.content;
    q.price = opt.price;
    q.passage.price = opt.price;
    q.relevance_score = 1.0 - 0.01 * index;
    shortlist.entries.push_back({q, std::nullopt});
  }
  return shortlist;
}

// Top non-gold passages by BM25 against the question; the "sourced by the
// environment" alternatives.
std::vector<const Passage*> alternatives_for(const QuerySpec& query, const Corpus& corpus,
                                             size_t count) {
  RetrievalConfig cfg;
  auto scores = bm25_scores(query.question, corpus, cfg);
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [id, score] : scores) {
    if (id != query.gold_passage_id) ranked.emplace_back(score, id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<const Passage*> out;
  for (size_t i = 0; i < ranked.size() && out.size() < count; ++i) {
    out.push_back(&corpus.at(ranked[i].second));
  }
  return out;
}

std::string classify_purchase(bool gold_bought, int alternatives_bought) {
  if (gold_bought && alternatives_bought == 0) return "only_gold";
  if (gold_bought) return "gold_and_more";
  if (alternatives_bought > 0) return "only_alternative";
  return "no_purchase";
}

std::vector<QuerySpec> select_questions(const ExperimentSpec& spec,
                                        const std::vector<QuerySpec>& queries) {
  if (spec.question_ids.empty()) return queries;
  std::vector<QuerySpec> out;
  for (const auto& id : spec.question_ids) {
    auto it = std::find_if(queries.begin(), queries.end(),
                           [&](const QuerySpec& q) { return q.id == id; });
    if (it == queries.end()) throw BazaarError("experiment references unknown query: " + id);
    out.push_back(*it);
  }
  return out;
}

json trial_base(const ExperimentSpec& spec, const std::string& digest, int trial,
                std::uint64_t trial_seed) {
  return json{{"kind", experiment_kind_name(spec.kind)},
              {"trial", trial},
              {"seed", trial_seed},
              {"config_digest", digest}};
}

std::vector<int> permutation_of_three(int index) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  return {perms[index][0], perms[index][1], perms[index][2]};
}

}  // namespace

std::vector<json> run_experiment(const ExperimentSpec& spec, ExperimentContext& ctx) {
  spec.validate();
  if (!ctx.corpus || !ctx.gateway || !ctx.embedder || !ctx.reranker) {
    throw BazaarError("experiment context is incomplete");
  }
  const Corpus& corpus = *ctx.corpus;
  std::string digest =
      sha256_hex(ctx.sim.to_json().dump() + spec.parameters.dump() +
                 std::to_string(spec.seed));
  std::vector<QuerySpec> questions = select_questions(spec, ctx.queries);
  if (questions.empty()) throw BazaarError("experiment has no questions");

  std::vector<json> rows;
  int trial = 0;
  auto next_seed = [&]() { return mix_seed(spec.seed, static_cast<std::uint64_t>(trial)); };
  const std::string& model = ctx.sim.provider.chat.model;

  auto decide = [&](const std::vector<Option>& options, Credits balance,
                    const QuerySpec& query) {
    Shortlist shortlist = make_shortlist(options);
    return decide_purchases(query.question, shortlist, balance, ctx.sim.strategy, *ctx.gateway,
                            model);
  };

  switch (spec.kind) {
    case ExperimentKind::RationalSamePrice:
    case ExperimentKind::RationalDiffPrice: {
      bool same_price = spec.kind == ExperimentKind::RationalSamePrice;
      Credits price_low = spec.parameters.value("price",
                                                spec.parameters.value("price_low", Credits{10}));
      Credits price_high =
          same_price ? price_low : spec.parameters.value("price_high", Credits{20});
      Credits balance = spec.parameters.value("balance", Credits{100});
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        for (const QuerySpec& query : questions) {
          auto it = ctx.paraphrases.find(query.id);
          if (it == ctx.paraphrases.end() || it->second.size() < 2) {
            throw BazaarError("no paraphrase pair for query " + query.id);
          }
          std::vector<Option> options{{"paraphrase_a", it->second[0], price_low},
                                      {"paraphrase_b", it->second[1], price_high}};
          PurchaseDecision decision = decide(options, balance, query);
          int bought = static_cast<int>(
              std::count(decision.verdicts.begin(), decision.verdicts.end(), Verdict::Buy));
          bool bought_expensive =
              !same_price && decision.verdicts.size() > 1 && decision.verdicts[1] == Verdict::Buy;
          json row = trial_base(spec, digest, trial, next_seed());
          row["question_id"] = query.id;
          row["n_bought"] = bought;
          row["rational"] = bought <= 1 && !(bought_expensive && bought == 1);
          row["bought_expensive"] = bought_expensive;
          row["parse_failed"] = decision.parse_failed;
          rows.push_back(std::move(row));
          ++trial;
        }
      }
      break;
    }

    case ExperimentKind::PriceSweep: {
      std::vector<Credits> prices =
          spec.parameters.value("prices", std::vector<Credits>{0, 10, 20, 30, 40, 50, 60, 70, 80});
      Credits alt_price = spec.parameters.value("alt_price", Credits{10});
      Credits balance = spec.parameters.value("balance", Credits{200});
      std::vector<std::string> modes = spec.parameters.value(
          "modes", std::vector<std::string>{"inspection", "metadata"});
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        for (const QuerySpec& query : questions) {
          const Passage& gold = corpus.at(query.gold_passage_id);
          auto alts = alternatives_for(query, corpus, 2);
          for (const std::string& mode : modes) {
            bool inspect = mode == "inspection";
            for (Credits gold_price : prices) {
              std::vector<Option> options;
              auto text = [&](const Passage& p) {
                return inspect ? p.content
                               : "Paper: " + p.paper_title + " | Section: " + p.section_title;
              };
              options.push_back({"gold", text(gold), gold_price});
              for (size_t a = 0; a < alts.size(); ++a) {
                options.push_back({"alt" + std::to_string(a + 1), text(*alts[a]), alt_price});
              }
              PurchaseDecision decision = decide(options, balance, query);
              bool gold_bought = decision.verdicts[0] == Verdict::Buy;
              int alts_bought = 0;
              for (size_t i = 1; i < decision.verdicts.size(); ++i) {
                if (decision.verdicts[i] == Verdict::Buy) ++alts_bought;
              }
              json row = trial_base(spec, digest, trial, next_seed());
              row["question_id"] = query.id;
              row["mode"] = mode;
              row["gold_price"] = gold_price;
              row["alt_price"] = alt_price;
              row["gold_bought"] = gold_bought;
              row["alts_bought"] = alts_bought;
              row["category"] = classify_purchase(gold_bought, alts_bought);
              rows.push_back(std::move(row));
              ++trial;
            }
          }
        }
      }
      break;
    }

    case ExperimentKind::PositionalBias: {
      Credits price = spec.parameters.value("price", Credits{10});
      Credits balance = spec.parameters.value("balance", Credits{100});
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        for (const QuerySpec& query : questions) {
          const Passage& gold = corpus.at(query.gold_passage_id);
          auto alts = alternatives_for(query, corpus, 2);
          if (alts.size() < 2) throw BazaarError("corpus too small for positional_bias");
          std::vector<Option> base{{"gold", gold.content, price},
                                   {"alt1", alts[0]->content, price},
                                   {"alt2", alts[1]->content, price}};
          for (int perm = 0; perm < 6; ++perm) {
            auto order = permutation_of_three(perm);
            std::vector<Option> options;
            for (int slot : order) options.push_back(base[slot]);
            PurchaseDecision decision = decide(options, balance, query);
            json accepted = json::array();
            for (Verdict v : decision.verdicts) accepted.push_back(v == Verdict::Buy);
            json row = trial_base(spec, digest, trial, next_seed());
            row["question_id"] = query.id;
            row["permutation"] = perm;
            row["order"] = json::array({base[order[0]].label, base[order[1]].label,
                                        base[order[2]].label});
            row["accepted_by_position"] = accepted;
            rows.push_back(std::move(row));
            ++trial;
          }
        }
      }
      break;
    }

    case ExperimentKind::BudgetSweep: {
      std::vector<Credits> budgets = spec.parameters.value(
          "budgets", std::vector<Credits>{10, 25, 50, 100, 150, 200});
      EmbeddingIndex index = build_embedding_index(corpus, *ctx.embedder);
      for (const QuerySpec& query : questions) {
        std::string gold_answer =
            ctx.gateway->complete(render("closed_book", json{{"question", query.question}}, model));
        std::map<Credits, RunRecord> records;
        for (Credits budget : budgets) {
          SimConfig config = ctx.sim;
          config.budget = budget;
          config.seed = next_seed();
          records.emplace(budget, run_simulation(query, corpus, config, *ctx.gateway,
                                                 *ctx.embedder, *ctx.reranker, &index));
          json row = trial_base(spec, digest, trial, config.seed);
          row["row"] = "run";
          row["question_id"] = query.id;
          row["contestant"] = "budget_" + std::to_string(budget);
          row["budget"] = budget;
          row["spent"] = records.at(budget).total_spent;
          row["answer"] = records.at(budget).final_answer;
          rows.push_back(std::move(row));
          ++trial;
        }
        for (size_t i = 0; i < budgets.size(); ++i) {
          for (size_t j = i + 1; j < budgets.size(); ++j) {
            std::string label_a = "budget_" + std::to_string(budgets[i]);
            std::string label_b = "budget_" + std::to_string(budgets[j]);
            std::uint64_t match_seed = next_seed();
            JudgedMatch match = pairwise_evaluate(
                query.id, query.question, label_a, records.at(budgets[i]).final_answer, label_b,
                records.at(budgets[j]).final_answer, gold_answer, *ctx.gateway, match_seed, model);
            json row = trial_base(spec, digest, trial, match_seed);
            row["row"] = "match";
            row["question_id"] = query.id;
            row["contestant_a"] = label_a;
            row["contestant_b"] = label_b;
            row["winner"] = std::string(1, match.result.winner);
            row["a_shown_first"] = match.a_shown_first;
            rows.push_back(std::move(row));
            ++trial;
          }
        }
      }
      break;
    }

    case ExperimentKind::InspectionCompare: {
      std::vector<Credits> budgets =
          spec.parameters.value("budgets", std::vector<Credits>{50, 100});
      EmbeddingIndex index = build_embedding_index(corpus, *ctx.embedder);
      for (const QuerySpec& query : questions) {
        std::string gold_answer =
            ctx.gateway->complete(render("closed_book", json{{"question", query.question}}, model));
        for (Credits budget : budgets) {
          SimConfig with = ctx.sim;
          with.budget = budget;
          with.inspection = true;
          with.seed = next_seed();
          RunRecord run_with = run_simulation(query, corpus, with, *ctx.gateway, *ctx.embedder,
                                              *ctx.reranker, &index);
          SimConfig without = ctx.sim;
          without.budget = budget;
          without.inspection = false;
          without.seed = next_seed();
          RunRecord run_without = run_simulation(query, corpus, without, *ctx.gateway,
                                                 *ctx.embedder, *ctx.reranker, &index);
          std::uint64_t match_seed = next_seed();
          JudgedMatch match = pairwise_evaluate(query.id, query.question, "inspection",
                                                run_with.final_answer, "metadata",
                                                run_without.final_answer, gold_answer,
                                                *ctx.gateway, match_seed, model);
          json row = trial_base(spec, digest, trial, match_seed);
          row["row"] = "pair";
          row["question_id"] = query.id;
          row["budget"] = budget;
          row["winner"] = match.result.winner == 'A' ? "inspection" : "metadata";
          row["spent_inspection"] = run_with.total_spent;
          row["spent_metadata"] = run_without.total_spent;
          rows.push_back(std::move(row));
          ++trial;
        }
      }
      break;
    }

    case ExperimentKind::ModelCompare: {
      std::vector<std::string> models = spec.parameters.value(
          "models", std::vector<std::string>{"model_a", "model_b"});
      Credits budget = spec.parameters.value("budget", Credits{100});
      EmbeddingIndex index = build_embedding_index(corpus, *ctx.embedder);
      for (const QuerySpec& query : questions) {
        std::string gold_answer =
            ctx.gateway->complete(render("closed_book", json{{"question", query.question}}, model));
        std::map<std::string, std::string> answers;
        for (const std::string& contender : models) {
          SimConfig config = ctx.sim;
          config.budget = budget;
          config.provider.chat.model = contender;
          config.seed = next_seed();
          RunRecord run = run_simulation(query, corpus, config, *ctx.gateway, *ctx.embedder,
                                         *ctx.reranker, &index);
          answers[contender] = run.final_answer;
          json row = trial_base(spec, digest, trial, config.seed);
          row["row"] = "run";
          row["question_id"] = query.id;
          row["contestant"] = contender;
          row["spent"] = run.total_spent;
          row["answer"] = run.final_answer;
          rows.push_back(std::move(row));
          ++trial;
        }
        for (size_t i = 0; i < models.size(); ++i) {
          for (size_t j = i + 1; j < models.size(); ++j) {
            std::uint64_t match_seed = next_seed();
            JudgedMatch match =
                pairwise_evaluate(query.id, query.question, models[i], answers[models[i]],
                                  models[j], answers[models[j]], gold_answer, *ctx.gateway,
                                  match_seed, model);
            json row = trial_base(spec, digest, trial, match_seed);
            row["row"] = "match";
            row["question_id"] = query.id;
            row["contestant_a"] = models[i];
            row["contestant_b"] = models[j];
            row["winner"] = std::string(1, match.result.winner);
            rows.push_back(std::move(row));
            ++trial;
          }
        }
      }
      break;
    }
  }
  return rows;
}

void save_results(const std::vector<json>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BazaarError("cannot write results file: " + path);
  for (const json& row : rows) out << row.dump() << '\n';
}

std::vector<json> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open results file: " + path);
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(json::parse(line));
  }
  return rows;
}

namespace {

std::vector<MatchResult> matches_from_rows(const std::vector<json>& rows) {
  std::vector<MatchResult> matches;
  for (const json& row : rows) {
    if (row.value("row", "") != "match") continue;
    MatchResult m;
    m.contestant_a = row.at("contestant_a").get<std::string>();
    m.contestant_b = row.at("contestant_b").get<std::string>();
    m.winner = row.at("winner").get<std::string>()[0];
    m.question_id = row.value("question_id", "");
    matches.push_back(std::move(m));
  }
  return matches;
}

void report_rational(std::ostream& out, const std::vector<json>& rows, ReportFormat format) {
  int total = 0;
  int rational = 0;
  int expensive = 0;
  for (const json& row : rows) {
    ++total;
    if (row.value("rational", false)) ++rational;
    if (row.value("bought_expensive", false)) ++expensive;
  }
  double irrational_rate = total == 0 ? 0.0 : 100.0 * (total - rational) / total;
  if (format == ReportFormat::PlotData) {
    out << "trials\trational\tirrational_rate_pct\tbought_expensive\n";
    out << total << '\t' << rational << '\t' << irrational_rate << '\t' << expensive << '\n';
  } else {
    out << "trials: " << total << "\nrational: " << rational
        << "\nirrational rate: " << irrational_rate << "%\nbought expensive: " << expensive
        << '\n';
  }
}

void report_price_sweep(std::ostream& out, const std::vector<json>& rows, ReportFormat format) {
  // demand per (mode, gold_price)
  std::map<std::pair<std::string, Credits>, std::array<int, 2>> gold;  // {gold buys, trials}
  std::map<std::string, std::map<std::string, std::array<int, 2>>> categories;  // mode -> cat
  static const char* kCategories[] = {"only_gold", "gold_and_more", "only_alternative",
                                      "no_purchase"};
  for (const json& row : rows) {
    std::string mode = row.value("mode", "inspection");
    Credits price = row.at("gold_price").get<Credits>();
    auto& cell = gold[{mode, price}];
    cell[1] += 1;
    if (row.value("gold_bought", false)) cell[0] += 1;
    std::string category = row.value("category", "no_purchase");
    for (const char* c : kCategories) {
      auto& cat = categories[mode][c];
      cat[1] += 1;
      if (category == c) cat[0] += 1;
    }
  }
  out << (format == ReportFormat::PlotData ? "mode\tgold_price\tdemand_rate\ttrials\n"
                                           : "demand for the gold passage by price:\n");
  for (const auto& [key, cell] : gold) {
    double rate = cell[1] == 0 ? 0.0 : static_cast<double>(cell[0]) / cell[1];
    if (format == ReportFormat::PlotData) {
      out << key.first << '\t' << key.second << '\t' << rate << '\t' << cell[1] << '\n';
    } else {
      out << "  mode=" << key.first << " price=" << key.second << " demand=" << rate
          << " (n=" << cell[1] << ")\n";
    }
  }
  if (categories.count("inspection") && categories.count("metadata")) {
    out << (format == ReportFormat::PlotData
                ? "category\tinspection_pct\tmetadata_pct\tdelta_pct\n"
                : "inspection demand deltas (inspection minus metadata, percentage points):\n");
    for (const char* c : kCategories) {
      auto rate = [&](const std::string& mode) {
        const auto& cell = categories.at(mode).at(c);
        return cell[1] == 0 ? 0.0 : 100.0 * cell[0] / cell[1];
      };
      double with = rate("inspection");
      double without = rate("metadata");
      if (format == ReportFormat::PlotData) {
        out << c << '\t' << with << '\t' << without << '\t' << (with - without) << '\n';
      } else {
        out << "  " << c << ": " << (with - without >= 0 ? "+" : "") << (with - without)
            << "%\n";
      }
    }
  }
}

void report_positional_bias(std::ostream& out, const std::vector<json>& rows,
                            ReportFormat format) {
  // Normalization: per-position acceptance rate divided by the mean
  // acceptance rate across positions, minus 1.
  std::array<int, 3> accepted{0, 0, 0};
  int trials = 0;
  for (const json& row : rows) {
    const json& by_position = row.at("accepted_by_position");
    for (size_t i = 0; i < 3 && i < by_position.size(); ++i) {
      if (by_position[i].get<bool>()) ++accepted[i];
    }
    ++trials;
  }
  double mean = trials == 0 ? 0.0 : (accepted[0] + accepted[1] + accepted[2]) / (3.0 * trials);
  out << (format == ReportFormat::PlotData
              ? "position\tacceptance_rate\tnormalized_mean_adjusted\n"
              : "position acceptance (normalized = rate / mean - 1):\n");
  for (int i = 0; i < 3; ++i) {
    double rate = trials == 0 ? 0.0 : static_cast<double>(accepted[i]) / trials;
    double adjusted = mean == 0.0 ? 0.0 : rate / mean - 1.0;
    if (format == ReportFormat::PlotData) {
      out << (i + 1) << '\t' << rate << '\t' << adjusted << '\n';
    } else {
      out << "  position " << (i + 1) << ": rate=" << rate << " adjusted=" << adjusted << '\n';
    }
  }
}

void report_elo(std::ostream& out, const std::vector<json>& rows, ReportFormat format,
                int n_orderings, std::uint64_t seed) {
  auto matches = matches_from_rows(rows);
  if (matches.empty()) {
    out << "no matches recorded\n";
    return;
  }
  EloReport elo = elo_tournament(matches, n_orderings, seed);
  out << (format == ReportFormat::PlotData ? "contestant\telo_mean\telo_std\n"
                                           : "Elo ratings (mean +/- std over " +
                                                 std::to_string(n_orderings) + " orderings):\n");
  for (const auto& [contestant, stats] : elo.ratings) {
    if (format == ReportFormat::PlotData) {
      out << contestant << '\t' << stats.mean << '\t' << stats.stddev << '\n';
    } else {
      out << "  " << contestant << ": " << stats.mean << " +/- " << stats.stddev << '\n';
    }
  }
}

void report_inspection_compare(std::ostream& out, const std::vector<json>& rows,
                               ReportFormat format) {
  std::map<std::string, int> wins;
  std::map<std::string, Credits> spent;
  for (const json& row : rows) {
    if (row.value("row", "") != "pair") continue;
    std::string winner = row.at("winner").get<std::string>();
    ++wins[winner];
    spent["inspection"] += row.value("spent_inspection", Credits{0});
    spent["metadata"] += row.value("spent_metadata", Credits{0});
  }
  out << (format == ReportFormat::PlotData ? "arm\twins\ttotal_spent\n"
                                           : "wins by arm against credits spent:\n");
  for (const std::string arm : {"inspection", "metadata"}) {
    if (format == ReportFormat::PlotData) {
      out << arm << '\t' << wins[arm] << '\t' << spent[arm] << '\n';
    } else {
      out << "  " << arm << ": wins=" << wins[arm] << " spent=" << spent[arm] << '\n';
    }
  }
}

void report_win_matrix(std::ostream& out, const std::vector<json>& rows, ReportFormat format) {
  auto matches = matches_from_rows(rows);
  auto matrix = win_matrix(matches);
  out << (format == ReportFormat::PlotData ? "row\tcol\twin_rate\n"
                                           : "win rate of row over column:\n");
  for (const auto& [row_label, cols] : matrix) {
    for (const auto& [col_label, rate] : cols) {
      if (format == ReportFormat::PlotData) {
        out << row_label << '\t' << col_label << '\t' << (rate ? std::to_string(*rate) : "-")
            << '\n';
      } else {
        out << "  " << row_label << " vs " << col_label << ": "
            << (rate ? std::to_string(*rate) : "-") << '\n';
      }
    }
  }
}

}  // namespace

std::string report(const std::vector<json>& rows, ReportFormat format) {
  if (rows.empty()) throw BazaarError("empty results");
  std::map<std::string, std::vector<json>> by_kind;
  for (const json& row : rows) by_kind[row.value("kind", "unknown")].push_back(row);

  std::ostringstream out;
  for (const auto& [kind, kind_rows] : by_kind) {
    out << "== " << kind << " ==\n";
    if (kind == "rational_same_price" || kind == "rational_diff_price") {
      report_rational(out, kind_rows, format);
    } else if (kind == "price_sweep") {
      report_price_sweep(out, kind_rows, format);
    } else if (kind == "positional_bias") {
      report_positional_bias(out, kind_rows, format);
    } else if (kind == "budget_sweep") {
      report_elo(out, kind_rows, format, 1000, 0);
    } else if (kind == "inspection_compare") {
      report_inspection_compare(out, kind_rows, format);
    } else if (kind == "model_compare") {
      report_win_matrix(out, kind_rows, format);
    } else {
      out << "unrecognized kind\n";
    }
  }
  return out.str();
}

}  // namespace bazaar

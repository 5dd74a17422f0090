#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "bazaar/experiments.hpp"
#include "doctest.h"

using namespace bazaar;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURES_DIR) + "/" + name; }

struct Rig {
  Corpus corpus = load_corpus(fixture("corpus.jsonl"));
  std::vector<QuerySpec> queries = load_queries(fixture("queries.jsonl"), corpus);
  std::map<std::string, std::vector<std::string>> paraphrases =
      load_paraphrases(fixture("paraphrases.jsonl"));
  HashEmbedder embedder{64, 0};
  OverlapReranker reranker;

  ExperimentContext context(ChatProvider& gateway) {
    ExperimentContext ctx;
    ctx.corpus = &corpus;
    ctx.queries = queries;
    ctx.paraphrases = paraphrases;
    ctx.sim.provider.mock_script_path = fixture("mock_script.jsonl");
    ctx.sim.seed = 11;
    ctx.gateway = &gateway;
    ctx.embedder = &embedder;
    ctx.reranker = &reranker;
    return ctx;
  }
};

// A decision provider that answers Buy/Pass per option from a fixed script,
// and neutral text for every other template.
FnProvider scripted_buyer(std::vector<const char*> verdicts) {
  return FnProvider([verdicts = std::move(verdicts)](const ChatRequest& req) -> std::string {
    if (req.template_id.rfind("quote_", 0) == 0) {
      std::string out = "VERDICT:\n";
      for (size_t i = 0; i < verdicts.size(); ++i) {
        out += "Option " + std::to_string(i + 1) + ": " + verdicts[i] + "\n";
      }
      return out;
    }
    if (req.template_id == "evaluator") return "VERDICT: Better answer from student A.";
    if (req.template_id == "followup") return "No follow-ups.";
    if (req.template_id == "refinement_step2" || req.template_id == "answer_synthesis") {
      return "<answer>an answer</answer>";
    }
    return "neutral text";
  });
}

}  // namespace

TEST_CASE("experiment kinds round-trip by name and specs validate") {
  CHECK(experiment_kind_from_name("price_sweep") == ExperimentKind::PriceSweep);
  CHECK_THROWS_AS(experiment_kind_from_name("mystery"), BazaarError);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::PriceSweep;
  spec.parameters = {{"prices", {0, 10}}};
  spec.validate();

  SUBCASE("unknown parameter") {
    spec.parameters["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("typo_key"), BazaarError);
  }
  SUBCASE("bad list") {
    spec.parameters = {{"prices", json::array()}};
    CHECK_THROWS_AS(spec.validate(), BazaarError);
  }
  SUBCASE("bad mode") {
    spec.parameters = {{"modes", {"telepathy"}}};
    CHECK_THROWS_AS(spec.validate(), BazaarError);
  }
  SUBCASE("zero repetitions") {
    spec.parameters = json::object();
    spec.repetitions = 0;
    CHECK_THROWS_AS(spec.validate(), BazaarError);
  }
}

TEST_CASE("an always-buy-both buyer scores a 100% irrational rate") {
  Rig rig;
  FnProvider buyer = scripted_buyer({"Buy", "Buy"});
  ExperimentContext ctx = rig.context(buyer);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::RationalSamePrice;
  spec.seed = 5;
  auto rows = run_experiment(spec, ctx);
  REQUIRE(rows.size() == 3);  // one per fixture question
  for (const json& row : rows) {
    CHECK(row.at("n_bought") == 2);
    CHECK_FALSE(row.at("rational").get<bool>());
    CHECK(row.contains("seed"));
    CHECK(row.contains("config_digest"));
  }
  std::string table = report(rows, ReportFormat::Table);
  CHECK(table.find("irrational rate: 100%") != std::string::npos);
}

TEST_CASE("different prices add the bought-expensive error mode") {
  Rig rig;
  FnProvider buys_second = scripted_buyer({"Pass", "Buy"});
  ExperimentContext ctx = rig.context(buys_second);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::RationalDiffPrice;
  spec.parameters = {{"price_low", 10}, {"price_high", 20}};
  auto rows = run_experiment(spec, ctx);
  for (const json& row : rows) {
    CHECK(row.at("bought_expensive").get<bool>());
    CHECK_FALSE(row.at("rational").get<bool>());  // paying extra for a substitute
  }

  FnProvider buys_first = scripted_buyer({"Buy", "Pass"});
  ExperimentContext ctx2 = rig.context(buys_first);
  for (const json& row : run_experiment(spec, ctx2)) {
    CHECK(row.at("rational").get<bool>());
  }
}

TEST_CASE("positional bias covers all six permutations per question") {
  Rig rig;
  FnProvider buyer = scripted_buyer({"Buy", "Pass", "Pass"});
  ExperimentContext ctx = rig.context(buyer);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::PositionalBias;
  auto rows = run_experiment(spec, ctx);
  REQUIRE(rows.size() == 18);  // 3 questions x 6 permutations

  std::map<std::string, std::set<int>> perms_by_question;
  for (const json& row : rows) {
    perms_by_question[row.at("question_id")].insert(row.at("permutation").get<int>());
    CHECK(row.at("accepted_by_position")[0].get<bool>());
    CHECK_FALSE(row.at("accepted_by_position")[1].get<bool>());
  }
  for (const auto& [question, perms] : perms_by_question) {
    CHECK(perms == std::set<int>{0, 1, 2, 3, 4, 5});
  }

  std::string table = report(rows, ReportFormat::Table);
  CHECK(table.find("position 1: rate=1 adjusted=2") != std::string::npos);
}

TEST_CASE("price sweep emits the full grid and recounts into categories") {
  Rig rig;
  FnProvider buyer = scripted_buyer({"Buy", "Buy", "Pass"});  // gold and one alternative
  ExperimentContext ctx = rig.context(buyer);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::PriceSweep;
  spec.question_ids = {"q1"};
  auto rows = run_experiment(spec, ctx);
  REQUIRE(rows.size() == 18);  // 9 prices x 2 modes x 1 question
  std::set<Credits> prices;
  for (const json& row : rows) {
    prices.insert(row.at("gold_price").get<Credits>());
    CHECK(row.at("category") == "gold_and_more");
  }
  CHECK(prices == std::set<Credits>{0, 10, 20, 30, 40, 50, 60, 70, 80});
}

TEST_CASE("inspection demand deltas match a hand count on synthetic rows") {
  // 4 inspection rows: 3 only_gold, 1 no_purchase. 4 metadata rows: 1
  // only_gold, 3 no_purchase. Only-gold delta = 75% - 25% = +50 points.
  std::vector<json> rows;
  auto add = [&](const std::string& mode, const std::string& category) {
    rows.push_back({{"kind", "price_sweep"},
                    {"mode", mode},
                    {"gold_price", 10},
                    {"gold_bought", category != "no_purchase"},
                    {"category", category}});
  };
  for (int i = 0; i < 3; ++i) add("inspection", "only_gold");
  add("inspection", "no_purchase");
  add("metadata", "only_gold");
  for (int i = 0; i < 3; ++i) add("metadata", "no_purchase");

  std::string table = report(rows, ReportFormat::Table);
  CHECK(table.find("only_gold: +50") != std::string::npos);
  CHECK(table.find("no_purchase: -50") != std::string::npos);

  std::string plot = report(rows, ReportFormat::PlotData);
  CHECK(plot.find("only_gold\t75\t25\t50") != std::string::npos);
}

TEST_CASE("budget sweep produces runs, pairwise matches and an Elo table") {
  Rig rig;
  MockProvider gateway{load_mock_script(fixture("mock_script.jsonl"))};
  ExperimentContext ctx = rig.context(gateway);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::BudgetSweep;
  spec.parameters = {{"budgets", {10, 50, 100}}};
  spec.question_ids = {"q1"};
  auto rows = run_experiment(spec, ctx);

  int runs = 0, matches = 0;
  std::set<std::string> contestants;
  for (const json& row : rows) {
    if (row.at("row") == "run") {
      ++runs;
      contestants.insert(row.at("contestant").get<std::string>());
      CHECK(row.at("spent").get<Credits>() <= row.at("budget").get<Credits>());
    } else if (row.at("row") == "match") {
      ++matches;
    }
  }
  CHECK(runs == 3);
  CHECK(matches == 3);  // C(3, 2)
  CHECK(contestants == std::set<std::string>{"budget_10", "budget_50", "budget_100"});
  CHECK(report(rows, ReportFormat::Table).find("Elo ratings") != std::string::npos);
}

TEST_CASE("inspection compare pairs arms per budget") {
  Rig rig;
  MockProvider gateway{load_mock_script(fixture("mock_script.jsonl"))};
  ExperimentContext ctx = rig.context(gateway);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::InspectionCompare;
  spec.parameters = {{"budgets", {50}}};
  spec.question_ids = {"q2"};
  auto rows = run_experiment(spec, ctx);
  REQUIRE(rows.size() == 1);
  CHECK((rows[0].at("winner") == "inspection" || rows[0].at("winner") == "metadata"));
  CHECK(rows[0].contains("spent_inspection"));
  CHECK(report(rows, ReportFormat::Table).find("wins by arm") != std::string::npos);
}

TEST_CASE("model compare fills a win matrix at a fixed budget") {
  Rig rig;
  MockProvider gateway{load_mock_script(fixture("mock_script.jsonl"))};
  ExperimentContext ctx = rig.context(gateway);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::ModelCompare;
  spec.parameters = {{"models", {"model_a", "model_b"}}};
  spec.question_ids = {"q1"};
  auto rows = run_experiment(spec, ctx);
  int matches = 0;
  for (const json& row : rows) {
    if (row.at("row") == "match") ++matches;
  }
  CHECK(matches == 1);
  std::string table = report(rows, ReportFormat::Table);
  CHECK(table.find("model_a vs model_b") != std::string::npos);
}

TEST_CASE("experiments replay identically and results files round-trip") {
  Rig rig;
  FnProvider buyer = scripted_buyer({"Buy", "Pass", "Pass"});
  ExperimentContext ctx = rig.context(buyer);

  ExperimentSpec spec;
  spec.kind = ExperimentKind::PositionalBias;
  spec.seed = 77;
  auto rows = run_experiment(spec, ctx);
  auto again = run_experiment(spec, ctx);
  CHECK(rows == again);

  std::string tmp = "results_tmp.jsonl";
  save_results(rows, tmp);
  auto loaded = load_results(tmp);
  CHECK(loaded == rows);
  std::remove(tmp.c_str());

  CHECK_THROWS_AS(report({}, ReportFormat::Table), BazaarError);
}

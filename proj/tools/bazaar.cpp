// bazaar — CLI harness for the information-market simulator.
//
// Subcommands: corpus build, run, experiment <kind>, elo, report.
// Global flags: --config <file>, --seed <int>, --provider <live|mock>,
// --out <dir>.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "bazaar/engine.hpp"
#include "bazaar/evaluation.hpp"
#include "bazaar/experiments.hpp"

namespace fs = std::filesystem;
using namespace bazaar;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string provider;  // "", "mock", "live"
  std::string out_dir = "out";
};

SimConfig load_sim_config(const GlobalOptions& opts) {
  SimConfig config;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw BazaarError("cannot open config file: " + opts.config_path);
    config = SimConfig::from_json(json::parse(in));
  }
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.provider.empty()) config.provider.mode = opts.provider;
  return config;
}

// Experiment parameter blocks may live in the config file under
// "experiments": { "<kind>": { ... } }.
json experiment_params_from_config(const GlobalOptions& opts, const std::string& kind) {
  if (opts.config_path.empty()) return json::object();
  std::ifstream in(opts.config_path);
  if (!in) throw BazaarError("cannot open config file: " + opts.config_path);
  json config = json::parse(in);
  if (config.contains("experiments") && config["experiments"].contains(kind)) {
    return config["experiments"][kind];
  }
  return json::object();
}

struct Providers {
  std::unique_ptr<ChatProvider> gateway;
  std::unique_ptr<EmbeddingClient> embedder;
  std::unique_ptr<RerankClient> reranker;
};

Providers make_providers(const SimConfig& config) {
  Providers p;
  if (config.provider.mode == "mock") {
    if (config.provider.mock_script_path.empty()) {
      throw BazaarError("mock provider requires a mock_script_path in the config");
    }
    p.gateway = std::make_unique<MockProvider>(load_mock_script(config.provider.mock_script_path));
    p.embedder = std::make_unique<HashEmbedder>(64, config.seed);
    p.reranker = std::make_unique<OverlapReranker>();
  } else if (config.provider.mode == "live") {
    p.gateway = std::make_unique<LiveProvider>(config.provider.chat);
    p.embedder = std::make_unique<HttpEmbedder>(config.provider.embedding);
    p.reranker = std::make_unique<HttpReranker>(config.provider.reranker);
  } else {
    throw BazaarError("provider mode must be 'mock' or 'live', got: " + config.provider.mode);
  }
  return p;
}

std::string out_path(const GlobalOptions& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  return (fs::path(opts.out_dir) / name).string();
}

QuerySpec pick_query(const std::vector<QuerySpec>& queries, const std::string& query_id) {
  if (queries.empty()) throw BazaarError("query file is empty");
  if (query_id.empty()) return queries.front();
  for (const QuerySpec& q : queries) {
    if (q.id == query_id) return q;
  }
  throw BazaarError("unknown query id: " + query_id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-market simulator and experiment harness"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Configuration file (JSON)");
  std::int64_t seed_flag = -1;
  app.add_option("--seed", seed_flag, "Override the configured seed");
  app.add_option("--provider", opts.provider, "Provider mode")
      ->check(CLI::IsMember({"mock", "live"}));
  app.add_option("--out", opts.out_dir, "Output directory (default: out)");

  // --- corpus build --------------------------------------------------------
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "Corpus tools");
  CLI::App* corpus_build = corpus_cmd->add_subcommand("build", "Price and index a passage file");
  std::string corpus_input, corpus_output = "corpus.jsonl", index_output;
  corpus_build->add_option("--input", corpus_input, "Raw passage JSONL")->required();
  corpus_build->add_option("--output", corpus_output, "Priced corpus JSONL (within --out)");
  corpus_build->add_option("--index", index_output, "Also write an embedding index (within --out)");

  // --- run ------------------------------------------------------------------
  CLI::App* run_cmd = app.add_subcommand("run", "Run one full buyer simulation");
  std::string run_corpus, run_queries, run_query_id;
  run_cmd->add_option("--corpus", run_corpus, "Corpus JSONL")->required();
  run_cmd->add_option("--queries", run_queries, "Query JSONL")->required();
  run_cmd->add_option("--query", run_query_id, "Query id (default: first)");

  // --- experiment <kind> ----------------------------------------------------
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Run an experiment suite");
  std::string exp_kind, exp_corpus, exp_queries, exp_paraphrases, exp_params_inline;
  std::vector<std::string> exp_questions;
  int exp_repetitions = 1;
  exp_cmd->add_option("kind", exp_kind, "Experiment kind")->required();
  exp_cmd->add_option("--corpus", exp_corpus, "Corpus JSONL")->required();
  exp_cmd->add_option("--queries", exp_queries, "Query JSONL")->required();
  exp_cmd->add_option("--paraphrases", exp_paraphrases, "Paraphrase JSONL (rational experiments)");
  exp_cmd->add_option("--params", exp_params_inline, "Inline JSON parameter overrides");
  exp_cmd->add_option("--questions", exp_questions, "Restrict to these query ids");
  exp_cmd->add_option("--repetitions", exp_repetitions, "Repetitions per question");

  // --- elo --------------------------------------------------------------
  CLI::App* elo_cmd = app.add_subcommand("elo", "Elo ratings from a match file");
  std::string elo_matches;
  int elo_orderings = 1000;
  double elo_k = 32.0;
  elo_cmd->add_option("--matches", elo_matches, "Match results JSONL")->required();
  elo_cmd->add_option("--orderings", elo_orderings, "Number of shuffled orderings");
  elo_cmd->add_option("--k", elo_k, "K-factor");

  // --- report ----------------------------------------------------------
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate a results file");
  std::string report_results, report_format = "table";
  report_cmd->add_option("--results", report_results, "Results JSONL")->required();
  report_cmd->add_option("--format", report_format, "table or plotdata")
      ->check(CLI::IsMember({"table", "plotdata"}));

  CLI11_PARSE(app, argc, argv);
  if (seed_flag >= 0) opts.seed = static_cast<std::uint64_t>(seed_flag);

  try {
    SimConfig sim = load_sim_config(opts);

    if (corpus_build->parsed()) {
      CorpusConfig cfg;
      cfg.pricing = sim.pricing;
      Corpus corpus = load_corpus(corpus_input, cfg);
      std::string out = out_path(opts, corpus_output);
      save_corpus(corpus, out);
      std::cout << "wrote " << corpus.size() << " passages to " << out << '\n';
      if (!index_output.empty()) {
        HashEmbedder embedder(64, sim.seed);
        EmbeddingIndex index = build_embedding_index(corpus, embedder);
        std::string index_path = out_path(opts, index_output);
        save_embedding_index(index, index_path);
        std::cout << "wrote embedding index to " << index_path << '\n';
      }
      return 0;
    }

    if (run_cmd->parsed()) {
      Corpus corpus = load_corpus(run_corpus);
      auto queries = load_queries(run_queries, corpus);
      QuerySpec query = pick_query(queries, run_query_id);
      Providers p = make_providers(sim);
      RunRecord record = run_simulation(query, corpus, sim, *p.gateway, *p.embedder, *p.reranker);
      std::string path = out_path(opts, "run_" + query.id + ".jsonl");
      record.save(path);
      std::cout << "query: " << query.id << "\nspent: " << record.total_spent
                << "\nanswer: " << record.final_answer << "\nrecord: " << path << '\n';
      return 0;
    }

    if (exp_cmd->parsed()) {
      ExperimentSpec spec;
      spec.kind = experiment_kind_from_name(exp_kind);
      spec.parameters = experiment_params_from_config(opts, exp_kind);
      if (!exp_params_inline.empty()) {
        json overrides = json::parse(exp_params_inline);
        for (const auto& [key, value] : overrides.items()) spec.parameters[key] = value;
      }
      spec.question_ids = exp_questions;
      spec.repetitions = exp_repetitions;
      spec.seed = sim.seed;
      spec.validate();

      Corpus corpus = load_corpus(exp_corpus);
      ExperimentContext ctx;
      ctx.corpus = &corpus;
      ctx.queries = load_queries(exp_queries, corpus);
      if (!exp_paraphrases.empty()) ctx.paraphrases = load_paraphrases(exp_paraphrases);
      ctx.sim = sim;
      Providers p = make_providers(sim);
      ctx.gateway = p.gateway.get();
      ctx.embedder = p.embedder.get();
      ctx.reranker = p.reranker.get();

      std::vector<json> rows = run_experiment(spec, ctx);
      std::string path = out_path(opts, "results_" + exp_kind + ".jsonl");
      save_results(rows, path);
      std::cout << "wrote " << rows.size() << " trial rows to " << path << '\n';
      return 0;
    }

    if (elo_cmd->parsed()) {
      // Accepts either a pure match file or an experiment results file with
      // mixed row types; only "match" rows feed the tournament.
      std::vector<MatchResult> matches;
      for (const json& row : load_results(elo_matches)) {
        if (row.contains("row") && row.value("row", "") != "match") continue;
        if (!row.contains("contestant_a")) continue;
        MatchResult m;
        m.contestant_a = row.at("contestant_a").get<std::string>();
        m.contestant_b = row.at("contestant_b").get<std::string>();
        m.winner = row.at("winner").get<std::string>()[0];
        m.question_id = row.value("question_id", "");
        matches.push_back(std::move(m));
      }
      EloReport elo = elo_tournament(matches, elo_orderings, sim.seed, elo_k);
      std::cout << "Elo ratings (mean +/- std over " << elo_orderings << " orderings, K=" << elo_k
                << "):\n";
      for (const auto& [contestant, stats] : elo.ratings) {
        std::cout << "  " << contestant << ": " << stats.mean << " +/- " << stats.stddev << '\n';
      }
      return 0;
    }

    if (report_cmd->parsed()) {
      auto rows = load_results(report_results);
      ReportFormat format =
          report_format == "plotdata" ? ReportFormat::PlotData : ReportFormat::Table;
      std::string text = report(rows, format);
      std::string path = out_path(opts, report_format == "plotdata" ? "report.tsv" : "report.txt");
      std::ofstream out(path);
      out << text;
      std::cout << text;
      std::cout << "report written to " << path << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

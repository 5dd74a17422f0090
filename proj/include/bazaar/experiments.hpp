#pragma once

#include <map>
#include <string>
#include <vector>

#include "bazaar/engine.hpp"
#include "bazaar/evaluation.hpp"

namespace bazaar {

enum class ExperimentKind {
  RationalSamePrice,
  RationalDiffPrice,
  PriceSweep,
  PositionalBias,
  BudgetSweep,
  InspectionCompare,
  ModelCompare,
};

const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::RationalSamePrice;
  json parameters = json::object();       // kind-specific, schema-checked
  std::vector<std::string> question_ids;  // empty = all loaded queries
  int repetitions = 1;
  std::uint64_t seed = 0;

  // Throws on unknown parameters or out-of-schema values, before any spend.
  void validate() const;
};

// Pre-generated paraphrase pairs for the rational-choice experiments;
// line-delimited {query_id, paraphrases: [a, b]}.
std::map<std::string, std::vector<std::string>> load_paraphrases(const std::string& path);

struct ExperimentContext {
  const Corpus* corpus = nullptr;
  std::vector<QuerySpec> queries;
  std::map<std::string, std::vector<std::string>> paraphrases;
  SimConfig sim;
  ChatProvider* gateway = nullptr;
  EmbeddingClient* embedder = nullptr;
  RerankClient* reranker = nullptr;
};

// One JSON row per trial; every row carries (seed, config_digest) so any
// single trial can be replayed.
std::vector<json> run_experiment(const ExperimentSpec& spec, ExperimentContext& ctx);

void save_results(const std::vector<json>& rows, const std::string& path);
std::vector<json> load_results(const std::string& path);

enum class ReportFormat { Table, PlotData };

// Aggregates a results file into demand curves, position acceptance rates,
// inspection deltas, Elo tables and win matrices, per the kinds present.
std::string report(const std::vector<json>& rows, ReportFormat format);

}  // namespace bazaar

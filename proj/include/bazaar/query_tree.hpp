#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bazaar/corpus.hpp"
#include "bazaar/gateway.hpp"

namespace bazaar {

struct QueryNode {
  int id = 0;
  std::string question;
  int depth = 0;
  std::optional<std::string> preliminary_answer;
  std::optional<std::string> refined_answer;
  std::vector<std::string> purchased_quotes;
  std::vector<int> children;
  bool answer_flagged = false;  // set when tag parsing failed after retry
};

class QueryTree {
 public:
  explicit QueryTree(const std::string& root_question, int max_depth = 3);

  QueryNode& node(int id);
  const QueryNode& node(int id) const;
  QueryNode& root() { return node(0); }
  const QueryNode& root() const { return node(0); }

  // Child depth is parent depth + 1; throws past max_depth.
  int add_child(int parent_id, const std::string& question);

  int size() const { return static_cast<int>(nodes_.size()); }
  int max_depth() const { return max_depth_; }
  const std::vector<QueryNode>& nodes() const { return nodes_; }

 private:
  std::vector<QueryNode> nodes_;
  int max_depth_;
};

// Renders the synthesis template over the purchased passages and extracts
// the tagged answer. One retry, then a flagged empty answer.
struct SynthesisResult {
  std::string answer;
  bool flagged = false;
};
SynthesisResult synthesize_answer(const std::string& question,
                                  const std::vector<Passage>& purchased, ChatProvider& gateway,
                                  bool include_content = true, const std::string& model = "");

std::vector<std::string> generate_followups(const std::string& question,
                                            const std::string& current_answer,
                                            ChatProvider& gateway, const std::string& model = "");

// Market interaction for one node, supplied by the engine: post a tender for
// the question, gather and decide quotes, synthesize a preliminary answer.
struct NodeOutcome {
  std::string preliminary_answer;
  std::vector<std::string> purchased_quote_ids;
  bool flagged = false;
};
using NodeProcessor = std::function<NodeOutcome(const std::string& question)>;

// Generates follow-ups for an answered node and recursively processes each
// child in generation order, honoring depth, fan-out, node-cap and budget
// stops. Returns the ids of the direct children created.
std::vector<int> expand_node(int node_id, QueryTree& tree, ChatProvider& gateway,
                             const NodeProcessor& process, int max_followups, int node_cap,
                             const std::function<Credits()>& balance,
                             const std::string& model = "");

// Bottom-up post-order refinement; leaves keep their preliminary answer,
// internal nodes run the two-turn refinement over child question/answer
// pairs. Returns the root's refined answer. `on_visit`, when set, observes
// the traversal order.
std::string refine_tree(QueryTree& tree, ChatProvider& gateway, const std::string& model = "",
                        const std::function<void(const QueryNode&)>& on_visit = {});

}  // namespace bazaar

#include "bazaar/query_tree.hpp"

namespace bazaar {

QueryTree::QueryTree(const std::string& root_question, int max_depth) : max_depth_(max_depth) {
  if (max_depth_ < 0) throw BazaarError("max_depth must be non-negative");
  QueryNode root;
  root.id = 0;
  root.question = root_question;
  root.depth = 0;
  nodes_.push_back(std::move(root));
}

QueryNode& QueryTree::node(int id) {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) {
    throw BazaarError("unknown query node: " + std::to_string(id));
  }
  return nodes_[id];
}

const QueryNode& QueryTree::node(int id) const {
  return const_cast<QueryTree*>(this)->node(id);
}

int QueryTree::add_child(int parent_id, const std::string& question) {
  QueryNode& parent = node(parent_id);
  if (parent.depth >= max_depth_) {
    throw BazaarError("cannot expand node past max_depth");
  }
  QueryNode child;
  child.id = static_cast<int>(nodes_.size());
  child.question = question;
  child.depth = parent.depth + 1;
  parent.children.push_back(child.id);
  nodes_.push_back(std::move(child));
  return nodes_.back().id;
}

SynthesisResult synthesize_answer(const std::string& question,
                                  const std::vector<Passage>& purchased, ChatProvider& gateway,
                                  bool include_content, const std::string& model) {
  json quotes = json::array();
  for (const Passage& p : purchased) {
    std::string block = include_content
                            ? p.content
                            : "Paper: " + p.paper_title + " | Section: " + p.section_title;
    quotes.push_back({{"answer_block", block}});
  }
  ChatRequest request = render("answer_synthesis", json{{"question", question}, {"quotes", quotes}},
                               model);
  std::string reply = gateway.complete(request);
  try {
    return {parse_tagged_answer(reply), false};
  } catch (const ParseError&) {
    ChatRequest retry = request;
    retry.messages.push_back({Role::Assistant, reply});
    retry.messages.push_back(
        {Role::User, "Please repeat your answer enclosed in <answer> and </answer> tags."});
    reply = gateway.complete(retry);
    try {
      return {parse_tagged_answer(reply), false};
    } catch (const ParseError&) {
      return {"", true};
    }
  }
}

std::vector<std::string> generate_followups(const std::string& question,
                                            const std::string& current_answer,
                                            ChatProvider& gateway, const std::string& model) {
  ChatRequest request = render(
      "followup", json{{"question", question}, {"current_answer", current_answer}}, model);
  return parse_followup_questions(gateway.complete(request));
}

std::vector<int> expand_node(int node_id, QueryTree& tree, ChatProvider& gateway,
                             const NodeProcessor& process, int max_followups, int node_cap,
                             const std::function<Credits()>& balance, const std::string& model) {
  QueryNode& node = tree.node(node_id);
  if (!node.preliminary_answer) throw BazaarError("expand_node before preliminary answer");
  if (node.depth >= tree.max_depth()) return {};
  if (balance() <= 0) return {};
  if (tree.size() >= node_cap) return {};

  auto followups = generate_followups(node.question, *node.preliminary_answer, gateway, model);
  if (static_cast<int>(followups.size()) > max_followups) followups.resize(max_followups);

  std::vector<int> created;
  // Children expand sequentially in generation order; budget is a shared
  // resource, first come first served.
  for (const std::string& question : followups) {
    if (tree.size() >= node_cap) break;
    if (balance() <= 0) break;
    int child_id = tree.add_child(node_id, question);
    created.push_back(child_id);
    NodeOutcome outcome = process(question);
    QueryNode& child = tree.node(child_id);
    child.preliminary_answer = outcome.preliminary_answer;
    child.purchased_quotes = outcome.purchased_quote_ids;
    child.answer_flagged = outcome.flagged;
    expand_node(child_id, tree, gateway, process, max_followups, node_cap, balance, model);
  }
  return created;
}

std::string refine_tree(QueryTree& tree, ChatProvider& gateway, const std::string& model,
                        const std::function<void(const QueryNode&)>& on_visit) {
  // Post-order walk; children strictly before parents.
  std::function<void(int)> visit = [&](int id) {
    for (int child : tree.node(id).children) visit(child);
    QueryNode& node = tree.node(id);
    if (!node.preliminary_answer) throw BazaarError("refine_tree before preliminary answers");
    if (node.children.empty()) {
      node.refined_answer = node.preliminary_answer;
    } else {
      json followups = json::array();
      for (int child : node.children) {
        const QueryNode& c = tree.node(child);
        followups.push_back(
            {{"question", c.question}, {"answer", c.refined_answer.value_or("")}});
      }
      json slots{{"question", node.question},
                 {"original_answer", *node.preliminary_answer},
                 {"follow_up_questions", followups}};
      ChatRequest step1 = render("refinement_step1", slots, model);
      std::string rationale = gateway.complete(step1);
      slots["rationale"] = rationale;
      ChatRequest step2 = render("refinement_step2", slots, model);
      std::string reply = gateway.complete(step2);
      try {
        node.refined_answer = parse_tagged_answer(reply);
      } catch (const ParseError&) {
        ChatRequest retry = step2;
        retry.messages.push_back({Role::Assistant, reply});
        retry.messages.push_back(
            {Role::User, "Please repeat your answer enclosed in <answer> and </answer> tags."});
        reply = gateway.complete(retry);
        try {
          node.refined_answer = parse_tagged_answer(reply);
        } catch (const ParseError&) {
          node.refined_answer = node.preliminary_answer;  // flagged fallback
          node.answer_flagged = true;
        }
      }
    }
    if (on_visit) on_visit(node);
  };
  visit(0);
  return tree.root().refined_answer.value_or("");
}

}  // namespace bazaar

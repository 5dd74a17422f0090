#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bazaar/common.hpp"

namespace bazaar {

enum class Role { System, User, Assistant };

const char* role_name(Role role);

struct Message {
  Role role;
  std::string content;
};

struct ChatRequest {
  std::string template_id;
  std::vector<Message> messages;  // first message is always system
  double temperature = 0.0;
  int max_tokens = 0;
  std::string model;
};

enum class Verdict { Buy, Pass };

// Template ids:
//   quote_debate, quote_direct, quote_cot  — purchase decision prompts
//   answer_synthesis                       — answer from purchased passages
//   followup                               — follow-up question generation
//   refinement_step1, refinement_step2     — two-turn answer refinement
//   closed_book                            — question answered from priors
//   evaluator                              — pairwise answer judging
//
// Slots are a JSON object; list-valued slots ("options",
// "follow_up_questions") expand with the templates' numbering.
ChatRequest render(const std::string& template_id, const json& slots,
                   const std::string& model = "");

std::vector<std::string> template_ids();

// Digest keying mock-script lookups: sha256 over template id + rendered body.
std::string prompt_digest(const ChatRequest& request);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  int call_count() const { return calls_; }

 protected:
  void count_call() { ++calls_; }

 private:
  std::atomic<int> calls_{0};
};

struct MockScript {
  // key: template id + '\n' + digest; digest "*" matches any prompt of that
  // template.
  std::map<std::string, std::string> responses;
  std::optional<std::string> default_response;

  void add(const std::string& template_id, const std::string& digest, std::string response);
};

MockScript load_mock_script(const std::string& path);

class MockProvider : public ChatProvider {
 public:
  explicit MockProvider(MockScript script) : script_(std::move(script)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  MockScript script_;
};

// Adapter for test-local providers built from a lambda.
class FnProvider : public ChatProvider {
 public:
  explicit FnProvider(std::function<std::string(const ChatRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override {
    count_call();
    return fn_(request);
  }

 private:
  std::function<std::string(const ChatRequest&)> fn_;
};

struct LiveProviderConfig {
  std::string base_url = "http://localhost:8000";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model = "gpt-4";
  int max_retries = 3;
  int backoff_ms = 500;
};

// OpenAI-compatible /v1/chat/completions client with retry and backoff.
class LiveProvider : public ChatProvider {
 public:
  explicit LiveProvider(LiveProviderConfig config) : config_(std::move(config)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  LiveProviderConfig config_;
};

// --- Structured-output parsers -------------------------------------------

// Extracts one Buy/Pass per option index 1..n from the final VERDICT block.
std::vector<Verdict> parse_verdict(const std::string& text, int n_options);

// Extracts the student letter from the evaluator's closing verdict line.
char parse_eval_verdict(const std::string& text);

// Content of the last well-formed <answer>...</answer> pair, trimmed.
std::string parse_tagged_answer(const std::string& text);

// Every "FOLLOW-UP QUESTION:" line, in order; may be empty.
std::vector<std::string> parse_followup_questions(const std::string& text);

}  // namespace bazaar

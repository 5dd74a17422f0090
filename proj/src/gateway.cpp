#include "bazaar/gateway.hpp"

#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace bazaar {

const char* role_name(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "unknown";
}

namespace {

std::string require_slot(const json& slots, const char* name) {
  if (!slots.contains(name)) throw BazaarError(std::string("missing slot: ") + name);
  const json& v = slots[name];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os << v.get<double>();
    return os.str();
  }
  throw BazaarError(std::string("slot is not a scalar: ") + name);
}

const json& require_list(const json& slots, const char* name) {
  if (!slots.contains(name) || !slots[name].is_array()) {
    throw BazaarError(std::string("missing slot: ") + name);
  }
  return slots[name];
}

std::string options_block(const json& options) {
  std::string block = "---";
  int index = 1;
  for (const json& opt : options) {
    block += "\nOption " + std::to_string(index) + ": " + require_slot(opt, "answer_block") + "\n";
    ++index;
  }
  block += "---";
  return block;
}

std::string prices_block(const json& options) {
  std::string block;
  int index = 1;
  for (const json& opt : options) {
    block += "Option " + std::to_string(index) + " costs $" + require_slot(opt, "price") + "\n";
    ++index;
  }
  return block;
}

std::string verdict_format_block(size_t n_options) {
  std::string block;
  for (size_t i = 1; i <= n_options; ++i) {
    block += "Option " + std::to_string(i) + ": <Buy or Pass>\n";
  }
  return block;
}

constexpr const char* kDebateSystem =
    "Bobby William and Michael Burry are employed by a company that specializes in acquiring "
    "information. They are trying to answer a question by purchasing information from an "
    "information market. In this market, vendors sell pieces of information at a price.\n"
    "\n"
    "Bobby wants to do a really good job at answering the question. This entails knowing as much "
    "as possible.\n"
    "\n"
    "Michael, on the other hand, is financially responsible. Michael wants to make sure that they "
    "don't waste money buying unnecessary information. For instance, if two pieces of information "
    "offer the same insight, then Michael would go for the cheaper one.";

constexpr const char* kBuyerSystemPrefix =
    "You are employed by a company that specializes in acquiring information. You are trying to "
    "answer a question by purchasing information from an information market. In this market, "
    "vendors sell pieces of information at a price. Do not exceed the budget of $";

constexpr const char* kSynthesisSystem =
    "You are a helpful assistant, and you excel in following instructions.\n"
    "\n"
    "Your task is to answer a question to the best of your ability. To help you in that task, you "
    "will be given some passages that might contain useful information.\n"
    "\n"
    "It is important that your answer is formulated in a simple and understandable way.";

constexpr const char* kFollowupSystem =
    "Bobby and Michael are employed at a company that specializes in acquiring and verifying "
    "information.\n"
    "\n"
    "Their supervisors have given them a question and an answer that their peers have produced. "
    "Their task is to decide if the provided answer adequately answers the question or whether "
    "things are still unclear. If the provided answer does not conclusively answer the question, "
    "they must come up with follow up questions that would enrich the answer. The follow up "
    "questions must be to the-point.\n"
    "\n"
    "Bobby wants the answer to cover enough ground to satisfy the client's curiosity. Michael is "
    "mindful about the risk of confusing the client by providing information that is not relevant "
    "to the question. Together, they must try to figure out whether the client wants a "
    "to-the-point answer or a more elaborate answer. If the client's question is general and "
    "warrants a more elaborate answer, it makes more sense to ask follow-up questions. In the "
    "case that the client's question is specific, then the follow-up questions must only be asked "
    "if the currently available answer is not conclusive.\n"
    "\n"
    "Note that follow up questions should only be asked if there is a need for concrete "
    "information that is missing from the provided answer or if the provided answer is missing "
    "crucial details. In other words, Bobby and Michael are not necessarily required to ask a "
    "follow up question.";

constexpr const char* kRefinementSystem =
    "You are a helpful assistant, and you excel in following instructions.\n"
    "\n"
    "In this session, you will be given a question, and an initial answer. The initial answer was "
    "lacking in some aspects, so follow-up questions were asked to improve the initial answer.\n"
    "\n"
    "Your task is to refine the initial answer by incorporating the extra insights obtained from "
    "the answers to the follow-up questions. But be mindful to only include the insights that "
    "make the original answer better, and ignore the rest. The refined answer should directly "
    "answer the original question.";

constexpr const char* kRefinementUser2 =
    "Now that it's time to write down the refined answer, please do not explicitly mention the "
    "passages, but focus on answering the question. Do not use your world knowledge, but only the "
    "information that is available in the original answer and the answers to relevant follow-up "
    "questions.\n"
    "\n"
    "It's *very important* that you enclose your answer with <answer> and </answer> tags.\n"
    "\n"
    "For example, if your answer is \"REFINED ANSWER GOES HERE\", then you should output "
    "<answer>REFINED ANSWER GOES HERE</answer>.\n"
    "\n"
    "If you don't use the <answer> and </answer> tags, I will not be able to parse it and the "
    "whole effort will be wasted.";

constexpr const char* kClosedBookSystem =
    "You are an intelligent AI assistant. You will be given a question. Your task is to answer it "
    "to the best of your ability.";

constexpr const char* kEvaluatorSystem =
    "Michael and Bobby are two machine learning professors grading exams.\n"
    "\n"
    "They have a question, and two answers to those questions from two students. In addition, "
    "they also have the gold standard answer. Their task is to determine which of the two answers "
    "does a better job at answering the question.\n"
    "\n"
    "A good answer addresses the question directly with clarity and is easy to understand. It "
    "does not go off on tangents, but surfaces information relevant to the question.\n"
    "\n"
    "You will simulate a heated debate between Michael and Bobby as they deliberate on this. At "
    "the end of the argument, they converge to a fair verdict. The verdict must not be a tie and "
    "it must be printed as:\n"
    "\n"
    "VERDICT: Better answer from student <A or B>";

std::string quote_selection_user(const json& slots, const std::string& middle) {
  const json& options = require_list(slots, "options");
  std::string body = "The question is \"" + require_slot(slots, "question") + "?\"\n\n";
  body += "Here are your options.\n";
  body += options_block(options);
  body += "\n\n";
  body += prices_block(options);
  body += middle;
  body += "VERDICT:\n\n";
  body += verdict_format_block(options.size());
  return body;
}

}  // namespace

ChatRequest render(const std::string& template_id, const json& slots, const std::string& model) {
  ChatRequest req;
  req.template_id = template_id;
  req.model = model;
  req.temperature = 0.0;

  if (template_id == "quote_debate") {
    req.max_tokens = 2048;
    std::string middle =
        "Together, Bobby and Michael must decide which options to buy and which ones to not buy "
        "with their budget of $" +
        require_slot(slots, "balance") +
        ". Simulate a constructive argument between Bobby and Michael, where they debate about "
        "the usefulness of the information provided in each option towards answering the "
        "question, and whether their price is worth paying.\n"
        "\n"
        "Note that Bobby and Michael may choose to buy any number of options, or none at all. At "
        "the end of the argument, they must arrive at a verdict. This verdict must be printed "
        "as:\n\n";
    req.messages = {{Role::System, kDebateSystem},
                    {Role::User, quote_selection_user(slots, middle)}};
  } else if (template_id == "quote_direct") {
    req.max_tokens = 2048;
    req.messages = {
        {Role::System, kBuyerSystemPrefix + require_slot(slots, "balance") + "."},
        {Role::User, quote_selection_user(slots, "Your verdict must be printed as:\n\n")}};
  } else if (template_id == "quote_cot") {
    req.max_tokens = 2048;
    std::string middle =
        "\nFirst, you will write your thoughts about each option, including its price and how "
        "well the content answers the question. Then you will write a paragraph summarizing your "
        "thoughts and making your verdict.\n"
        "Your verdict must be printed as:\n\n";
    req.messages = {{Role::System, kBuyerSystemPrefix + require_slot(slots, "balance") + "."},
                    {Role::User, quote_selection_user(slots, middle)}};
  } else if (template_id == "answer_synthesis") {
    req.max_tokens = 1024;
    const json& quotes = require_list(slots, "quotes");
    std::string question = require_slot(slots, "question");
    std::string passages = "---";
    int index = 1;
    for (const json& quote : quotes) {
      passages +=
          "\n" + std::to_string(index) + ". " + require_slot(quote, "answer_block") + "\n";
      ++index;
    }
    passages += "---";
    std::string body =
        "The question is \"" + question + "?\"\n\n"
        "Here are some passages that you might find helpful.\n\n" +
        passages +
        "\n\nYou'll solve your task step-by-step.\n"
        "\n"
        "First, you'll start by discussing the content of all passages in the context of the "
        "question, which is \"" +
        question +
        "\".\n"
        "\n"
        "In particular, you will ask yourself which passages help you answer this question and to "
        "what extent. It is possible that multiple passages help you towards answering the "
        "question. But it is also possible that some passages are not helpful at all, and you "
        "should ignore them. Don't be afraid to express uncertainty if you are unsure about "
        "something.\n"
        "\n"
        "Next, you will formulate your answer. The answer should not have explicit references to "
        "the passages. Instead, it should be a standalone answer to the question.\n"
        "\n"
        "Finally, note that it is *very important* that you enclose your answer with <answer> and "
        "</answer> tags. If you don't use the <answer> and </answer> tags, I will not be able to "
        "parse it and the whole effort will be wasted.";
    req.messages = {{Role::System, kSynthesisSystem}, {Role::User, body}};
  } else if (template_id == "followup") {
    req.max_tokens = 1024;
    std::string body =
        "The question is: " + require_slot(slots, "question") +
        "\n\n"
        "The currently available answer is: " +
        require_slot(slots, "current_answer") +
        "\n\n"
        "Bobby and Michael will now argue about whether they should ask follow-up questions "
        "taking in to account the provided question and the currently available answer.\n"
        "\n"
        "If they decide to ask follow up questions, they should be printed as:\n"
        "FOLLOW-UP QUESTION: <follow up question goes here>\n"
        "FOLLOW-UP QUESTION: <follow up question goes here>\n"
        "... and so on.";
    req.messages = {{Role::System, kFollowupSystem}, {Role::User, body}};
  } else if (template_id == "refinement_step1" || template_id == "refinement_step2") {
    req.max_tokens = template_id == "refinement_step1" ? 2048 : 512;
    const json& followups = require_list(slots, "follow_up_questions");
    std::string qa_block;
    int index = 1;
    for (const json& fu : followups) {
      qa_block += "Question " + std::to_string(index) + ": " + require_slot(fu, "question") +
                  "\nAnswer: " + require_slot(fu, "answer") + "\n";
      ++index;
    }
    std::string body =
        "The original question is: " + require_slot(slots, "question") +
        "\n\n"
        "The initial answer is: " +
        require_slot(slots, "original_answer") +
        "\n\n"
        "Here are the follow-up questions that were asked, and the corresponding answers.\n"
        "---\n" +
        qa_block +
        "---\n"
        "\n"
        "Given these follow-up questions, your ultimate task is to refine the initial answer.\n"
        "\n"
        "But before you get to formulating the refined answer, please think out loud about what "
        "you need to do. Ask yourself whether the question is general or specific. If it is "
        "general, then you need to provide a more comprehensive answer. If it is specific, then "
        "you need to provide a more to-the-point answer.\n"
        "\n"
        "After that, please summarize the answers to the follow-up question in the context of the "
        "original answer, keeping only the information that is on-topic and useful while ignoring "
        "the rest. Note that some questions might be off-topic and not useful, and it's important "
        "that you ignore these distractor questions.";
    req.messages = {{Role::System, kRefinementSystem}, {Role::User, body}};
    if (template_id == "refinement_step2") {
      req.messages.push_back({Role::Assistant, require_slot(slots, "rationale")});
      req.messages.push_back({Role::User, kRefinementUser2});
    }
  } else if (template_id == "closed_book") {
    req.max_tokens = 512;
    req.messages = {{Role::System, kClosedBookSystem},
                    {Role::User, require_slot(slots, "question")}};
  } else if (template_id == "evaluator") {
    req.max_tokens = 1024;
    std::string body = "Question: " + require_slot(slots, "question") +
                       "\n\n"
                       "Answer from student A: " +
                       require_slot(slots, "answer_a") +
                       "\n\n"
                       "Answer from student B: " +
                       require_slot(slots, "answer_b") +
                       "\n\n"
                       "Gold standard answer: " +
                       require_slot(slots, "answer_gold");
    req.messages = {{Role::System, kEvaluatorSystem}, {Role::User, body}};
  } else {
    throw BazaarError("unknown template id: " + template_id);
  }
  return req;
}

std::vector<std::string> template_ids() {
  return {"quote_debate",     "quote_direct",     "quote_cot",   "answer_synthesis", "followup",
          "refinement_step1", "refinement_step2", "closed_book", "evaluator"};
}

std::string prompt_digest(const ChatRequest& request) {
  std::string material = request.template_id;
  for (const Message& m : request.messages) {
    material += '\n';
    material += role_name(m.role);
    material += ':';
    material += m.content;
  }
  return sha256_hex(material);
}

void MockScript::add(const std::string& template_id, const std::string& digest,
                     std::string response) {
  responses[template_id + "\n" + digest] = std::move(response);
}

MockScript load_mock_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BazaarError("cannot open mock script: " + path);
  MockScript script;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw BazaarError(path + ":" + std::to_string(line_no) + ": malformed mock record");
    }
    if (record.contains("default")) {
      script.default_response = record["default"].get<std::string>();
      continue;
    }
    script.add(record.at("template").get<std::string>(), record.value("digest", "*"),
               record.at("response").get<std::string>());
  }
  return script;
}

std::string MockProvider::complete(const ChatRequest& request) {
  count_call();
  std::string digest = prompt_digest(request);
  auto exact = script_.responses.find(request.template_id + "\n" + digest);
  if (exact != script_.responses.end()) return exact->second;
  auto any = script_.responses.find(request.template_id + "\n*");
  if (any != script_.responses.end()) return any->second;
  if (script_.default_response) return *script_.default_response;
  throw BazaarError("mock script has no response for template '" + request.template_id +
                    "', digest " + digest);
}

std::string LiveProvider::complete(const ChatRequest& request) {
  count_call();
  json body{{"model", request.model.empty() ? config_.model : request.model},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
  body["messages"] = json::array();
  for (const Message& m : request.messages) {
    body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }

  httplib::Client client(config_.base_url);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    }
    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BazaarError("chat endpoint returned status " + std::to_string(res->status) + ": " +
                        res->body);
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
      throw BazaarError("malformed chat completion response");
    }
    return reply["choices"][0]["message"]["content"].get<std::string>();
  }
  throw BazaarError("chat completion failed after retries: " + last_error);
}

namespace {

const std::regex kVerdictBlock(R"(verdict\s*:)", std::regex::icase);

}  // namespace

std::vector<Verdict> parse_verdict(const std::string& text, int n_options) {
  if (n_options < 1) throw ParseError("n_options must be >= 1");
  auto begin = std::sregex_iterator(text.begin(), text.end(), kVerdictBlock);
  auto end = std::sregex_iterator();
  if (begin == end) throw ParseError("no VERDICT block found");
  size_t block_start = 0;
  for (auto it = begin; it != end; ++it) {
    block_start = static_cast<size_t>(it->position()) + it->length();  // last block wins
  }
  std::string block = text.substr(block_start);

  std::vector<Verdict> verdicts;
  for (int i = 1; i <= n_options; ++i) {
    std::regex option(R"(option\s*)" + std::to_string(i) + R"(\s*:\s*(buy|pass))",
                      std::regex::icase);
    std::smatch match;
    if (!std::regex_search(block, match, option)) {
      throw ParseError("VERDICT block missing option " + std::to_string(i));
    }
    verdicts.push_back(to_lower(match[1].str()) == "buy" ? Verdict::Buy : Verdict::Pass);
  }
  return verdicts;
}

char parse_eval_verdict(const std::string& text) {
  static const std::regex pattern(R"(better\s+answer\s+from\s+student\s*:?\s*([AB]))",
                                  std::regex::icase);
  auto begin = std::sregex_iterator(text.begin(), text.end(), pattern);
  auto end = std::sregex_iterator();
  if (begin == end) throw ParseError("no evaluator verdict found");
  char letter = 0;
  for (auto it = begin; it != end; ++it) {
    letter = static_cast<char>(std::toupper(static_cast<unsigned char>(it->str(1)[0])));
  }
  return letter;
}

std::string parse_tagged_answer(const std::string& text) {
  std::string lower = to_lower(text);
  size_t close = lower.rfind("</answer>");
  if (close == std::string::npos) throw ParseError("no </answer> tag found");
  size_t open = lower.rfind("<answer>", close);
  if (open == std::string::npos) throw ParseError("no <answer> tag before </answer>");
  size_t content_begin = open + std::string("<answer>").size();
  return trim(text.substr(content_begin, close - content_begin));
}

std::vector<std::string> parse_followup_questions(const std::string& text) {
  static const std::regex marker(R"(^\s*follow[\s-]*up\s+question\s*:\s*(.*)$)",
                                 std::regex::icase);
  std::vector<std::string> questions;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::smatch match;
    if (std::regex_match(line, match, marker)) {
      std::string question = trim(match[1].str());
      if (!question.empty()) questions.push_back(std::move(question));
    }
  }
  return questions;
}

}  // namespace bazaar

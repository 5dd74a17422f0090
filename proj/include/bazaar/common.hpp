#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bazaar {

using json = nlohmann::json;

// Integer market credits. All prices, budgets and balances are integral.
using Credits = std::int64_t;

class BazaarError : public std::runtime_error {
 public:
  explicit BazaarError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public BazaarError {
 public:
  explicit ParseError(const std::string& what) : BazaarError(what) {}
};

// Lowercase alphanumeric tokenization shared by BM25 and the mock scorers.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

// Hex-encoded SHA-256; keys mock-script lookups so template drift fails loudly.
std::string sha256_hex(std::string_view data);

// Splitmix64; used to derive independent sub-seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace bazaar

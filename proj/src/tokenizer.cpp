#include "tbw/tokenizer.hpp"

#include "tbw/error.hpp"

namespace tbw {

namespace {

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char to_lower_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      current += to_lower_ascii(c);
    } else if (!current.empty()) {
      seq.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) seq.tokens.push_back(std::move(current));
  return seq;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw Error(ErrorCode::duplicate_token, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace tbw

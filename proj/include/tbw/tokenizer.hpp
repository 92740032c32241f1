#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tbw {

enum class TokenSource { generated, ingested };

struct TokenSequence {
  std::vector<std::string> tokens;
  TokenSource source = TokenSource::ingested;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

/// Reference tokenizer: ASCII-lowercases and splits on maximal runs of
/// characters outside [a-z0-9]. Never fails; empty input gives an empty sequence.
TokenSequence tokenize(std::string_view text);

// Space-joined tokens; tokenize(detokenize(s)) == s for tokenizer output.
std::string detokenize(std::span<const std::string> tokens);

/// Ordered token list with O(log n) lookup.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::optional<std::size_t> index_of(std::string_view token) const;
  bool contains(std::string_view token) const { return index_of(token).has_value(); }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace tbw

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbw/tokenizer.hpp"

namespace tbw {

using LogitVector = std::vector<double>;

inline constexpr std::string_view kDefaultStartSymbol = "<s>";

/// Laplace-smoothed bigram model over a fixed vocabulary.
///
/// P(w_j | w_i) = (count(i, j) + alpha) / (row_count(i) + alpha * |V|).
/// The reserved start context (index |V|) always has a uniform next-token row.
class ToyLM {
 public:
  ToyLM(Vocabulary vocab, double alpha, std::string start_symbol = std::string(kDefaultStartSymbol));

  const Vocabulary& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  double alpha() const noexcept { return alpha_; }
  const std::string& start_symbol() const noexcept { return start_symbol_; }
  // Context index of the start symbol.
  std::size_t start_index() const noexcept { return vocab_.size(); }

  std::uint64_t bigram_count(std::size_t prev, std::size_t next) const;
  std::uint64_t row_count(std::size_t prev) const;
  std::uint64_t unigram_count(std::size_t token) const { return unigram_.at(token); }

  double probability(std::size_t prev, std::size_t next) const;

  // log P(. | prev) in vocabulary order. `prev` may be start_index().
  LogitVector next_logits(std::size_t prev) const;
  // Throws ErrorCode::unknown_token unless `prev` is in the vocabulary or is the start symbol.
  LogitVector next_logits(std::string_view prev) const;

  // Resolves a context token; unknown tokens map to nullopt.
  std::optional<std::size_t> context_index(std::string_view token) const;

  void add_bigram(std::size_t prev, std::size_t next);
  void add_unigram(std::size_t token) { ++unigram_.at(token); }

 private:
  Vocabulary vocab_;
  double alpha_;
  std::string start_symbol_;
  // Sparse rows sorted by next-token index.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> rows_;
  std::vector<std::uint64_t> row_totals_;
  std::vector<std::uint64_t> unigram_;
};

/// Counts every adjacent pair whose tokens are both in `vocab`; pairs touching
/// an out-of-vocabulary token are skipped.
ToyLM train_bigram(std::span<const TokenSequence> corpus, const std::vector<std::string>& vocab,
                   double alpha, std::string start_symbol = std::string(kDefaultStartSymbol));

}  // namespace tbw

#include "tbw/toy_lm.hpp"

#include <algorithm>
#include <cmath>

#include "tbw/error.hpp"

namespace tbw {

ToyLM::ToyLM(Vocabulary vocab, double alpha, std::string start_symbol)
    : vocab_(std::move(vocab)), alpha_(alpha), start_symbol_(std::move(start_symbol)) {
  if (vocab_.empty()) {
    throw Error(ErrorCode::empty_vocabulary, "language model vocabulary is empty");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw Error(ErrorCode::invalid_argument, "alpha must be finite and > 0");
  }
  if (vocab_.contains(start_symbol_)) {
    throw Error(ErrorCode::invalid_argument,
                "start symbol '" + start_symbol_ + "' collides with a vocabulary token");
  }
  rows_.resize(vocab_.size());
  row_totals_.assign(vocab_.size(), 0);
  unigram_.assign(vocab_.size(), 0);
}

std::uint64_t ToyLM::bigram_count(std::size_t prev, std::size_t next) const {
  if (prev >= vocab_.size()) return 0;
  const auto& row = rows_[prev];
  auto it = std::lower_bound(row.begin(), row.end(), static_cast<std::uint32_t>(next),
                             [](const auto& entry, std::uint32_t key) { return entry.first < key; });
  return (it != row.end() && it->first == next) ? it->second : 0;
}

std::uint64_t ToyLM::row_count(std::size_t prev) const {
  return prev < vocab_.size() ? row_totals_[prev] : 0;
}

double ToyLM::probability(std::size_t prev, std::size_t next) const {
  if (next >= vocab_.size() || prev > vocab_.size()) {
    throw Error(ErrorCode::index_out_of_range, "token index out of range");
  }
  const double v = static_cast<double>(vocab_.size());
  return (static_cast<double>(bigram_count(prev, next)) + alpha_) /
         (static_cast<double>(row_count(prev)) + alpha_ * v);
}

LogitVector ToyLM::next_logits(std::size_t prev) const {
  if (prev > vocab_.size()) {
    throw Error(ErrorCode::index_out_of_range, "context index out of range");
  }
  const double v = static_cast<double>(vocab_.size());
  const double log_denom = std::log(static_cast<double>(row_count(prev)) + alpha_ * v);
  LogitVector logits(vocab_.size(), std::log(alpha_) - log_denom);
  if (prev < vocab_.size()) {
    for (const auto& [next, count] : rows_[prev]) {
      logits[next] = std::log(static_cast<double>(count) + alpha_) - log_denom;
    }
  }
  return logits;
}

std::optional<std::size_t> ToyLM::context_index(std::string_view token) const {
  if (token == start_symbol_) return start_index();
  return vocab_.index_of(token);
}

LogitVector ToyLM::next_logits(std::string_view prev) const {
  auto idx = context_index(prev);
  if (!idx) {
    throw Error(ErrorCode::unknown_token, "unknown context token '" + std::string(prev) + "'");
  }
  return next_logits(*idx);
}

void ToyLM::add_bigram(std::size_t prev, std::size_t next) {
  if (prev >= vocab_.size() || next >= vocab_.size()) {
    throw Error(ErrorCode::index_out_of_range, "bigram index out of range");
  }
  auto& row = rows_[prev];
  const auto key = static_cast<std::uint32_t>(next);
  auto it = std::lower_bound(row.begin(), row.end(), key,
                             [](const auto& entry, std::uint32_t k) { return entry.first < k; });
  if (it != row.end() && it->first == key) {
    ++it->second;
  } else {
    row.insert(it, {key, 1});
  }
  ++row_totals_[prev];
}

ToyLM train_bigram(std::span<const TokenSequence> corpus, const std::vector<std::string>& vocab,
                   double alpha, std::string start_symbol) {
  ToyLM lm(Vocabulary(vocab), alpha, std::move(start_symbol));
  for (const auto& seq : corpus) {
    std::optional<std::size_t> prev;
    for (const auto& token : seq.tokens) {
      auto idx = lm.vocab().index_of(token);
      if (idx) {
        lm.add_unigram(*idx);
        if (prev) lm.add_bigram(*prev, *idx);
      }
      prev = idx;
    }
  }
  return lm;
}

}  // namespace tbw

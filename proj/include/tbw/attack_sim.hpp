#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tbw/embedding_store.hpp"
#include "tbw/tokenizer.hpp"

namespace tbw {

/// Paraphrase-attack knobs. lexical_rate is the per-token substitution
/// probability; order_rate the per-position swap probability.
struct AttackConfig {
  double lexical_rate = 0.0;
  double order_rate = 0.0;
  double neighbor_floor = 0.5;
  std::uint64_t rng_seed = 0;

  // Throws ErrorCode::invalid_argument.
  void validate() const;
  bool operator==(const AttackConfig&) const = default;
};

/// Nearest other token (by cosine) for every vocabulary entry.
class NeighborIndex {
 public:
  explicit NeighborIndex(const EmbeddingTable& table);

  struct Neighbor {
    std::size_t index = 0;
    double similarity = -1.0;
  };

  // Empty for a single-token vocabulary.
  std::optional<Neighbor> nearest(std::size_t token_index) const;
  const EmbeddingTable& table() const noexcept { return *table_; }

 private:
  const EmbeddingTable* table_;
  std::vector<std::optional<Neighbor>> nearest_;
};

struct Substitution {
  std::size_t position = 0;
  std::string original;
  std::string replacement;
  double similarity = 0.0;
};

struct ParaphraseResult {
  TokenSequence tokens;
  std::vector<Substitution> substitutions;
  std::size_t swaps = 0;
};

/// Lexical pass then reorder pass. Each in-vocabulary token is replaced with
/// probability lexical_rate by its nearest neighbour when that neighbour's
/// similarity is at least neighbor_floor. Each position i then, with
/// probability order_rate, swaps with i+1 or i+2 (uniformly, within bounds).
ParaphraseResult paraphrase_detailed(const TokenSequence& tokens, const NeighborIndex& neighbors,
                                     const AttackConfig& config);

TokenSequence paraphrase(const TokenSequence& tokens, const NeighborIndex& neighbors,
                         const AttackConfig& config);
TokenSequence paraphrase(const TokenSequence& tokens, const EmbeddingTable& table,
                         const AttackConfig& config);

/// Output[c][s] is samples[s] attacked with configs[c], seeded from
/// (configs[c].rng_seed, s).
std::vector<std::vector<TokenSequence>> attack_sweep(std::span<const TokenSequence> samples,
                                                     std::span<const AttackConfig> configs,
                                                     const EmbeddingTable& table);

}  // namespace tbw

#include "tbw/attack_sim.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tbw/error.hpp"
#include "tbw/random.hpp"

namespace tbw {

void AttackConfig::validate() const {
  if (!(lexical_rate >= 0.0 && lexical_rate <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "lexical_rate must lie in [0, 1]");
  }
  if (!(order_rate >= 0.0 && order_rate <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "order_rate must lie in [0, 1]");
  }
  if (!(neighbor_floor >= -1.0 && neighbor_floor < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "neighbor_floor must lie in [-1, 1)");
  }
}

NeighborIndex::NeighborIndex(const EmbeddingTable& table)
    : table_(&table), nearest_(table.size()) {
  const std::size_t n = table.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = table.vector(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sim = dot(vi, table.vector(j));
      // Strict comparison keeps the lowest-index neighbour on ties.
      if (!nearest_[i] || sim > nearest_[i]->similarity) nearest_[i] = Neighbor{j, sim};
      if (!nearest_[j] || sim > nearest_[j]->similarity) nearest_[j] = Neighbor{i, sim};
    }
  }
}

std::optional<NeighborIndex::Neighbor> NeighborIndex::nearest(std::size_t token_index) const {
  return nearest_.at(token_index);
}

ParaphraseResult paraphrase_detailed(const TokenSequence& tokens, const NeighborIndex& neighbors,
                                     const AttackConfig& config) {
  config.validate();
  ParaphraseResult result;
  result.tokens = tokens;
  auto& out = result.tokens.tokens;
  Rng rng(config.rng_seed);

  for (std::size_t i = 0; i < out.size(); ++i) {
    const double draw = unit_uniform(rng);
    if (draw >= config.lexical_rate) continue;
    const auto idx = neighbors.table().index_of(out[i]);
    if (!idx) continue;
    const auto nb = neighbors.nearest(*idx);
    if (!nb || nb->similarity < config.neighbor_floor) continue;
    std::string replacement = neighbors.table().token(nb->index);
    result.substitutions.push_back({i, out[i], replacement, nb->similarity});
    out[i] = std::move(replacement);
  }

  if (out.size() >= 2) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      const double draw = unit_uniform(rng);
      const double offset_draw = unit_uniform(rng);
      if (draw >= config.order_rate) continue;
      const std::size_t max_offset = std::min<std::size_t>(2, out.size() - 1 - i);
      const std::size_t offset = 1 + static_cast<std::size_t>(offset_draw * max_offset);
      std::swap(out[i], out[i + offset]);
      ++result.swaps;
    }
  }
  return result;
}

TokenSequence paraphrase(const TokenSequence& tokens, const NeighborIndex& neighbors,
                         const AttackConfig& config) {
  return paraphrase_detailed(tokens, neighbors, config).tokens;
}

TokenSequence paraphrase(const TokenSequence& tokens, const EmbeddingTable& table,
                         const AttackConfig& config) {
  const NeighborIndex neighbors(table);
  return paraphrase(tokens, neighbors, config);
}

std::vector<std::vector<TokenSequence>> attack_sweep(std::span<const TokenSequence> samples,
                                                     std::span<const AttackConfig> configs,
                                                     const EmbeddingTable& table) {
  if (samples.empty()) {
    throw Error(ErrorCode::invalid_argument, "attack_sweep needs at least one sample");
  }
  const NeighborIndex neighbors(table);
  std::vector<std::vector<TokenSequence>> out;
  out.reserve(configs.size());
  for (const auto& config : configs) {
    std::vector<TokenSequence> attacked;
    attacked.reserve(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      AttackConfig cell = config;
      cell.rng_seed = derive_seed(config.rng_seed, s);
      attacked.push_back(paraphrase(samples[s], neighbors, cell));
    }
    out.push_back(std::move(attacked));
  }
  return out;
}

}  // namespace tbw

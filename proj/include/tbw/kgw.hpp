#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tbw {

/// Hash-partition baseline (previous-token seeded green list).
struct KgwParams {
  double gamma = 0.5;
  double delta = 2.0;
  std::size_t prefix_length = 1;
  double z_threshold = 4.0;
  std::uint64_t hash_seed = 15485863;

  // Throws ErrorCode::invalid_argument. Only prefix_length == 1 is supported.
  void validate() const;
};

std::size_t kgw_green_size(double gamma, std::size_t vocab_size);

/// Fisher-Yates permutation of 0..vocab_size-1 driven by splitmix64 seeded
/// with hash_seed XOR prev_token_index; the green list is its first
/// ceil(gamma * vocab_size) entries, in permutation order.
std::vector<std::size_t> kgw_green(std::size_t prev_token_index, const KgwParams& params,
                                   std::size_t vocab_size);

// Same set as an indicator vector.
std::vector<bool> kgw_green_mask(std::size_t prev_token_index, const KgwParams& params,
                                 std::size_t vocab_size);

}  // namespace tbw

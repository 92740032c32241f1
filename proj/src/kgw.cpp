#include "tbw/kgw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "tbw/error.hpp"
#include "tbw/random.hpp"

namespace tbw {

void KgwParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "kgw gamma must lie in (0, 1)");
  }
  if (!std::isfinite(delta)) {
    throw Error(ErrorCode::invalid_argument, "kgw delta must be finite");
  }
  if (prefix_length != 1) {
    throw Error(ErrorCode::invalid_argument, "kgw prefix_length must be 1");
  }
  if (!std::isfinite(z_threshold)) {
    throw Error(ErrorCode::invalid_argument, "kgw z_threshold must be finite");
  }
}

std::size_t kgw_green_size(double gamma, std::size_t vocab_size) {
  // The small slack keeps exact products like 0.5 * 10 from rounding up.
  const double raw = gamma * static_cast<double>(vocab_size);
  auto size = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(size, vocab_size);
}

std::vector<std::size_t> kgw_green(std::size_t prev_token_index, const KgwParams& params,
                                   std::size_t vocab_size) {
  if (vocab_size < 2) {
    throw Error(ErrorCode::invalid_argument, "kgw needs a vocabulary of at least 2 tokens");
  }
  std::vector<std::size_t> perm(vocab_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t state = params.hash_seed ^ static_cast<std::uint64_t>(prev_token_index);
  for (std::size_t i = vocab_size - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(splitmix64_next(state) % (i + 1));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(kgw_green_size(params.gamma, vocab_size));
  return perm;
}

std::vector<bool> kgw_green_mask(std::size_t prev_token_index, const KgwParams& params,
                                 std::size_t vocab_size) {
  std::vector<bool> mask(vocab_size, false);
  for (std::size_t i : kgw_green(prev_token_index, params, vocab_size)) mask[i] = true;
  return mask;
}

}  // namespace tbw

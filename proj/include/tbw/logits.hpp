#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tbw/random.hpp"
#include "tbw/toy_lm.hpp"

namespace tbw {

/// Adds `delta` to every green coordinate; all other entries are returned
/// bit-identical. Throws ErrorCode::index_out_of_range for a bad index.
LogitVector tbw_bias(LogitVector logits, std::span<const std::size_t> green, double delta);

// In-place variant used on the sampling hot path.
void apply_bias(LogitVector& logits, std::span<const std::size_t> green, double delta);

// Numerically stable softmax of logits / temperature.
std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0);

// Inverse-CDF draw from a probability vector.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

}  // namespace tbw

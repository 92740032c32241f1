#include "tbw/logits.hpp"

#include <algorithm>
#include <cmath>

#include "tbw/error.hpp"

namespace tbw {

void apply_bias(LogitVector& logits, std::span<const std::size_t> green, double delta) {
  for (std::size_t i : green) {
    if (i >= logits.size()) {
      throw Error(ErrorCode::index_out_of_range,
                  "green index " + std::to_string(i) + " outside logit vector of size " +
                      std::to_string(logits.size()));
    }
  }
  if (delta == 0.0) return;
  for (std::size_t i : green) logits[i] += delta;
}

LogitVector tbw_bias(LogitVector logits, std::span<const std::size_t> green, double delta) {
  apply_bias(logits, green, delta);
  return logits;
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "temperature must be > 0");
  }
  std::vector<double> probs(logits.size());
  if (logits.empty()) return probs;
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp((logits[i] - max_logit) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) {
    throw Error(ErrorCode::invalid_argument, "cannot sample from an empty distribution");
  }
  double total = 0.0;
  for (double p : probs) total += p;
  const double target = unit_uniform(rng) * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (target < cumulative) return i;
  }
  // Rounding can leave target == total; fall back to the last nonzero entry.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

}  // namespace tbw

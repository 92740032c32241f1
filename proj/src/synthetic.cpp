#include "tbw/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tbw/error.hpp"
#include "tbw/random.hpp"

namespace tbw {

namespace {

// Box-Muller over unit_uniform.
double standard_normal(Rng& rng) {
  const double u1 = 1.0 - unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector random_unit(std::size_t dim, Rng& rng) {
  for (;;) {
    Vector v(dim);
    for (double& x : v) x = standard_normal(rng);
    if (l2_norm(v) > 1e-6) return normalized(v);
  }
}

// Unit vector at exact cosine `sim` to the unit vector `anchor`.
Vector at_similarity(std::span<const double> anchor, double sim, Rng& rng) {
  for (;;) {
    Vector u = random_unit(anchor.size(), rng);
    const double proj = dot(u, anchor);
    for (std::size_t d = 0; d < u.size(); ++d) u[d] -= proj * anchor[d];
    const double norm = l2_norm(u);
    if (norm < 1e-6) continue;
    const double ortho = std::sqrt(std::max(0.0, 1.0 - sim * sim));
    Vector out(anchor.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = sim * anchor[d] + ortho * u[d] / norm;
    return out;
  }
}

std::string padded(char prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, value);
  return buf;
}

}  // namespace

SyntheticVocabulary make_synthetic_vocabulary(const SyntheticSpec& spec) {
  if (spec.topic_names.size() != spec.topic_words.size()) {
    throw Error(ErrorCode::invalid_argument, "topic_words must parallel topic_names");
  }
  if (!(spec.matched_sim_min <= spec.matched_sim_max && spec.matched_sim_max <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "bad matched similarity range");
  }
  Rng rng(spec.seed);
  const auto matched = [&](Rng& r) {
    return spec.matched_sim_min + (spec.matched_sim_max - spec.matched_sim_min) * unit_uniform(r);
  };

  std::vector<std::pair<std::string, Vector>> topic_rows;
  for (const auto& name : spec.topic_names) {
    topic_rows.emplace_back(name, random_unit(spec.dim, rng));
  }
  std::vector<std::pair<std::string, Vector>> rows;
  for (std::size_t t = 0; t < spec.topic_words.size(); ++t) {
    for (const auto& word : spec.topic_words[t]) {
      rows.emplace_back(word, at_similarity(topic_rows[t].second, matched(rng), rng));
    }
  }
  for (const auto& group : spec.filler_groups) {
    const Vector centre = random_unit(spec.dim, rng);
    for (const auto& word : group) {
      rows.emplace_back(word, at_similarity(centre, spec.group_sim, rng));
    }
  }
  return {EmbeddingTable::from_rows(spec.dim, std::move(rows)),
          TopicSet(EmbeddingTable::from_rows(spec.dim, std::move(topic_rows)))};
}

SyntheticSpec numbered_spec(std::size_t topic_count, std::size_t words_per_topic,
                            std::size_t group_count, std::size_t group_size, std::size_t dim,
                            std::uint64_t seed) {
  SyntheticSpec spec;
  spec.dim = dim;
  spec.seed = seed;
  for (std::size_t t = 0; t < topic_count; ++t) {
    spec.topic_names.push_back("topic" + std::to_string(t));
    std::vector<std::string> words;
    for (std::size_t j = 0; j < words_per_topic; ++j) {
      words.push_back(padded('t', t, 2) + padded('w', j, 4));
    }
    spec.topic_words.push_back(std::move(words));
  }
  for (std::size_t g = 0; g < group_count; ++g) {
    std::vector<std::string> members;
    for (std::size_t m = 0; m < group_size; ++m) {
      members.push_back(padded('g', g, 5) + padded('m', m, 2));
    }
    spec.filler_groups.push_back(std::move(members));
  }
  return spec;
}

EmbeddingTable random_table(std::size_t size, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    rows.emplace_back(padded('v', i, 6), random_unit(dim, rng));
  }
  return EmbeddingTable::from_rows(dim, std::move(rows));
}

TopicSet random_topics(std::size_t count, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::string, Vector>> rows;
  for (std::size_t i = 0; i < count; ++i) {
    rows.emplace_back("topic" + std::to_string(i), random_unit(dim, rng));
  }
  return TopicSet(EmbeddingTable::from_rows(dim, std::move(rows)));
}

}  // namespace tbw

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tbw/embedding_store.hpp"

namespace tbw::testing {

inline EmbeddingTable table_of(std::size_t dim,
                               std::vector<std::pair<std::string, Vector>> rows) {
  return EmbeddingTable::from_rows(dim, std::move(rows));
}

// A = (1,0), B = (0,1).
inline TopicSet two_topics() {
  return TopicSet(table_of(2, {{"A", {1.0, 0.0}}, {"B", {0.0, 1.0}}}));
}

// Four tokens whose partition is worked out by hand in the partition tests.
inline EmbeddingTable worked_table() {
  return table_of(2, {{"x1", {1.0, 0.0}},
                      {"x2", {0.6, 0.8}},
                      {"x3", {0.7071, 0.7071}},
                      {"x4", {-1.0, 0.0}}});
}

// Plain-arithmetic cosine, independent of the library's helpers.
inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

// P(pos > neg) + 0.5 P(pos == neg) over all pairs.
inline double oracle_pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) {
      if (p > n) {
        wins += 1.0;
      } else if (p == n) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tbw_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace tbw::testing

#include "tbw/partition.hpp"
#include "tbw/synthetic.hpp"

namespace tbw::testing {

/// 1,000-token clustered vocabulary, K = 4: 55 matched words per topic plus
/// 260 three-word synonym groups, so every list holds exactly 250 tokens.
inline SyntheticVocabulary balanced_vocabulary(std::uint64_t seed = 2024) {
  return make_synthetic_vocabulary(numbered_spec(4, 55, 260, 3, 32, seed));
}

// Prompt built from the first `count` matched words of topic `topic`.
inline std::string topic_prompt(const GreenListPartition& p, std::size_t topic,
                                std::size_t count = 8) {
  std::string prompt = "Please write a detailed review.";
  std::size_t used = 0;
  for (const auto& token : p.list(topic)) {
    if (token[0] != 't') continue;
    prompt += " " + token;
    if (++used == count) break;
  }
  return prompt;
}

}  // namespace tbw::testing

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbw/embedding_store.hpp"

namespace tbw {

/// Generation/detection knobs for topic-based watermarking.
struct WatermarkParams {
  double delta = 2.0;
  double tau = 0.7;
  double z_threshold = 4.0;
  // Unset means per-topic gamma = |G_i| / |V|; set means a fixed override.
  std::optional<double> fixed_gamma;
  // Detector refuses texts with fewer scored tokens than this.
  std::size_t min_tokens = 20;

  // Throws ErrorCode::invalid_argument.
  void validate() const;
};

/// Keyless token -> topic green-list assignment. Every vocabulary token
/// belongs to exactly one list.
class GreenListPartition {
 public:
  GreenListPartition() = default;
  GreenListPartition(std::vector<std::string> topic_names, std::vector<std::string> tokens,
                     std::vector<std::uint32_t> assignments, double tau,
                     std::size_t residual_count);

  const std::vector<std::string>& topic_names() const noexcept { return topic_names_; }
  std::size_t topic_count() const noexcept { return topic_names_.size(); }
  std::size_t vocab_size() const noexcept { return tokens_.size(); }
  double tau() const noexcept { return tau_; }
  std::size_t residual_count() const noexcept { return residual_count_; }
  std::size_t matched_count() const noexcept { return tokens_.size() - residual_count_; }

  // Vocabulary in table order, with the owning topic of each token.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint32_t>& assignments() const noexcept { return assignments_; }

  std::optional<std::size_t> topic_of(std::string_view token) const;
  // Members of G_i in vocabulary order.
  const std::vector<std::string>& list(std::size_t topic) const;
  std::size_t list_size(std::size_t topic) const { return list(topic).size(); }

  // Indicator over `table`'s vocabulary order for members of G_topic.
  std::vector<bool> green_mask(std::size_t topic, const EmbeddingTable& table) const;

  bool operator==(const GreenListPartition& other) const;

 private:
  std::vector<std::string> topic_names_;
  std::vector<std::string> tokens_;
  std::vector<std::uint32_t> assignments_;
  std::vector<std::vector<std::string>> lists_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
  double tau_ = 0.0;
  std::size_t residual_count_ = 0;
};

/// Tokens whose best topic similarity strictly exceeds tau join that topic's
/// list (ties go to the lowest topic index). The rest are sorted bytewise and
/// dealt round-robin starting at topic 0.
GreenListPartition build_partition(const EmbeddingTable& table, const TopicSet& topics,
                                   double tau);

double gamma_for(const GreenListPartition& partition, std::size_t topic_index);

inline constexpr int kPartitionFormatVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);

std::string serialize_partition(const GreenListPartition& partition);
GreenListPartition parse_partition(std::string_view text);
void save_partition(const GreenListPartition& partition, const std::filesystem::path& path);
GreenListPartition load_partition(const std::filesystem::path& path);

}  // namespace tbw

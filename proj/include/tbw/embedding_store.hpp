#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tbw {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

// Returns v / |v|. Throws ErrorCode::zero_vector when |v| == 0.
Vector normalized(std::span<const double> v);

// dot(a, b) / (|a| |b|). Throws on dimension mismatch or a zero-norm input.
double cosine_sim(std::span<const double> a, std::span<const double> b);

/// Token -> unit vector map. Insertion order defines the vocabulary index
/// used by logit vectors and the language model.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  /// Validates and L2-normalizes every row. Rejects empty dim, ragged rows,
  /// duplicate tokens and zero vectors.
  static EmbeddingTable from_rows(std::size_t dim,
                                  std::vector<std::pair<std::string, Vector>> rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }

  std::optional<std::size_t> index_of(std::string_view token) const;
  bool contains(std::string_view token) const { return index_of(token).has_value(); }

  std::span<const double> vector(std::size_t index) const;
  // Throws ErrorCode::unknown_token.
  std::span<const double> vector_of(std::string_view token) const;

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> data_;  // row-major, size() * dim_
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Ordered topics t_1..t_K with unit embeddings. Order is part of the value:
/// every tie-break in partitioning and extraction resolves toward the lower index.
class TopicSet {
 public:
  TopicSet() = default;
  // Throws ErrorCode::too_few_topics when K < 2.
  explicit TopicSet(EmbeddingTable table);

  std::size_t size() const noexcept { return table_.size(); }
  std::size_t dim() const noexcept { return table_.dim(); }
  const std::string& name(std::size_t i) const { return table_.token(i); }
  const std::vector<std::string>& names() const noexcept { return table_.tokens(); }
  std::span<const double> embedding(std::size_t i) const { return table_.vector(i); }
  const EmbeddingTable& table() const noexcept { return table_; }

 private:
  EmbeddingTable table_;
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(std::string_view text);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
std::string format_embeddings(const EmbeddingTable& table);

TopicSet load_topics(const std::filesystem::path& path);

// Similarities closer than this are treated as ties.
inline constexpr double kTieEpsilon = 1e-12;

struct TopicMatch {
  std::size_t index = 0;
  double score = 0.0;
};

/// Most similar topic to a unit vector; ties resolve to the lowest index.
TopicMatch closest_topic(std::span<const double> unit, const TopicSet& topics);

/// Mean of the vectors of tokens present in the table, renormalized.
/// Tokens absent from the table are skipped.
Vector mean_embedding(std::span<const std::string> tokens, const EmbeddingTable& table);

}  // namespace tbw

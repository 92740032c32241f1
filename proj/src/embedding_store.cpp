#include "tbw/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tbw/error.hpp"
#include "tbw/text_io.hpp"

namespace tbw {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "dot: dimension mismatch " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector normalized(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::zero_vector, "cannot normalize a zero or non-finite vector");
  }
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "cosine_sim: dimension mismatch");
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::zero_vector, "cosine_sim: zero-norm input");
  }
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingTable EmbeddingTable::from_rows(std::size_t dim,
                                         std::vector<std::pair<std::string, Vector>> rows) {
  if (dim == 0) {
    throw Error(ErrorCode::malformed_header, "embedding dimension must be positive");
  }
  EmbeddingTable table;
  table.dim_ = dim;
  table.tokens_.reserve(rows.size());
  table.data_.reserve(rows.size() * dim);
  for (auto& [token, vec] : rows) {
    if (vec.size() != dim) {
      throw Error(ErrorCode::dimension_mismatch,
                  "token '" + token + "' has " + std::to_string(vec.size()) +
                      " components, expected " + std::to_string(dim));
    }
    if (table.index_.contains(token)) {
      throw Error(ErrorCode::duplicate_token, "duplicate token '" + token + "'");
    }
    Vector unit;
    try {
      unit = normalized(vec);
    } catch (const Error&) {
      throw Error(ErrorCode::zero_vector, "token '" + token + "' has a zero vector");
    }
    table.index_.emplace(token, table.tokens_.size());
    table.tokens_.push_back(std::move(token));
    table.data_.insert(table.data_.end(), unit.begin(), unit.end());
  }
  return table;
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::vector(std::size_t index) const {
  if (index >= tokens_.size()) {
    throw Error(ErrorCode::index_out_of_range, "embedding index out of range");
  }
  return std::span<const double>(data_).subspan(index * dim_, dim_);
}

std::span<const double> EmbeddingTable::vector_of(std::string_view token) const {
  auto idx = index_of(token);
  if (!idx) {
    throw Error(ErrorCode::unknown_token, "unknown token '" + std::string(token) + "'");
  }
  return vector(*idx);
}

TopicSet::TopicSet(EmbeddingTable table) : table_(std::move(table)) {
  if (table_.size() < 2) {
    throw Error(ErrorCode::too_few_topics, "at least two topics are required");
  }
}

EmbeddingTable parse_embeddings(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw Error(ErrorCode::malformed_header, "empty embedding file");
  }
  const auto header = split_whitespace(lines[0]);
  std::optional<long long> count;
  std::optional<long long> dim;
  if (header.size() == 2) {
    count = parse_int(header[0]);
    dim = parse_int(header[1]);
  }
  if (!count || !dim || *count < 0 || *dim <= 0) {
    throw Error(ErrorCode::malformed_header,
                "expected header '<vocab_size> <dim>', got '" + std::string(lines[0]) + "'");
  }

  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(static_cast<std::size_t>(*count));
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorCode::malformed_record,
                  "line " + std::to_string(ln + 1) + ": expected '<token>\\t<floats>'");
    }
    std::string token(line.substr(0, tab));
    Vector vec;
    for (auto field : split_whitespace(line.substr(tab + 1))) {
      auto value = parse_double(field);
      if (!value) {
        throw Error(ErrorCode::malformed_record,
                    "line " + std::to_string(ln + 1) + ": bad number '" + std::string(field) + "'");
      }
      vec.push_back(*value);
    }
    if (vec.size() != static_cast<std::size_t>(*dim)) {
      throw Error(ErrorCode::dimension_mismatch,
                  "line " + std::to_string(ln + 1) + ": token '" + token + "' has " +
                      std::to_string(vec.size()) + " components, expected " +
                      std::to_string(*dim));
    }
    rows.emplace_back(std::move(token), std::move(vec));
  }
  if (rows.size() != static_cast<std::size_t>(*count)) {
    throw Error(ErrorCode::malformed_header,
                "header declares " + std::to_string(*count) + " rows, found " +
                    std::to_string(rows.size()));
  }
  return EmbeddingTable::from_rows(static_cast<std::size_t>(*dim), std::move(rows));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  try {
    return parse_embeddings(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.token(i);
    out += '\t';
    const auto vec = table.vector(i);
    for (std::size_t d = 0; d < vec.size(); ++d) {
      if (d > 0) out += ' ';
      out += format_double(vec[d]);
    }
    out += '\n';
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  write_file(path, format_embeddings(table));
}

TopicSet load_topics(const std::filesystem::path& path) { return TopicSet(load_embeddings(path)); }

TopicMatch closest_topic(std::span<const double> unit, const TopicSet& topics) {
  if (unit.size() != topics.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "vector and topic dimensions differ");
  }
  TopicMatch best{0, dot(unit, topics.embedding(0))};
  for (std::size_t i = 1; i < topics.size(); ++i) {
    const double sim = dot(unit, topics.embedding(i));
    if (sim > best.score + kTieEpsilon) best = {i, sim};
  }
  best.score = std::clamp(best.score, -1.0, 1.0);
  return best;
}

Vector mean_embedding(std::span<const std::string> tokens, const EmbeddingTable& table) {
  Vector sum(table.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& token : tokens) {
    auto idx = table.index_of(token);
    if (!idx) continue;
    const auto vec = table.vector(*idx);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += vec[d];
    ++found;
  }
  if (found == 0) {
    throw Error(ErrorCode::no_embeddable_tokens, "no embeddable tokens");
  }
  for (double& x : sum) x /= static_cast<double>(found);
  return normalized(sum);
}

}  // namespace tbw

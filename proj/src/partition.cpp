#include "tbw/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tbw/error.hpp"
#include "tbw/text_io.hpp"

namespace tbw {

void WatermarkParams::validate() const {
  if (!std::isfinite(delta) || delta < 0.0) {
    throw Error(ErrorCode::invalid_argument, "delta must be finite and >= 0");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1)");
  }
  if (!std::isfinite(z_threshold)) {
    throw Error(ErrorCode::invalid_argument, "z_threshold must be finite");
  }
  if (fixed_gamma && !(*fixed_gamma > 0.0 && *fixed_gamma < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fixed gamma must lie in (0, 1)");
  }
  if (min_tokens == 0) {
    throw Error(ErrorCode::invalid_argument, "min_tokens must be positive");
  }
}

GreenListPartition::GreenListPartition(std::vector<std::string> topic_names,
                                       std::vector<std::string> tokens,
                                       std::vector<std::uint32_t> assignments, double tau,
                                       std::size_t residual_count)
    : topic_names_(std::move(topic_names)),
      tokens_(std::move(tokens)),
      assignments_(std::move(assignments)),
      tau_(tau),
      residual_count_(residual_count) {
  if (topic_names_.size() < 2) {
    throw Error(ErrorCode::too_few_topics, "partition needs at least two topics");
  }
  if (tokens_.empty()) {
    throw Error(ErrorCode::empty_vocabulary, "partition over an empty vocabulary");
  }
  if (tokens_.size() != assignments_.size()) {
    throw Error(ErrorCode::invalid_argument, "token/assignment count mismatch");
  }
  if (residual_count_ > tokens_.size()) {
    throw Error(ErrorCode::invalid_argument, "residual count exceeds vocabulary size");
  }
  lists_.resize(topic_names_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (assignments_[i] >= topic_names_.size()) {
      throw Error(ErrorCode::index_out_of_range,
                  "token '" + tokens_[i] + "' assigned to unknown topic " +
                      std::to_string(assignments_[i]));
    }
    if (!index_.emplace(tokens_[i], assignments_[i]).second) {
      throw Error(ErrorCode::duplicate_token, "token '" + tokens_[i] + "' listed twice");
    }
    lists_[assignments_[i]].push_back(tokens_[i]);
  }
}

std::optional<std::size_t> GreenListPartition::topic_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& GreenListPartition::list(std::size_t topic) const {
  if (topic >= lists_.size()) {
    throw Error(ErrorCode::index_out_of_range, "topic index " + std::to_string(topic) +
                                                   " out of range for K=" +
                                                   std::to_string(lists_.size()));
  }
  return lists_[topic];
}

std::vector<bool> GreenListPartition::green_mask(std::size_t topic,
                                                 const EmbeddingTable& table) const {
  if (topic >= lists_.size()) {
    throw Error(ErrorCode::index_out_of_range, "topic index out of range");
  }
  std::vector<bool> mask(table.size(), false);
  for (const auto& token : lists_[topic]) {
    if (auto idx = table.index_of(token)) mask[*idx] = true;
  }
  return mask;
}

bool GreenListPartition::operator==(const GreenListPartition& other) const {
  return topic_names_ == other.topic_names_ && tokens_ == other.tokens_ &&
         assignments_ == other.assignments_ && tau_ == other.tau_ &&
         residual_count_ == other.residual_count_;
}

GreenListPartition build_partition(const EmbeddingTable& table, const TopicSet& topics,
                                   double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "tau must lie in (0, 1)");
  }
  if (topics.size() < 2) {
    throw Error(ErrorCode::too_few_topics, "at least two topics are required");
  }
  if (table.empty()) {
    throw Error(ErrorCode::empty_vocabulary, "vocabulary is empty");
  }
  if (table.dim() != topics.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "embedding dim " + std::to_string(table.dim()) + " != topic dim " +
                    std::to_string(topics.dim()));
  }

  const std::size_t k = topics.size();
  std::vector<std::uint32_t> assignments(table.size(), 0);
  std::vector<std::size_t> residual;
  for (std::size_t v = 0; v < table.size(); ++v) {
    const TopicMatch best = closest_topic(table.vector(v), topics);
    if (best.score > tau) {
      assignments[v] = static_cast<std::uint32_t>(best.index);
    } else {
      residual.push_back(v);
    }
  }

  std::sort(residual.begin(), residual.end(), [&](std::size_t a, std::size_t b) {
    return table.token(a) < table.token(b);
  });
  for (std::size_t r = 0; r < residual.size(); ++r) {
    assignments[residual[r]] = static_cast<std::uint32_t>(r % k);
  }

  return GreenListPartition(topics.names(), table.tokens(), std::move(assignments), tau,
                            residual.size());
}

double gamma_for(const GreenListPartition& partition, std::size_t topic_index) {
  return static_cast<double>(partition.list_size(topic_index)) /
         static_cast<double>(partition.vocab_size());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

constexpr std::string_view kMagic = "# tbw green-list partition";

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string partition_body(const GreenListPartition& p) {
  std::string body;
  for (std::size_t i = 0; i < p.vocab_size(); ++i) {
    body += p.tokens()[i];
    body += '\t';
    body += std::to_string(p.assignments()[i]);
    body += '\n';
  }
  return body;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_record, "partition file: " + what);
}

// Splits "key rest-of-line" at the first space.
std::pair<std::string_view, std::string_view> key_value(std::string_view line) {
  const auto sp = line.find(' ');
  if (sp == std::string_view::npos) return {line, {}};
  return {line.substr(0, sp), line.substr(sp + 1)};
}

}  // namespace

std::string serialize_partition(const GreenListPartition& p) {
  std::string out;
  out += kMagic;
  out += '\n';
  out += "format_version " + std::to_string(kPartitionFormatVersion) + "\n";
  out += "tau " + format_double(p.tau()) + "\n";
  out += "k " + std::to_string(p.topic_count()) + "\n";
  out += "vocab_size " + std::to_string(p.vocab_size()) + "\n";
  out += "residual_count " + std::to_string(p.residual_count()) + "\n";
  for (std::size_t i = 0; i < p.topic_count(); ++i) {
    out += "topic " + std::to_string(i) + " " + p.topic_names()[i] + "\n";
  }
  out += "body\n";
  const std::string body = partition_body(p);
  out += body;
  out += "checksum " + hex64(fnv1a64(body)) + "\n";
  return out;
}

GreenListPartition parse_partition(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t ln = 0;
  if (ln < lines.size() && lines[ln] == kMagic) ++ln;

  std::optional<long long> version;
  std::optional<double> tau;
  std::optional<long long> k;
  std::optional<long long> vocab_size;
  std::optional<long long> residual_count;
  std::vector<std::string> topic_names;

  // Header.
  for (; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    if (line == "body") {
      ++ln;
      break;
    }
    const auto [key, value] = key_value(line);
    if (key == "format_version") {
      version = parse_int(value);
      if (!version) malformed("bad format_version");
      if (*version != kPartitionFormatVersion) {
        throw Error(ErrorCode::version_mismatch,
                    "unsupported partition format version " + std::string(value) +
                        " (expected " + std::to_string(kPartitionFormatVersion) + ")");
      }
    } else if (key == "tau") {
      tau = parse_double(value);
    } else if (key == "k") {
      k = parse_int(value);
    } else if (key == "vocab_size") {
      vocab_size = parse_int(value);
    } else if (key == "residual_count") {
      residual_count = parse_int(value);
    } else if (key == "topic") {
      const auto [idx, name] = key_value(value);
      auto i = parse_int(idx);
      if (!i || *i != static_cast<long long>(topic_names.size()) || name.empty()) {
        malformed("topic lines must be numbered 0..K-1 in order");
      }
      topic_names.emplace_back(name);
    } else if (!line.empty()) {
      malformed("unexpected header line '" + std::string(line) + "'");
    }
  }
  if (!version) {
    throw Error(ErrorCode::version_mismatch, "partition file has no format_version");
  }

  // Body runs until the checksum trailer; a missing trailer means truncation.
  std::string body;
  std::vector<std::string_view> body_lines;
  std::optional<std::string_view> checksum;
  for (; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    if (line.rfind("checksum ", 0) == 0) {
      checksum = line.substr(9);
      break;
    }
    body += line;
    body += '\n';
    body_lines.push_back(line);
  }
  if (!checksum) {
    throw Error(ErrorCode::checksum_mismatch, "partition file truncated: no checksum trailer");
  }
  if (*checksum != hex64(fnv1a64(body))) {
    throw Error(ErrorCode::checksum_mismatch, "partition body checksum mismatch");
  }

  if (!tau || !k || !vocab_size || !residual_count) {
    malformed("missing tau, k, vocab_size or residual_count");
  }
  if (*k != static_cast<long long>(topic_names.size())) {
    malformed("k does not match the number of topic lines");
  }
  if (*vocab_size != static_cast<long long>(body_lines.size())) {
    malformed("vocab_size does not match the number of body lines");
  }

  std::vector<std::string> tokens;
  std::vector<std::uint32_t> assignments;
  tokens.reserve(body_lines.size());
  assignments.reserve(body_lines.size());
  for (const auto line : body_lines) {
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos) malformed("body line without tab");
    auto idx = parse_int(line.substr(tab + 1));
    if (!idx || *idx < 0) malformed("bad topic index in body");
    tokens.emplace_back(line.substr(0, tab));
    assignments.push_back(static_cast<std::uint32_t>(*idx));
  }
  return GreenListPartition(std::move(topic_names), std::move(tokens), std::move(assignments),
                            *tau, static_cast<std::size_t>(*residual_count));
}

void save_partition(const GreenListPartition& partition, const std::filesystem::path& path) {
  write_file(path, serialize_partition(partition));
}

GreenListPartition load_partition(const std::filesystem::path& path) {
  return parse_partition(read_file(path));
}

}  // namespace tbw

#include "tbw/cli/run_config.hpp"

#include <array>

#include "tbw/error.hpp"
#include "tbw/text_io.hpp"

namespace tbw::cli {

namespace {

constexpr std::array kKeys = {
    ConfigKey{"paths.embeddings", "", "token embedding file"},
    ConfigKey{"paths.topics", "", "topic embedding file"},
    ConfigKey{"paths.partition", "", "partition file (default <paths.output>/partition.txt)"},
    ConfigKey{"paths.corpus", "", "line-delimited review corpus"},
    ConfigKey{"paths.output", "out", "output directory"},
    ConfigKey{"watermark.delta", "2.0", "TBW logit bias"},
    ConfigKey{"watermark.tau", "0.7", "topic similarity threshold"},
    ConfigKey{"watermark.z_threshold", "4.0", "TBW detection threshold"},
    ConfigKey{"watermark.gamma_mode", "per_topic", "per_topic or fixed"},
    ConfigKey{"watermark.fixed_gamma", "0.5", "gamma used when gamma_mode = fixed"},
    ConfigKey{"watermark.min_tokens", "20", "minimum scored tokens for detection"},
    ConfigKey{"watermark.top_k", "5", "keywords pooled for topic extraction"},
    ConfigKey{"kgw.gamma", "0.5", "KGW green fraction"},
    ConfigKey{"kgw.delta", "2.0", "KGW logit bias"},
    ConfigKey{"kgw.prefix_length", "1", "KGW context length (only 1 is supported)"},
    ConfigKey{"kgw.z_threshold", "4.0", "KGW detection threshold"},
    ConfigKey{"kgw.hash_seed", "15485863", "KGW hash seed"},
    ConfigKey{"lm.alpha", "1.0", "Laplace smoothing constant"},
    ConfigKey{"lm.start_symbol", "<s>", "reserved start-of-sequence symbol"},
    ConfigKey{"lm.temperature", "1.0", "sampling temperature"},
    ConfigKey{"attack.lexical_rate", "0.0", "substitution probability per token"},
    ConfigKey{"attack.order_rate", "0.0", "swap probability per position"},
    ConfigKey{"attack.neighbor_floor", "0.5", "minimum cosine of a substitute"},
    ConfigKey{"attack.seed", "0", "attack RNG seed"},
    ConfigKey{"experiment.lexical_rates", "0", "comma-separated lexical rates for the grid"},
    ConfigKey{"experiment.order_rates", "0", "comma-separated order rates for the grid"},
    ConfigKey{"experiment.schemes", "tbw,kgw", "comma-separated schemes to evaluate"},
    ConfigKey{"experiment.sample_count", "100", "samples per pool"},
    ConfigKey{"experiment.sample_length", "200", "tokens per generated sample"},
    ConfigKey{"experiment.master_seed", "0", "seed for every derived stream"},
    ConfigKey{"experiment.negative_pool", "generated", "generated or corpus"},
    ConfigKey{"experiment.prompt_template", "Please write a detailed review.", "prompt prefix"},
    ConfigKey{"jobs", "1", "worker threads"},
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::invalid_argument, "config key '" + std::string(key) + "': value '" +
                                               std::string(value) + "' " + std::string(why));
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, std::string>& values) : values_(values) {}

  std::string text(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it != values_.end()) return it->second;
    for (const auto& k : kKeys) {
      if (k.key == key) return std::string(k.default_value);
    }
    throw Error(ErrorCode::invalid_argument, "unknown config key '" + std::string(key) + "'");
  }

  double real(std::string_view key) const {
    const auto v = text(key);
    auto parsed = parse_double(v);
    if (!parsed) bad_value(key, v, "is not a number");
    return *parsed;
  }

  std::uint64_t unsigned_int(std::string_view key) const {
    const auto v = text(key);
    auto parsed = parse_int(v);
    if (!parsed || *parsed < 0) bad_value(key, v, "is not a non-negative integer");
    return static_cast<std::uint64_t>(*parsed);
  }

  std::vector<std::string> list(std::string_view key) const {
    std::vector<std::string> out;
    const auto v = text(key);
    std::size_t start = 0;
    while (start <= v.size()) {
      auto end = v.find(',', start);
      if (end == std::string::npos) end = v.size();
      auto item = trim(std::string_view(v).substr(start, end - start));
      if (!item.empty()) out.emplace_back(item);
      start = end + 1;
    }
    if (out.empty()) bad_value(key, v, "is an empty list");
    return out;
  }

  std::vector<double> reals(std::string_view key) const {
    std::vector<double> out;
    for (const auto& item : list(key)) {
      auto parsed = parse_double(item);
      if (!parsed) bad_value(key, item, "is not a number");
      out.push_back(*parsed);
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& values_;
};

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

bool is_config_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.key == key) return true;
  }
  return false;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::malformed_record,
                  "config line " + std::to_string(i + 1) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!is_config_key(key)) {
      throw Error(ErrorCode::malformed_record, "config line " + std::to_string(i + 1) +
                                                   ": unknown key '" + std::string(key) + "'");
    }
    out[std::string(key)] = std::string(value);
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::filesystem::path& path) {
  try {
    return parse_config_text(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::filesystem::path RunConfig::partition_path() const {
  return paths.partition.empty() ? paths.output / "partition.txt" : paths.partition;
}

RunConfig resolve_config(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (!is_config_key(key)) {
      throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
    }
  }
  const Resolver r(values);
  RunConfig c;
  c.paths.embeddings = r.text("paths.embeddings");
  c.paths.topics = r.text("paths.topics");
  c.paths.partition = r.text("paths.partition");
  c.paths.corpus = r.text("paths.corpus");
  c.paths.output = r.text("paths.output");

  c.watermark.delta = r.real("watermark.delta");
  c.watermark.tau = r.real("watermark.tau");
  c.watermark.z_threshold = r.real("watermark.z_threshold");
  const auto mode = r.text("watermark.gamma_mode");
  if (mode == "fixed") {
    c.watermark.fixed_gamma = r.real("watermark.fixed_gamma");
  } else if (mode != "per_topic") {
    bad_value("watermark.gamma_mode", mode, "must be per_topic or fixed");
  }
  c.watermark.min_tokens = r.unsigned_int("watermark.min_tokens");
  c.top_k = r.unsigned_int("watermark.top_k");
  if (c.top_k == 0) bad_value("watermark.top_k", "0", "must be >= 1");
  c.watermark.validate();

  c.kgw.gamma = r.real("kgw.gamma");
  c.kgw.delta = r.real("kgw.delta");
  c.kgw.prefix_length = r.unsigned_int("kgw.prefix_length");
  c.kgw.z_threshold = r.real("kgw.z_threshold");
  c.kgw.hash_seed = r.unsigned_int("kgw.hash_seed");
  c.kgw.validate();

  c.lm_alpha = r.real("lm.alpha");
  if (!(c.lm_alpha > 0.0)) bad_value("lm.alpha", r.text("lm.alpha"), "must be > 0");
  c.start_symbol = r.text("lm.start_symbol");
  c.temperature = r.real("lm.temperature");
  if (!(c.temperature > 0.0)) bad_value("lm.temperature", r.text("lm.temperature"), "must be > 0");

  c.attack.lexical_rate = r.real("attack.lexical_rate");
  c.attack.order_rate = r.real("attack.order_rate");
  c.attack.neighbor_floor = r.real("attack.neighbor_floor");
  c.attack.rng_seed = r.unsigned_int("attack.seed");
  c.attack.validate();
  c.lexical_rates = r.reals("experiment.lexical_rates");
  c.order_rates = r.reals("experiment.order_rates");

  c.schemes.clear();
  for (const auto& s : r.list("experiment.schemes")) {
    if (s == "tbw") {
      c.schemes.push_back(DetectionScheme::tbw);
    } else if (s == "kgw") {
      c.schemes.push_back(DetectionScheme::kgw);
    } else {
      bad_value("experiment.schemes", s, "must be tbw or kgw");
    }
  }
  c.sample_count = r.unsigned_int("experiment.sample_count");
  c.sample_length = r.unsigned_int("experiment.sample_length");
  c.master_seed = r.unsigned_int("experiment.master_seed");
  const auto pool = r.text("experiment.negative_pool");
  if (pool == "generated") {
    c.negative_pool = NegativePool::generated;
  } else if (pool == "corpus") {
    c.negative_pool = NegativePool::corpus;
  } else {
    bad_value("experiment.negative_pool", pool, "must be generated or corpus");
  }
  c.prompt_template = r.text("experiment.prompt_template");
  c.jobs = r.unsigned_int("jobs");
  if (c.jobs == 0) bad_value("jobs", "0", "must be >= 1");
  return c;
}

}  // namespace tbw::cli

#include "tbw/detector.hpp"

#include <algorithm>
#include <cmath>

#include "tbw/error.hpp"

namespace tbw {

double z_score(std::size_t g, std::size_t n, double gamma) {
  if (n == 0) {
    throw Error(ErrorCode::invalid_argument, "z_score: n must be >= 1");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "z_score: gamma must lie in (0, 1)");
  }
  if (g > n) {
    throw Error(ErrorCode::invalid_argument, "z_score: g exceeds n");
  }
  const double nn = static_cast<double>(n);
  return (static_cast<double>(g) - gamma * nn) / std::sqrt(nn * gamma * (1.0 - gamma));
}

Verdict verdict_for(double z, double threshold) {
  return z > threshold ? Verdict::watermarked : Verdict::not_watermarked;
}

GreenCount count_green(std::span<const std::string> tokens, const TokenSet& green,
                       const TokenSet& vocab) {
  GreenCount c;
  for (const auto& token : tokens) {
    if (!vocab.contains(token)) continue;
    ++c.n;
    if (green.contains(token)) ++c.g;
  }
  return c;
}

GreenCount count_green(std::span<const std::string> tokens, const GreenListPartition& partition,
                       std::size_t topic) {
  if (topic >= partition.topic_count()) {
    throw Error(ErrorCode::index_out_of_range, "topic index out of range");
  }
  GreenCount c;
  for (const auto& token : tokens) {
    auto owner = partition.topic_of(token);
    if (!owner) continue;
    ++c.n;
    if (*owner == topic) ++c.g;
  }
  return c;
}

namespace {

void require_tokens(std::size_t n, std::size_t min_tokens, std::string_view what) {
  if (n < min_tokens || n == 0) {
    throw Error(ErrorCode::insufficient_tokens,
                "insufficient tokens: " + std::to_string(n) + " scored " + std::string(what) +
                    ", minimum is " + std::to_string(std::max<std::size_t>(min_tokens, 1)));
  }
}

}  // namespace

DetectionReport detect_tbw(std::string_view text, std::optional<std::string_view> submission_text,
                           const GreenListPartition& partition, const TopicSet& topics,
                           const EmbeddingTable& table, const WatermarkParams& params,
                           std::size_t top_k, std::string text_id) {
  params.validate();
  if (topics.names() != partition.topic_names()) {
    throw Error(ErrorCode::invalid_argument, "topic set does not match the partition's topics");
  }
  const TokenSequence tokens = tokenize(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::insufficient_tokens, "insufficient tokens: empty text");
  }

  DetectionReport report;
  report.text_id = std::move(text_id);
  report.scheme = DetectionScheme::tbw;
  report.topic_source = submission_text ? TopicSource::paired_submission : TopicSource::self_text;
  try {
    report.topic = identify_topic(submission_text ? *submission_text : text, table, topics, top_k);
  } catch (const Error& e) {
    throw Error(ErrorCode::topic_resolution, std::string("cannot resolve topic: ") + e.what());
  }

  const GreenCount c = count_green(tokens.tokens, partition, report.topic->topic_index);
  require_tokens(c.n, params.min_tokens, "tokens");
  report.n = c.n;
  report.g = c.g;
  report.gamma = params.fixed_gamma ? *params.fixed_gamma
                                    : gamma_for(partition, report.topic->topic_index);
  report.z = z_score(c.g, c.n, report.gamma);
  report.threshold = params.z_threshold;
  report.verdict = verdict_for(report.z, report.threshold);
  return report;
}

DetectionReport detect_kgw(std::string_view text, const KgwParams& params, const Vocabulary& vocab,
                           std::size_t min_tokens, std::string text_id) {
  params.validate();
  const TokenSequence tokens = tokenize(text);
  GreenCount c;
  std::optional<std::size_t> prev;
  for (const auto& token : tokens.tokens) {
    auto idx = vocab.index_of(token);
    if (idx && prev) {
      const auto mask = kgw_green_mask(*prev, params, vocab.size());
      ++c.n;
      if (mask[*idx]) ++c.g;
    }
    prev = idx;
  }
  require_tokens(c.n, min_tokens, "positions");

  DetectionReport report;
  report.text_id = std::move(text_id);
  report.scheme = DetectionScheme::kgw;
  report.topic_source = TopicSource::not_applicable;
  report.n = c.n;
  report.g = c.g;
  report.gamma = params.gamma;
  report.z = z_score(c.g, c.n, params.gamma);
  report.threshold = params.z_threshold;
  report.verdict = verdict_for(report.z, report.threshold);
  return report;
}

std::string_view to_string(DetectionScheme scheme) {
  return scheme == DetectionScheme::tbw ? "tbw" : "kgw";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::watermarked ? "watermarked" : "not_watermarked";
}

std::string_view to_string(TopicSource source) {
  switch (source) {
    case TopicSource::paired_submission: return "paired_submission";
    case TopicSource::self_text: return "self_text";
    case TopicSource::not_applicable: return "n/a";
  }
  return "n/a";
}

nlohmann::json to_json(const TopicDecision& d) {
  nlohmann::json keywords = nlohmann::json::array();
  for (const auto& kw : d.keywords) keywords.push_back({{"token", kw.token}, {"score", kw.score}});
  return {{"topic_index", d.topic_index},
          {"topic_name", d.topic_name},
          {"score", d.score},
          {"keywords", keywords}};
}

TopicDecision topic_decision_from_json(const nlohmann::json& j) {
  TopicDecision d;
  d.topic_index = j.at("topic_index").get<std::size_t>();
  d.topic_name = j.at("topic_name").get<std::string>();
  d.score = j.at("score").get<double>();
  for (const auto& kw : j.at("keywords")) {
    d.keywords.push_back({kw.at("token").get<std::string>(), kw.at("score").get<double>()});
  }
  return d;
}

nlohmann::json to_json(const DetectionReport& r) {
  nlohmann::json out;
  out["text_id"] = r.text_id;
  out["scheme"] = std::string(to_string(r.scheme));
  out["topic"] = r.topic ? to_json(*r.topic) : nlohmann::json(nullptr);
  out["n"] = r.n;
  out["g"] = r.g;
  out["gamma"] = r.gamma;
  out["z"] = r.z;
  out["threshold"] = r.threshold;
  out["verdict"] = std::string(to_string(r.verdict));
  out["topic_source"] = std::string(to_string(r.topic_source));
  return out;
}

DetectionReport report_from_json(const nlohmann::json& j) {
  DetectionReport r;
  try {
    r.text_id = j.at("text_id").get<std::string>();
    const auto scheme = j.at("scheme").get<std::string>();
    if (scheme == "tbw") {
      r.scheme = DetectionScheme::tbw;
    } else if (scheme == "kgw") {
      r.scheme = DetectionScheme::kgw;
    } else {
      throw Error(ErrorCode::malformed_record, "unknown scheme '" + scheme + "'");
    }
    if (!j.at("topic").is_null()) r.topic = topic_decision_from_json(j.at("topic"));
    r.n = j.at("n").get<std::size_t>();
    r.g = j.at("g").get<std::size_t>();
    r.gamma = j.at("gamma").get<double>();
    r.z = j.at("z").get<double>();
    r.threshold = j.at("threshold").get<double>();
    const auto verdict = j.at("verdict").get<std::string>();
    r.verdict = verdict == "watermarked" ? Verdict::watermarked : Verdict::not_watermarked;
    const auto source = j.at("topic_source").get<std::string>();
    if (source == "paired_submission") {
      r.topic_source = TopicSource::paired_submission;
    } else if (source == "self_text") {
      r.topic_source = TopicSource::self_text;
    } else {
      r.topic_source = TopicSource::not_applicable;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_record, std::string("detection report: ") + e.what());
  }
  return r;
}

std::string serialize_report(const DetectionReport& report) { return to_json(report).dump(); }

DetectionReport parse_report(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::malformed_record, "detection report is not valid JSON");
  }
  return report_from_json(j);
}

}  // namespace tbw

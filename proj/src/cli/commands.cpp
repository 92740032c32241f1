#include "tbw/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbw/attack_sim.hpp"
#include "tbw/cli/run_config.hpp"
#include "tbw/corpus.hpp"
#include "tbw/detector.hpp"
#include "tbw/error.hpp"
#include "tbw/experiment.hpp"
#include "tbw/generate.hpp"
#include "tbw/partition.hpp"
#include "tbw/random.hpp"
#include "tbw/text_io.hpp"
#include "tbw/toy_lm.hpp"

namespace tbw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kSeedPromptWords = 8;

/// Options shared by every subcommand: --config plus one flag per config key.
struct CommandOptions {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;

  std::map<std::string, std::string> merged() const {
    std::map<std::string, std::string> values;
    if (!config_file.empty()) values = load_config_file(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) values[key] = flags.at(key);
    }
    return values;
  }
};

void register_keys(CommandOptions& c) {
  c.app->add_option("--config", c.config_file, "key = value configuration file");
  for (const auto& key : config_keys()) {
    const std::string name(key.key);
    c.flags[name];
    auto* opt = c.app->add_option("--" + name, c.flags[name], std::string(key.help));
    opt->default_str(std::string(key.default_value));
    c.options[name] = opt;
  }
}

std::string number_name(std::string_view prefix, std::size_t i, std::string_view ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return std::string(prefix) + buf + std::string(ext);
}

void require_path(const fs::path& path, std::string_view key) {
  if (path.empty()) {
    throw Error(ErrorCode::invalid_argument, std::string(key) + " is required");
  }
}

EmbeddingTable load_table(const RunConfig& c) {
  require_path(c.paths.embeddings, "paths.embeddings");
  return load_embeddings(c.paths.embeddings);
}

TopicSet load_topic_set(const RunConfig& c) {
  require_path(c.paths.topics, "paths.topics");
  return load_topics(c.paths.topics);
}

/// Reads the partition file when present, otherwise rebuilds it in memory.
GreenListPartition obtain_partition(const RunConfig& c, const EmbeddingTable& table,
                                    const TopicSet& topics) {
  const auto path = c.partition_path();
  if (c.paths.partition.empty() && !fs::exists(path)) {
    return build_partition(table, topics, c.watermark.tau);
  }
  auto partition = load_partition(path);
  if (partition.tokens() != table.tokens()) {
    throw Error(ErrorCode::invalid_argument,
                path.string() + ": vocabulary differs from " + c.paths.embeddings.string());
  }
  if (partition.topic_names() != topics.names()) {
    throw Error(ErrorCode::invalid_argument,
                path.string() + ": topics differ from " + c.paths.topics.string());
  }
  if (partition.tau() != c.watermark.tau) {
    throw Error(ErrorCode::invalid_argument,
                path.string() + ": built at tau " + format_double(partition.tau()) +
                    " but watermark.tau is " + format_double(c.watermark.tau));
  }
  return partition;
}

std::optional<std::vector<ReviewRecord>> maybe_corpus(const RunConfig& c) {
  if (c.paths.corpus.empty()) return std::nullopt;
  return load_corpus(c.paths.corpus);
}

/// Bigram model over the embedding vocabulary; uniform without a corpus.
ToyLM build_lm(const RunConfig& c, const EmbeddingTable& table,
               const std::optional<std::vector<ReviewRecord>>& corpus) {
  std::vector<TokenSequence> training;
  if (corpus) {
    for (const auto& r : *corpus) {
      training.push_back(tokenize(r.title + "\n" + r.abstract + "\n" + r.review));
    }
  }
  return train_bigram(training, table.tokens(), c.lm_alpha, c.start_symbol);
}

/// One prompt per topic from its most topic-like green-list members.
std::vector<PromptPair> topic_seed_prompts(const GreenListPartition& partition,
                                           const EmbeddingTable& table, const TopicSet& topics,
                                           std::string_view prompt_template) {
  std::vector<PromptPair> prompts;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& token : partition.list(t)) {
      ranked.emplace_back(-dot(table.vector_of(token), topics.embedding(t)), token);
    }
    std::sort(ranked.begin(), ranked.end());
    std::string words;
    for (std::size_t i = 0; i < ranked.size() && i < kSeedPromptWords; ++i) {
      if (i > 0) words += ' ';
      words += ranked[i].second;
    }
    prompts.push_back({std::string(prompt_template) + "\n" + words, words});
  }
  return prompts;
}

std::vector<PromptPair> experiment_prompts(const RunConfig& c,
                                           const std::optional<std::vector<ReviewRecord>>& corpus,
                                           const GreenListPartition& partition,
                                           const EmbeddingTable& table, const TopicSet& topics) {
  if (!corpus) return topic_seed_prompts(partition, table, topics, c.prompt_template);
  std::vector<PromptPair> prompts;
  for (const auto& r : *corpus) {
    prompts.push_back({review_prompt(r, c.prompt_template), submission_text(r)});
  }
  return prompts;
}

// ---- partition ----

void cmd_partition(const RunConfig& c, std::ostream& out) {
  const auto table = load_table(c);
  const auto topics = load_topic_set(c);
  const auto partition = build_partition(table, topics, c.watermark.tau);
  const auto path = c.partition_path();
  save_partition(partition, path);

  std::string gammas = "gamma";
  for (std::size_t t = 0; t < partition.topic_count(); ++t) {
    const double g = gamma_for(partition, t);
    out << "topic " << t << ' ' << partition.topic_names()[t] << " size "
        << partition.list_size(t) << " gamma " << format_double(g) << '\n';
    gammas += ' ' + format_double(g);
  }
  out << gammas << '\n';
  out << "tau " << format_double(partition.tau()) << " matched " << partition.matched_count()
      << " residual " << partition.residual_count() << '\n';
  out << "wrote " << path.generic_string() << '\n';
}

// ---- generate ----

struct GenerateFlags {
  std::string scheme = "tbw";
  std::string prompt;
  std::string prompt_file;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

void cmd_generate(const RunConfig& c, const GenerateFlags& f, std::ostream& out) {
  const auto table = load_table(c);
  const auto corpus = maybe_corpus(c);
  const auto lm = build_lm(c, table, corpus);

  std::optional<TopicSet> topics;
  std::optional<GreenListPartition> partition;
  if (f.scheme == "tbw" || (f.prompt.empty() && f.prompt_file.empty() && !corpus)) {
    topics = load_topic_set(c);
    partition = obtain_partition(c, table, *topics);
  }

  std::vector<PromptPair> prompts;
  if (!f.prompt.empty()) {
    prompts.push_back({f.prompt, f.prompt});
  } else if (!f.prompt_file.empty()) {
    const auto text = read_file(f.prompt_file);
    prompts.push_back({text, text});
  } else {
    prompts = experiment_prompts(c, corpus, *partition, table, *topics);
  }

  Scheme scheme = NoWatermark{};
  if (f.scheme == "tbw") {
    scheme = TbwScheme{&*partition, &*topics, &table, c.watermark, c.top_k};
  } else if (f.scheme == "kgw") {
    scheme = KgwScheme{c.kgw};
  }

  const auto dir = c.paths.output / "samples";
  for (std::size_t i = 0; i < f.count; ++i) {
    const auto& prompt = prompts[i % prompts.size()];
    const std::uint64_t seed = derive_seed(f.seed, i);
    const auto result =
        generate(lm, prompt.prompt, scheme, {c.sample_length, seed, c.temperature});

    json meta;
    meta["scheme"] = f.scheme;
    meta["seed"] = seed;
    meta["length"] = c.sample_length;
    meta["temperature"] = c.temperature;
    if (f.scheme == "tbw") {
      meta["delta"] = c.watermark.delta;
      meta["tau"] = partition->tau();
      meta["topic"] = to_json(*result.topic);
    } else if (f.scheme == "kgw") {
      meta["delta"] = c.kgw.delta;
      meta["gamma"] = c.kgw.gamma;
      meta["hash_seed"] = c.kgw.hash_seed;
    }
    meta["prompt"] = prompt.prompt;
    meta["submission"] = prompt.submission;

    const auto stem = number_name("sample_", i, "");
    write_file(dir / (stem + ".txt"), detokenize(result.sequence.tokens) + "\n");
    write_file(dir / (stem + ".submission.txt"), prompt.submission + "\n");
    write_file(dir / (stem + ".json"), meta.dump(2) + "\n");
    out << (dir / (stem + ".txt")).generic_string();
    if (result.topic) out << " topic " << result.topic->topic_name;
    out << '\n';
  }
}

// ---- detect ----

struct DetectFlags {
  std::string scheme = "tbw";
  std::vector<std::string> inputs;
  std::string submission;
};

void cmd_detect(const RunConfig& c, const DetectFlags& f, std::ostream& out) {
  const auto table = load_table(c);
  std::optional<TopicSet> topics;
  std::optional<GreenListPartition> partition;
  std::optional<std::string> submission;
  if (f.scheme == "tbw") {
    topics = load_topic_set(c);
    partition = obtain_partition(c, table, *topics);
    if (!f.submission.empty()) submission = read_file(f.submission);
  }
  const Vocabulary vocab(table.tokens());

  std::string lines;
  for (const auto& input : f.inputs) {
    const auto text = read_file(input);
    const auto id = fs::path(input).filename().string();
    const auto report =
        f.scheme == "tbw"
            ? detect_tbw(text, submission ? std::optional<std::string_view>(*submission)
                                          : std::nullopt,
                         *partition, *topics, table, c.watermark, c.top_k, id)
            : detect_kgw(text, c.kgw, vocab, c.watermark.min_tokens, id);
    lines += serialize_report(report) + "\n";
  }
  write_file(c.paths.output / "reports" / ("detect_" + f.scheme + ".jsonl"), lines);
  out << lines;
}

// ---- attack ----

void cmd_attack(const RunConfig& c, const std::vector<std::string>& inputs, std::ostream& out) {
  const auto table = load_table(c);
  const NeighborIndex neighbors(table);
  const auto dir = c.paths.output / "attacked";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto tokens = tokenize(read_file(inputs[i]));
    AttackConfig config = c.attack;
    config.rng_seed = derive_seed(c.attack.rng_seed, i);
    const auto result = paraphrase_detailed(tokens, neighbors, config);

    json meta;
    meta["source"] = fs::path(inputs[i]).filename().string();
    meta["lexical_rate"] = config.lexical_rate;
    meta["order_rate"] = config.order_rate;
    meta["neighbor_floor"] = config.neighbor_floor;
    meta["seed"] = config.rng_seed;
    meta["substitutions"] = result.substitutions.size();
    meta["swaps"] = result.swaps;

    const auto stem = fs::path(inputs[i]).stem().string();
    write_file(dir / (stem + ".txt"), detokenize(result.tokens.tokens) + "\n");
    write_file(dir / (stem + ".json"), meta.dump(2) + "\n");
    out << (dir / (stem + ".txt")).generic_string() << " substitutions "
        << result.substitutions.size() << " swaps " << result.swaps << '\n';
  }
}

// ---- evaluate ----

void cmd_evaluate(const RunConfig& c, std::ostream& out) {
  if (c.sample_length < c.watermark.min_tokens) {
    throw Error(ErrorCode::invalid_argument,
                "experiment.sample_length " + std::to_string(c.sample_length) +
                    " is below watermark.min_tokens " + std::to_string(c.watermark.min_tokens));
  }
  const auto table = load_table(c);
  const auto topics = load_topic_set(c);
  const auto corpus = maybe_corpus(c);
  if (c.negative_pool == NegativePool::corpus && !corpus) {
    throw Error(ErrorCode::invalid_argument, "experiment.negative_pool = corpus needs paths.corpus");
  }
  const auto partition = obtain_partition(c, table, topics);
  const auto lm = build_lm(c, table, corpus);

  ExperimentInputs inputs{&table, &topics, &partition, &lm, {}, {}};
  inputs.prompts = experiment_prompts(c, corpus, partition, table, topics);
  if (corpus) {
    for (const auto& r : *corpus) inputs.human_texts.push_back(r.review);
  }

  ExperimentSettings s;
  s.watermark = c.watermark;
  s.kgw = c.kgw;
  s.schemes = c.schemes;
  s.attacks = attack_grid(c.lexical_rates, c.order_rates, c.attack.neighbor_floor);
  s.sample_count = c.sample_count;
  s.sample_length = c.sample_length;
  s.master_seed = c.master_seed;
  s.temperature = c.temperature;
  s.top_k = c.top_k;
  s.negative_pool = c.negative_pool;
  s.jobs = c.jobs;

  const auto result = run_experiment(inputs, s);
  write_experiment_outputs(result, c.paths.output);
  out << format_metrics_table(result);
}

int report_error(std::ostream& err, std::string_view category, std::string_view code,
                 std::string_view message, int exit_code) {
  json j;
  j["error"] = category;
  j["code"] = code;
  j["message"] = message;
  err << j.dump() << '\n';
  return exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic-based watermarking toolkit", "tbw"};
  app.require_subcommand(1);

  CommandOptions partition_opts, generate_opts, detect_opts, attack_opts, evaluate_opts;

  partition_opts.app = app.add_subcommand("partition", "build and save the green-list partition");
  register_keys(partition_opts);

  GenerateFlags gen;
  generate_opts.app = app.add_subcommand("generate", "sample texts from the toy language model");
  register_keys(generate_opts);
  generate_opts.app->add_option("--scheme", gen.scheme, "tbw, kgw or none")
      ->check(CLI::IsMember({"tbw", "kgw", "none"}))
      ->capture_default_str();
  generate_opts.app->add_option("--prompt", gen.prompt, "prompt text");
  generate_opts.app->add_option("--prompt-file", gen.prompt_file, "file holding the prompt")
      ->excludes(generate_opts.app->get_option("--prompt"));
  generate_opts.app->add_option("--count", gen.count, "number of samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate_opts.app->add_option("--seed", gen.seed, "base seed; sample i uses derive(seed, i)")
      ->capture_default_str();

  DetectFlags det;
  detect_opts.app = app.add_subcommand("detect", "score texts for a watermark");
  register_keys(detect_opts);
  detect_opts.app->add_option("--scheme", det.scheme, "tbw or kgw")
      ->check(CLI::IsMember({"tbw", "kgw"}))
      ->capture_default_str();
  detect_opts.app->add_option("--submission", det.submission,
                              "paired submission text used to recover the topic");
  detect_opts.app->add_option("inputs", det.inputs, "text files to score")->required();

  std::vector<std::string> attack_inputs;
  attack_opts.app = app.add_subcommand("attack", "paraphrase texts");
  register_keys(attack_opts);
  attack_opts.app->add_option("inputs", attack_inputs, "text files to paraphrase")->required();

  evaluate_opts.app = app.add_subcommand("evaluate", "run the scheme x attack experiment grid");
  register_keys(evaluate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return report_error(err, "usage", "usage", e.what(), kExitUsage);
  }

  try {
    if (partition_opts.app->parsed()) {
      cmd_partition(resolve_config(partition_opts.merged()), out);
    } else if (generate_opts.app->parsed()) {
      cmd_generate(resolve_config(generate_opts.merged()), gen, out);
    } else if (detect_opts.app->parsed()) {
      cmd_detect(resolve_config(detect_opts.merged()), det, out);
    } else if (attack_opts.app->parsed()) {
      cmd_attack(resolve_config(attack_opts.merged()), attack_inputs, out);
    } else if (evaluate_opts.app->parsed()) {
      cmd_evaluate(resolve_config(evaluate_opts.merged()), out);
    }
  } catch (const Error& e) {
    const bool runtime = e.category() == ErrorCategory::runtime;
    return report_error(err, runtime ? "runtime" : "input_validation", to_string(e.code()),
                        e.what(), runtime ? kExitRuntime : kExitInput);
  } catch (const std::exception& e) {
    return report_error(err, "runtime", "runtime", e.what(), kExitRuntime);
  }
  return kExitOk;
}

}  // namespace tbw::cli

#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include "tbw/cli/commands.hpp"
#include "tbw/cli/run_config.hpp"
#include "tbw/detector.hpp"
#include "tbw/error.hpp"
#include "tbw/text_io.hpp"

using namespace tbw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "tbw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string arg(const fs::path& p) { return p.string(); }

// Writes the balanced synthetic vocabulary and returns the common path flags.
std::vector<std::string> balanced_files(const testing::TempDir& dir) {
  const auto vocab = testing::balanced_vocabulary();
  save_embeddings(vocab.table, dir / "emb.txt");
  save_embeddings(vocab.topics.table(), dir / "topics.txt");
  return {"--paths.embeddings", arg(dir / "emb.txt"), "--paths.topics", arg(dir / "topics.txt"),
          "--paths.output", arg(dir / "out")};
}

std::vector<std::string> with(std::vector<std::string> base,
                              std::initializer_list<std::string> extra) {
  base.insert(base.begin(), extra);
  return base;
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto values = cli::parse_config_text(
      "# comment\n\nwatermark.delta = 3.5\npaths.output = \"a b\"\n  kgw.gamma=0.25  \n");
  CHECK(values.size() == 3);
  CHECK(values.at("watermark.delta") == "3.5");
  CHECK(values.at("paths.output") == "a b");
  CHECK(values.at("kgw.gamma") == "0.25");
  CHECK_THROWS_AS(cli::parse_config_text("nope.key = 1\n"), Error);
  CHECK_THROWS_AS(cli::parse_config_text("watermark.delta\n"), Error);
}

TEST_CASE("resolved defaults") {
  const auto c = cli::resolve_config({});
  CHECK(c.watermark.delta == 2.0);
  CHECK(c.watermark.tau == 0.7);
  CHECK(c.watermark.z_threshold == 4.0);
  CHECK_FALSE(c.watermark.fixed_gamma.has_value());
  CHECK(c.kgw.gamma == 0.5);
  CHECK(c.kgw.delta == 2.0);
  CHECK(c.kgw.prefix_length == 1);
  CHECK(c.kgw.z_threshold == 4.0);
  CHECK(c.kgw.hash_seed == 15485863u);
  CHECK(c.top_k == 5);
  CHECK(c.prompt_template == "Please write a detailed review.");
  CHECK(c.jobs == 1);
  CHECK(c.partition_path() == fs::path("out") / "partition.txt");

  const auto fixed = cli::resolve_config({{"watermark.gamma_mode", "fixed"},
                                          {"watermark.fixed_gamma", "0.3"},
                                          {"experiment.lexical_rates", "0, 0.2,0.4"}});
  CHECK(fixed.watermark.fixed_gamma == 0.3);
  CHECK(fixed.lexical_rates == std::vector<double>{0.0, 0.2, 0.4});
  CHECK_THROWS_AS(cli::resolve_config({{"watermark.tau", "x"}}), Error);
  CHECK_THROWS_AS(cli::resolve_config({{"experiment.schemes", "tbw,foo"}}), Error);
  CHECK_THROWS_AS(cli::resolve_config({{"jobs", "0"}}), Error);
}

TEST_CASE("help lists every flag with its default") {
  const auto o = run({"evaluate", "--help"});
  CHECK(o.code == 0);
  for (const auto& key : cli::config_keys()) {
    CHECK_MESSAGE(o.out.find("--" + std::string(key.key)) != std::string::npos, key.key);
  }
  CHECK(o.out.find("--watermark.delta TEXT [2.0]") != std::string::npos);
  CHECK(o.out.find("--watermark.tau TEXT [0.7]") != std::string::npos);
  CHECK(o.out.find("--kgw.gamma TEXT [0.5]") != std::string::npos);
  CHECK(o.out.find("--kgw.hash_seed TEXT [15485863]") != std::string::npos);
}

TEST_CASE("partition on the worked fixture prints gamma 0.75 0.25") {
  const testing::TempDir dir;
  save_embeddings(testing::worked_table(), dir / "emb.txt");
  save_embeddings(testing::two_topics().table(), dir / "topics.txt");
  const auto o = run({"partition", "--paths.embeddings", arg(dir / "emb.txt"), "--paths.topics",
                      arg(dir / "topics.txt"), "--paths.output", arg(dir / "out")});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("\ngamma 0.75 0.25\n") != std::string::npos);
  CHECK(o.out.find("topic 0 A size 3 gamma 0.75") != std::string::npos);
  const auto p = load_partition(dir / "out" / "partition.txt");
  CHECK(p.list_size(0) == 3);
  CHECK(p.list_size(1) == 1);
}

TEST_CASE("partition matched count grows as tau drops") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  REQUIRE(run(with(common, {"partition", "--watermark.tau", "0.7", "--paths.partition",
                            arg(dir / "p07.txt")}))
              .code == 0);
  REQUIRE(run(with(common, {"partition", "--watermark.tau", "0.3", "--paths.partition",
                            arg(dir / "p03.txt")}))
              .code == 0);
  CHECK(load_partition(dir / "p03.txt").matched_count() >=
        load_partition(dir / "p07.txt").matched_count());
}

TEST_CASE("missing topics file exits with an input error naming the path") {
  const testing::TempDir dir;
  save_embeddings(testing::worked_table(), dir / "emb.txt");
  const auto missing = arg(dir / "absent_topics.txt");
  const auto o = run({"partition", "--paths.embeddings", arg(dir / "emb.txt"), "--paths.topics",
                      missing, "--paths.output", arg(dir / "out")});
  CHECK(o.code == cli::kExitInput);
  const auto j = nlohmann::json::parse(o.err);
  CHECK(j.at("error") == "input_validation");
  CHECK(j.at("code") == "io");
  CHECK(j.at("message").get<std::string>().find(missing) != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"partition", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run({"detect"}).code == cli::kExitUsage);
  CHECK(run({"generate", "--scheme", "other"}).code == cli::kExitUsage);
}

TEST_CASE("config file values apply and flags override them") {
  const testing::TempDir dir;
  save_embeddings(testing::worked_table(), dir / "emb.txt");
  save_embeddings(testing::two_topics().table(), dir / "topics.txt");
  write_file(dir / "run.conf", "paths.embeddings = " + arg(dir / "emb.txt") +
                                   "\npaths.topics = " + arg(dir / "topics.txt") +
                                   "\npaths.output = " + arg(dir / "out") +
                                   "\nwatermark.tau = 0.99\n");
  const auto from_file = run({"partition", "--config", arg(dir / "run.conf")});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("tau 0.99 matched 1") != std::string::npos);

  const auto overridden =
      run({"partition", "--config", arg(dir / "run.conf"), "--watermark.tau", "0.7"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("tau 0.7 matched 3") != std::string::npos);

  write_file(dir / "bad.conf", "watermark.detla = 2\n");
  const auto bad = run({"partition", "--config", arg(dir / "bad.conf")});
  CHECK(bad.code == cli::kExitInput);
  CHECK(bad.err.find("watermark.detla") != std::string::npos);
}

TEST_CASE("generate then detect: watermarked, self-text and paired submission") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  REQUIRE(run(with(common, {"partition"})).code == 0);
  const auto gen = run(with(common, {"generate", "--count", "2", "--seed", "3"}));
  REQUIRE(gen.code == 0);
  const auto samples = dir / "out" / "samples";
  REQUIRE(fs::exists(samples / "sample_0001.txt"));

  const auto meta = nlohmann::json::parse(read_file(samples / "sample_0000.json"));
  CHECK(meta.at("scheme") == "tbw");
  CHECK(meta.at("delta") == 2.0);
  CHECK(meta.at("tau") == 0.7);
  CHECK(meta.at("topic").at("topic_index") == 0);

  const auto self = run(with(common, {"detect", arg(samples / "sample_0000.txt"),
                                      arg(samples / "sample_0001.txt")}));
  REQUIRE(self.code == 0);
  const auto lines = split_lines(self.out);
  REQUIRE(lines.size() >= 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = parse_report(lines[i]);
    CHECK(r.verdict == Verdict::watermarked);
    CHECK(r.topic_source == TopicSource::self_text);
  }
  CHECK(read_file(dir / "out" / "reports" / "detect_tbw.jsonl") == self.out);

  const auto paired =
      run(with(common, {"detect", "--submission", arg(samples / "sample_0000.submission.txt"),
                        arg(samples / "sample_0000.txt")}));
  REQUIRE(paired.code == 0);
  const auto r = parse_report(split_lines(paired.out).at(0));
  CHECK(r.topic_source == TopicSource::paired_submission);
  CHECK(r.verdict == Verdict::watermarked);
}

TEST_CASE("kgw generate and detect, unwatermarked text stays below threshold") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  REQUIRE(run(with(common, {"generate", "--scheme", "kgw", "--prompt", "t00w0001"})).code == 0);
  const auto kgw = run(with(
      common, {"detect", "--scheme", "kgw", arg(dir / "out" / "samples" / "sample_0000.txt")}));
  REQUIRE(kgw.code == 0);
  CHECK(parse_report(split_lines(kgw.out).at(0)).verdict == Verdict::watermarked);

  REQUIRE(run(with(common, {"generate", "--scheme", "none", "--seed", "8", "--prompt",
                            "t00w0001 t00w0002"}))
              .code == 0);
  const auto plain =
      run(with(common, {"detect", "--scheme", "kgw", arg(dir / "out" / "samples" / "sample_0000.txt")}));
  REQUIRE(plain.code == 0);
  CHECK(parse_report(split_lines(plain.out).at(0)).verdict == Verdict::not_watermarked);
}

TEST_CASE("generate and attack are idempotent") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  const auto sample = dir / "out" / "samples" / "sample_0000.txt";
  REQUIRE(run(with(common, {"generate", "--seed", "4"})).code == 0);
  const auto first = read_file(sample);
  const auto first_meta = read_file(dir / "out" / "samples" / "sample_0000.json");
  REQUIRE(run(with(common, {"generate", "--seed", "4"})).code == 0);
  CHECK(read_file(sample) == first);
  CHECK(read_file(dir / "out" / "samples" / "sample_0000.json") == first_meta);

  const auto attack = with(common, {"attack", "--attack.lexical_rate", "0.3",
                                    "--attack.order_rate", "0.2", "--attack.seed", "5",
                                    arg(sample)});
  REQUIRE(run(attack).code == 0);
  const auto attacked = read_file(dir / "out" / "attacked" / "sample_0000.txt");
  CHECK(attacked != first);
  REQUIRE(run(attack).code == 0);
  CHECK(read_file(dir / "out" / "attacked" / "sample_0000.txt") == attacked);
}

TEST_CASE("stale partition file is rejected") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  REQUIRE(run(with(common, {"partition", "--watermark.tau", "0.7"})).code == 0);
  const auto o = run(with(common, {"generate", "--watermark.tau", "0.3"}));
  CHECK(o.code == cli::kExitInput);
  CHECK(o.err.find("tau") != std::string::npos);
}

TEST_CASE("evaluate is byte-identical across runs and job counts") {
  const testing::TempDir dir;
  const auto vocab = testing::balanced_vocabulary();
  save_embeddings(vocab.table, dir / "emb.txt");
  save_embeddings(vocab.topics.table(), dir / "topics.txt");
  const auto eval = [&](const std::string& out, const std::string& jobs) {
    return run({"evaluate", "--paths.embeddings", arg(dir / "emb.txt"), "--paths.topics",
                arg(dir / "topics.txt"), "--paths.output", arg(dir / out),
                "--experiment.sample_count", "20", "--experiment.sample_length", "120",
                "--experiment.lexical_rates", "0,0.4", "--experiment.master_seed", "17",
                "--jobs", jobs});
  };
  const auto a = eval("a", "1");
  const auto b = eval("b", "3");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  const auto table = read_file(dir / "a" / "metrics" / "metrics.txt");
  CHECK(table == a.out);
  CHECK(table == read_file(dir / "b" / "metrics" / "metrics.txt"));
  for (const auto* name : {"tbw_none.jsonl", "tbw_lex0.40_ord0.00.jsonl", "kgw_none.jsonl"}) {
    CHECK(read_file(dir / "a" / "reports" / name) == read_file(dir / "b" / "reports" / name));
  }
}

TEST_CASE("evaluate rejects bad inputs with structured errors") {
  const testing::TempDir dir;
  const auto common = balanced_files(dir);
  write_file(dir / "corpus.jsonl",
             "{\"title\": \"t\", \"review\": \"r\"}\n{\"title\": \"t\", \"abstract\": \"a\"}\n");
  const auto bad_corpus =
      run(with(common, {"evaluate", "--paths.corpus", arg(dir / "corpus.jsonl")}));
  CHECK(bad_corpus.code == cli::kExitInput);
  CHECK(bad_corpus.err.find("line 2") != std::string::npos);

  const auto short_samples = run(with(common, {"evaluate", "--experiment.sample_length", "10"}));
  CHECK(short_samples.code == cli::kExitInput);

  const auto no_corpus = run(with(common, {"evaluate", "--experiment.negative_pool", "corpus"}));
  CHECK(no_corpus.code == cli::kExitInput);
}

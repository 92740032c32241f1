#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "support.hpp"
#include "tbw/error.hpp"
#include "tbw/generate.hpp"
#include "tbw/kgw.hpp"
#include "tbw/logits.hpp"
#include "tbw/tokenizer.hpp"
#include "tbw/toy_lm.hpp"

using namespace tbw;

namespace {

// Closed-form green probability under a uniform base distribution.
double expected_green_rate(double gamma, double delta) {
  const double boosted = gamma * std::exp(delta);
  return boosted / (boosted + 1.0 - gamma);
}

ToyLM uniform_lm(const EmbeddingTable& table) {
  return train_bigram({}, table.tokens(), 1.0);
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("The model, converges!").tokens ==
        std::vector<std::string>{"the", "model", "converges"});
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("A-B").tokens == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("  x2  y_3\n").tokens == std::vector<std::string>{"x2", "y", "3"});
  const auto seq = tokenize("Deterministic; text... 42");
  CHECK(tokenize(detokenize(seq.tokens)) == seq);
}

TEST_CASE("train_bigram counts and smoothing") {
  const std::vector<TokenSequence> corpus{tokenize("a b a b")};
  const auto lm = train_bigram(corpus, {"a", "b"}, 1.0);
  // Oracle: pairs (a,b), (b,a), (a,b) -> count(a,b) = 2, row(a) = 2.
  CHECK(lm.bigram_count(0, 1) == 2);
  CHECK(lm.bigram_count(1, 0) == 1);
  CHECK(lm.row_count(0) == 2);
  CHECK(lm.unigram_count(0) == 2);
  CHECK(lm.probability(0, 1) == doctest::Approx((2.0 + 1.0) / (2.0 + 2.0)).epsilon(1e-15));
  CHECK(lm.probability(0, 1) == 0.75);

  const auto logits = lm.next_logits("a");
  CHECK(logits[1] - logits[0] == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("unseen context rows are uniform and every row normalizes") {
  const std::vector<TokenSequence> corpus{tokenize("a b c a c c b oov a")};
  const auto lm = train_bigram(corpus, {"a", "b", "c", "d"}, 0.5);
  for (double p : {lm.probability(3, 0), lm.probability(3, 1), lm.probability(3, 3)}) {
    CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
  }
  // Pairs touching an out-of-vocabulary token are skipped.
  CHECK(lm.bigram_count(1, 0) == 0);
  for (std::size_t prev = 0; prev <= lm.vocab_size(); ++prev) {
    double total = 0.0;
    for (double l : lm.next_logits(prev)) total += std::exp(l);
    CHECK(std::abs(total - 1.0) < 1e-9);
    for (std::size_t next = 0; next < lm.vocab_size(); ++next) CHECK(lm.probability(prev, next) > 0.0);
  }
  const auto start = lm.next_logits(std::string(kDefaultStartSymbol));
  CHECK(start[0] == start[3]);
  CHECK_THROWS_AS(lm.next_logits("nope"), Error);
}

TEST_CASE("train_bigram argument errors") {
  CHECK_THROWS_AS(train_bigram({}, {}, 1.0), Error);
  CHECK_THROWS_AS(train_bigram({}, {"a"}, 0.0), Error);
  CHECK_THROWS_AS(train_bigram({}, {"a", "<s>"}, 1.0), Error);
}

TEST_CASE("tbw_bias adds delta to green coordinates only") {
  const LogitVector base{1.0, 1.0, 1.0};
  const std::vector<std::size_t> green{0};
  CHECK(tbw_bias(base, green, 2.0) == LogitVector{3.0, 1.0, 1.0});
  CHECK(tbw_bias(base, green, 0.0) == base);
  const std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(tbw_bias(base, bad, 1.0), Error);

  const auto probs = softmax(tbw_bias(base, green, 2.0));
  const double oracle = std::exp(3.0) / (std::exp(3.0) + 2.0 * std::exp(1.0));
  CHECK(oracle == doctest::Approx(0.7869).epsilon(1e-4));
  CHECK(probs[0] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(probs[0] > 1.0 / 3.0);
}

TEST_CASE("bias touches only green coordinates and moves probabilities monotonically") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    LogitVector logits(12);
    for (double& x : logits) x = normal(rng);
    std::vector<std::size_t> green;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      if (rng() % 3 == 0) green.push_back(i);
    }
    if (green.empty() || green.size() == logits.size()) continue;
    const std::set<std::size_t> green_set(green.begin(), green.end());

    const auto biased = tbw_bias(logits, green, 1.3);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      if (!green_set.contains(i)) CHECK(biased[i] == logits[i]);
    }
    std::vector<double> prev = softmax(logits);
    for (double delta : {0.5, 1.0, 2.0, 4.0}) {
      const auto probs = softmax(tbw_bias(logits, green, delta));
      for (std::size_t i = 0; i < logits.size(); ++i) {
        if (green_set.contains(i)) {
          CHECK(probs[i] > prev[i]);
        } else {
          CHECK(probs[i] < prev[i]);
        }
      }
      prev = probs;
    }
  }
}

TEST_CASE("kgw_green") {
  KgwParams params;
  CHECK(kgw_green(0, params, 10).size() == 5);
  CHECK(kgw_green_size(0.5, 10) == 5);
  CHECK(kgw_green_size(0.25, 10) == 3);
  CHECK(kgw_green(3, params, 10) == kgw_green(3, params, 10));
  CHECK(kgw_green(3, params, 10) != kgw_green(4, params, 10));

  // Frozen from an independent splitmix64 Fisher-Yates run (hash_seed 15485863).
  CHECK(kgw_green(3, params, 10) == std::vector<std::size_t>{7, 9, 5, 0, 8});
  CHECK(kgw_green(4, params, 10) == std::vector<std::size_t>{3, 2, 1, 0, 5});

  const auto green = kgw_green(17, params, 1000);
  CHECK(std::set<std::size_t>(green.begin(), green.end()).size() == 500);
  CHECK_THROWS_AS(kgw_green(0, params, 1), Error);

  KgwParams bad = params;
  bad.prefix_length = 2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("generation is reproducible under a fixed seed") {
  const auto vocab = testing::balanced_vocabulary();
  const std::vector<TokenSequence> corpus{tokenize("t00w0001 t00w0002 g00001m00 t00w0001")};
  const auto lm = train_bigram(corpus, vocab.table.tokens(), 0.1);
  const GenerationOptions opts{50, 99, 1.0};
  const auto a = generate(lm, "hello t00w0001", NoWatermark{}, opts);
  const auto b = generate(lm, "hello t00w0001", NoWatermark{}, opts);
  CHECK(a.sequence == b.sequence);
  CHECK(a.sequence.size() == 50);
  CHECK(a.sequence.source == TokenSource::generated);
  CHECK_FALSE(a.topic.has_value());
  for (const auto& token : a.sequence.tokens) CHECK(vocab.table.contains(token));

  const auto c = generate(lm, "hello t00w0001", NoWatermark{}, {50, 100, 1.0});
  CHECK(c.sequence != a.sequence);
  CHECK_THROWS_AS(generate(lm, "x", NoWatermark{}, {0, 1, 1.0}), Error);
}

TEST_CASE("delta = 0 reproduces the unwatermarked stream exactly") {
  const auto vocab = testing::balanced_vocabulary();
  const auto p = build_partition(vocab.table, vocab.topics, 0.7);
  const std::vector<TokenSequence> corpus{tokenize("t00w0001 t01w0002 g00001m00 t00w0001")};
  const auto lm = train_bigram(corpus, vocab.table.tokens(), 0.1);
  const auto prompt = testing::topic_prompt(p, 1);
  const GenerationOptions opts{120, 5, 1.0};

  WatermarkParams zero;
  zero.delta = 0.0;
  const auto plain = generate(lm, prompt, NoWatermark{}, opts);
  const auto tbw0 = generate(lm, prompt, TbwScheme{&p, &vocab.topics, &vocab.table, zero, 5}, opts);
  CHECK(tbw0.sequence == plain.sequence);
  REQUIRE(tbw0.topic.has_value());
  CHECK(tbw0.topic->topic_index == 1);

  KgwParams kgw0;
  kgw0.delta = 0.0;
  CHECK(generate(lm, prompt, KgwScheme{kgw0}, opts).sequence == plain.sequence);
}

TEST_CASE("tbw generation fails when the prompt has no resolvable topic") {
  const auto vocab = testing::balanced_vocabulary();
  const auto p = build_partition(vocab.table, vocab.topics, 0.7);
  const auto lm = uniform_lm(vocab.table);
  try {
    generate(lm, "nothing in vocabulary here", TbwScheme{&p, &vocab.topics, &vocab.table, {}, 5},
             {10, 1, 1.0});
    FAIL("expected topic resolution failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::topic_resolution);
  }
}

TEST_CASE("empirical green rate matches the closed form") {
  const auto vocab = testing::balanced_vocabulary();
  const auto p = build_partition(vocab.table, vocab.topics, 0.7);
  const auto lm = uniform_lm(vocab.table);
  const auto prompt = testing::topic_prompt(p, 2);

  SUBCASE("tbw gamma 0.25, delta 2") {
    REQUIRE(gamma_for(p, 2) == 0.25);
    const double expected = expected_green_rate(0.25, 2.0);
    CHECK(expected == doctest::Approx(0.7112).epsilon(1e-4));
    const auto out =
        generate(lm, prompt, TbwScheme{&p, &vocab.topics, &vocab.table, {}, 5}, {10000, 7, 1.0});
    std::size_t green = 0;
    for (const auto& token : out.sequence.tokens) green += p.topic_of(token) == 2u;
    CHECK(std::abs(static_cast<double>(green) / 10000.0 - expected) <= 0.02);
  }

  SUBCASE("kgw gamma 0.5, delta 2") {
    const double expected = expected_green_rate(0.5, 2.0);
    CHECK(expected == doctest::Approx(0.8808).epsilon(1e-4));
    KgwParams params;
    const auto out = generate(lm, prompt, KgwScheme{params}, {10000, 8, 1.0});
    std::size_t green = 0;
    for (std::size_t t = 1; t < out.sequence.size(); ++t) {
      const auto prev = *lm.vocab().index_of(out.sequence.tokens[t - 1]);
      const auto cur = *lm.vocab().index_of(out.sequence.tokens[t]);
      green += kgw_green_mask(prev, params, lm.vocab_size())[cur];
    }
    CHECK(std::abs(static_cast<double>(green) / 9999.0 - expected) <= 0.02);
  }
}

TEST_CASE("green rate is non-decreasing in delta") {
  const auto vocab = testing::balanced_vocabulary();
  const auto p = build_partition(vocab.table, vocab.topics, 0.7);
  const auto lm = uniform_lm(vocab.table);
  const auto prompt = testing::topic_prompt(p, 0);
  std::vector<double> rates;
  for (double delta : {0.0, 1.0, 2.0, 4.0}) {
    WatermarkParams params;
    params.delta = delta;
    const auto out =
        generate(lm, prompt, TbwScheme{&p, &vocab.topics, &vocab.table, params, 5}, {10000, 3, 1.0});
    std::size_t green = 0;
    for (const auto& token : out.sequence.tokens) green += p.topic_of(token) == 0u;
    rates.push_back(static_cast<double>(green) / 10000.0);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] < rates[i - 1]) {
      ++inversions;
      const double sigma = std::sqrt(rates[i] * (1.0 - rates[i]) / 10000.0);
      CHECK(rates[i - 1] - rates[i] <= 2.0 * sigma);
    }
  }
  CHECK(inversions <= 1);
  CHECK(rates.front() == doctest::Approx(0.25).epsilon(0.1));
}

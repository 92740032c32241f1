#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "tbw/embedding_store.hpp"
#include "tbw/error.hpp"
#include "tbw/synthetic.hpp"
#include "tbw/text_io.hpp"

using namespace tbw;
using tbw::testing::TempDir;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected tbw::Error");
  return ErrorCode::runtime;
}

}  // namespace

TEST_CASE("load_embeddings normalizes rows") {
  const auto table = parse_embeddings("2 3\na\t1 0 0\nb\t0 2 0\n");
  CHECK(table.size() == 2);
  CHECK(table.dim() == 3);
  const auto b = table.vector_of("b");
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b[2] == 0.0);
  CHECK(table.tokens() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_embeddings rejects malformed input") {
  CHECK(code_of([] { parse_embeddings("2 3\na\t1 0 0\nb\t0 2\n"); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([] { parse_embeddings("2 2\na\t1 0\na\t0 1\n"); }) == ErrorCode::duplicate_token);
  CHECK(code_of([] { parse_embeddings("1 2\na\t0 0\n"); }) == ErrorCode::zero_vector);
  CHECK(code_of([] { parse_embeddings("two 3\n"); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { parse_embeddings("2 2 2\n"); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { parse_embeddings("3 2\na\t1 0\n"); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { parse_embeddings("1 2\na\t1 x\n"); }) == ErrorCode::malformed_record);
  CHECK(code_of([] { parse_embeddings(""); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { load_embeddings("/nonexistent/emb.txt"); }) == ErrorCode::io);
}

TEST_CASE("every stored vector is unit length") {
  const auto table = random_table(200, 7, 3);
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(l2_norm(table.vector(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("load -> save -> load round-trips") {
  TempDir dir;
  const auto original = random_table(50, 5, 11);
  save_embeddings(original, dir / "emb.txt");
  const auto reloaded = load_embeddings(dir / "emb.txt");
  REQUIRE(reloaded.tokens() == original.tokens());
  REQUIRE(reloaded.dim() == original.dim());
  for (std::size_t i = 0; i < original.size(); ++i) {
    for (std::size_t d = 0; d < original.dim(); ++d) {
      CHECK(std::abs(reloaded.vector(i)[d] - original.vector(i)[d]) < 1e-9);
    }
  }
}

TEST_CASE("cosine_sim examples") {
  const Vector x{1, 0}, y{0, 1}, z{0.6, 0.8};
  CHECK(cosine_sim(x, x) == 1.0);
  CHECK(cosine_sim(x, y) == 0.0);
  CHECK(cosine_sim(z, x) == doctest::Approx(testing::oracle_cosine(z, x)).epsilon(1e-15));
  CHECK(cosine_sim(z, x) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(code_of([] { cosine_sim(Vector{1, 0}, Vector{1, 0, 0}); }) ==
        ErrorCode::dimension_mismatch);
  CHECK(code_of([] { cosine_sim(Vector{0, 0}, Vector{1, 0}); }) == ErrorCode::zero_vector);
}

TEST_CASE("cosine_sim is symmetric and self-similar on random vectors") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(6), b(6);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    CHECK(cosine_sim(a, b) == doctest::Approx(cosine_sim(b, a)).epsilon(1e-12));
    CHECK(std::abs(cosine_sim(a, a) - 1.0) < 1e-9);
    CHECK(cosine_sim(a, b) >= -1.0);
    CHECK(cosine_sim(a, b) <= 1.0);
  }
}

TEST_CASE("mean_embedding") {
  const auto table = testing::table_of(2, {{"a", {1, 0}}, {"b", {0, 1}}});
  const std::vector<std::string> single{"b"};
  CHECK(mean_embedding(single, table) == Vector{0.0, 1.0});

  const std::vector<std::string> both{"a", "b"};
  const auto m = mean_embedding(both, table);
  CHECK(m[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const std::vector<std::string> with_unknown{"zzz", "a"};
  CHECK(mean_embedding(with_unknown, table) == Vector{1.0, 0.0});

  const std::vector<std::string> unknown{"zzz"};
  CHECK(code_of([&] { mean_embedding(unknown, table); }) == ErrorCode::no_embeddable_tokens);

  const auto opposite = testing::table_of(1, {{"p", {1}}, {"q", {-1}}});
  const std::vector<std::string> cancel{"p", "q"};
  CHECK(code_of([&] { mean_embedding(cancel, opposite); }) == ErrorCode::zero_vector);
}

TEST_CASE("mean_embedding is permutation invariant") {
  const auto table = random_table(40, 8, 21);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> tokens;
    for (int i = 0; i < 12; ++i) tokens.push_back(table.token(rng() % table.size()));
    const auto base = mean_embedding(tokens, table);
    std::shuffle(tokens.begin(), tokens.end(), rng);
    const auto shuffled = mean_embedding(tokens, table);
    for (std::size_t d = 0; d < base.size(); ++d) CHECK(std::abs(base[d] - shuffled[d]) < 1e-12);
  }
}

TEST_CASE("TopicSet requires two topics") {
  CHECK(code_of([] { TopicSet(testing::table_of(2, {{"only", {1, 0}}})); }) ==
        ErrorCode::too_few_topics);
  const auto topics = testing::two_topics();
  CHECK(topics.size() == 2);
  CHECK(topics.name(1) == "B");
}

TEST_CASE("closest_topic breaks ties toward the lower index") {
  const auto topics = testing::two_topics();
  const Vector diag = normalized(Vector{1.0, 1.0});
  CHECK(closest_topic(diag, topics).index == 0);
  CHECK(closest_topic(Vector{0.6, 0.8}, topics).index == 1);
}

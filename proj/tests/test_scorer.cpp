#include <doctest.h>

#include <chrono>

#include "tempdiff/scorer.hpp"
#include "tempdiff/similarity.hpp"
#include "test_util.hpp"

using namespace tempdiff;
using tempdiff::testing::TempDir;

namespace {

EntailmentExample example(const std::string& premise,
                          const std::string& hypothesis) {
    EntailmentExample ex;
    ex.premise = premise;
    ex.hypothesis = hypothesis;
    return ex;
}

}  // namespace

TEST_CASE("mock backend reads its table") {
    MockBackend backend;
    backend.set_score("P", "H", 0.8);
    ScorerOutput out = backend.score(example("P", "H"));
    CHECK(out.p_ent == doctest::Approx(0.8));
    CHECK(out.p_con == doctest::Approx(0.2));
    out.validate();
}

TEST_CASE("mock backend defaults unknown keys to a coin flip") {
    MockBackend backend;
    ScorerOutput out = backend.score(example("unseen", "pair"));
    CHECK(out.p_ent == doctest::Approx(0.5));
    CHECK(out.p_con == doctest::Approx(0.5));
}

TEST_CASE("mock backend loads the record-format table") {
    auto backend =
        MockBackend::from_file(tempdiff::testing::fixture_path("mock_scores.jsonl"));
    ScorerOutput out = backend->score(
        example("The sky darkened over the harbor.",
                "The storm rolled in starts before the boats returned"));
    CHECK(out.p_ent == doctest::Approx(0.8));
}

TEST_CASE("mock determinism") {
    MockBackend backend;
    backend.set_score("P", "H", 0.73);
    for (int i = 0; i < 10; ++i) {
        CHECK(backend.score(example("P", "H")).p_ent == doctest::Approx(0.73));
    }
}

TEST_CASE("batch scoring preserves order and matches single scoring") {
    MockBackend backend;
    backend.set_score("P1", "H", 0.9);
    backend.set_score("P2", "H", 0.1);

    CHECK(backend.batch_score({}).empty());

    std::vector<EntailmentExample> batch = {example("P1", "H"), example("P2", "H")};
    auto outs = backend.batch_score(batch);
    REQUIRE(outs.size() == 2);
    CHECK(outs[0].p_ent == backend.score(batch[0]).p_ent);
    CHECK(outs[1].p_ent == backend.score(batch[1]).p_ent);
}

TEST_CASE("a thousand mock scores complete well under a second") {
    MockBackend backend;
    std::vector<EntailmentExample> batch;
    for (int i = 0; i < 1000; ++i) {
        batch.push_back(example("premise " + std::to_string(i), "h"));
    }
    auto start = std::chrono::steady_clock::now();
    auto outs = backend.batch_score(batch);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    CHECK(outs.size() == 1000);
    CHECK(elapsed.count() < 1000);
}

TEST_CASE("backend config invariants") {
    BackendConfig config;
    CHECK_NOTHROW(config.validate());
    config.batch_size = 0;
    CHECK_THROWS(config.validate());
    config.batch_size = 1;
    config.max_input_length = 8;
    CHECK_THROWS(config.validate());
}

TEST_CASE("token overlap similarity") {
    TokenOverlapSimilarity sim;
    CHECK(sim.similarity("The cat sat on the mat.", "The cat sat on the mat.") >=
          0.999);
    CHECK(sim.similarity("alpha beta gamma", "delta epsilon zeta") ==
          doctest::Approx(0.0));
    // Symmetric.
    CHECK(sim.similarity("a b c", "b c d") ==
          doctest::Approx(sim.similarity("b c d", "a b c")));
    CHECK_THROWS(sim.similarity("", "x"));
}

TEST_CASE("hashed embedding similarity behaves like a sentence encoder") {
    HashedEmbeddingSimilarity sim;
    CHECK(sim.similarity("The meeting ran long.", "The meeting ran long.") >=
          0.999);
    double paraphrase = sim.similarity(
        "The committee approved the budget after a short debate.",
        "After a brief discussion the committee passed the budget.");
    CHECK(paraphrase > 0.0);
    CHECK(paraphrase < 1.0);
    double unrelated = sim.similarity(
        "The committee approved the budget after a short debate.",
        "Snails moved across the wet garden stones overnight.");
    CHECK(paraphrase > unrelated);
}

TEST_CASE("similarity model factory") {
    CHECK(make_similarity_model("overlap") != nullptr);
    CHECK(make_similarity_model("embedding") != nullptr);
    CHECK_THROWS(make_similarity_model("sbert"));
}

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "tempdiff/error.hpp"
#include "tempdiff/instance_store.hpp"
#include "test_util.hpp"

using namespace tempdiff;
using tempdiff::testing::TempDir;
using tempdiff::testing::fixture_path;

TEST_CASE("hard dataset round-trips through a fixture file") {
    TempDir dir("store");
    std::string content =
        R"({"id":"a","context":"The door creaked open. Nobody was home.","e1":"someone knocked","e2":"the door creaked open","gold":"before","source":"other"})"
        "\n"
        R"({"id":"b","context":"Rain fell all night. The river rose by dawn.","e1":"the town worried","e2":"the river rose","gold":"after","source":"matres"})"
        "\n"
        R"({"id":"c","context":"He wrote a letter. She replied in spring.","e1":"he waited for an answer","e2":"she replied","gold":"before","source":"tracie"})"
        "\n";
    std::string path = dir.write_file("hard.jsonl", content);

    auto instances = load_hard_dataset(path);
    REQUIRE(instances.size() == 3);
    CHECK(instances[0].id == "a");
    CHECK(instances[1].gold == Relation::after);
    CHECK(instances[2].source == Source::tracie);

    // Order preserved, serialization canonical.
    std::ostringstream round;
    for (const auto& inst : instances) round << serialize(inst) << '\n';
    CHECK(round.str() == content);
}

TEST_CASE("record missing gold fails with its line number") {
    TempDir dir("store");
    std::string path = dir.write_file(
        "bad.jsonl",
        R"({"id":"a","context":"Fine day.","e1":"x happened","e2":"y happened","gold":"before","source":"other"})"
        "\n"
        R"({"id":"b","context":"Fine day.","e1":"x happened","e2":"y happened","source":"other"})"
        "\n");
    try {
        load_hard_dataset(path);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("gold") != std::string::npos);
    }
}

TEST_CASE("duplicate ids are rejected") {
    TempDir dir("store");
    std::string rec =
        R"({"id":"dup","context":"Same story twice.","e1":"a happened","e2":"b happened","gold":"before","source":"other"})";
    std::string path = dir.write_file("dup.jsonl", rec + "\n" + rec + "\n");
    CHECK_THROWS_AS(load_hard_dataset(path), LoadError);
}

TEST_CASE("diff record whose sentence is copied from the context is invalid") {
    TempDir dir("store");
    std::string path = dir.write_file(
        "diff.jsonl",
        R"({"id":"x","context":"The cat slept. The fire crackled.","e1":"the cat dreamed","e2":"the fire crackled","additional_sentence":"The cat slept.","direction":"before","split":"train"})"
        "\n");
    CHECK_THROWS_AS(load_diff_dataset(path), LoadError);
}

TEST_CASE("corpus stats on an empty list are all zero") {
    CorpusStats st = corpus_stats(std::vector<HardInstance>{});
    CHECK(st.n_train == 0);
    CHECK(st.n_test == 0);
    CHECK(st.total() == 0);
    CHECK(st.label_counts.at(Relation::before) == 0);
    CHECK(st.label_counts.at(Relation::after) == 0);
}

TEST_CASE("corpus stats count labels") {
    std::vector<HardInstance> instances;
    instances.push_back(tempdiff::testing::make_hard_instance("1", Relation::before));
    instances.push_back(tempdiff::testing::make_hard_instance("2", Relation::before));
    instances.push_back(tempdiff::testing::make_hard_instance("3", Relation::after));
    CorpusStats st = corpus_stats(instances);
    CHECK(st.label_counts.at(Relation::before) == 2);
    CHECK(st.label_counts.at(Relation::after) == 1);
    CHECK(st.n_train == 3);
}

TEST_CASE("stats partition hard corpora by load-time split") {
    auto train = load_hard_dataset(fixture_path("hard_train.jsonl"), Split::train);
    auto test = load_hard_dataset(fixture_path("hard_test.jsonl"), Split::test);
    train.insert(train.end(), test.begin(), test.end());
    CorpusStats st = corpus_stats(train);
    CHECK(st.n_train == 16);
    CHECK(st.n_test == 8);
    CHECK(st.total() == 24);
}

TEST_CASE("bundled fixtures satisfy their schemas") {
    auto hard_train = load_hard_dataset(fixture_path("hard_train.jsonl"));
    auto hard_test = load_hard_dataset(fixture_path("hard_test.jsonl"), Split::test);
    auto diff_train = load_diff_dataset(fixture_path("diff_train.jsonl"));
    auto diff_test = load_diff_dataset(fixture_path("diff_test.jsonl"));
    CHECK(hard_train.size() == 16);
    CHECK(hard_test.size() == 8);
    CHECK(diff_train.size() == 16);
    CHECK(diff_test.size() == 8);
    for (const auto& inst : diff_train) CHECK(inst.split == Split::train);
    for (const auto& inst : diff_test) CHECK(inst.split == Split::test);
}

TEST_CASE("fixture files are byte-identical under reserialization") {
    for (const char* name : {"diff_train.jsonl", "diff_test.jsonl"}) {
        std::ifstream in(fixture_path(name));
        std::ostringstream original;
        original << in.rdbuf();
        std::ostringstream round;
        for (const auto& inst : load_diff_dataset(fixture_path(name))) {
            round << serialize(inst) << '\n';
        }
        CHECK(round.str() == original.str());
    }
}

namespace {

// Property data: randomized instances exercising the serializer.
DiffInstance random_diff(std::mt19937_64& rng, int i) {
    static const char* contexts[] = {
        "The train left the valley. Fog settled on the fields.",
        "A parcel arrived unannounced. The dog barked at the courier.",
        "The violin shop closed early. Snow kept the customers home.",
    };
    DiffInstance inst;
    inst.id = "gen-" + std::to_string(i);
    inst.context = contexts[rng() % 3];
    inst.pair = {"someone made a choice " + std::to_string(rng() % 100),
                 "the day moved on " + std::to_string(rng() % 100)};
    inst.additional_sentence =
        "An earlier promise shaped everything " + std::to_string(rng() % 100) + ".";
    inst.direction = rng() % 2 ? Relation::before : Relation::after;
    if (rng() % 2) {
        inst.explanation =
            "The promise explains the order " + std::to_string(rng() % 100) + ".";
    }
    inst.split = rng() % 2 ? Split::train : Split::test;
    return inst;
}

}  // namespace

TEST_CASE("generated records round-trip and validate") {
    std::mt19937_64 rng(7);
    std::vector<DiffInstance> instances;
    for (int i = 0; i < 200; ++i) instances.push_back(random_diff(rng, i));

    TempDir dir("prop");
    std::string path = dir.str() + "/gen.jsonl";
    save_diff_dataset(path, instances);
    auto loaded = load_diff_dataset(path);
    REQUIRE(loaded.size() == instances.size());
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(serialize(loaded[i]) == serialize(instances[i]));
        CHECK_NOTHROW(loaded[i].validate());
    }
    CorpusStats st = corpus_stats(loaded);
    CHECK(st.total() == instances.size());
    CHECK(st.label_counts.at(Relation::before) +
              st.label_counts.at(Relation::after) ==
          instances.size());
}

TEST_CASE("negation is an involution") {
    CHECK(negate(Relation::before) == Relation::after);
    CHECK(negate(Relation::after) == Relation::before);
    CHECK(negate(negate(Relation::before)) == Relation::before);
}

TEST_CASE("relation distribution invariants") {
    RelationDistribution d{0.6, 0.4, 0.0};
    CHECK_NOTHROW(d.validate_binary());

    RelationDistribution with_same{0.5, 0.3, 0.2};
    CHECK_NOTHROW(with_same.validate());
    CHECK_THROWS_AS(with_same.validate_binary(), ValidationError);

    RelationDistribution bad_sum{0.5, 0.3, 0.1};
    CHECK_THROWS_AS(bad_sum.validate(), ValidationError);

    RelationDistribution out_of_range{1.2, -0.2, 0.0};
    CHECK_THROWS_AS(out_of_range.validate(), ValidationError);
}

#include <doctest.h>

#include <random>
#include <set>

#include "tempdiff/entailment.hpp"
#include "test_util.hpp"

using namespace tempdiff;

TEST_CASE("hypothesis template") {
    EventPair pair{"Tim scheduled an appointment with his dentist",
                   "Tim's tooth started to hurt like crazy"};
    CHECK(build_hypothesis(pair, Relation::before) ==
          "Tim scheduled an appointment with his dentist starts before "
          "Tim's tooth started to hurt like crazy");
    CHECK(build_hypothesis({"a", "b"}, Relation::after) == "a starts after b");
}

TEST_CASE("hypothesis differs across relations for any pair") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        EventPair pair{"event " + std::to_string(rng() % 1000),
                       "event " + std::to_string(rng() % 1000)};
        CHECK(build_hypothesis(pair, Relation::before) !=
              build_hypothesis(pair, Relation::after));
    }
}

TEST_CASE("premise concatenation order and omission") {
    std::string context = "Tim's tooth was hurting like crazy. His dentist took "
                          "a look around in his mouth. One of his teeth was "
                          "rotten. Once the tooth was pulled, Tim felt fine.";
    std::string as = "Tim always met his dentist regularly.";
    std::string exp =
        "Some people maintain regular visits to a dentist. Tim is one of these "
        "individuals and may have already scheduled a regular appointment with "
        "his dentist before his tooth started to hurt.";

    CHECK(build_premise(context, std::nullopt, std::nullopt) == context);
    CHECK(build_premise(context, as, std::nullopt) == as + " " + context);
    CHECK(build_premise(context, as, exp) == as + " " + context + " " + exp);
    CHECK(build_premise(context, std::nullopt, exp) == context + " " + exp);
}

TEST_CASE("hard encoding targets follow the gold label") {
    auto inst = tempdiff::testing::make_hard_instance("h", Relation::before);
    auto examples = encode_hard(inst);
    CHECK(examples[0].meta.hypothesis_relation == Relation::before);
    CHECK(*examples[0].target == Target::positive);
    CHECK(*examples[1].target == Target::negative);
    CHECK(examples[0].premise == examples[1].premise);

    inst.gold = Relation::after;
    auto reversed = encode_hard(inst);
    CHECK(*reversed[0].target == Target::negative);
    CHECK(*reversed[1].target == Target::positive);
}

TEST_CASE("hard encoding targets flip exactly when gold flips") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        auto inst = tempdiff::testing::make_hard_instance(
            "p" + std::to_string(i), rng() % 2 ? Relation::before : Relation::after);
        auto a = encode_hard(inst);
        inst.gold = negate(inst.gold);
        auto b = encode_hard(inst);
        for (int k = 0; k < 2; ++k) {
            CHECK(a[k].premise == b[k].premise);
            CHECK(a[k].hypothesis == b[k].hypothesis);
            CHECK(*a[k].target != *b[k].target);
        }
    }
}

TEST_CASE("relative encoding yields the four ranking variants") {
    auto inst = tempdiff::testing::make_diff_instance();
    auto examples = encode_relative(inst, true);

    // Quadruple order: (AS, gold), (no AS, gold), (AS, opp), (no AS, opp).
    CHECK(examples[0].meta.with_additional);
    CHECK(examples[0].meta.is_gold_direction);
    CHECK(!examples[1].meta.with_additional);
    CHECK(examples[1].meta.is_gold_direction);
    CHECK(examples[2].meta.with_additional);
    CHECK(!examples[2].meta.is_gold_direction);
    CHECK(!examples[3].meta.with_additional);
    CHECK(!examples[3].meta.is_gold_direction);

    for (const auto& ex : examples) CHECK(!ex.target.has_value());

    std::set<std::pair<std::string, std::string>> distinct;
    for (const auto& ex : examples) distinct.insert({ex.premise, ex.hypothesis});
    CHECK(distinct.size() == 4);

    // Variants with the sentence differ only by the prepended text.
    CHECK(examples[0].premise ==
          inst.additional_sentence + " " + examples[1].premise);
    CHECK(examples[2].premise ==
          inst.additional_sentence + " " + examples[3].premise);
}

TEST_CASE("explanation flag controls premise content") {
    auto inst = tempdiff::testing::make_diff_instance();
    for (const auto& ex : encode_relative(inst, false)) {
        CHECK(ex.premise.find(*inst.explanation) == std::string::npos);
        CHECK(!ex.meta.with_explanation);
    }
    for (const auto& ex : encode_relative(inst, true)) {
        CHECK(ex.premise.find(*inst.explanation) != std::string::npos);
        CHECK(ex.meta.with_explanation);
    }
}

TEST_CASE("encoding is deterministic") {
    auto inst = tempdiff::testing::make_diff_instance();
    auto a = encode_relative(inst, true);
    auto b = encode_relative(inst, true);
    for (int i = 0; i < 4; ++i) {
        CHECK(a[i].premise == b[i].premise);
        CHECK(a[i].hypothesis == b[i].hypothesis);
    }
}

TEST_CASE("target strings render exactly") {
    CHECK(render_target(Target::positive) == "answer: positive");
    CHECK(render_target(Target::negative) == "answer: negative");
    CHECK(render_target(Target::positive) != render_target(Target::negative));
}

#pragma once

#include <array>
#include <optional>
#include <string>

#include "tempdiff/instance.hpp"

namespace tempdiff {

enum class Target { positive, negative };

// Which rendering of an instance an example corresponds to.
struct ExampleMeta {
    std::string instance_id;
    Relation hypothesis_relation = Relation::before;
    bool with_additional = false;
    bool with_explanation = false;
    // For relative renderings: hypothesis relation equals the gold direction.
    bool is_gold_direction = false;
};

// Premise/hypothesis pair; the unit of scoring and training.
struct EntailmentExample {
    std::string premise;
    std::string hypothesis;
    std::optional<Target> target;
    ExampleMeta meta;
};

// "<e1> starts <r> <e2>", single spaces, relation keyword lowercase.
std::string build_hypothesis(const EventPair& pair, Relation r);

// Concatenates additional sentence, context, explanation in that order,
// single space between present parts.
std::string build_premise(const std::string& context,
                          const std::optional<std::string>& additional_sentence,
                          const std::optional<std::string>& explanation);

// "answer: positive" / "answer: negative".
std::string render_target(Target t);

// Two examples per hard instance: hypothesis before then after; target is
// positive exactly when the hypothesis relation equals the gold label.
std::array<EntailmentExample, 2> encode_hard(const HardInstance& inst);

// Four scoring variants, in rank-quadruple order:
//   [0] with AS,    gold direction
//   [1] without AS, gold direction
//   [2] with AS,    opposite direction
//   [3] without AS, opposite direction
// Targets absent; these are ranked, not classified. The explanation, when
// included, appears in all four premises so the ranking isolates the
// additional sentence's effect.
std::array<EntailmentExample, 4> encode_relative(const DiffInstance& inst,
                                                 bool include_explanation);

}  // namespace tempdiff

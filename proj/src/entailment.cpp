#include "tempdiff/entailment.hpp"

namespace tempdiff {

std::string build_hypothesis(const EventPair& pair, Relation r) {
    return pair.e1 + " starts " + to_string(r) + " " + pair.e2;
}

std::string build_premise(const std::string& context,
                          const std::optional<std::string>& additional_sentence,
                          const std::optional<std::string>& explanation) {
    std::string out;
    if (additional_sentence && !additional_sentence->empty()) {
        out += *additional_sentence;
        out += ' ';
    }
    out += context;
    if (explanation && !explanation->empty()) {
        out += ' ';
        out += *explanation;
    }
    return out;
}

std::string render_target(Target t) {
    return t == Target::positive ? "answer: positive" : "answer: negative";
}

std::array<EntailmentExample, 2> encode_hard(const HardInstance& inst) {
    std::array<EntailmentExample, 2> out;
    std::string premise = build_premise(inst.context, std::nullopt, std::nullopt);
    const Relation rels[2] = {Relation::before, Relation::after};
    for (int i = 0; i < 2; ++i) {
        out[i].premise = premise;
        out[i].hypothesis = build_hypothesis(inst.pair, rels[i]);
        out[i].target = rels[i] == inst.gold ? Target::positive : Target::negative;
        out[i].meta.instance_id = inst.id;
        out[i].meta.hypothesis_relation = rels[i];
        out[i].meta.is_gold_direction = rels[i] == inst.gold;
    }
    return out;
}

std::array<EntailmentExample, 4> encode_relative(const DiffInstance& inst,
                                                 bool include_explanation) {
    std::optional<std::string> exp;
    if (include_explanation && inst.explanation) exp = inst.explanation;

    std::array<EntailmentExample, 4> out;
    const Relation rels[2] = {inst.direction, negate(inst.direction)};
    for (int ri = 0; ri < 2; ++ri) {
        for (int with_as = 1; with_as >= 0; --with_as) {
            EntailmentExample& ex = out[ri * 2 + (1 - with_as)];
            ex.premise = build_premise(
                inst.context,
                with_as ? std::optional<std::string>(inst.additional_sentence)
                        : std::nullopt,
                exp);
            ex.hypothesis = build_hypothesis(inst.pair, rels[ri]);
            ex.meta.instance_id = inst.id;
            ex.meta.hypothesis_relation = rels[ri];
            ex.meta.with_additional = with_as != 0;
            ex.meta.with_explanation = exp.has_value();
            ex.meta.is_gold_direction = ri == 0;
        }
    }
    return out;
}

}  // namespace tempdiff

#pragma once

#include <string>

#include "tempdiff/error.hpp"

namespace tempdiff {

// Binary temporal relation between two events.
enum class Relation {
    before,
    after,
};

inline Relation negate(Relation r) {
    return r == Relation::before ? Relation::after : Relation::before;
}

inline const char* to_string(Relation r) {
    return r == Relation::before ? "before" : "after";
}

inline Relation relation_from_string(const std::string& s) {
    if (s == "before") return Relation::before;
    if (s == "after") return Relation::after;
    throw ValidationError("unknown relation: '" + s + "'");
}

// Distribution over the three possible relations of an event pair.
// p_same is carried for completeness; binary corpora must keep it at zero.
struct RelationDistribution {
    double p_before = 0.0;
    double p_after = 0.0;
    double p_same = 0.0;

    void validate() const;

    // Stricter check for the binary pipeline: p_same must be exactly zero.
    void validate_binary() const;
};

}  // namespace tempdiff

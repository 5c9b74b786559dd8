#include "tempdiff/relation.hpp"

#include <cmath>

namespace tempdiff {

void RelationDistribution::validate() const {
    for (double p : {p_before, p_after, p_same}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("relation probability out of [0,1]: " +
                                  std::to_string(p));
        }
    }
    double sum = p_before + p_after + p_same;
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ValidationError("relation probabilities sum to " +
                              std::to_string(sum) + ", expected 1");
    }
}

void RelationDistribution::validate_binary() const {
    validate();
    if (p_same != 0.0) {
        throw ValidationError("binary corpus carries nonzero p_same: " +
                              std::to_string(p_same));
    }
}

}  // namespace tempdiff

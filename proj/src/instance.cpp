#include "tempdiff/instance.hpp"

#include "tempdiff/error.hpp"

namespace tempdiff {

const char* to_string(Split s) {
    return s == Split::train ? "train" : "test";
}

const char* to_string(Source s) {
    switch (s) {
        case Source::tracie: return "tracie";
        case Source::matres: return "matres";
        default: return "other";
    }
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw ValidationError("unknown split: '" + s + "'");
}

Source source_from_string(const std::string& s) {
    if (s == "tracie") return Source::tracie;
    if (s == "matres") return Source::matres;
    if (s == "other") return Source::other;
    throw ValidationError("unknown source: '" + s + "'");
}

void EventPair::validate() const {
    if (e1.empty() || e2.empty()) {
        throw ValidationError("event phrases must be non-empty");
    }
    if (e1.find('\n') != std::string::npos || e2.find('\n') != std::string::npos) {
        throw ValidationError("event phrases must be single clauses (no newline)");
    }
}

void HardInstance::validate() const {
    if (id.empty()) throw ValidationError("instance id must be non-empty");
    if (context.empty()) {
        throw ValidationError("instance '" + id + "': context must be non-empty");
    }
    pair.validate();
}

void DiffInstance::validate(bool check_substring) const {
    if (id.empty()) throw ValidationError("instance id must be non-empty");
    if (context.empty()) {
        throw ValidationError("instance '" + id + "': context must be non-empty");
    }
    pair.validate();
    if (additional_sentence.empty()) {
        throw ValidationError("instance '" + id +
                              "': additional_sentence must be non-empty");
    }
    if (check_substring &&
        context.find(additional_sentence) != std::string::npos) {
        throw ValidationError("instance '" + id +
                              "': additional_sentence is a verbatim substring "
                              "of the context");
    }
    if (explanation && explanation->empty()) {
        throw ValidationError("instance '" + id +
                              "': explanation present but empty");
    }
}

namespace {

template <typename T>
CorpusStats stats_impl(const std::vector<T>& instances, Relation T::*label) {
    CorpusStats st;
    st.label_counts[Relation::before] = 0;
    st.label_counts[Relation::after] = 0;
    for (const auto& inst : instances) {
        if (inst.split == Split::train) ++st.n_train; else ++st.n_test;
        ++st.label_counts[inst.*label];
    }
    return st;
}

}  // namespace

CorpusStats corpus_stats(const std::vector<HardInstance>& instances) {
    return stats_impl(instances, &HardInstance::gold);
}

CorpusStats corpus_stats(const std::vector<DiffInstance>& instances) {
    return stats_impl(instances, &DiffInstance::direction);
}

}  // namespace tempdiff

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempdiff/relation.hpp"

namespace tempdiff {

enum class Split { train, test };
enum class Source { tracie, matres, other };

const char* to_string(Split s);
const char* to_string(Source s);
Split split_from_string(const std::string& s);
Source source_from_string(const std::string& s);

// A pair of event phrases, each a single clause.
struct EventPair {
    std::string e1;
    std::string e2;

    void validate() const;
};

// Event pair with an absolute before/after gold label (TRACIE/MATRES style).
// `split` is load-time metadata: the record format carries no split field,
// hard corpora are split per file.
struct HardInstance {
    std::string id;
    std::string context;
    EventPair pair;
    Relation gold = Relation::before;
    Source source = Source::other;
    Split split = Split::train;

    void validate() const;
};

// Event pair plus an additional sentence that shifts the relation
// distribution toward `direction` (TODAY style).
struct DiffInstance {
    std::string id;
    std::string context;
    EventPair pair;
    std::string additional_sentence;
    Relation direction = Relation::before;
    std::optional<std::string> explanation;
    Split split = Split::train;

    // `check_substring` is relaxed for generated candidates, whose
    // near-copy sentences are the similarity stage's job to reject.
    void validate(bool check_substring = true) const;
};

struct CorpusStats {
    size_t n_train = 0;
    size_t n_test = 0;
    std::map<Relation, size_t> label_counts;

    size_t total() const { return n_train + n_test; }
};

CorpusStats corpus_stats(const std::vector<HardInstance>& instances);
CorpusStats corpus_stats(const std::vector<DiffInstance>& instances);

}  // namespace tempdiff

#pragma once

#include <memory>
#include <string>

namespace tempdiff {

// Sentence-similarity model: cosine score in [-1, 1], symmetric.
class SimilarityModel {
public:
    virtual ~SimilarityModel() = default;
    virtual double similarity(const std::string& a, const std::string& b) const = 0;
};

// Cosine over normalized token count vectors. Deterministic; the test
// backend of choice.
class TokenOverlapSimilarity : public SimilarityModel {
public:
    double similarity(const std::string& a, const std::string& b) const override;
};

// Cosine over hashed character n-gram embeddings. Deterministic stand-in
// for a learned sentence encoder: near-copies score close to 1, unrelated
// text scores near 0, paraphrases land in between.
class HashedEmbeddingSimilarity : public SimilarityModel {
public:
    explicit HashedEmbeddingSimilarity(int dim = 256, int ngram = 3);

    double similarity(const std::string& a, const std::string& b) const override;

private:
    int dim_;
    int ngram_;
};

std::unique_ptr<SimilarityModel> make_similarity_model(const std::string& name);

}  // namespace tempdiff

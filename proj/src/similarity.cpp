#include "tempdiff/similarity.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "tempdiff/error.hpp"
#include "tempdiff/text.hpp"

namespace tempdiff {

namespace {

void require_non_empty(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("similarity inputs must be non-empty");
    }
}

double cosine(const std::unordered_map<size_t, double>& u,
              const std::unordered_map<size_t, double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (const auto& [k, x] : u) {
        nu += x * x;
        auto it = v.find(k);
        if (it != v.end()) dot += x * it->second;
    }
    for (const auto& [k, x] : v) nv += x * x;
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace

double TokenOverlapSimilarity::similarity(const std::string& a,
                                          const std::string& b) const {
    require_non_empty(a, b);
    std::unordered_map<size_t, double> u, v;
    std::hash<std::string> h;
    for (const auto& tok : normalized_tokens(a)) u[h(tok)] += 1.0;
    for (const auto& tok : normalized_tokens(b)) v[h(tok)] += 1.0;
    return cosine(u, v);
}

HashedEmbeddingSimilarity::HashedEmbeddingSimilarity(int dim, int ngram)
    : dim_(dim), ngram_(ngram) {
    if (dim < 8 || ngram < 1) throw ValidationError("bad embedding parameters");
}

double HashedEmbeddingSimilarity::similarity(const std::string& a,
                                             const std::string& b) const {
    require_non_empty(a, b);
    auto embed = [&](const std::string& text) {
        std::unordered_map<size_t, double> vec;
        std::string lowered;
        lowered.reserve(text.size());
        for (char c : text) {
            lowered.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        std::hash<std::string> h;
        // Character n-grams plus whole tokens; signed hashing spreads mass
        // so unrelated strings decorrelate.
        for (int n = ngram_; n <= ngram_ + 1; ++n) {
            if (static_cast<int>(lowered.size()) < n) continue;
            for (size_t i = 0; i + n <= lowered.size(); ++i) {
                size_t code = h(lowered.substr(i, n));
                double sign = (code >> 17) & 1 ? 1.0 : -1.0;
                vec[code % dim_] += sign;
            }
        }
        for (const auto& tok : normalized_tokens(lowered)) {
            size_t code = h(tok) ^ 0x9e3779b97f4a7c15ULL;
            double sign = (code >> 23) & 1 ? 1.0 : -1.0;
            vec[code % dim_] += 2.0 * sign;
        }
        return vec;
    };
    return cosine(embed(a), embed(b));
}

std::unique_ptr<SimilarityModel> make_similarity_model(const std::string& name) {
    if (name == "overlap") return std::make_unique<TokenOverlapSimilarity>();
    if (name == "embedding") return std::make_unique<HashedEmbeddingSimilarity>();
    throw Error("unknown similarity model: '" + name + "'");
}

}  // namespace tempdiff

#pragma once

#include <string>
#include <vector>

namespace tempdiff {

// Whitespace-delimited tokens, order preserved.
std::vector<std::string> tokenize(const std::string& text);

// Lowercased tokens with surrounding punctuation stripped; empties dropped.
std::vector<std::string> normalized_tokens(const std::string& text);

// Split on terminal punctuation (. ! ?); each sentence keeps its terminator.
std::vector<std::string> split_sentences(const std::string& text);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string trim(const std::string& s);

bool starts_with(const std::string& s, const std::string& prefix);

}  // namespace tempdiff

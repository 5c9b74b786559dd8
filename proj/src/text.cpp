#include "tempdiff/text.hpp"

#include <cctype>
#include <sstream>

namespace tempdiff {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> normalized_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(text)) {
        size_t b = 0, e = tok.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(tok[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(tok[e - 1]))) --e;
        if (b == e) continue;
        std::string norm = tok.substr(b, e - b);
        for (char& c : norm) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(norm));
    }
    return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur.push_back(c);
        bool terminal = (c == '.' || c == '!' || c == '?');
        bool at_break = terminal &&
            (i + 1 == text.size() ||
             std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (at_break) {
            std::string s = trim(cur);
            if (!s.empty()) out.push_back(std::move(s));
            cur.clear();
        }
    }
    std::string tail = trim(cur);
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace tempdiff

#include "parsrec/tokens.hpp"

#include <array>
#include <cassert>
#include <stdexcept>

namespace parsrec {

namespace {

constexpr std::array<std::string_view, kNumWordClasses> kClassNames = {
    "number",   "capword", "upperlett", "allcaps",  "lowerword",
    "mixedword", "comma",   "dot",       "semicolon", "colon",
    "hyphen",   "lparen",  "rparen",    "lbracket",  "rbracket",
    "quote",    "slash",   "amp",       "other"};

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_ascii_alnum(char c) {
    return is_ascii_digit(c) || is_ascii_upper(c) || is_ascii_lower(c);
}

// Length in bytes of the UTF-8 sequence starting at s[i]; malformed lead
// bytes count as length 1 so tokenization stays total.
std::size_t utf8_len(std::string_view s, std::size_t i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t n = 1;
    if ((c & 0xE0) == 0xC0) n = 2;
    else if ((c & 0xF0) == 0xE0) n = 3;
    else if ((c & 0xF8) == 0xF0) n = 4;
    if (i + n > s.size()) n = 1;
    return n;
}

// Single-character (possibly multi-byte) punctuation classes.
WordClass punct_class(std::string_view tok) {
    if (tok.size() == 1) {
        switch (tok[0]) {
            case ',': return WordClass::Comma;
            case '.': return WordClass::Dot;
            case ';': return WordClass::Semicolon;
            case ':': return WordClass::Colon;
            case '-': return WordClass::Hyphen;
            case '(': return WordClass::LParen;
            case ')': return WordClass::RParen;
            case '[': return WordClass::LBracket;
            case ']': return WordClass::RBracket;
            case '\'': return WordClass::Quote;
            case '"': return WordClass::Quote;
            case '/': return WordClass::Slash;
            case '&': return WordClass::Amp;
            default: return WordClass::Other;
        }
    }
    // Dash variants collapse to hyphen; curly quotes to quote.
    if (tok == "–" || tok == "—" || tok == "‐" || tok == "−")
        return WordClass::Hyphen;
    if (tok == "“" || tok == "”" || tok == "‘" || tok == "’")
        return WordClass::Quote;
    return WordClass::Other;
}

}  // namespace

std::string_view word_class_name(WordClass c) {
    return kClassNames[static_cast<std::size_t>(c)];
}

WordClass word_class_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == name) return static_cast<WordClass>(i);
    }
    throw std::invalid_argument("unknown word class: \"" + std::string(name) + "\"");
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_ascii_space(c)) {
            ++i;
            continue;
        }
        if (is_ascii_alnum(c)) {
            std::size_t j = i + 1;
            while (j < s.size() && is_ascii_alnum(s[j])) ++j;
            out.emplace_back(s.substr(i, j - i));
            i = j;
            continue;
        }
        std::size_t n = utf8_len(s, i);
        out.emplace_back(s.substr(i, n));
        i += n;
    }
    return out;
}

WordClass classify(std::string_view token) {
    assert(!token.empty() && "classify: empty token is a contract violation");

    bool all_alnum = true;
    bool all_digit = true;
    std::size_t n_upper = 0, n_lower = 0, n_digit = 0;
    for (char c : token) {
        if (!is_ascii_alnum(c)) { all_alnum = false; break; }
        if (is_ascii_digit(c)) ++n_digit; else all_digit = false;
        if (is_ascii_upper(c)) ++n_upper;
        if (is_ascii_lower(c)) ++n_lower;
    }
    if (all_alnum) {
        if (all_digit) return WordClass::Number;
        std::size_t n_letters = n_upper + n_lower;
        bool letters_only = n_digit == 0;
        if (letters_only && token.size() == 1 && n_upper == 1) return WordClass::UpperLett;
        if (letters_only && n_upper == 1 && is_ascii_upper(token[0]) && n_lower == token.size() - 1)
            return WordClass::CapWord;
        if (letters_only && n_letters >= 2 && n_lower == 0) return WordClass::AllCaps;
        if (letters_only && n_upper == 0) return WordClass::LowerWord;
        return WordClass::MixedWord;
    }
    return punct_class(token);
}

ClassSequence class_sequence(std::string_view s) {
    ClassSequence seq;
    for (auto& tok : tokenize(s)) {
        WordClass c = classify(tok);
        seq.tokens.push_back({std::move(tok), c});
    }
    return seq;
}

}  // namespace parsrec

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace parsrec {

/// Shape class of a token. Every token maps to exactly one class; the
/// mapping is total and deterministic. Dash typography collapses to Hyphen
/// so page ranges look identical across styles.
enum class WordClass : std::uint8_t {
    Number = 0,
    CapWord,    // one uppercase letter followed by lowercase letters
    UpperLett,  // single uppercase letter
    AllCaps,    // >=2 letters, all uppercase
    LowerWord,  // >=1 letters, all lowercase
    MixedWord,  // any other alphanumeric token ("2nd", "D1", "McKay")
    Comma,
    Dot,
    Semicolon,
    Colon,
    Hyphen,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Quote,
    Slash,
    Amp,
    Other,
};

inline constexpr int kNumWordClasses = 19;

std::string_view word_class_name(WordClass c);

/// Parses a class name; throws std::invalid_argument on unknown names.
WordClass word_class_from_name(std::string_view name);

struct ClassedToken {
    std::string surface;
    WordClass cls;
};

/// Token class sequence for one reference string (lossy: separators are not
/// retained).
struct ClassSequence {
    std::vector<ClassedToken> tokens;

    std::size_t size() const { return tokens.size(); }
};

/// Splits a string into maximal ASCII-alphanumeric runs plus one token per
/// remaining non-whitespace character (a multi-byte UTF-8 character counts
/// as one token). Whitespace separates only.
std::vector<std::string> tokenize(std::string_view s);

/// Classifies one non-empty token. Empty input is a contract violation.
WordClass classify(std::string_view token);

ClassSequence class_sequence(std::string_view s);

}  // namespace parsrec

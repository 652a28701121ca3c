#include "parsrec/refmodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace parsrec {

namespace {

constexpr std::array<std::string_view, kNumFieldTypes> kFieldNames = {
    "author", "source", "year", "volume", "issue", "page"};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_edge_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':';
}

}  // namespace

const std::vector<FieldType>& all_field_types() {
    static const std::vector<FieldType> types = {
        FieldType::Author, FieldType::Source, FieldType::Year,
        FieldType::Volume, FieldType::Issue,  FieldType::Page};
    return types;
}

std::string_view field_type_name(FieldType t) {
    return kFieldNames[static_cast<std::size_t>(t)];
}

FieldType field_type_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
        if (kFieldNames[i] == name) return static_cast<FieldType>(i);
    }
    throw std::invalid_argument("unknown field type: \"" + std::string(name) + "\"");
}

std::string normalize_value(std::string_view raw) {
    // Collapse whitespace runs and lowercase in one pass. The corpus is
    // UTF-8; only ASCII bytes are touched, so multi-byte sequences pass
    // through intact.
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    // Stripping edge punctuation can expose a space, so iterate to a fixed
    // point; this is what makes the function idempotent.
    std::size_t b = 0, e = out.size();
    while (b < e && (is_space(out[b]) || is_edge_punct(out[b]))) ++b;
    while (e > b && (is_space(out[e - 1]) || is_edge_punct(out[e - 1]))) --e;
    return out.substr(b, e - b);
}

std::vector<std::string> fields_of_type(const ParsedReference& p, FieldType t) {
    std::vector<std::string> out;
    for (const auto& f : p.fields) {
        if (f.type != t) continue;
        std::string v = normalize_value(f.value);
        if (!v.empty()) out.push_back(std::move(v));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace parsrec

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parsrec {

/// The six metadata types handled throughout the pipeline. The set is
/// closed: anything else in input data is a hard error.
enum class FieldType : std::uint8_t {
    Author = 0,
    Source,
    Year,
    Volume,
    Issue,
    Page,
};

inline constexpr int kNumFieldTypes = 6;

/// All field types in canonical order (author, source, year, volume, issue, page).
const std::vector<FieldType>& all_field_types();

std::string_view field_type_name(FieldType t);

/// Parses a field type name; throws std::invalid_argument on unknown names.
FieldType field_type_from_name(std::string_view name);

/// One (type, value) pair as produced by a parser or stored as ground truth.
struct MetadataField {
    FieldType type;
    std::string value;  // raw, untrimmed

    bool operator==(const MetadataField&) const = default;
};

/// A parser's output for one reference string. Ordered multiset: repeated
/// types (several authors) are legitimate and counted individually. A failed
/// parse is represented by an empty ParsedReference, never by an error.
struct ParsedReference {
    std::vector<MetadataField> fields;

    bool empty() const { return fields.empty(); }
    bool operator==(const ParsedReference&) const = default;
};

/// A ground-truth corpus record.
struct LabeledReference {
    std::string id;
    std::string string;  // the raw reference string
    ParsedReference truth;
    std::string style;  // style tag, may be empty
};

/// Opaque parser identifier. Pools are kept in lexicographic ParserId order,
/// which is also the global tie-break order.
using ParserId = std::string;

/// Canonical form used for field-value equality: NFC-style cleanup restricted
/// to what the corpus can contain, whitespace collapsing, ASCII lowercasing,
/// and stripping of edge characters from { . , ; : }. Idempotent; may return
/// an empty string, which callers treat as an absent field.
std::string normalize_value(std::string_view raw);

/// Normalized values of all type-t fields, multiplicity preserved, sorted so
/// the result is directly comparable as a multiset. Empty-normalized values
/// are dropped.
std::vector<std::string> fields_of_type(const ParsedReference& p, FieldType t);

}  // namespace parsrec

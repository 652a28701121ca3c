#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "parsrec/refmodel.hpp"

namespace parsrec {

/// Ground-truth record a reference string is rendered from. Truth covers the
/// six field types only; the rendered string additionally contains a title,
/// which parsers must not emit.
struct TruthRecord {
    struct Author {
        std::string initials;  // "G." or "G. A."
        std::string last;
    };
    std::vector<Author> authors;  // 1..4
    std::string title;            // comma- and dot-free by construction
    std::string journal;
    int year = 0;
    int volume = 0;
    std::optional<int> issue;
    int page_from = 0;
    int page_to = 0;
    int enum_number = 1;  // "[3]" / "14." prefix styles

    ParsedReference truth() const;
};

/// A bibliography style: a name plus a deterministic rendering of a truth
/// record into a reference string.
struct StyleTemplate {
    std::string name;
    std::function<std::string(const TruthRecord&)> render;
};

/// The five built-in styles: numeric-bracket (Elsevier-like), dot-enumeration
/// (AMA-like), ACS-like, APA-like, IEEE-like.
const std::vector<StyleTemplate>& default_styles();

struct SplitSpec {
    double parser_train = 0.40;
    double meta_train = 0.30;
    double test = 0.30;
    std::uint64_t seed = 0;
};

struct SplitResult {
    std::vector<LabeledReference> parser_train;
    std::vector<LabeledReference> meta_train;
    std::vector<LabeledReference> test;
};

/// Generates n labeled references. Record i draws everything from a sub-seed
/// of (seed, i), so output is independent of generation order. Styles are
/// assigned round-robin with seeded jitter.
std::vector<LabeledReference> generate(std::size_t n, const std::vector<StyleTemplate>& styles,
                                       std::uint64_t seed);

/// Seeded shuffle, then contiguous cut: floor(n*f) for the first two parts,
/// remainder to test. Exact partition.
SplitResult split(const std::vector<LabeledReference>& data, const SplitSpec& spec);

void save_jsonl(const std::vector<LabeledReference>& data, const std::string& path);
std::vector<LabeledReference> load_jsonl(const std::string& path);

/// FNV-1a 64-bit hash over the corpus serialization, as a hex string;
/// recorded in model files so a model can be matched to its corpus.
std::string corpus_hash(const std::vector<LabeledReference>& data);

}  // namespace parsrec

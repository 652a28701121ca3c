#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parsrec/features.hpp"
#include "parsrec/learn.hpp"
#include "parsrec/parserpool.hpp"
#include "parsrec/refmodel.hpp"

namespace parsrec {

/// Per-parser reference-level F1 predictors (ridge regression).
struct RefMetaModel {
    FeatureSpec spec;
    std::map<ParserId, LinearModel> per_parser;
};

/// Per-(parser, field type) correctness predictors (logistic regression).
struct FieldMetaModel {
    FeatureSpec spec;
    std::map<std::pair<ParserId, FieldType>, LogisticModel> per_pair;
};

/// Static best-parser-per-type baseline table; total over the six types.
using HybridTable = std::map<FieldType, ParserId>;

struct TrainHyperparams {
    double ridge_lambda = 1e-6;
    double logistic_lambda = 1e-3;
    double logistic_tol = 1e-6;
    int logistic_max_iter = 500;
};

/// Fits one ridge model per pool parser: features -> that parser's
/// per-reference F1 on the meta-training split.
RefMetaModel train_parsrec_ref(const std::vector<LabeledReference>& meta_split,
                               const ParserPool& pool, const FeatureSpec& spec,
                               const TrainHyperparams& hp = {});

/// Full parser ranking by clamped predicted F1, descending; ties break on
/// ParserId order. Top entry is the recommendation.
std::vector<std::pair<ParserId, double>> recommend_ref(const RefMetaModel& m,
                                                       const std::string& s);

/// Output of the top-ranked parser, verbatim.
ParsedReference parse_with_ref(const RefMetaModel& m, const ParserPool& pool,
                               const std::string& s);

/// Fits one logistic model per (parser, type) pair. The correctness label is
/// multiset equality of the type's normalized fields against truth; both
/// empty counts as correct.
FieldMetaModel train_parsrec_field(const std::vector<LabeledReference>& meta_split,
                                   const ParserPool& pool, const FeatureSpec& spec,
                                   const TrainHyperparams& hp = {});

/// Per field type, parsers ranked by predicted correctness probability;
/// always contains all six types.
std::map<FieldType, std::vector<std::pair<ParserId, double>>> recommend_field(
    const FieldMetaModel& m, const std::string& s);

/// Runs each distinct chosen parser once and merges, per type, the type-t
/// fields of the top-ranked parser for t. With fallback enabled, a type whose
/// winner produced nothing falls through to the next-ranked parser.
ParsedReference parse_with_field(const FieldMetaModel& m, const ParserPool& pool,
                                 const std::string& s, bool fallback = false);

/// Parser with the highest micro-F1 on the split; ParserId tie-break.
ParserId best_single(const std::vector<LabeledReference>& meta_split, const ParserPool& pool);

/// Per type, the parser with the highest per-type micro-F1 on the split.
HybridTable hybrid_table(const std::vector<LabeledReference>& meta_split,
                         const ParserPool& pool);

/// Same merge semantics as parse_with_field, with a static table.
ParsedReference parse_hybrid(const HybridTable& table, const ParserPool& pool,
                             const std::string& s);

/// Includes a field iff at least k parsers extracted its normalized (type,
/// value); the representative raw value comes from the lexicographically
/// first supporting parser.
ParsedReference parse_voting(const ParserPool& pool, const std::string& s, std::size_t k = 3);

/// The persisted training artifact.
struct Model {
    static constexpr int kVersion = 1;
    std::vector<ParserId> parsers;
    FeatureSpec spec;
    RefMetaModel ref;
    FieldMetaModel field;
    HybridTable hybrid;
    ParserId best_single_id;
    std::uint64_t seed = 0;
    std::string corpus_hash;
};

std::string model_to_json(const Model& m);
/// Rejects unknown versions and dimension mismatches.
Model model_from_json(const std::string& text);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace parsrec

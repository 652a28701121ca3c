#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parsrec/corpus.hpp"
#include "parsrec/eval.hpp"
#include "parsrec/meta.hpp"
#include "parsrec/parserpool.hpp"

namespace parsrec {

struct TrainOptions {
    int k_ngrams = kDefaultNgramCount;
    int min_df = kDefaultMinDf;
    ForestParams forest;  // forest.seed is overwritten with the run seed
    TrainHyperparams hyper;
};

/// Runs the full training protocol on an already-loaded corpus: 40/30/30
/// split, best-parser labeling, n-gram selection, scaler fit, both ParsRec
/// variants, and the static baselines. Deterministic given seed.
Model train_model(const std::vector<LabeledReference>& corpus, const ParserPool& pool,
                  std::uint64_t seed, const TrainOptions& opts = {});

/// Per-reference oracle label: parser with maximal per-reference F1, ties
/// broken by ParserId order.
ParserId oracle_best_parser(const LabeledReference& ref, const ParserPool& pool);

/// Oracle parse: output of the per-reference oracle parser.
ParsedReference parse_oracle_ref(const LabeledReference& ref, const ParserPool& pool);

/// Per-field oracle: for each type, fields from the parser whose type-t
/// output matches truth (first id-ordered match); types nobody gets right
/// use the truth-closest empty choice (contribute nothing).
ParsedReference parse_oracle_field(const LabeledReference& ref, const ParserPool& pool);

struct EvaluationSummary {
    EvalReport report;
    CorpusMetrics oracle_ref;
    CorpusMetrics oracle_field;
    double ref_top1_oracle_match_rate = 0;  // fraction of test refs where the
                                            // recommended parser attains the
                                            // oracle-best F1
    std::size_t test_size = 0;
};

/// Regenerates the split at the given seed and evaluates the five systems
/// (best single, hybrid, voting, ParsRec_Ref, ParsRec_Field) on the test
/// part, plus the two oracles.
EvaluationSummary evaluate_model(const Model& model, const std::vector<LabeledReference>& corpus,
                                 const ParserPool& pool, std::uint64_t seed,
                                 std::size_t vote_threshold = 3, bool field_fallback = false);

std::string summary_to_json(const EvaluationSummary& s);
std::string summary_to_text(const EvaluationSummary& s);

}  // namespace parsrec

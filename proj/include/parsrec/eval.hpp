#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "parsrec/refmodel.hpp"

namespace parsrec {

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t n_pred = 0;
    std::size_t n_truth = 0;

    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        n_pred += o.n_pred;
        n_truth += o.n_truth;
        return *this;
    }
};

struct CorpusMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double fp_rate = 0;  // 1 - precision
    double fn_rate = 0;  // 1 - recall
};

struct TTestResult {
    double t = 0;
    std::size_t df = 0;
    double p = 1;
    bool degenerate = false;  // zero-variance input
};

struct SystemResult {
    CorpusMetrics metrics;
    std::vector<double> per_reference_f1;  // index-aligned with the test set
};

struct EvalReport {
    std::vector<std::string> system_names;  // evaluation order
    std::map<std::string, SystemResult> systems;
    // Keyed (sysA, sysB); diffs are f1(sysA) - f1(sysB) per reference.
    std::map<std::pair<std::string, std::string>, TTestResult> pairwise;
    std::map<std::pair<std::string, std::string>, double> mean_delta_f1;
};

/// Per field type, tp is the size of the multiset intersection of normalized
/// values; n_pred / n_truth count all non-empty-normalized fields.
MatchCounts match_fields(const ParsedReference& pred, const ParsedReference& truth);

/// F1 over match_fields. Conventions: both empty -> 1.0, exactly one empty
/// -> 0.0.
double reference_f1(const ParsedReference& pred, const ParsedReference& truth);

/// Micro-averaged metrics: counts pooled over the corpus before computing
/// precision/recall. Empty input is an error.
CorpusMetrics corpus_metrics(const std::vector<std::pair<ParsedReference, ParsedReference>>& pairs);

CorpusMetrics metrics_from_counts(const MatchCounts& total);

/// Two-tailed paired t-test on a series of differences; p computed via the
/// regularized incomplete beta function. Zero-variance series are flagged
/// degenerate with p = 0 (nonzero mean) or p = 1 (zero mean).
TTestResult paired_t_test(const std::vector<double>& diffs);

/// Student-t two-tailed tail probability (test oracle uses the closed form
/// at df = 2).
double student_t_two_tailed_p(double t, std::size_t df);

using ParseFn = std::function<ParsedReference(const LabeledReference&)>;

/// Runs every named system over the test split. Pairwise t-tests cover every
/// pair involving a system whose name starts with "parsrec".
EvalReport evaluate_systems(const std::vector<LabeledReference>& test_split,
                            const std::vector<std::pair<std::string, ParseFn>>& systems);

}  // namespace parsrec

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parsrec/learn.hpp"
#include "parsrec/refmodel.hpp"
#include "parsrec/tokens.hpp"

namespace parsrec {

inline constexpr int kNumHeuristics = 9;
inline constexpr int kDefaultNgramCount = 150;
inline constexpr int kDefaultMinDf = 5;

/// A contiguous sequence of 3 or 4 word classes.
struct Ngram {
    std::vector<WordClass> classes;

    bool operator==(const Ngram&) const = default;
    auto operator<=>(const Ngram&) const = default;

    /// e.g. "capword-comma-upperlett-dot"
    std::string name() const;
};

/// Frozen feature layout: 9 heuristics followed by one count per selected
/// n-gram, plus the standardization fit on the training split. Dimensions
/// with zero stddev are passed through unscaled.
struct FeatureSpec {
    std::vector<Ngram> selected_ngrams;
    std::vector<double> scaler_mean;
    std::vector<double> scaler_std;

    std::size_t dimension() const { return kNumHeuristics + selected_ngrams.size(); }
};

/// Layout: [len_chars, n_comma, frac_comma, n_dot, frac_dot, n_semicolon,
/// frac_semicolon, starts_bracket, starts_dotenum]. Fractions are relative
/// to the token count.
std::array<double, kNumHeuristics> extract_heuristics(std::string_view s);

/// All length-3 and length-4 class windows with multiplicity.
std::map<Ngram, int> enumerate_ngrams(const ClassSequence& seq);

/// Raw (unscaled) vector for the given n-gram layout.
std::vector<double> raw_feature_vector(std::string_view s, const std::vector<Ngram>& ngrams);

/// Per-dimension mean and population stddev; writes them into spec.
void fit_scaler(const std::vector<std::vector<double>>& raw_vectors, FeatureSpec& spec);

/// Standardized feature vector of length 9 + |spec.selected_ngrams|.
std::vector<double> extract_vector(std::string_view s, const FeatureSpec& spec);

struct SelectionOptions {
    int min_df = kDefaultMinDf;  // minimum total occurrences in the data
    ForestParams forest;
};

/// Picks the k most important candidate n-grams by random-forest impurity
/// importance, trained to predict the best-parser label from raw candidate
/// counts. Ties break on lexicographic class-name order. Deterministic
/// given the seed in opts.forest.
std::vector<Ngram> select_ngram_features(
    const std::vector<std::pair<std::string, ParserId>>& data, int k,
    const SelectionOptions& opts);

}  // namespace parsrec

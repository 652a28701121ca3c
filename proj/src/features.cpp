#include "parsrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace parsrec {

namespace {

std::size_t codepoint_count(std::string_view s) {
    std::size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;  // not a continuation byte
    }
    return n;
}

bool starts_with_bracket_enum(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size() || s[i] != '[') return false;
    std::size_t j = i + 1, inner = 0;
    while (j < s.size() && s[j] != ']' && inner <= 6) {
        ++j;
        ++inner;
    }
    return j < s.size() && s[j] == ']' && inner >= 1 && inner <= 6;
}

bool starts_with_dot_enum(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9' && digits <= 4) {
        ++i;
        ++digits;
    }
    return digits >= 1 && digits <= 4 && i < s.size() && s[i] == '.';
}

}  // namespace

std::string Ngram::name() const {
    std::string out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (i) out.push_back('-');
        out += word_class_name(classes[i]);
    }
    return out;
}

std::array<double, kNumHeuristics> extract_heuristics(std::string_view s) {
    double n_comma = 0, n_dot = 0, n_semi = 0;
    for (char c : s) {
        if (c == ',') ++n_comma;
        else if (c == '.') ++n_dot;
        else if (c == ';') ++n_semi;
    }
    double n_tokens = static_cast<double>(tokenize(s).size());
    auto frac = [&](double n) { return n_tokens > 0 ? n / n_tokens : 0.0; };
    return {static_cast<double>(codepoint_count(s)),
            n_comma, frac(n_comma),
            n_dot, frac(n_dot),
            n_semi, frac(n_semi),
            starts_with_bracket_enum(s) ? 1.0 : 0.0,
            starts_with_dot_enum(s) ? 1.0 : 0.0};
}

std::map<Ngram, int> enumerate_ngrams(const ClassSequence& seq) {
    std::map<Ngram, int> out;
    const std::size_t n = seq.size();
    for (std::size_t len : {std::size_t{3}, std::size_t{4}}) {
        if (n < len) continue;
        for (std::size_t i = 0; i + len <= n; ++i) {
            Ngram g;
            g.classes.reserve(len);
            for (std::size_t j = 0; j < len; ++j) g.classes.push_back(seq.tokens[i + j].cls);
            ++out[std::move(g)];
        }
    }
    return out;
}

std::vector<double> raw_feature_vector(std::string_view s, const std::vector<Ngram>& ngrams) {
    auto heur = extract_heuristics(s);
    std::vector<double> v(heur.begin(), heur.end());
    v.resize(kNumHeuristics + ngrams.size(), 0.0);
    auto counts = enumerate_ngrams(class_sequence(s));
    for (std::size_t i = 0; i < ngrams.size(); ++i) {
        auto it = counts.find(ngrams[i]);
        if (it != counts.end()) v[kNumHeuristics + i] = it->second;
    }
    return v;
}

void fit_scaler(const std::vector<std::vector<double>>& raw_vectors, FeatureSpec& spec) {
    if (raw_vectors.empty()) throw std::invalid_argument("fit_scaler: no vectors");
    const std::size_t d = raw_vectors.front().size();
    for (const auto& v : raw_vectors) {
        if (v.size() != d) throw std::invalid_argument("fit_scaler: vector length mismatch");
    }
    const double n = static_cast<double>(raw_vectors.size());
    spec.scaler_mean.assign(d, 0.0);
    spec.scaler_std.assign(d, 0.0);
    for (const auto& v : raw_vectors) {
        for (std::size_t j = 0; j < d; ++j) spec.scaler_mean[j] += v[j];
    }
    for (double& m : spec.scaler_mean) m /= n;
    for (const auto& v : raw_vectors) {
        for (std::size_t j = 0; j < d; ++j) {
            double dlt = v[j] - spec.scaler_mean[j];
            spec.scaler_std[j] += dlt * dlt;
        }
    }
    for (double& s : spec.scaler_std) s = std::sqrt(s / n);  // population stddev
}

std::vector<double> extract_vector(std::string_view s, const FeatureSpec& spec) {
    std::vector<double> v = raw_feature_vector(s, spec.selected_ngrams);
    if (spec.scaler_mean.size() != v.size() || spec.scaler_std.size() != v.size())
        throw std::invalid_argument("extract_vector: scaler dimension mismatch");
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (spec.scaler_std[j] > 0.0) v[j] = (v[j] - spec.scaler_mean[j]) / spec.scaler_std[j];
    }
    return v;
}

std::vector<Ngram> select_ngram_features(
    const std::vector<std::pair<std::string, ParserId>>& data, int k,
    const SelectionOptions& opts) {
    if (data.empty()) throw std::invalid_argument("select_ngram_features: empty data");
    if (k <= 0) return {};

    // Candidate set: n-grams with at least min_df total occurrences.
    std::map<Ngram, int> totals;
    std::vector<std::map<Ngram, int>> per_string;
    per_string.reserve(data.size());
    for (const auto& [s, label] : data) {
        auto counts = enumerate_ngrams(class_sequence(s));
        for (const auto& [g, c] : counts) totals[g] += c;
        per_string.push_back(std::move(counts));
    }
    std::vector<Ngram> candidates;
    for (const auto& [g, c] : totals) {
        if (c >= opts.min_df) candidates.push_back(g);
    }
    if (candidates.empty()) return {};

    std::map<Ngram, int> column;
    for (std::size_t i = 0; i < candidates.size(); ++i) column[candidates[i]] = static_cast<int>(i);

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.size()),
                                              static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (const auto& [g, c] : per_string[i]) {
            auto it = column.find(g);
            if (it != column.end()) X(static_cast<Eigen::Index>(i), it->second) = c;
        }
    }

    std::set<ParserId> id_set;
    for (const auto& [s, label] : data) id_set.insert(label);
    std::vector<ParserId> ids(id_set.begin(), id_set.end());
    std::vector<int> labels;
    labels.reserve(data.size());
    for (const auto& [s, label] : data) {
        labels.push_back(static_cast<int>(
            std::lower_bound(ids.begin(), ids.end(), label) - ids.begin()));
    }

    Forest forest = fit_forest(X, labels, opts.forest);
    std::vector<double> importance = forest_importance(forest);

    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (importance[a] != importance[b]) return importance[a] > importance[b];
        return candidates[a].name() < candidates[b].name();
    });

    std::vector<Ngram> selected;
    const std::size_t take = std::min<std::size_t>(k, candidates.size());
    selected.reserve(take);
    for (std::size_t i = 0; i < take; ++i) selected.push_back(candidates[order[i]]);
    return selected;
}

}  // namespace parsrec

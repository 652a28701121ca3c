#include "parsrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parsrec {

namespace {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

MatchCounts match_fields(const ParsedReference& pred, const ParsedReference& truth) {
    MatchCounts out;
    for (FieldType t : all_field_types()) {
        auto pv = fields_of_type(pred, t);
        auto tv = fields_of_type(truth, t);
        out.n_pred += pv.size();
        out.n_truth += tv.size();
        // fields_of_type returns sorted multisets
        std::vector<std::string> inter;
        std::set_intersection(pv.begin(), pv.end(), tv.begin(), tv.end(),
                              std::back_inserter(inter));
        out.tp += inter.size();
    }
    return out;
}

double reference_f1(const ParsedReference& pred, const ParsedReference& truth) {
    MatchCounts c = match_fields(pred, truth);
    if (c.n_pred == 0 && c.n_truth == 0) return 1.0;
    if (c.n_pred == 0 || c.n_truth == 0) return 0.0;
    if (c.tp == 0) return 0.0;
    double p = static_cast<double>(c.tp) / c.n_pred;
    double r = static_cast<double>(c.tp) / c.n_truth;
    return 2.0 * p * r / (p + r);
}

CorpusMetrics metrics_from_counts(const MatchCounts& total) {
    CorpusMetrics m;
    m.precision = total.n_pred == 0 ? 1.0 : static_cast<double>(total.tp) / total.n_pred;
    m.recall = total.n_truth == 0 ? 1.0 : static_cast<double>(total.tp) / total.n_truth;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    m.fp_rate = 1.0 - m.precision;
    m.fn_rate = 1.0 - m.recall;
    return m;
}

CorpusMetrics corpus_metrics(
    const std::vector<std::pair<ParsedReference, ParsedReference>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("corpus_metrics: empty corpus");
    MatchCounts total;
    for (const auto& [pred, truth] : pairs) total += match_fields(pred, truth);
    return metrics_from_counts(total);
}

double student_t_two_tailed_p(double t, std::size_t df) {
    if (df == 0) return 1.0;
    double x = df / (df + t * t);
    return inc_beta(df / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& diffs) {
    if (diffs.size() < 2) throw std::invalid_argument("paired_t_test: need at least 2 samples");
    const double n = static_cast<double>(diffs.size());
    double mean = 0;
    for (double d : diffs) mean += d;
    mean /= n;
    double var = 0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= (n - 1.0);

    TTestResult res;
    res.df = diffs.size() - 1;
    if (var == 0.0) {
        res.degenerate = true;
        res.t = mean == 0.0 ? 0.0 : std::copysign(INFINITY, mean);
        res.p = mean == 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.t = mean / std::sqrt(var / n);
    res.p = student_t_two_tailed_p(res.t, res.df);
    return res;
}

EvalReport evaluate_systems(const std::vector<LabeledReference>& test_split,
                            const std::vector<std::pair<std::string, ParseFn>>& systems) {
    if (systems.empty()) throw std::invalid_argument("evaluate_systems: no systems");
    if (test_split.empty()) throw std::invalid_argument("evaluate_systems: empty test split");
    EvalReport report;
    for (const auto& [name, fn] : systems) {
        SystemResult res;
        MatchCounts total;
        res.per_reference_f1.reserve(test_split.size());
        for (const auto& ref : test_split) {
            ParsedReference pred = fn(ref);
            total += match_fields(pred, ref.truth);
            res.per_reference_f1.push_back(reference_f1(pred, ref.truth));
        }
        res.metrics = metrics_from_counts(total);
        report.system_names.push_back(name);
        report.systems.emplace(name, std::move(res));
    }

    auto is_parsrec = [](const std::string& name) { return name.rfind("parsrec", 0) == 0; };
    for (std::size_t i = 0; i < report.system_names.size(); ++i) {
        for (std::size_t j = 0; j < report.system_names.size(); ++j) {
            if (i == j) continue;
            const std::string& a = report.system_names[i];
            const std::string& b = report.system_names[j];
            if (!is_parsrec(a)) continue;
            const auto& fa = report.systems.at(a).per_reference_f1;
            const auto& fb = report.systems.at(b).per_reference_f1;
            if (fa.size() < 2) continue;
            std::vector<double> diffs(fa.size());
            double mean = 0;
            for (std::size_t k = 0; k < fa.size(); ++k) {
                diffs[k] = fa[k] - fb[k];
                mean += diffs[k];
            }
            mean /= static_cast<double>(diffs.size());
            report.pairwise[{a, b}] = paired_t_test(diffs);
            report.mean_delta_f1[{a, b}] = mean;
        }
    }
    return report;
}

}  // namespace parsrec

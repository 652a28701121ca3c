#include "parsrec/pipeline.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace parsrec {

namespace {

using json = nlohmann::json;

}  // namespace

Model train_model(const std::vector<LabeledReference>& corpus, const ParserPool& pool,
                  std::uint64_t seed, const TrainOptions& opts) {
    if (corpus.empty()) throw std::invalid_argument("train_model: empty corpus");
    SplitSpec split_spec;
    split_spec.seed = seed;
    SplitResult parts = split(corpus, split_spec);
    const auto& meta = parts.meta_train;
    if (meta.empty()) throw std::invalid_argument("train_model: meta-training split is empty");

    // Best-parser labels for the feature-selection forest.
    std::vector<std::pair<std::string, ParserId>> labeled;
    labeled.reserve(meta.size());
    for (const auto& ref : meta) labeled.emplace_back(ref.string, oracle_best_parser(ref, pool));

    SelectionOptions sel;
    sel.min_df = opts.min_df;
    sel.forest = opts.forest;
    sel.forest.seed = seed;

    FeatureSpec spec;
    spec.selected_ngrams = select_ngram_features(labeled, opts.k_ngrams, sel);
    std::vector<std::vector<double>> raw;
    raw.reserve(meta.size());
    for (const auto& ref : meta) raw.push_back(raw_feature_vector(ref.string, spec.selected_ngrams));
    fit_scaler(raw, spec);

    Model model;
    model.parsers = pool.ids();
    model.spec = spec;
    model.ref = train_parsrec_ref(meta, pool, spec, opts.hyper);
    model.field = train_parsrec_field(meta, pool, spec, opts.hyper);
    model.hybrid = hybrid_table(meta, pool);
    model.best_single_id = best_single(meta, pool);
    model.seed = seed;
    model.corpus_hash = corpus_hash(corpus);
    return model;
}

ParserId oracle_best_parser(const LabeledReference& ref, const ParserPool& pool) {
    ParserId best;
    double best_f1 = -1.0;
    for (const auto& entry : pool.entries()) {
        double f1 = reference_f1(entry.parser->parse(ref.string), ref.truth);
        if (f1 > best_f1) {  // id-sorted iteration keeps the first on ties
            best_f1 = f1;
            best = entry.id;
        }
    }
    return best;
}

ParsedReference parse_oracle_ref(const LabeledReference& ref, const ParserPool& pool) {
    return pool.parse(oracle_best_parser(ref, pool), ref.string);
}

ParsedReference parse_oracle_field(const LabeledReference& ref, const ParserPool& pool) {
    // Exact search over per-type parser assignments: with P parsers and 6
    // types that is P^6 combinations, evaluated on precomputed per-type
    // (tp, n_pred) counts. Guarantees dominance over any per-type switcher.
    const auto& entries = pool.entries();
    const std::size_t P = entries.size();
    struct TypeOption {
        std::size_t tp = 0, n_pred = 0;
    };
    std::array<std::vector<TypeOption>, kNumFieldTypes> options;
    std::array<std::size_t, kNumFieldTypes> n_truth{};
    std::vector<ParsedReference> outputs(P);
    for (std::size_t p = 0; p < P; ++p) outputs[p] = entries[p].parser->parse(ref.string);
    for (int t = 0; t < kNumFieldTypes; ++t) {
        FieldType ft = static_cast<FieldType>(t);
        auto tv = fields_of_type(ref.truth, ft);
        n_truth[t] = tv.size();
        options[t].resize(P);
        for (std::size_t p = 0; p < P; ++p) {
            auto pv = fields_of_type(outputs[p], ft);
            std::vector<std::string> inter;
            std::set_intersection(pv.begin(), pv.end(), tv.begin(), tv.end(),
                                  std::back_inserter(inter));
            options[t][p] = {inter.size(), pv.size()};
        }
    }
    std::size_t total_truth = 0;
    for (std::size_t v : n_truth) total_truth += v;

    std::array<std::size_t, kNumFieldTypes> best_choice{};
    double best_f1 = -1.0;
    std::array<std::size_t, kNumFieldTypes> choice{};
    for (;;) {
        std::size_t tp = 0, np = 0;
        for (int t = 0; t < kNumFieldTypes; ++t) {
            tp += options[t][choice[t]].tp;
            np += options[t][choice[t]].n_pred;
        }
        double f1;
        if (np == 0 && total_truth == 0) f1 = 1.0;
        else if (np == 0 || total_truth == 0 || tp == 0) f1 = 0.0;
        else {
            double prec = static_cast<double>(tp) / np;
            double rec = static_cast<double>(tp) / total_truth;
            f1 = 2 * prec * rec / (prec + rec);
        }
        if (f1 > best_f1) {
            best_f1 = f1;
            best_choice = choice;
        }
        int t = 0;
        while (t < kNumFieldTypes && ++choice[t] == P) choice[t++] = 0;
        if (t == kNumFieldTypes) break;
    }

    ParsedReference merged;
    for (int t = 0; t < kNumFieldTypes; ++t) {
        FieldType ft = static_cast<FieldType>(t);
        for (const auto& f : outputs[best_choice[t]].fields) {
            if (f.type == ft) merged.fields.push_back(f);
        }
    }
    return merged;
}

EvaluationSummary evaluate_model(const Model& model, const std::vector<LabeledReference>& corpus,
                                 const ParserPool& pool, std::uint64_t seed,
                                 std::size_t vote_threshold, bool field_fallback) {
    SplitSpec split_spec;
    split_spec.seed = seed;
    SplitResult parts = split(corpus, split_spec);
    const auto& test = parts.test;
    if (test.empty()) throw std::invalid_argument("evaluate_model: test split is empty");

    std::vector<std::pair<std::string, ParseFn>> systems = {
        {"best-single",
         [&](const LabeledReference& r) { return pool.parse(model.best_single_id, r.string); }},
        {"hybrid",
         [&](const LabeledReference& r) { return parse_hybrid(model.hybrid, pool, r.string); }},
        {"voting",
         [&](const LabeledReference& r) { return parse_voting(pool, r.string, vote_threshold); }},
        {"parsrec-ref",
         [&](const LabeledReference& r) { return parse_with_ref(model.ref, pool, r.string); }},
        {"parsrec-field",
         [&](const LabeledReference& r) {
             return parse_with_field(model.field, pool, r.string, field_fallback);
         }},
    };

    EvaluationSummary summary;
    summary.report = evaluate_systems(test, systems);
    summary.test_size = test.size();

    MatchCounts oref, ofield;
    std::size_t matches = 0;
    for (const auto& ref : test) {
        oref += match_fields(parse_oracle_ref(ref, pool), ref.truth);
        ofield += match_fields(parse_oracle_field(ref, pool), ref.truth);

        double best_f1 = -1.0;
        for (const auto& entry : pool.entries()) {
            best_f1 = std::max(best_f1, reference_f1(entry.parser->parse(ref.string), ref.truth));
        }
        auto ranking = recommend_ref(model.ref, ref.string);
        double rec_f1 = reference_f1(pool.parse(ranking.front().first, ref.string), ref.truth);
        if (rec_f1 >= best_f1 - 1e-12) ++matches;
    }
    summary.oracle_ref = metrics_from_counts(oref);
    summary.oracle_field = metrics_from_counts(ofield);
    summary.ref_top1_oracle_match_rate = static_cast<double>(matches) / test.size();
    return summary;
}

namespace {

json metrics_to_json(const CorpusMetrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"fp_rate", m.fp_rate},
                {"fn_rate", m.fn_rate}};
}

}  // namespace

std::string summary_to_json(const EvaluationSummary& s) {
    json systems = json::object();
    for (const auto& name : s.report.system_names) {
        systems[name] = metrics_to_json(s.report.systems.at(name).metrics);
    }
    json pairwise = json::array();
    for (const auto& [key, tt] : s.report.pairwise) {
        pairwise.push_back({{"a", key.first},
                            {"b", key.second},
                            {"mean_delta_f1", s.report.mean_delta_f1.at(key)},
                            {"t", std::isfinite(tt.t) ? json(tt.t) : json(nullptr)},
                            {"df", tt.df},
                            {"p", tt.p},
                            {"degenerate", tt.degenerate}});
    }
    json j{{"systems", systems},
           {"pairwise", pairwise},
           {"oracles",
            {{"ref", metrics_to_json(s.oracle_ref)}, {"field", metrics_to_json(s.oracle_field)}}},
           {"ref_top1_oracle_match_rate", s.ref_top1_oracle_match_rate},
           {"test_size", s.test_size}};
    return j.dump(2);
}

std::string summary_to_text(const EvaluationSummary& s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << std::left << std::setw(16) << "system" << std::right << std::setw(10) << "precision"
       << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(10) << "fp_rate"
       << std::setw(10) << "fn_rate" << "\n";
    auto row = [&os](const std::string& name, const CorpusMetrics& m) {
        os << std::left << std::setw(16) << name << std::right << std::setw(10) << m.precision
           << std::setw(10) << m.recall << std::setw(10) << m.f1 << std::setw(10) << m.fp_rate
           << std::setw(10) << m.fn_rate << "\n";
    };
    for (const auto& name : s.report.system_names) {
        row(name, s.report.systems.at(name).metrics);
    }
    row("oracle-ref", s.oracle_ref);
    row("oracle-field", s.oracle_field);
    os << "\nref top-1 oracle match rate: " << s.ref_top1_oracle_match_rate << " over "
       << s.test_size << " test references\n";
    if (!s.report.pairwise.empty()) {
        os << "\npaired t-tests (per-reference F1):\n";
        os << std::left << std::setw(16) << "system" << std::setw(16) << "baseline" << std::right
           << std::setw(12) << "mean dF1" << std::setw(12) << "t" << std::setw(8) << "df"
           << std::setw(12) << "p" << "\n";
        for (const auto& [key, tt] : s.report.pairwise) {
            os << std::left << std::setw(16) << key.first << std::setw(16) << key.second
               << std::right << std::setw(12) << s.report.mean_delta_f1.at(key) << std::setw(12)
               << tt.t << std::setw(8) << tt.df << std::setw(12)
               << std::setprecision(6) << tt.p << std::setprecision(4);
            if (tt.degenerate) os << "  (degenerate)";
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace parsrec

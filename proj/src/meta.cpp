#include "parsrec/meta.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "parsrec/eval.hpp"

namespace parsrec {

namespace {

using json = nlohmann::json;

Eigen::MatrixXd feature_matrix(const std::vector<LabeledReference>& refs,
                               const FeatureSpec& spec) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(refs.size()),
                      static_cast<Eigen::Index>(spec.dimension()));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        std::vector<double> v = extract_vector(refs[i].string, spec);
        for (std::size_t j = 0; j < v.size(); ++j) X(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j)) = v[j];
    }
    return X;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

template <typename Scores>
void sort_ranking(Scores& ranking) {
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
}

}  // namespace

RefMetaModel train_parsrec_ref(const std::vector<LabeledReference>& meta_split,
                               const ParserPool& pool, const FeatureSpec& spec,
                               const TrainHyperparams& hp) {
    if (meta_split.empty()) throw std::invalid_argument("train_parsrec_ref: empty split");
    RefMetaModel model;
    model.spec = spec;
    Eigen::MatrixXd X = feature_matrix(meta_split, spec);
    for (const auto& entry : pool.entries()) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(meta_split.size()));
        for (std::size_t i = 0; i < meta_split.size(); ++i) {
            ParsedReference pred = entry.parser->parse(meta_split[i].string);
            y(static_cast<Eigen::Index>(i)) = reference_f1(pred, meta_split[i].truth);
        }
        model.per_parser[entry.id] = fit_ridge(X, y, hp.ridge_lambda);
    }
    return model;
}

std::vector<std::pair<ParserId, double>> recommend_ref(const RefMetaModel& m,
                                                       const std::string& s) {
    std::vector<double> x = extract_vector(s, m.spec);
    std::vector<std::pair<ParserId, double>> ranking;
    ranking.reserve(m.per_parser.size());
    for (const auto& [id, lm] : m.per_parser) {
        ranking.emplace_back(id, clamp01(predict_linear(lm, x)));
    }
    sort_ranking(ranking);
    return ranking;
}

ParsedReference parse_with_ref(const RefMetaModel& m, const ParserPool& pool,
                               const std::string& s) {
    auto ranking = recommend_ref(m, s);
    if (ranking.empty()) return {};
    return pool.parse(ranking.front().first, s);
}

FieldMetaModel train_parsrec_field(const std::vector<LabeledReference>& meta_split,
                                   const ParserPool& pool, const FeatureSpec& spec,
                                   const TrainHyperparams& hp) {
    if (meta_split.empty()) throw std::invalid_argument("train_parsrec_field: empty split");
    FieldMetaModel model;
    model.spec = spec;
    Eigen::MatrixXd X = feature_matrix(meta_split, spec);
    for (const auto& entry : pool.entries()) {
        // One parser pass per entry, reused across the six types.
        std::vector<ParsedReference> outputs;
        outputs.reserve(meta_split.size());
        for (const auto& ref : meta_split) outputs.push_back(entry.parser->parse(ref.string));
        for (FieldType t : all_field_types()) {
            Eigen::VectorXd y(static_cast<Eigen::Index>(meta_split.size()));
            for (std::size_t i = 0; i < meta_split.size(); ++i) {
                bool correct =
                    fields_of_type(outputs[i], t) == fields_of_type(meta_split[i].truth, t);
                y(static_cast<Eigen::Index>(i)) = correct ? 1.0 : 0.0;
            }
            model.per_pair[{entry.id, t}] =
                fit_logistic(X, y, hp.logistic_lambda, hp.logistic_tol, hp.logistic_max_iter);
        }
    }
    return model;
}

std::map<FieldType, std::vector<std::pair<ParserId, double>>> recommend_field(
    const FieldMetaModel& m, const std::string& s) {
    std::vector<double> x = extract_vector(s, m.spec);
    std::map<FieldType, std::vector<std::pair<ParserId, double>>> out;
    for (FieldType t : all_field_types()) out[t] = {};
    for (const auto& [key, lm] : m.per_pair) {
        out[key.second].emplace_back(key.first, predict_proba(lm, x));
    }
    for (auto& [t, ranking] : out) sort_ranking(ranking);
    return out;
}

namespace {

ParsedReference merge_per_type(const std::map<FieldType, std::vector<ParserId>>& choices,
                               const ParserPool& pool, const std::string& s) {
    // Each distinct chosen parser runs exactly once.
    std::map<ParserId, ParsedReference> outputs;
    for (const auto& [t, ranked] : choices) {
        for (const ParserId& id : ranked) {
            if (!outputs.count(id)) outputs.emplace(id, pool.parse(id, s));
        }
    }
    ParsedReference merged;
    for (const auto& [t, ranked] : choices) {
        for (const ParserId& id : ranked) {
            const ParsedReference& out = outputs.at(id);
            bool any = false;
            for (const auto& f : out.fields) {
                if (f.type == t) {
                    merged.fields.push_back(f);
                    any = true;
                }
            }
            if (any) break;  // later entries are fallbacks only
        }
    }
    return merged;
}

}  // namespace

ParsedReference parse_with_field(const FieldMetaModel& m, const ParserPool& pool,
                                 const std::string& s, bool fallback) {
    auto rankings = recommend_field(m, s);
    std::map<FieldType, std::vector<ParserId>> choices;
    for (const auto& [t, ranking] : rankings) {
        std::vector<ParserId> ranked;
        for (const auto& [id, prob] : ranking) {
            ranked.push_back(id);
            if (!fallback) break;
        }
        if (!ranked.empty()) choices[t] = std::move(ranked);
    }
    return merge_per_type(choices, pool, s);
}

ParserId best_single(const std::vector<LabeledReference>& meta_split, const ParserPool& pool) {
    if (pool.size() == 0) throw std::invalid_argument("best_single: empty pool");
    ParserId best;
    double best_f1 = -1.0;
    for (const auto& entry : pool.entries()) {
        MatchCounts total;
        for (const auto& ref : meta_split) {
            total += match_fields(entry.parser->parse(ref.string), ref.truth);
        }
        double f1 = metrics_from_counts(total).f1;
        if (f1 > best_f1) {  // entries are id-sorted, so ties keep the first
            best_f1 = f1;
            best = entry.id;
        }
    }
    return best;
}

HybridTable hybrid_table(const std::vector<LabeledReference>& meta_split,
                         const ParserPool& pool) {
    // Per-type micro counts, one scan per parser.
    HybridTable table;
    std::map<FieldType, std::pair<ParserId, double>> best;
    for (const auto& entry : pool.entries()) {
        std::map<FieldType, MatchCounts> counts;
        for (const auto& ref : meta_split) {
            ParsedReference pred = entry.parser->parse(ref.string);
            for (FieldType t : all_field_types()) {
                auto pv = fields_of_type(pred, t);
                auto tv = fields_of_type(ref.truth, t);
                std::vector<std::string> inter;
                std::set_intersection(pv.begin(), pv.end(), tv.begin(), tv.end(),
                                      std::back_inserter(inter));
                counts[t].tp += inter.size();
                counts[t].n_pred += pv.size();
                counts[t].n_truth += tv.size();
            }
        }
        for (FieldType t : all_field_types()) {
            double f1 = metrics_from_counts(counts[t]).f1;
            auto it = best.find(t);
            if (it == best.end() || f1 > it->second.second) best[t] = {entry.id, f1};
        }
    }
    for (FieldType t : all_field_types()) table[t] = best.at(t).first;
    return table;
}

ParsedReference parse_hybrid(const HybridTable& table, const ParserPool& pool,
                             const std::string& s) {
    std::map<FieldType, std::vector<ParserId>> choices;
    for (const auto& [t, id] : table) choices[t] = {id};
    return merge_per_type(choices, pool, s);
}

ParsedReference parse_voting(const ParserPool& pool, const std::string& s, std::size_t k) {
    if (k < 1) throw std::invalid_argument("parse_voting: k must be >= 1");
    // (type, normalized value) -> (support count, representative raw value).
    // Pool iteration is id-sorted, so the first writer of the representative
    // is the lexicographically first supporting parser.
    std::map<std::pair<FieldType, std::string>, std::pair<std::size_t, std::string>> votes;
    for (const auto& entry : pool.entries()) {
        ParsedReference out = entry.parser->parse(s);
        std::set<std::pair<FieldType, std::string>> seen;  // dedupe per parser
        for (const auto& f : out.fields) {
            std::string norm = normalize_value(f.value);
            if (norm.empty()) continue;
            if (!seen.insert({f.type, norm}).second) continue;
            auto [it, inserted] = votes.try_emplace({f.type, norm}, 0, f.value);
            ++it->second.first;
        }
    }
    ParsedReference result;
    for (const auto& [key, vote] : votes) {
        if (vote.first >= k) result.fields.push_back({key.first, vote.second});
    }
    return result;
}

// --- model serialization ------------------------------------------------------

namespace {

json spec_to_json(const FeatureSpec& spec) {
    json ngrams = json::array();
    for (const auto& g : spec.selected_ngrams) {
        json classes = json::array();
        for (WordClass c : g.classes) classes.push_back(std::string(word_class_name(c)));
        ngrams.push_back(classes);
    }
    return json{{"ngrams", ngrams},
                {"scaler_mean", spec.scaler_mean},
                {"scaler_std", spec.scaler_std}};
}

FeatureSpec spec_from_json(const json& j) {
    FeatureSpec spec;
    for (const auto& classes : j.at("ngrams")) {
        Ngram g;
        for (const auto& name : classes) g.classes.push_back(word_class_from_name(name.get<std::string>()));
        if (g.classes.size() < 3 || g.classes.size() > 4)
            throw std::runtime_error("model: n-gram length must be 3 or 4");
        spec.selected_ngrams.push_back(std::move(g));
    }
    spec.scaler_mean = j.at("scaler_mean").get<std::vector<double>>();
    spec.scaler_std = j.at("scaler_std").get<std::vector<double>>();
    if (spec.scaler_mean.size() != spec.dimension() || spec.scaler_std.size() != spec.dimension())
        throw std::runtime_error("model: scaler dimension mismatch");
    return spec;
}

}  // namespace

std::string model_to_json(const Model& m) {
    json ref_models = json::object();
    for (const auto& [id, lm] : m.ref.per_parser) {
        ref_models[id] = {{"w", lm.weights}, {"b", lm.intercept}};
    }
    json field_models = json::object();
    for (const auto& [key, lm] : m.field.per_pair) {
        std::string name = key.first + "|" + std::string(field_type_name(key.second));
        field_models[name] = {{"w", lm.weights}, {"b", lm.intercept}, {"degenerate", lm.degenerate}};
    }
    json hybrid = json::object();
    for (const auto& [t, id] : m.hybrid) hybrid[std::string(field_type_name(t))] = id;
    json j{{"version", Model::kVersion},
           {"parsers", m.parsers},
           {"feature_spec", spec_to_json(m.spec)},
           {"ref_models", ref_models},
           {"field_models", field_models},
           {"hybrid_table", hybrid},
           {"best_single", m.best_single_id},
           {"train_meta", {{"seed", m.seed}, {"corpus_hash", m.corpus_hash}}}};
    return j.dump(2);
}

Model model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model: malformed JSON: ") + e.what());
    }
    if (!j.contains("version") || j.at("version").get<int>() != Model::kVersion)
        throw std::runtime_error("model: unsupported version");
    Model m;
    m.parsers = j.at("parsers").get<std::vector<std::string>>();
    m.spec = spec_from_json(j.at("feature_spec"));
    m.ref.spec = m.spec;
    m.field.spec = m.spec;
    const std::size_t dim = m.spec.dimension();

    for (const auto& [id, jm] : j.at("ref_models").items()) {
        LinearModel lm;
        lm.weights = jm.at("w").get<std::vector<double>>();
        lm.intercept = jm.at("b").get<double>();
        if (lm.weights.size() != dim) throw std::runtime_error("model: ref model dimension mismatch");
        m.ref.per_parser[id] = std::move(lm);
    }
    for (const auto& [name, jm] : j.at("field_models").items()) {
        auto bar = name.find('|');
        if (bar == std::string::npos) throw std::runtime_error("model: bad field model key " + name);
        ParserId id = name.substr(0, bar);
        FieldType t = field_type_from_name(name.substr(bar + 1));
        LogisticModel lm;
        lm.weights = jm.at("w").get<std::vector<double>>();
        lm.intercept = jm.at("b").get<double>();
        lm.degenerate = jm.value("degenerate", false);
        if (lm.weights.size() != dim)
            throw std::runtime_error("model: field model dimension mismatch");
        m.field.per_pair[{std::move(id), t}] = std::move(lm);
    }
    for (const auto& [tname, id] : j.at("hybrid_table").items()) {
        m.hybrid[field_type_from_name(tname)] = id.get<std::string>();
    }
    m.best_single_id = j.at("best_single").get<std::string>();
    m.seed = j.at("train_meta").at("seed").get<std::uint64_t>();
    m.corpus_hash = j.at("train_meta").at("corpus_hash").get<std::string>();
    return m;
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << model_to_json(m) << "\n";
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace parsrec

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parsrec/pipeline.hpp"

namespace py = pybind11;
using namespace parsrec;

namespace {

py::dict parsed_to_dict(const ParsedReference& ref) {
    py::list fields;
    for (const auto& f : ref.fields) {
        py::dict d;
        d["type"] = std::string(field_type_name(f.type));
        d["value"] = f.value;
        fields.append(d);
    }
    py::dict out;
    out["fields"] = fields;
    return out;
}

ParserPool default_pool() { return builtin_pool(default_builtin_configs()); }

}  // namespace

PYBIND11_MODULE(_parsrec, m) {
    m.doc() = "Meta-learning recommender for bibliographic reference parsers";

    m.def("tokenize", [](const std::string& s) { return tokenize(s); });
    m.def("class_sequence", [](const std::string& s) {
        py::list out;
        for (const auto& tok : class_sequence(s).tokens) {
            out.append(py::make_tuple(tok.surface, std::string(word_class_name(tok.cls))));
        }
        return out;
    });
    m.def("extract_heuristics", [](const std::string& s) {
        auto h = extract_heuristics(s);
        return std::vector<double>(h.begin(), h.end());
    });
    m.def("normalize_value", [](const std::string& s) { return normalize_value(s); });

    m.def("parser_ids", [] { return default_pool().ids(); });
    m.def("parse", [](const std::string& parser_id, const std::string& s) {
        return parsed_to_dict(default_pool().parse(parser_id, s));
    });

    m.def(
        "generate_corpus",
        [](std::size_t n, std::uint64_t seed, const std::string& path) {
            auto data = generate(n, default_styles(), seed);
            save_jsonl(data, path);
            return data.size();
        },
        py::arg("n"), py::arg("seed"), py::arg("path"));

    m.def(
        "train",
        [](const std::string& corpus_path, std::uint64_t seed, const std::string& model_path,
           int k_ngrams) {
            auto corpus = load_jsonl(corpus_path);
            TrainOptions opts;
            opts.k_ngrams = k_ngrams;
            Model model = train_model(corpus, default_pool(), seed, opts);
            save_model(model, model_path);
            return static_cast<int>(model.spec.selected_ngrams.size());
        },
        py::arg("corpus_path"), py::arg("seed"), py::arg("model_path"),
        py::arg("k_ngrams") = kDefaultNgramCount);

    m.def(
        "recommend",
        [](const std::string& model_path, const std::string& s) {
            Model model = load_model(model_path);
            py::dict out;
            py::list ranking;
            for (const auto& [id, score] : recommend_ref(model.ref, s)) {
                ranking.append(py::make_tuple(id, score));
            }
            out["ref_ranking"] = ranking;
            py::dict winners;
            for (const auto& [t, ranked] : recommend_field(model.field, s)) {
                winners[py::str(std::string(field_type_name(t)))] =
                    py::make_tuple(ranked.front().first, ranked.front().second);
            }
            out["field_winners"] = winners;
            return out;
        },
        py::arg("model_path"), py::arg("string"));

    m.def(
        "parse_with_model",
        [](const std::string& model_path, const std::string& mode, const std::string& s) {
            Model model = load_model(model_path);
            ParserPool pool = default_pool();
            ParsedReference out;
            if (mode == "ref") out = parse_with_ref(model.ref, pool, s);
            else if (mode == "field") out = parse_with_field(model.field, pool, s);
            else if (mode == "single") out = pool.parse(model.best_single_id, s);
            else if (mode == "hybrid") out = parse_hybrid(model.hybrid, pool, s);
            else if (mode == "vote") out = parse_voting(pool, s);
            else throw std::invalid_argument("unknown mode: " + mode);
            return parsed_to_dict(out);
        },
        py::arg("model_path"), py::arg("mode"), py::arg("string"));

    m.def(
        "evaluate",
        [](const std::string& model_path, const std::string& corpus_path, std::uint64_t seed) {
            Model model = load_model(model_path);
            auto corpus = load_jsonl(corpus_path);
            auto summary = evaluate_model(model, corpus, default_pool(), seed);
            return summary_to_json(summary);
        },
        py::arg("model_path"), py::arg("corpus_path"), py::arg("seed"));
}

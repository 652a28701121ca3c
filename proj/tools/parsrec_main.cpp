#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

#include <json.hpp>

#include "parsrec/pipeline.hpp"

using namespace parsrec;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

ParserPool build_pool(const std::vector<std::string>& parser_subset,
                      const std::vector<std::string>& external_specs) {
    std::vector<BuiltinParserConfig> configs;
    for (const auto& cfg : default_builtin_configs()) {
        if (parser_subset.empty() ||
            std::find(parser_subset.begin(), parser_subset.end(), cfg.id) != parser_subset.end())
            configs.push_back(cfg);
    }
    ParserPool pool = builtin_pool(configs);
    if (external_specs.empty()) return pool;

    std::vector<PoolEntry> entries = pool.entries();
    for (const auto& spec : external_specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--external-parser expects id=command");
        entries.push_back(external_parser(spec.substr(0, eq), spec.substr(eq + 1),
                                          std::chrono::milliseconds(5000)));
    }
    return ParserPool(std::move(entries));
}

std::vector<StyleTemplate> select_styles(const std::vector<std::string>& names) {
    if (names.empty()) return default_styles();
    std::vector<StyleTemplate> out;
    for (const auto& name : names) {
        bool found = false;
        for (const auto& style : default_styles()) {
            if (style.name == name) {
                out.push_back(style);
                found = true;
                break;
            }
        }
        if (!found) throw CLI::ValidationError("unknown style: " + name);
    }
    return out;
}

json parsed_to_json(const ParsedReference& ref) {
    json fields = json::array();
    for (const auto& f : ref.fields) {
        fields.push_back({{"type", std::string(field_type_name(f.type))}, {"value", f.value}});
    }
    return fields;
}

std::vector<std::string> gather_inputs(const std::string& arg) {
    std::vector<std::string> lines;
    if (!arg.empty()) {
        lines.push_back(arg);
        return lines;
    }
    std::string line;
    while (std::getline(std::cin, line)) lines.push_back(line);
    return lines;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parsrec: meta-learning recommendations for reference parsing"};
    app.require_subcommand(1);

    std::string corpus_path, model_path, format = "text", mode = "ref", input_string;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    int k_ngrams = kDefaultNgramCount;
    std::size_t vote_threshold = 3;
    bool fallback = false;
    std::vector<std::string> style_names, parser_subset, external_specs;

    auto* gen = app.add_subcommand("generate", "generate a synthetic labeled corpus");
    gen->add_option("--n", n, "number of references")->required();
    gen->add_option("--seed", seed, "generation seed")->required();
    gen->add_option("--corpus", corpus_path, "output JSONL path")->required();
    gen->add_option("--styles", style_names, "subset of style names");

    auto* train = app.add_subcommand("train", "train both ParsRec variants and the baselines");
    train->add_option("--corpus", corpus_path, "corpus JSONL path")->required();
    train->add_option("--seed", seed, "split/selection seed")->required();
    train->add_option("--model", model_path, "output model path")->required();
    train->add_option("--k-ngrams", k_ngrams, "number of selected n-grams (default 150)");
    train->add_option("--parsers", parser_subset, "subset of built-in parser ids");
    train->add_option("--external-parser", external_specs, "id=command, repeatable");

    auto* rec = app.add_subcommand("recommend", "rank parsers for reference strings");
    rec->add_option("--model", model_path, "model path")->required();
    rec->add_option("--format", format, "text or json");
    rec->add_option("string", input_string, "reference string (default: stdin lines)");

    auto* parse_cmd = app.add_subcommand("parse", "parse reference strings");
    parse_cmd->add_option("--model", model_path, "model path")->required();
    parse_cmd->add_option("--mode", mode, "ref | field | single | hybrid | vote")
        ->check(CLI::IsMember({"ref", "field", "single", "hybrid", "vote"}));
    parse_cmd->add_option("--vote-threshold", vote_threshold, "voting threshold (default 3)");
    parse_cmd->add_flag("--fallback", fallback, "field mode: fall back to next-ranked parser");
    parse_cmd->add_option("--parsers", parser_subset, "subset of built-in parser ids");
    parse_cmd->add_option("--external-parser", external_specs, "id=command, repeatable");
    parse_cmd->add_option("string", input_string, "reference string (default: stdin lines)");

    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate the five systems on the test split");
    eval_cmd->add_option("--model", model_path, "model path")->required();
    eval_cmd->add_option("--corpus", corpus_path, "corpus JSONL path")->required();
    eval_cmd->add_option("--seed", seed, "split seed (must match training)")->required();
    eval_cmd->add_option("--format", format, "text or json");
    eval_cmd->add_option("--vote-threshold", vote_threshold, "voting threshold (default 3)");
    eval_cmd->add_flag("--fallback", fallback, "field mode: fall back to next-ranked parser");
    eval_cmd->add_option("--parsers", parser_subset, "subset of built-in parser ids");
    eval_cmd->add_option("--external-parser", external_specs, "id=command, repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            auto styles = select_styles(style_names);
            auto data = generate(n, styles, seed);
            save_jsonl(data, corpus_path);
            std::map<std::string, std::size_t> counts;
            for (const auto& r : data) ++counts[r.style];
            std::cout << "wrote " << data.size() << " references to " << corpus_path << "\n";
            for (const auto& [style, count] : counts)
                std::cout << "  " << style << ": " << count << "\n";
            return kExitOk;
        }

        ParserPool pool = build_pool(parser_subset, external_specs);

        if (train->parsed()) {
            if (pool.size() < 2)
                std::cerr << "warning: meta-learning over a single parser is vacuous\n";
            auto corpus = load_jsonl(corpus_path);
            TrainOptions opts;
            opts.k_ngrams = k_ngrams;
            Model model = train_model(corpus, pool, seed, opts);
            save_model(model, model_path);
            std::cout << "trained on " << corpus.size() << " references ("
                      << model.spec.selected_ngrams.size() << " n-grams selected, dimension "
                      << model.spec.dimension() << ")\n";
            std::cout << "best single parser: " << model.best_single_id << "\n";
            std::cout << "hybrid table:";
            for (const auto& [t, id] : model.hybrid)
                std::cout << " " << field_type_name(t) << "=" << id;
            std::cout << "\n";
            std::size_t shown = std::min<std::size_t>(10, model.spec.selected_ngrams.size());
            std::cout << "top selected n-grams:\n";
            for (std::size_t i = 0; i < shown; ++i)
                std::cout << "  " << model.spec.selected_ngrams[i].name() << "\n";
            std::cout << "model written to " << model_path << "\n";
            return kExitOk;
        }

        if (rec->parsed()) {
            Model model = load_model(model_path);
            for (const auto& line : gather_inputs(input_string)) {
                if (line.empty()) {
                    std::cerr << "warning: skipping empty line\n";
                    continue;
                }
                auto ranking = recommend_ref(model.ref, line);
                auto winners = recommend_field(model.field, line);
                if (format == "json") {
                    json jr = json::array();
                    for (const auto& [id, score] : ranking) jr.push_back({{"parser", id}, {"score", score}});
                    json jw = json::object();
                    for (const auto& [t, ranked] : winners) {
                        jw[std::string(field_type_name(t))] = {
                            {"parser", ranked.front().first}, {"probability", ranked.front().second}};
                    }
                    std::cout << json{{"string", line}, {"ref_ranking", jr}, {"field_winners", jw}}.dump()
                              << "\n";
                } else {
                    std::cout << line << "\n  ref ranking:";
                    for (const auto& [id, score] : ranking)
                        std::cout << " " << id << "(" << score << ")";
                    std::cout << "\n  field winners:";
                    for (const auto& [t, ranked] : winners)
                        std::cout << " " << field_type_name(t) << "=" << ranked.front().first;
                    std::cout << "\n";
                }
            }
            return kExitOk;
        }

        if (parse_cmd->parsed()) {
            Model model = load_model(model_path);
            for (const auto& line : gather_inputs(input_string)) {
                if (line.empty()) {
                    std::cerr << "warning: skipping empty line\n";
                    continue;
                }
                ParsedReference out;
                if (mode == "ref") out = parse_with_ref(model.ref, pool, line);
                else if (mode == "field") out = parse_with_field(model.field, pool, line, fallback);
                else if (mode == "single") out = pool.parse(model.best_single_id, line);
                else if (mode == "hybrid") out = parse_hybrid(model.hybrid, pool, line);
                else out = parse_voting(pool, line, vote_threshold);
                std::cout << json{{"string", line}, {"fields", parsed_to_json(out)}}.dump() << "\n";
            }
            return kExitOk;
        }

        if (eval_cmd->parsed()) {
            Model model = load_model(model_path);
            auto corpus = load_jsonl(corpus_path);
            auto summary = evaluate_model(model, corpus, pool, seed, vote_threshold, fallback);
            std::cout << (format == "json" ? summary_to_json(summary) : summary_to_text(summary))
                      << "\n";
            return kExitOk;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

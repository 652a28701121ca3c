#include <doctest.h>

#include <cstdio>

#include "parsrec/corpus.hpp"
#include "parsrec/eval.hpp"
#include "parsrec/meta.hpp"
#include "parsrec/pipeline.hpp"

using namespace parsrec;

namespace {

// Pass-through spec: zero stddev leaves raw heuristics unscaled, no n-grams.
FeatureSpec identity_spec() {
    FeatureSpec spec;
    spec.scaler_mean.assign(kNumHeuristics, 0.0);
    spec.scaler_std.assign(kNumHeuristics, 0.0);
    return spec;
}

LinearModel constant_linear(double value) { return {std::vector<double>(kNumHeuristics, 0.0), value}; }

LogisticModel constant_logistic(double p) {
    LogisticModel m;
    m.weights.assign(kNumHeuristics, 0.0);
    m.intercept = std::log(p / (1.0 - p));
    m.degenerate = true;
    return m;
}

// Emits a fixed field list regardless of input.
class FixedParser : public Parser {
  public:
    explicit FixedParser(ParsedReference out) : out_(std::move(out)) {}
    ParsedReference parse(const std::string&) const override { return out_; }

  private:
    ParsedReference out_;
};

PoolEntry fixed(const ParserId& id, std::vector<MetadataField> fields) {
    return {id, std::make_shared<FixedParser>(ParsedReference{std::move(fields)})};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/parsrec_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("recommend_ref: descending order, clamping, id tie-break") {
    RefMetaModel m;
    m.spec = identity_spec();
    m.per_parser["alpha"] = constant_linear(0.4);
    m.per_parser["zeta"] = constant_linear(0.7);
    m.per_parser["mid"] = constant_linear(0.4);
    m.per_parser["hot"] = constant_linear(2.0);    // clamps to 1
    m.per_parser["cold"] = constant_linear(-3.0);  // clamps to 0

    auto ranking = recommend_ref(m, "whatever");
    REQUIRE(ranking.size() == 5);
    CHECK(ranking[0] == std::pair<ParserId, double>{"hot", 1.0});
    CHECK(ranking[1] == std::pair<ParserId, double>{"zeta", 0.7});
    CHECK(ranking[2].first == "alpha");  // 0.4 tie breaks on id
    CHECK(ranking[3].first == "mid");
    CHECK(ranking[4] == std::pair<ParserId, double>{"cold", 0.0});
    for (std::size_t i = 1; i < ranking.size(); ++i)
        CHECK(ranking[i - 1].second >= ranking[i].second);
}

TEST_CASE("parse_with_ref delegates verbatim to the top parser") {
    ParserPool pool({fixed("hot", {{FieldType::Year, " 1999 "}}),
                     fixed("cold", {{FieldType::Year, "1111"}})});
    RefMetaModel m;
    m.spec = identity_spec();
    m.per_parser["hot"] = constant_linear(0.9);
    m.per_parser["cold"] = constant_linear(0.1);
    auto out = parse_with_ref(m, pool, "x");
    REQUIRE(out.fields.size() == 1);
    CHECK(out.fields[0].value == " 1999 ");  // raw, unnormalized
}

TEST_CASE("recommend_field covers all six types and ranks per type") {
    FieldMetaModel m;
    m.spec = identity_spec();
    for (const auto& id : {"a", "b"})
        for (int t = 0; t < kNumFieldTypes; ++t)
            m.per_pair[{id, static_cast<FieldType>(t)}] = constant_logistic(id[0] == 'a' ? 0.3 : 0.8);
    m.per_pair[{"a", FieldType::Year}] = constant_logistic(0.99);

    auto rec = recommend_field(m, "x");
    REQUIRE(rec.size() == kNumFieldTypes);
    for (int t = 0; t < kNumFieldTypes; ++t) {
        const auto& ranked = rec.at(static_cast<FieldType>(t));
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].first == (t == static_cast<int>(FieldType::Year) ? "a" : "b"));
    }
}

TEST_CASE("parse_with_field merges per-type winners") {
    ParserPool pool({fixed("a", {{FieldType::Author, "A. One"},
                                 {FieldType::Author, "B. Two"},
                                 {FieldType::Year, "1990"}}),
                     fixed("b", {{FieldType::Year, "2005"}})});
    FieldMetaModel m;
    m.spec = identity_spec();
    for (int t = 0; t < kNumFieldTypes; ++t) {
        m.per_pair[{"a", static_cast<FieldType>(t)}] = constant_logistic(0.8);
        m.per_pair[{"b", static_cast<FieldType>(t)}] = constant_logistic(0.2);
    }
    m.per_pair[{"b", FieldType::Year}] = constant_logistic(0.95);

    auto out = parse_with_field(m, pool, "x");
    CHECK(fields_of_type(out, FieldType::Author) ==
          std::vector<std::string>{"a. one", "b. two"});  // both authors, from a
    CHECK(fields_of_type(out, FieldType::Year) == std::vector<std::string>{"2005"});
    CHECK(fields_of_type(out, FieldType::Volume).empty());  // winner had nothing

    SUBCASE("single winner reproduces that parser's fields per type") {
        m.per_pair[{"b", FieldType::Year}] = constant_logistic(0.1);
        auto solo = parse_with_field(m, pool, "x");
        auto direct = pool.parse("a", "x");
        for (int t = 0; t < kNumFieldTypes; ++t) {
            auto ft = static_cast<FieldType>(t);
            CHECK(fields_of_type(solo, ft) == fields_of_type(direct, ft));
        }
    }

    SUBCASE("fallback fills types the winner missed") {
        // b wins everything but only produces year; fallback pulls the rest from a
        for (int t = 0; t < kNumFieldTypes; ++t)
            m.per_pair[{"b", static_cast<FieldType>(t)}] = constant_logistic(0.9);
        auto strict = parse_with_field(m, pool, "x", false);
        CHECK(fields_of_type(strict, FieldType::Author).empty());
        auto fb = parse_with_field(m, pool, "x", true);
        CHECK(fields_of_type(fb, FieldType::Author).size() == 2);
        CHECK(fields_of_type(fb, FieldType::Year) == std::vector<std::string>{"2005"});
    }
}

TEST_CASE("voting: threshold semantics and representative value") {
    ParserPool pool({fixed("p1", {{FieldType::Year, "2005"}, {FieldType::Volume, "17"}}),
                     fixed("p2", {{FieldType::Year, "2005."}}),   // normalizes equal
                     fixed("p3", {{FieldType::Year, " 2005 "}}),  // normalizes equal
                     fixed("p4", {{FieldType::Volume, "17"}}),
                     fixed("p5", {})});

    auto at3 = parse_voting(pool, "x", 3);
    CHECK(fields_of_type(at3, FieldType::Year) == std::vector<std::string>{"2005"});
    CHECK(fields_of_type(at3, FieldType::Volume).empty());  // only 2 of 5 votes
    // raw representative comes from the lexicographically first supporter (p1)
    REQUIRE(at3.fields.size() == 1);
    CHECK(at3.fields[0].value == "2005");

    auto at1 = parse_voting(pool, "x", 1);  // union of everything
    CHECK(fields_of_type(at1, FieldType::Year) == std::vector<std::string>{"2005"});
    CHECK(fields_of_type(at1, FieldType::Volume) == std::vector<std::string>{"17"});

    CHECK(parse_voting(pool, "x", 4).empty());
    CHECK(parse_voting(pool, "x", pool.size()).empty());  // intersection is empty here
}

TEST_CASE("best_single and hybrid_table on a transparent pool") {
    // "good" nails year+volume, "year-only" nails year but with higher id rank
    std::vector<LabeledReference> data;
    for (int i = 0; i < 6; ++i) {
        LabeledReference r;
        r.id = "r" + std::to_string(i);
        r.string = "s";
        r.truth.fields = {{FieldType::Year, "2005"}, {FieldType::Volume, "17"}};
        data.push_back(r);
    }
    ParserPool pool({fixed("good", {{FieldType::Year, "2005"}, {FieldType::Volume, "17"}}),
                     fixed("aaa-year", {{FieldType::Year, "2005"}}),
                     fixed("bad", {{FieldType::Year, "1900"}})});
    CHECK(best_single(data, pool) == "good");
    auto table = hybrid_table(data, pool);
    REQUIRE(table.size() == kNumFieldTypes);
    // year ties between aaa-year (F1 1.0? no: per-type micro-F1 both 1.0) -> id order
    CHECK(table.at(FieldType::Year) == "aaa-year");
    CHECK(table.at(FieldType::Volume) == "good");

    auto merged = parse_hybrid(table, pool, "s");
    CHECK(fields_of_type(merged, FieldType::Year) == std::vector<std::string>{"2005"});
    CHECK(fields_of_type(merged, FieldType::Volume) == std::vector<std::string>{"17"});
}

TEST_CASE("singleton pool: every system degrades to the one parser") {
    ParserPool pool({fixed("only", {{FieldType::Year, "2005"}})});
    std::vector<LabeledReference> data(4);
    for (int i = 0; i < 4; ++i) {
        data[i].id = "r" + std::to_string(i);
        data[i].string = "s";
        data[i].truth.fields = {{FieldType::Year, "2005"}};
    }
    CHECK(best_single(data, pool) == "only");
    for (const auto& [t, id] : hybrid_table(data, pool)) CHECK(id == "only");

    auto ref = train_parsrec_ref(data, pool, identity_spec());
    CHECK(ref.per_parser.size() == 1);
    CHECK(recommend_ref(ref, "s")[0].first == "only");
    CHECK(parse_with_ref(ref, pool, "s") == pool.parse("only", "s"));

    auto field = train_parsrec_field(data, pool, identity_spec());
    CHECK(field.per_pair.size() == kNumFieldTypes);
    CHECK(parse_with_field(field, pool, "s") == pool.parse("only", "s"));
    CHECK(parse_voting(pool, "s", 1) == pool.parse("only", "s"));
}

TEST_CASE("trained meta-models: shapes, labels, degenerate smoothing") {
    auto corpus = generate(120, default_styles(), 5);
    auto pool = builtin_pool(default_builtin_configs());
    FeatureSpec spec = identity_spec();

    auto ref = train_parsrec_ref(corpus, pool, spec);
    CHECK(ref.per_parser.size() == pool.size());  // one ridge model per parser
    auto ranking = recommend_ref(ref, corpus[0].string);
    CHECK(ranking.size() == pool.size());
    for (const auto& [id, v] : ranking) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    auto field = train_parsrec_field(corpus, pool, spec);
    CHECK(field.per_pair.size() == pool.size() * kNumFieldTypes);  // 30 pairs

    // year-page never emits authors and no truth lacks them: label constantly
    // 0, so the model is the Laplace-smoothed constant 1/(n+2)
    const auto& m = field.per_pair.at({"year-page", FieldType::Author});
    CHECK(m.degenerate);
    CHECK(predict_proba(m, extract_vector("anything", spec)) ==
          doctest::Approx(1.0 / (corpus.size() + 2)));
}

TEST_CASE("both-empty counts as a correct field extraction") {
    // truth and parser agree on "no issue present" -> all-ones labels
    std::vector<LabeledReference> data(5);
    for (int i = 0; i < 5; ++i) {
        data[i].id = "r" + std::to_string(i);
        data[i].string = "s";
        data[i].truth.fields = {{FieldType::Year, "2005"}};
    }
    ParserPool pool({fixed("p", {{FieldType::Year, "2005"}})});
    auto field = train_parsrec_field(data, pool, identity_spec());
    const auto& m = field.per_pair.at({"p", FieldType::Issue});
    CHECK(m.degenerate);
    CHECK(predict_proba(m, extract_vector("s", identity_spec())) == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("model JSON round trip preserves behavior byte-for-byte") {
    auto corpus = generate(150, default_styles(), 8);
    auto pool = builtin_pool(default_builtin_configs());
    TrainOptions opts;
    opts.k_ngrams = 20;
    opts.min_df = 2;
    opts.forest.n_trees = 20;
    auto model = train_model(corpus, pool, 8, opts);

    auto text = model_to_json(model);
    auto back = model_from_json(text);
    CHECK(model_to_json(back) == text);
    CHECK(back.parsers == model.parsers);
    CHECK(back.best_single_id == model.best_single_id);
    CHECK(back.corpus_hash == model.corpus_hash);
    CHECK(back.seed == model.seed);

    for (const auto& r : generate(10, default_styles(), 99)) {
        CHECK(recommend_ref(back.ref, r.string) == recommend_ref(model.ref, r.string));
        CHECK(parse_with_field(back.field, pool, r.string) ==
              parse_with_field(model.field, pool, r.string));
    }

    TempFile f("model.json");
    save_model(model, f.path);
    CHECK(model_to_json(load_model(f.path)) == text);
}

TEST_CASE("model_from_json rejects bad input") {
    auto corpus = generate(60, default_styles(), 8);
    auto pool = builtin_pool(default_builtin_configs());
    TrainOptions opts;
    opts.k_ngrams = 5;
    opts.min_df = 1;
    opts.forest.n_trees = 10;
    auto text = model_to_json(train_model(corpus, pool, 8, opts));

    auto bad_version = text;
    bad_version.replace(bad_version.find("\"version\": 1"), 12, "\"version\": 9");
    CHECK_THROWS_AS(model_from_json(bad_version), std::runtime_error);
    CHECK_THROWS_AS(model_from_json("{"), std::runtime_error);
    CHECK_THROWS_AS(model_from_json("{}"), std::runtime_error);
}

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "parsrec/corpus.hpp"
#include "parsrec/eval.hpp"
#include "parsrec/parserpool.hpp"

using namespace parsrec;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/parsrec_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("generate: size, determinism, record shape") {
    CHECK(generate(0, default_styles(), 1).empty());

    auto a = generate(50, default_styles(), 9);
    auto b = generate(50, default_styles(), 9);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].string == b[i].string);
        CHECK(a[i].style == b[i].style);
        CHECK(a[i].truth == b[i].truth);
    }
    CHECK(generate(50, default_styles(), 10)[0].string != a[0].string);

    std::set<std::string> styles;
    for (const auto& r : a) {
        CHECK(!r.string.empty());
        CHECK(!r.truth.empty());
        styles.insert(r.style);
        // every record carries exactly one year and it round-trips
        CHECK(fields_of_type(r.truth, FieldType::Year).size() == 1);
        CHECK(fields_of_type(r.truth, FieldType::Source).size() == 1);
        CHECK(!fields_of_type(r.truth, FieldType::Author).empty());
    }
    CHECK(styles.size() == 5);  // all styles present in 50 records
}

TEST_CASE("generate is prefix-stable: record i depends only on (seed, i)") {
    auto small = generate(10, default_styles(), 4);
    auto big = generate(25, default_styles(), 4);
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(small[i].string == big[i].string);
        CHECK(small[i].truth == big[i].truth);
    }
}

TEST_CASE("split: exact sizes, partition, seed determinism") {
    auto data = generate(10, default_styles(), 3);
    SplitSpec spec;
    spec.seed = 11;
    auto s = split(data, spec);
    CHECK(s.parser_train.size() == 4);  // floor(10*0.40)
    CHECK(s.meta_train.size() == 3);    // floor(10*0.30)
    CHECK(s.test.size() == 3);          // remainder

    std::multiset<std::string> seen, all;
    for (const auto& r : data) all.insert(r.id);
    for (const auto* part : {&s.parser_train, &s.meta_train, &s.test})
        for (const auto& r : *part) seen.insert(r.id);
    CHECK(seen == all);

    auto s2 = split(data, spec);
    CHECK(s2.test.front().id == s.test.front().id);
    spec.seed = 12;
    auto s3 = split(data, spec);
    bool same = true;
    for (std::size_t i = 0; i < s.test.size(); ++i)
        same = same && s3.test[i].id == s.test[i].id;
    CHECK(!same);

    auto one = split(generate(1, default_styles(), 3), spec);
    CHECK(one.parser_train.empty());
    CHECK(one.meta_train.empty());
    CHECK(one.test.size() == 1);
}

TEST_CASE("jsonl round trip preserves every record") {
    auto data = generate(40, default_styles(), 17);
    TempFile f("roundtrip.jsonl");
    save_jsonl(data, f.path);
    auto loaded = load_jsonl(f.path);
    REQUIRE(loaded.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(loaded[i].id == data[i].id);
        CHECK(loaded[i].string == data[i].string);
        CHECK(loaded[i].style == data[i].style);
        CHECK(loaded[i].truth == data[i].truth);
    }
    CHECK(corpus_hash(loaded) == corpus_hash(data));
}

TEST_CASE("load_jsonl: error cases name the offending line") {
    TempFile f("bad.jsonl");
    {
        std::ofstream out(f.path);
        out << R"({"id":"r1","string":"x","style":"apa","fields":[{"type":"year","value":"2001"}]})"
            << "\n";
        out << "not json\n";
    }
    try {
        load_jsonl(f.path);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    {
        std::ofstream out(f.path);
        out << R"({"id":"r1","string":"x","style":"apa","fields":[{"type":"title","value":"t"}]})"
            << "\n";
    }
    CHECK_THROWS_AS(load_jsonl(f.path), std::runtime_error);  // "title" is not a field type

    CHECK_THROWS_AS(load_jsonl("/nonexistent/dir/x.jsonl"), std::runtime_error);

    {
        std::ofstream out(f.path);
    }
    CHECK(load_jsonl(f.path).empty());  // empty file is an empty corpus
}

TEST_CASE("corpus_hash: 16 hex chars, content-sensitive") {
    auto data = generate(5, default_styles(), 2);
    auto h = corpus_hash(data);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    auto mutated = data;
    mutated[3].string += " ";
    CHECK(corpus_hash(mutated) != h);
    CHECK(corpus_hash({}) != h);
}

TEST_CASE("every rendered string is recoverable by its style specialist") {
    auto pool = builtin_pool(default_builtin_configs());
    const std::map<std::string, ParserId> specialist = {{"numbracket", "bracket-num"},
                                                        {"dotenum", "dot-enum"},
                                                        {"apa", "apa-like"},
                                                        {"ieee", "ieee-like"}};
    for (const auto& r : generate(300, default_styles(), 31)) {
        auto it = specialist.find(r.style);
        if (it == specialist.end()) continue;  // acs has none by design
        CHECK(reference_f1(pool.parse(it->second, r.string), r.truth) == doctest::Approx(1.0));
    }
}

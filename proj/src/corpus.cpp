#include "parsrec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace parsrec {

namespace {

using json = nlohmann::json;

const char* kEnDash = "–";

const std::vector<std::string>& last_names() {
    static const std::vector<std::string> v = {
        "Adomavicius", "Tuzhilin",  "Abbar",    "Bouzeghoub", "Lopez",    "Serradilla",
        "Hernando",   "Ortega",     "Bobadilla", "Arslan",     "Acilar",   "Spring",
        "Collins",    "Sheridan",   "Beel",      "Lemke",      "Budka",    "Gabrys",
        "Burke",      "Nakamura",   "Ivanov",    "Kowalski",   "Nowak",    "Fischer",
        "Weber",      "Moreau",     "Dubois",    "Rossi",      "Costa",    "Silva",
        "Johansson",  "Lindberg",   "Keller",    "Richter",    "Vargas",   "Romero",
        "Tanaka",     "Suzuki",     "Chen",      "Wang"};
    return v;
}

const std::vector<std::string>& journals() {
    static const std::vector<std::string> v = {
        "Expert Systems with Applications",
        "IEEE Transactions on Knowledge and Data Engineering",
        "Knowledge Based Systems",
        "Information Sciences",
        "Journal of Machine Learning Research",
        "Artificial Intelligence Review",
        "Journal of Chemical Information and Modeling",
        "Chemical Reviews",
        "Data Mining and Knowledge Discovery",
        "Journal of Informetrics",
        "Information Processing and Management",
        "User Modeling and User Adapted Interaction",
        "International Journal of Digital Libraries",
        "Machine Learning",
        "Pattern Recognition Letters",
        "Scientometrics"};
    return v;
}

const std::vector<std::string>& title_words() {
    static const std::vector<std::string> v = {
        "recommender", "systems",   "collaborative", "filtering", "approach", "analysis",
        "learning",    "methods",   "evaluation",    "framework", "neural",   "models",
        "extraction",  "metadata",  "parsing",       "citation",  "networks", "hybrid",
        "adaptive",    "survey",    "techniques",    "knowledge", "semantic", "retrieval",
        "ranking",     "features",  "context",       "aware",     "detection", "chemical",
        "reactions",   "molecular", "prediction",    "graphs",    "embedding", "clustering"};
    return v;
}

std::string join_authors(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string initials_first(const TruthRecord::Author& a) { return a.initials + " " + a.last; }

// "G. A." -> "GA"
std::string compact_initials(const std::string& initials) {
    std::string out;
    for (char c : initials) {
        if (c >= 'A' && c <= 'Z') out.push_back(c);
    }
    return out;
}

std::string render_numbracket(const TruthRecord& r) {
    std::string out = "[" + std::to_string(r.enum_number) + "] ";
    for (const auto& a : r.authors) out += initials_first(a) + ", ";
    out += r.title + ", " + r.journal + " " + std::to_string(r.volume) + " ";
    if (r.issue) out += "(" + std::to_string(*r.issue) + ") ";
    out += "(" + std::to_string(r.year) + ") ";
    out += std::to_string(r.page_from) + kEnDash + std::to_string(r.page_to) + ".";
    return out;
}

std::string render_dotenum(const TruthRecord& r) {
    std::vector<std::string> names;
    for (const auto& a : r.authors) names.push_back(a.last + " " + compact_initials(a.initials));
    std::string out = std::to_string(r.enum_number) + ". " + join_authors(names, ", ") + ". ";
    out += r.title + ". " + r.journal + ". ";
    out += std::to_string(r.year) + ";" + std::to_string(r.volume);
    if (r.issue) out += "(" + std::to_string(*r.issue) + ")";
    out += ":" + std::to_string(r.page_from) + "-" + std::to_string(r.page_to) + ".";
    return out;
}

std::string render_acs(const TruthRecord& r) {
    std::vector<std::string> names;
    for (const auto& a : r.authors) names.push_back(a.last + ", " + a.initials);
    std::string out = join_authors(names, "; ") + " " + r.title + ". ";
    out += r.journal + " " + std::to_string(r.year) + ", " + std::to_string(r.volume);
    if (r.issue) out += " (" + std::to_string(*r.issue) + ")";
    out += ", " + std::to_string(r.page_from) + kEnDash + std::to_string(r.page_to) + ".";
    return out;
}

std::string render_apa(const TruthRecord& r) {
    std::vector<std::string> names;
    for (const auto& a : r.authors) names.push_back(a.last + ", " + a.initials);
    std::string authors;
    if (names.size() == 1) {
        authors = names[0];
    } else {
        for (std::size_t i = 0; i + 1 < names.size(); ++i) {
            authors += names[i];
            authors += (i + 2 < names.size()) ? ", " : ", & ";
        }
        authors += names.back();
    }
    std::string out = authors + " (" + std::to_string(r.year) + "). " + r.title + ". ";
    out += r.journal + ", " + std::to_string(r.volume);
    if (r.issue) out += "(" + std::to_string(*r.issue) + ")";
    out += ", " + std::to_string(r.page_from) + kEnDash + std::to_string(r.page_to) + ".";
    return out;
}

std::string render_ieee(const TruthRecord& r) {
    std::vector<std::string> names;
    for (const auto& a : r.authors) names.push_back(initials_first(a));
    std::string authors;
    if (names.size() == 1) {
        authors = names[0];
    } else if (names.size() == 2) {
        authors = names[0] + " and " + names[1];
    } else {
        for (std::size_t i = 0; i + 1 < names.size(); ++i) authors += names[i] + ", ";
        authors += "and " + names.back();
    }
    std::string out = authors + ", \"" + r.title + ",\" " + r.journal + ", vol. " +
                      std::to_string(r.volume) + ", ";
    if (r.issue) out += "no. " + std::to_string(*r.issue) + ", ";
    out += "pp. " + std::to_string(r.page_from) + kEnDash + std::to_string(r.page_to) + ", " +
           std::to_string(r.year) + ".";
    return out;
}

}  // namespace

ParsedReference TruthRecord::truth() const {
    ParsedReference ref;
    for (const auto& a : authors)
        ref.fields.push_back({FieldType::Author, a.initials + " " + a.last});
    ref.fields.push_back({FieldType::Source, journal});
    ref.fields.push_back({FieldType::Year, std::to_string(year)});
    ref.fields.push_back({FieldType::Volume, std::to_string(volume)});
    if (issue) ref.fields.push_back({FieldType::Issue, std::to_string(*issue)});
    ref.fields.push_back({FieldType::Page, std::to_string(page_from) + "-" + std::to_string(page_to)});
    return ref;
}

const std::vector<StyleTemplate>& default_styles() {
    static const std::vector<StyleTemplate> styles = {
        {"numbracket", render_numbracket},
        {"dotenum", render_dotenum},
        {"acs", render_acs},
        {"apa", render_apa},
        {"ieee", render_ieee},
    };
    return styles;
}

std::vector<LabeledReference> generate(std::size_t n, const std::vector<StyleTemplate>& styles,
                                       std::uint64_t seed) {
    if (styles.empty()) throw std::invalid_argument("generate: empty style list");

    std::vector<LabeledReference> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        auto pick = [&rng](std::size_t bound) {
            return static_cast<std::size_t>(
                std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng));
        };

        // Round-robin over styles with a seeded +/-1 jitter.
        std::size_t style_idx = (i + pick(2)) % styles.size();

        TruthRecord r;
        std::size_t n_authors = 1 + pick(4);
        for (std::size_t a = 0; a < n_authors; ++a) {
            TruthRecord::Author au;
            std::size_t n_init = 1 + pick(2);
            for (std::size_t k = 0; k < n_init; ++k) {
                if (k) au.initials += " ";
                au.initials += static_cast<char>('A' + pick(26));
                au.initials += ".";
            }
            au.last = last_names()[pick(last_names().size())];
            r.authors.push_back(std::move(au));
        }
        std::size_t n_words = 4 + pick(5);
        for (std::size_t w = 0; w < n_words; ++w) {
            std::string word = title_words()[pick(title_words().size())];
            if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
            if (w) r.title += " ";
            r.title += word;
        }
        r.journal = journals()[pick(journals().size())];
        r.year = 1950 + static_cast<int>(pick(74));     // 1950..2023
        r.volume = 1 + static_cast<int>(pick(200));     // 1..200
        if (pick(10) < 7) r.issue = 1 + static_cast<int>(pick(12));
        r.page_from = 1 + static_cast<int>(pick(8999));
        r.page_to = r.page_from + 1 + static_cast<int>(pick(40));
        r.enum_number = 1 + static_cast<int>(pick(99));

        LabeledReference ref;
        ref.id = "ref-" + std::to_string(i);
        ref.style = styles[style_idx].name;
        ref.string = styles[style_idx].render(r);
        ref.truth = r.truth();
        out.push_back(std::move(ref));
    }
    return out;
}

SplitResult split(const std::vector<LabeledReference>& data, const SplitSpec& spec) {
    double sum = spec.parser_train + spec.meta_train + spec.test;
    if (spec.parser_train <= 0 || spec.meta_train <= 0 || spec.test <= 0 ||
        std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must be positive and sum to 1");

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t n = data.size();
    const std::size_t n1 = static_cast<std::size_t>(n * spec.parser_train);
    const std::size_t n2 = static_cast<std::size_t>(n * spec.meta_train);

    SplitResult result;
    for (std::size_t i = 0; i < n; ++i) {
        const LabeledReference& r = data[order[i]];
        if (i < n1) result.parser_train.push_back(r);
        else if (i < n1 + n2) result.meta_train.push_back(r);
        else result.test.push_back(r);
    }
    return result;
}

namespace {

json to_json(const LabeledReference& r) {
    json fields = json::array();
    for (const auto& f : r.truth.fields) {
        fields.push_back({{"type", std::string(field_type_name(f.type))}, {"value", f.value}});
    }
    return json{{"id", r.id}, {"string", r.string}, {"style", r.style}, {"fields", fields}};
}

}  // namespace

void save_jsonl(const std::vector<LabeledReference>& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_jsonl: cannot open " + path);
    for (const auto& r : data) out << to_json(r).dump() << "\n";
    if (!out) throw std::runtime_error("save_jsonl: write failed for " + path);
}

std::vector<LabeledReference> load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_jsonl: cannot open " + path);
    std::vector<LabeledReference> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed JSON: " + e.what());
        }
        try {
            LabeledReference r;
            r.id = j.at("id").get<std::string>();
            r.string = j.at("string").get<std::string>();
            r.style = j.value("style", "");
            for (const auto& f : j.at("fields")) {
                MetadataField field;
                field.type = field_type_from_name(f.at("type").get<std::string>());
                field.value = f.at("value").get<std::string>();
                r.truth.fields.push_back(std::move(field));
            }
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string corpus_hash(const std::vector<LabeledReference>& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1e;  // record separator
        h *= 0x100000001b3ULL;
    };
    for (const auto& r : data) mix(to_json(r).dump());
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace parsrec

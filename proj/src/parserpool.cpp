#include "parsrec/parserpool.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <regex>
#include <stdexcept>

#include <json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace parsrec {

namespace {

std::atomic<std::size_t> g_external_warnings{0};

void log_warn(const std::string& msg) {
    g_external_warnings.fetch_add(1, std::memory_order_relaxed);
    if (std::getenv("PARSREC_LOG")) std::cerr << "[parsrec] warning: " << msg << "\n";
}

// Collapse dash typography so page ranges parse uniformly.
std::string normalize_dashes(std::string s) {
    for (const char* dash : {"–", "—", "‐", "−"}) {
        std::size_t pos;
        while ((pos = s.find(dash)) != std::string::npos) s.replace(pos, 3, "-");
    }
    return s;
}

void emit(ParsedReference& out, const BuiltinParserConfig& cfg, FieldType t, std::string value) {
    if (cfg.enabled(t)) out.fields.push_back({t, std::move(value)});
}

bool plausible_year(int y) { return y >= 1500 && y <= 2100; }

// First standalone 4-digit year-like number not adjacent to a dash
// (excludes page ranges).
std::optional<std::string> find_plain_year(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(s[i]))) continue;
        std::size_t j = i;
        while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
        const std::size_t len = j - i;
        if (len == 4) {
            bool dash_before = i > 0 && s[i - 1] == '-';
            bool dash_after = j < s.size() && s[j] == '-';
            int y = std::stoi(s.substr(i, 4));
            if (!dash_before && !dash_after && plausible_year(y)) return s.substr(i, 4);
        }
        i = j;
    }
    return std::nullopt;
}

// --- numeric-bracket specialist ("[3] G. Adomavicius, A. Tuzhilin, Title,
// Journal 17 (6) (2005) 734-749.") -------------------------------------------

class BracketNumParser : public Parser {
  public:
    explicit BracketNumParser(BuiltinParserConfig cfg) : cfg_(std::move(cfg)) {}

    ParsedReference parse(const std::string& input) const override {
        static const std::regex prefix_re(R"(^\[\d{1,6}\] )");
        static const std::regex author_re(R"(^((?:[A-Z]\. )+)([A-Z][a-z]+), )");
        static const std::regex tail_re(
            R"(^([^,]+), (.+?) (\d+) (?:\((\d{1,3})\) )?\((\d{4})\) (\d+)-(\d+)\.$)");
        static const std::regex paren_year_re(R"(\((\d{4})\))");

        ParsedReference out;
        std::string s = normalize_dashes(input);
        std::smatch m;
        if (std::regex_search(s, m, prefix_re)) s = m.suffix();

        while (std::regex_search(s, m, author_re)) {
            emit(out, cfg_, FieldType::Author, m[1].str() + m[2].str());
            s = m.suffix();
        }
        if (std::regex_match(s, m, tail_re)) {
            emit(out, cfg_, FieldType::Source, m[2].str());
            emit(out, cfg_, FieldType::Volume, m[3].str());
            if (m[4].matched) emit(out, cfg_, FieldType::Issue, m[4].str());
            emit(out, cfg_, FieldType::Year, m[5].str());
            emit(out, cfg_, FieldType::Page, m[6].str() + "-" + m[7].str());
        } else {
            // Fallback: a parenthesized year works on some other styles too.
            auto begin = std::sregex_iterator(s.begin(), s.end(), paren_year_re);
            for (auto it = begin; it != std::sregex_iterator(); ++it) {
                if (plausible_year(std::stoi((*it)[1].str()))) {
                    emit(out, cfg_, FieldType::Year, (*it)[1].str());
                    break;
                }
            }
        }
        return out;
    }

  private:
    BuiltinParserConfig cfg_;
};

// --- dot-enumeration specialist ("14. Adomavicius G, Tuzhilin A. Title.
// Journal. 2005;17(6):734-749.") ----------------------------------------------

class DotEnumParser : public Parser {
  public:
    explicit DotEnumParser(BuiltinParserConfig cfg) : cfg_(std::move(cfg)) {}

    ParsedReference parse(const std::string& input) const override {
        static const std::regex prefix_re(R"(^\d{1,4}\. )");
        static const std::regex author_re(R"(^([A-Z][a-z]+) ([A-Z]{1,2})(, |\. ))");
        static const std::regex tail_re(
            R"(^(.+?)\. (.+?)\. (\d{4});(\d+)(?:\((\d{1,3})\))?:(\d+)-(\d+)\.$)");

        ParsedReference out;
        std::string s = normalize_dashes(input);
        std::smatch m;
        if (!std::regex_search(s, m, prefix_re)) return out;  // not our style
        s = m.suffix();

        while (std::regex_search(s, m, author_re)) {
            emit(out, cfg_, FieldType::Author, expand_initials(m[2].str()) + " " + m[1].str());
            bool last = m[3].str() == ". ";
            s = m.suffix();
            if (last) break;
        }
        if (std::regex_match(s, m, tail_re)) {
            emit(out, cfg_, FieldType::Source, m[2].str());
            emit(out, cfg_, FieldType::Year, m[3].str());
            emit(out, cfg_, FieldType::Volume, m[4].str());
            if (m[5].matched) emit(out, cfg_, FieldType::Issue, m[5].str());
            emit(out, cfg_, FieldType::Page, m[6].str() + "-" + m[7].str());
        }
        return out;
    }

  private:
    // "GA" -> "G. A."
    static std::string expand_initials(const std::string& compact) {
        std::string out;
        for (char c : compact) {
            if (!out.empty()) out += " ";
            out += c;
            out += ".";
        }
        return out;
    }

    BuiltinParserConfig cfg_;
};

// --- APA-like specialist ("Adomavicius, G., & Tuzhilin, A. (2005). Title.
// Journal, 17(6), 734-749.") --------------------------------------------------

class ApaParser : public Parser {
  public:
    explicit ApaParser(BuiltinParserConfig cfg) : cfg_(std::move(cfg)) {}

    ParsedReference parse(const std::string& input) const override {
        static const std::regex anchor_re(R"( \((\d{4})\)\. )");
        static const std::regex author_re(R"(([A-Z][a-z]+), ([A-Z]\.(?: [A-Z]\.)?))");
        static const std::regex tail_re(R"(^(.+?)\. (.+?), (\d+)(?:\((\d{1,3})\))?, (\d+)-(\d+)\.$)");
        static const std::regex paren_year_re(R"(\((\d{4})\))");

        ParsedReference out;
        std::string s = normalize_dashes(input);
        std::smatch m;
        if (!std::regex_search(s, m, anchor_re)) {
            auto begin = std::sregex_iterator(s.begin(), s.end(), paren_year_re);
            for (auto it = begin; it != std::sregex_iterator(); ++it) {
                if (plausible_year(std::stoi((*it)[1].str()))) {
                    emit(out, cfg_, FieldType::Year, (*it)[1].str());
                    break;
                }
            }
            return out;
        }

        const std::string authors_part = m.prefix();
        emit(out, cfg_, FieldType::Year, m[1].str());
        std::string rest = m.suffix();

        for (auto it = std::sregex_iterator(authors_part.begin(), authors_part.end(), author_re);
             it != std::sregex_iterator(); ++it) {
            emit(out, cfg_, FieldType::Author, (*it)[2].str() + " " + (*it)[1].str());
        }
        if (std::regex_match(rest, m, tail_re)) {
            emit(out, cfg_, FieldType::Source, m[2].str());
            emit(out, cfg_, FieldType::Volume, m[3].str());
            if (m[4].matched) emit(out, cfg_, FieldType::Issue, m[4].str());
            emit(out, cfg_, FieldType::Page, m[5].str() + "-" + m[6].str());
        }
        return out;
    }

  private:
    BuiltinParserConfig cfg_;
};

// --- IEEE-like specialist ("G. Adomavicius and A. Tuzhilin, "Title," Journal,
// vol. 17, no. 6, pp. 734-749, 2005.") ----------------------------------------

class IeeeParser : public Parser {
  public:
    explicit IeeeParser(BuiltinParserConfig cfg) : cfg_(std::move(cfg)) {}

    ParsedReference parse(const std::string& input) const override {
        static const std::regex quote_re(R"(^(.*?), "(.*?)," (.*)$)");
        static const std::regex author_re(R"((?:^|, |and )((?:[A-Z]\. )+[A-Z][a-z]+))");
        static const std::regex tail_re(
            R"(^(.+?), vol\. (\d+), (?:no\. (\d{1,3}), )?pp\. (\d+)-(\d+), (\d{4})\.$)");

        ParsedReference out;
        std::string s = normalize_dashes(input);
        std::smatch m;
        if (!std::regex_match(s, m, quote_re)) return out;

        const std::string authors_part = m[1].str();
        std::string tail = m[3].str();
        for (auto it = std::sregex_iterator(authors_part.begin(), authors_part.end(), author_re);
             it != std::sregex_iterator(); ++it) {
            emit(out, cfg_, FieldType::Author, (*it)[1].str());
        }
        if (std::regex_match(tail, m, tail_re)) {
            emit(out, cfg_, FieldType::Source, m[1].str());
            emit(out, cfg_, FieldType::Volume, m[2].str());
            if (m[3].matched) emit(out, cfg_, FieldType::Issue, m[3].str());
            emit(out, cfg_, FieldType::Page, m[4].str() + "-" + m[5].str());
            emit(out, cfg_, FieldType::Year, m[6].str());
        }
        return out;
    }

  private:
    BuiltinParserConfig cfg_;
};

// --- style-agnostic year/page specialist -------------------------------------

class YearPageParser : public Parser {
  public:
    explicit YearPageParser(BuiltinParserConfig cfg) : cfg_(std::move(cfg)) {}

    ParsedReference parse(const std::string& input) const override {
        static const std::regex page_re(R"((\d+)-(\d+))");
        static const std::regex vol_issue_re(R"((\d+) ?\((\d{1,2})\))");
        static const std::regex vol_label_re(R"(vol\. (\d+))");
        static const std::regex no_label_re(R"(no\. (\d{1,3}))");

        ParsedReference out;
        std::string s = normalize_dashes(input);
        std::smatch m;

        if (auto year = find_plain_year(s)) emit(out, cfg_, FieldType::Year, *year);
        if (std::regex_search(s, m, page_re))
            emit(out, cfg_, FieldType::Page, m[1].str() + "-" + m[2].str());

        if (std::regex_search(s, m, vol_issue_re)) {
            emit(out, cfg_, FieldType::Volume, m[1].str());
            emit(out, cfg_, FieldType::Issue, m[2].str());
        } else {
            if (std::regex_search(s, m, vol_label_re)) emit(out, cfg_, FieldType::Volume, m[1].str());
            if (std::regex_search(s, m, no_label_re)) emit(out, cfg_, FieldType::Issue, m[1].str());
        }
        return out;
    }

  private:
    BuiltinParserConfig cfg_;
};

std::shared_ptr<const Parser> make_builtin(const BuiltinParserConfig& cfg) {
    for (const auto& [t, skill] : cfg.field_skills) {
        if (skill < 0.0 || skill > 1.0)
            throw std::invalid_argument("builtin_pool: skill out of [0,1] for " + cfg.id);
    }
    if (cfg.target_style == "numbracket") return std::make_shared<BracketNumParser>(cfg);
    if (cfg.target_style == "dotenum") return std::make_shared<DotEnumParser>(cfg);
    if (cfg.target_style == "apa") return std::make_shared<ApaParser>(cfg);
    if (cfg.target_style == "ieee") return std::make_shared<IeeeParser>(cfg);
    if (cfg.target_style == "any") return std::make_shared<YearPageParser>(cfg);
    throw std::invalid_argument("builtin_pool: unknown target style \"" + cfg.target_style + "\"");
}

// --- external process adapter ------------------------------------------------

class ExternalParser : public Parser {
  public:
    ExternalParser(ParserId id, const std::string& command, std::chrono::milliseconds timeout)
        : id_(std::move(id)), timeout_(timeout) {
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw std::runtime_error("external_parser: pipe() failed");
        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("external_parser: fork() failed");
        if (pid_ == 0) {
            setpgid(0, 0);  // own process group, so teardown reaches grandchildren
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        child_stdin_ = in_pipe[1];
        child_stdout_ = out_pipe[0];
        fcntl(child_stdout_, F_SETFL, O_NONBLOCK);
    }

    ~ExternalParser() override {
        if (child_stdin_ >= 0) close(child_stdin_);
        if (child_stdout_ >= 0) close(child_stdout_);
        if (pid_ > 0) {
            kill(-pid_, SIGTERM);
            bool reaped = false;
            for (int i = 0; i < 50 && !reaped; ++i) {
                reaped = waitpid(pid_, nullptr, WNOHANG) != 0;
                if (!reaped) usleep(10000);
            }
            kill(-pid_, SIGKILL);
            if (!reaped) waitpid(pid_, nullptr, 0);
        }
    }

    ParsedReference parse(const std::string& s) const override {
        std::string request_id = next_request_id();
        nlohmann::json req{{"id", request_id}, {"string", s}};
        std::string line = req.dump();
        line.push_back('\n');
        if (!write_all(line)) {
            log_warn("external parser " + id_ + ": write failed");
            return {};
        }
        std::string resp;
        if (!read_line(resp)) {
            log_warn("external parser " + id_ + ": timeout or closed stream");
            return {};
        }
        return decode(resp, request_id);
    }

  private:
    std::string next_request_id() const { return "q" + std::to_string(++seq_); }

    bool write_all(const std::string& data) const {
        std::size_t off = 0;
        while (off < data.size()) {
            ssize_t n = write(child_stdin_, data.data() + off, data.size() - off);
            if (n <= 0) return false;
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    bool read_line(std::string& out) const {
        auto deadline = std::chrono::steady_clock::now() + timeout_;
        for (;;) {
            std::size_t nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                out = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return true;
            }
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0) return false;
            pollfd pfd{child_stdout_, POLLIN, 0};
            int rc = poll(&pfd, 1, static_cast<int>(remaining.count()));
            if (rc <= 0) return false;
            char chunk[4096];
            ssize_t n = read(child_stdout_, chunk, sizeof(chunk));
            if (n <= 0) return false;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    ParsedReference decode(const std::string& line, const std::string& request_id) const {
        ParsedReference out;
        try {
            auto j = nlohmann::json::parse(line);
            if (j.at("id").get<std::string>() != request_id)
                throw std::runtime_error("response id does not match request id");
            for (const auto& f : j.at("fields")) {
                std::string type_name = f.at("type").get<std::string>();
                try {
                    out.fields.push_back(
                        {field_type_from_name(type_name), f.at("value").get<std::string>()});
                } catch (const std::invalid_argument&) {
                    log_warn("external parser " + id_ + ": unknown field type \"" + type_name +
                             "\" ignored");
                }
            }
        } catch (const std::exception& e) {
            log_warn("external parser " + id_ + ": malformed response: " + e.what());
            return {};
        }
        return out;
    }

    ParserId id_;
    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int child_stdin_ = -1;
    int child_stdout_ = -1;
    mutable std::string buffer_;
    mutable std::size_t seq_ = 0;
};

}  // namespace

ParserPool::ParserPool(std::vector<PoolEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const PoolEntry& a, const PoolEntry& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].id == entries_[i - 1].id)
            throw std::invalid_argument("ParserPool: duplicate id \"" + entries_[i].id + "\"");
    }
}

std::vector<ParserId> ParserPool::ids() const {
    std::vector<ParserId> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
}

ParsedReference ParserPool::parse(const ParserId& id, const std::string& s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const PoolEntry& e, const ParserId& v) { return e.id < v; });
    if (it == entries_.end() || it->id != id)
        throw std::out_of_range("ParserPool: unknown id \"" + id + "\"");
    return it->parser->parse(s);
}

std::vector<BuiltinParserConfig> default_builtin_configs() {
    return {
        {"bracket-num", "numbracket", {}},
        {"dot-enum", "dotenum", {}},
        {"apa-like", "apa", {}},
        {"ieee-like", "ieee", {}},
        {"year-page",
         "any",
         {{FieldType::Author, 0.0}, {FieldType::Source, 0.0}}},
    };
}

ParserPool builtin_pool(const std::vector<BuiltinParserConfig>& configs) {
    std::vector<PoolEntry> entries;
    entries.reserve(configs.size());
    for (const auto& cfg : configs) entries.push_back({cfg.id, make_builtin(cfg)});
    return ParserPool(std::move(entries));
}

PoolEntry external_parser(const ParserId& id, const std::string& command,
                          std::chrono::milliseconds timeout) {
    return {id, std::make_shared<ExternalParser>(id, command, timeout)};
}

std::size_t external_warning_count() { return g_external_warnings.load(); }

}  // namespace parsrec

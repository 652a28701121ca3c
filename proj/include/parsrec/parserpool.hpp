#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "parsrec/refmodel.hpp"

namespace parsrec {

/// A reference parser. parse() must tolerate any input and returns an empty
/// ParsedReference on failure, never throws for bad reference strings.
class Parser {
  public:
    virtual ~Parser() = default;
    virtual ParsedReference parse(const std::string& s) const = 0;
};

struct PoolEntry {
    ParserId id;
    std::shared_ptr<const Parser> parser;
};

/// Configuration of a built-in rule parser. field_skills gates which
/// extraction rules are active (a rule is enabled iff its skill >= 0.5);
/// gating happens at construction, parsing itself is deterministic.
struct BuiltinParserConfig {
    ParserId id;
    std::string target_style;                // style the rules are written for
    std::map<FieldType, double> field_skills;  // missing types default to 1.0

    bool enabled(FieldType t) const {
        auto it = field_skills.find(t);
        return it == field_skills.end() || it->second >= 0.5;
    }
};

/// Ordered parser pool; entries are kept in lexicographic ParserId order,
/// the global tie-break order.
class ParserPool {
  public:
    explicit ParserPool(std::vector<PoolEntry> entries);

    const std::vector<PoolEntry>& entries() const { return entries_; }
    std::vector<ParserId> ids() const;
    std::size_t size() const { return entries_.size(); }

    /// Throws std::out_of_range for unknown ids.
    ParsedReference parse(const ParserId& id, const std::string& s) const;

  private:
    std::vector<PoolEntry> entries_;
};

/// Default configurations: four style specialists (numeric-bracket,
/// dot-enumeration, APA-like, IEEE-like) and a style-agnostic year/page
/// specialist that never emits author or source fields.
std::vector<BuiltinParserConfig> default_builtin_configs();

/// Builds a pool of built-in rule parsers. Throws on duplicate ids or an
/// unknown target_style.
ParserPool builtin_pool(const std::vector<BuiltinParserConfig>& configs);

/// Adapter for an external parser process speaking the newline-delimited
/// JSON protocol: request {"id":..., "string":...}, response {"id":...,
/// "fields":[{"type":...,"value":...},...]}. Spawn failure throws; per-call
/// timeouts and protocol errors map to an empty ParsedReference plus a
/// warning. One in-flight request per adapter instance.
PoolEntry external_parser(const ParserId& id, const std::string& command,
                          std::chrono::milliseconds timeout);

/// Number of protocol/timeout warnings emitted by external adapters since
/// process start (test hook).
std::size_t external_warning_count();

}  // namespace parsrec

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "misuseforge/pattern.hpp"
#include "misuseforge/progmodel.hpp"

namespace misuseforge {

enum class NoMatchReason { None, NoCriticalApi, MissingAnchor, DependencyMismatch, ValueSecure };

[[nodiscard]] const char* no_match_reason_name(NoMatchReason reason) noexcept;

struct Site {
    StmtRef at;     // statement of the call; for overrides, stmt is -1
    NodePtr call;   // null for overrides
    ApiForm form = ApiForm::Invocation;
    std::string file;
    int line = 0;
    std::string text;  // source being replaced: the statement, or the whole overriding method
};

struct Evidence {
    int arg = -1;
    std::string constraint;
    std::string origin;
    std::string value;
    std::vector<std::string> trace;
};

struct MatchResult {
    std::string pattern_id;
    std::string binding;
    Site site;
    NameMap bindings;  // abstract variable -> concrete text
    std::vector<Evidence> evidence;
    bool low_confidence = false;
};

struct MatchOutcome {
    std::optional<MatchResult> match;
    NoMatchReason reason = NoMatchReason::None;
};

struct ScanOptions {
    int max_depth = kDefaultMaxDepth;
    int jobs = 0;
};

// Method name and arity encoded in a binding such as `a.b.C.m(T1, T2)`.
struct BindingShape {
    std::string simple_class;
    std::string method;
    std::size_t arity = 0;
};
[[nodiscard]] BindingShape binding_shape(const std::string& binding);

[[nodiscard]] std::vector<Site> find_critical_sites(const ProgramModel& model, const CallGraph& graph,
                                                    const Pattern& pattern);
[[nodiscard]] MatchOutcome match_site(const ProgramModel& model, const CallGraph& graph, const Pattern& pattern,
                                      const Site& site, const ScanOptions& options = {});
// Bindings when the body matches the override template statement by statement.
[[nodiscard]] std::optional<NameMap> match_override(const MethodDecl& method, const Pattern& pattern);
[[nodiscard]] std::vector<MatchResult> scan(const ProgramModel& model, const CallGraph& graph,
                                            const std::vector<Pattern>& patterns, const ScanOptions& options = {});

}  // namespace misuseforge

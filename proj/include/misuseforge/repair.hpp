#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "misuseforge/matcher.hpp"

namespace misuseforge {

struct FixSuggestion {
    std::string pattern_id;
    FixMode mode = FixMode::None;
    std::string old_text;  // expression to replace, or the replaced source for snippets
    std::string new_text;  // replacement expression, or the customized fix
    std::vector<std::string> notes;

    bool operator==(const FixSuggestion&) const = default;
};

// Never touches source files. `seed` picks a random secure option instead of the first one.
[[nodiscard]] FixSuggestion customize_fix(const Pattern& pattern, const MatchResult& match,
                                          std::optional<std::uint64_t> seed = std::nullopt);

// Replaces bound `$v_i` occurrences; names bound to themselves are left as they are.
[[nodiscard]] std::string substitute_bindings(const std::string& text, const NameMap& bindings);

enum class ReportFormat { Json, Text };

struct ReportSummary {
    std::size_t scanned_files = 0;
    std::size_t patterns_applied = 0;
    std::optional<std::string> generated_at;
};

[[nodiscard]] std::string render_report(const std::vector<MatchResult>& results,
                                        const std::vector<FixSuggestion>& suggestions, const ReportSummary& summary,
                                        ReportFormat format);

struct Finding {
    std::string file;
    int line = 0;
    std::string pattern_id;

    auto operator<=>(const Finding&) const = default;
};

// `file:line patternId` per line; blank lines and `#` comments are skipped.
[[nodiscard]] std::vector<Finding> parse_ground_truth(std::string_view text);
[[nodiscard]] std::vector<Finding> findings_from_report(std::string_view json_text);

struct Metrics {
    std::size_t reports = 0;
    std::size_t correct = 0;
    std::size_t truths = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fscore;
};

[[nodiscard]] std::optional<double> precision(std::size_t correct, std::size_t reports);
[[nodiscard]] std::optional<double> recall(std::size_t found, std::size_t truths);
[[nodiscard]] std::optional<double> fscore(std::optional<double> p, std::optional<double> r);
[[nodiscard]] Metrics compute_metrics(std::size_t reports, std::size_t correct, std::size_t truths);
[[nodiscard]] Metrics evaluate(const std::vector<Finding>& reports, const std::vector<Finding>& truths);

// Percentage with one decimal, "-" when undefined.
[[nodiscard]] std::string format_percent(std::optional<double> ratio);
[[nodiscard]] std::string render_metrics(const Metrics& metrics);

}  // namespace misuseforge

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "misuseforge/frontend.hpp"

namespace misuseforge {

enum class ApiForm { Invocation, Override, DeletedCall };
enum class EdlKind { ConstantPlaceholder, OptionSet, ValueRange };
enum class RangeDimension { ArgValue, ArrayLength };
enum class FixMode { ExpressionReplacement, SnippetReplacement, None };

[[nodiscard]] const char* api_form_name(ApiForm form) noexcept;
[[nodiscard]] const char* edl_kind_name(EdlKind kind) noexcept;
[[nodiscard]] const char* dimension_name(RangeDimension dim) noexcept;
[[nodiscard]] const char* fix_mode_name(FixMode mode) noexcept;

struct CriticalApi {
    std::string binding;
    ApiForm form = ApiForm::Invocation;
    int arg_index = -1;  // -1: not tied to one argument

    bool operator==(const CriticalApi&) const = default;
};

struct EdlDirective {
    EdlKind kind = EdlKind::ConstantPlaceholder;
    std::string literal_type;  // constantPlaceholder: "string" or "int"
    std::vector<std::string> insecure;
    std::vector<std::string> secure;
    long long min = 0;
    RangeDimension dimension = RangeDimension::ArgValue;
    int arg_index = -1;

    bool operator==(const EdlDirective&) const = default;
};

// Source descriptors: "literal:<text>", "edl:constant", "edl:option", "edl:range", "stmt:<k>".
struct DataflowEdge {
    std::string source;
    int arg_index = 0;

    bool operator==(const DataflowEdge&) const = default;
};

struct Pattern {
    std::string id;
    CriticalApi critical;
    std::vector<std::string> anchors;
    std::string template_text;
    std::vector<DataflowEdge> dataflow;
    int template_critical = 0;  // statement index of the critical call inside the template
    std::string fix_text;
    FixMode fix_mode = FixMode::SnippetReplacement;
    std::string fix_old;
    std::string fix_new;
    NameMap var_map;
    std::vector<EdlDirective> edl;

    bool operator==(const Pattern&) const = default;
};

[[nodiscard]] std::uint64_t fnv1a64(std::string_view data);
// Stable id over (binding, form, template text, fix text).
[[nodiscard]] std::string compute_pattern_id(const Pattern& pattern);

[[nodiscard]] std::string patterns_to_json(const std::vector<Pattern>& patterns);
[[nodiscard]] std::vector<Pattern> patterns_from_json(std::string_view text);
void save_patterns(const std::vector<Pattern>& patterns, const std::filesystem::path& path);
[[nodiscard]] std::vector<Pattern> load_patterns(const std::filesystem::path& path);

[[nodiscard]] std::vector<Pattern> merge_patterns(const std::vector<Pattern>& patterns);

}  // namespace misuseforge

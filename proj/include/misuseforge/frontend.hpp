#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "misuseforge/ast.hpp"

namespace misuseforge {

// Ordered substitution map (concrete -> abstract), in first-occurrence order.
using NameMap = std::vector<std::pair<std::string, std::string>>;

[[nodiscard]] const std::string* lookup(const NameMap& map, const std::string& key);

[[nodiscard]] SourceUnit parse_unit(std::string_view source, std::string file_id);
[[nodiscard]] Snippet parse_snippet(std::string_view source);
[[nodiscard]] NodePtr parse_expression(std::string_view source);
[[nodiscard]] NodePtr parse_statement(std::string_view source);

// Unescaped value of a string literal token text (quotes included in the input).
[[nodiscard]] std::string string_literal_value(const std::string& token_text);

// Canonical single-line rendering.
[[nodiscard]] std::string pretty_print(const Node& node);
// Multi-line rendering with leading comments, used for fix text.
[[nodiscard]] std::string format_statements(const std::vector<NodePtr>& stmts, int indent = 0,
                                            bool with_comments = true);
[[nodiscard]] std::string format_method(const MethodDecl& method, int indent = 0, bool with_comments = true);

struct NormalizedForm {
    std::string text;
    NameMap var_map;
    NameMap const_map;
};

[[nodiscard]] NormalizedForm normalize_matching(const Node& stmt);

struct TemplateForm {
    std::string text;
    NameMap var_map;
    std::vector<NodePtr> statements;
};

[[nodiscard]] TemplateForm normalize_template(const std::vector<NodePtr>& stmts, const NameMap& seed);

// Rewrites variable occurrences (declared names, references, `this.x`) using `renames`;
// names missing from the map are left unchanged.
[[nodiscard]] NodePtr rename_variables(const NodePtr& node, const NameMap& renames);

// Variable names in first-occurrence order, as template abstraction sees them.
void collect_variables(const NodePtr& node, std::vector<std::string>& out);

}  // namespace misuseforge

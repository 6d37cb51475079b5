#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "misuseforge/catalog.hpp"
#include "misuseforge/diffing.hpp"
#include "misuseforge/pattern.hpp"

namespace misuseforge {

// The critical API plus where it sits in I (statement index into MethodFlow::stmts(), and the call node).
struct CriticalSite {
    CriticalApi api;
    int stmt = -1;
    NodePtr call;
};

[[nodiscard]] CriticalSite find_critical_api(const EditScript& refined, const Snippet& insecure,
                                             const Snippet& secure, const Catalog& catalog);
// Top-level statement indices of I forming the edit-relevant context, ascending.
[[nodiscard]] std::vector<int> extract_context(const Snippet& insecure, const CriticalSite& critical,
                                               const Catalog& catalog);
[[nodiscard]] std::vector<EdlDirective> detect_edl(const Snippet& insecure, const Snippet& secure,
                                                   const EditScript& refined, const CriticalSite& critical,
                                                   const Catalog& catalog);

struct FixResult {
    std::string text;
    FixMode mode = FixMode::SnippetReplacement;
    std::string old_expr;
    std::string new_expr;
    NameMap var_map;
};

[[nodiscard]] FixResult build_fix(const Snippet& secure, const EditScript& refined, const std::vector<int>& context,
                                  const CriticalSite& critical, const NameMap& seed);

[[nodiscard]] Pattern infer_pattern_from_text(std::string_view insecure, std::string_view secure,
                                              const Catalog& catalog);
[[nodiscard]] Pattern infer_pattern(const std::filesystem::path& insecure, const std::filesystem::path& secure,
                                    const Catalog& catalog);

}  // namespace misuseforge

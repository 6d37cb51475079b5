#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "misuseforge/ast.hpp"
#include "misuseforge/frontend.hpp"

namespace misuseforge {

inline constexpr double kSimilarityThreshold = 0.8;

[[nodiscard]] std::size_t levenshtein(std::string_view a, std::string_view b);

// Exact form of 1 - distance / maxLength; `degenerate` marks two empty texts.
struct SimilarityScore {
    std::size_t distance = 0;
    std::size_t max_length = 0;
    bool degenerate = false;

    [[nodiscard]] double value() const;
    [[nodiscard]] bool meets_threshold() const;
};

[[nodiscard]] SimilarityScore similarity_score(std::string_view a, std::string_view b);
[[nodiscard]] double similarity(const NormalizedForm& n_i, const NormalizedForm& n_s);
// True when a has strictly higher similarity than b.
[[nodiscard]] bool more_similar(const SimilarityScore& a, const SimilarityScore& b);

enum class EditKind { Insert, Delete, Update };
enum class Granularity { Statement, Expression };

[[nodiscard]] const char* edit_kind_name(EditKind kind) noexcept;

struct EditOp {
    EditKind kind = EditKind::Update;
    Granularity granularity = Granularity::Statement;
    NodePtr old_node;  // delete, update
    NodePtr new_node;  // insert, update
    int i_index = -1;  // top-level I statement the op belongs to
    int s_index = -1;  // top-level S statement the op belongs to
    int position = -1; // insert: child position k in the S body
};

struct StmtMatch {
    int i_index = 0;
    int s_index = 0;
    double similarity = 1.0;
};

struct EditScript {
    std::vector<EditOp> ops;
    std::vector<StmtMatch> matches;
    NameMap seed_var_map;
};

[[nodiscard]] EditScript diff_statements(const MethodDecl& insecure, const MethodDecl& secure);
[[nodiscard]] std::vector<EditOp> refine_update(const EditOp& op);
// Script with every statement-level update replaced by its refinement.
[[nodiscard]] EditScript refine_script(const EditScript& script);
// Applies statement-level ops to I's body; the result is canonically equal to S's body.
[[nodiscard]] std::vector<NodePtr> apply_statement_script(const std::vector<NodePtr>& insecure,
                                                          const EditScript& script);

}  // namespace misuseforge

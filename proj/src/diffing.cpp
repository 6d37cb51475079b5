#include "misuseforge/diffing.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace misuseforge {

std::size_t levenshtein(std::string_view a, std::string_view b)
{
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        row[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

double SimilarityScore::value() const
{
    if (degenerate) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(distance) / static_cast<double>(max_length);
}

bool SimilarityScore::meets_threshold() const
{
    // sim >= 0.8  <=>  distance / maxLength <= 1/5
    return degenerate || 5 * distance <= max_length;
}

SimilarityScore similarity_score(std::string_view a, std::string_view b)
{
    SimilarityScore score;
    score.max_length = std::max(a.size(), b.size());
    if (score.max_length == 0) {
        score.degenerate = true;
        return score;
    }
    score.distance = levenshtein(a, b);
    return score;
}

double similarity(const NormalizedForm& n_i, const NormalizedForm& n_s)
{
    return similarity_score(n_i.text, n_s.text).value();
}

bool more_similar(const SimilarityScore& a, const SimilarityScore& b)
{
    // compare distance ratios; degenerate pairs behave as 0 / 1
    const std::size_t da = a.degenerate ? 0 : a.distance;
    const std::size_t ma = a.degenerate ? 1 : a.max_length;
    const std::size_t db = b.degenerate ? 0 : b.distance;
    const std::size_t mb = b.degenerate ? 1 : b.max_length;
    return da * mb < db * ma;
}

const char* edit_kind_name(EditKind kind) noexcept
{
    switch (kind) {
        case EditKind::Insert: return "insert";
        case EditKind::Delete: return "delete";
        case EditKind::Update: return "update";
    }
    return "?";
}

namespace {

bool crosses(const std::vector<StmtMatch>& accepted, int i, int s)
{
    return std::any_of(accepted.begin(), accepted.end(), [&](const StmtMatch& m) {
        return (m.i_index < i) != (m.s_index < s);
    });
}

struct Candidate {
    int i;
    int s;
    SimilarityScore score;
};

}  // namespace

EditScript diff_statements(const MethodDecl& insecure, const MethodDecl& secure)
{
    const auto& I = insecure.body;
    const auto& S = secure.body;
    std::vector<bool> i_done(I.size()), s_done(S.size());
    std::vector<StmtMatch> matches;

    // pass 1: identical canonical text
    std::vector<std::string> i_text, s_text;
    for (const auto& stmt : I) {
        i_text.push_back(pretty_print(*stmt));
    }
    for (const auto& stmt : S) {
        s_text.push_back(pretty_print(*stmt));
    }
    int floor = -1;
    for (std::size_t i = 0; i < I.size(); ++i) {
        for (std::size_t s = static_cast<std::size_t>(floor + 1); s < S.size(); ++s) {
            if (!s_done[s] && i_text[i] == s_text[s]) {
                i_done[i] = s_done[s] = true;
                matches.push_back({static_cast<int>(i), static_cast<int>(s), 1.0});
                floor = static_cast<int>(s);
                break;
            }
        }
    }

    // pass 2: normalized similarity, greedy best-first
    std::vector<NormalizedForm> i_norm, s_norm;
    for (const auto& stmt : I) {
        i_norm.push_back(normalize_matching(*stmt));
    }
    for (const auto& stmt : S) {
        s_norm.push_back(normalize_matching(*stmt));
    }
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < I.size(); ++i) {
        if (i_done[i]) {
            continue;
        }
        for (std::size_t s = 0; s < S.size(); ++s) {
            if (s_done[s]) {
                continue;
            }
            auto score = similarity_score(i_norm[i].text, s_norm[s].text);
            if (score.meets_threshold()) {
                candidates.push_back({static_cast<int>(i), static_cast<int>(s), score});
            }
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (more_similar(a.score, b.score)) {
            return true;
        }
        if (more_similar(b.score, a.score)) {
            return false;
        }
        const int da = std::abs(a.i - a.s);
        const int db = std::abs(b.i - b.s);
        if (da != db) {
            return da < db;
        }
        if (a.i != b.i) {
            return a.i < b.i;
        }
        return a.s < b.s;
    });
    for (const auto& c : candidates) {
        if (i_done[c.i] || s_done[c.s] || crosses(matches, c.i, c.s)) {
            continue;
        }
        i_done[c.i] = s_done[c.s] = true;
        matches.push_back({c.i, c.s, c.score.value()});
    }
    std::sort(matches.begin(), matches.end(),
              [](const StmtMatch& a, const StmtMatch& b) { return a.i_index < b.i_index; });

    EditScript script;
    script.matches = matches;
    std::map<int, int> match_of_i;
    for (const auto& m : matches) {
        match_of_i[m.i_index] = m.s_index;
    }
    for (std::size_t i = 0; i < I.size(); ++i) {
        auto it = match_of_i.find(static_cast<int>(i));
        if (it == match_of_i.end()) {
            EditOp op;
            op.kind = EditKind::Delete;
            op.old_node = I[i];
            op.i_index = static_cast<int>(i);
            script.ops.push_back(op);
            continue;
        }
        const auto s = static_cast<std::size_t>(it->second);
        if (i_text[i] != s_text[s]) {
            EditOp op;
            op.kind = EditKind::Update;
            op.old_node = I[i];
            op.new_node = S[s];
            op.i_index = static_cast<int>(i);
            op.s_index = it->second;
            script.ops.push_back(op);
        }
        for (const auto& [from, to] : i_norm[i].var_map) {
            if (!lookup(script.seed_var_map, from)) {
                script.seed_var_map.emplace_back(from, "$v_" + std::to_string(script.seed_var_map.size()));
            }
        }
    }
    for (std::size_t s = 0; s < S.size(); ++s) {
        if (s_done[s]) {
            continue;
        }
        EditOp op;
        op.kind = EditKind::Insert;
        op.new_node = S[s];
        op.s_index = static_cast<int>(s);
        op.position = static_cast<int>(s);
        script.ops.push_back(op);
    }
    return script;
}

namespace {

bool nodes_differ_here(const Node& a, const Node& b)
{
    return a.kind != b.kind || a.text != b.text || a.qualified != b.qualified ||
           a.children.size() != b.children.size();
}

void refine_into(const NodePtr& a, const NodePtr& b, const EditOp& parent, std::vector<EditOp>& out)
{
    if (nodes_differ_here(*a, *b)) {
        EditOp op = parent;
        op.granularity = Granularity::Expression;
        op.old_node = a;
        op.new_node = b;
        out.push_back(op);
        return;
    }
    for (std::size_t k = 0; k < a->children.size(); ++k) {
        refine_into(a->children[k], b->children[k], parent, out);
    }
}

}  // namespace

std::vector<EditOp> refine_update(const EditOp& op)
{
    if (nodes_differ_here(*op.old_node, *op.new_node)) {
        return {op};
    }
    std::vector<EditOp> out;
    for (std::size_t k = 0; k < op.old_node->children.size(); ++k) {
        refine_into(op.old_node->children[k], op.new_node->children[k], op, out);
    }
    return out;
}

EditScript refine_script(const EditScript& script)
{
    EditScript out = script;
    out.ops.clear();
    for (const auto& op : script.ops) {
        if (op.kind == EditKind::Update && op.granularity == Granularity::Statement) {
            for (auto& refined : refine_update(op)) {
                out.ops.push_back(std::move(refined));
            }
        } else {
            out.ops.push_back(op);
        }
    }
    return out;
}

std::vector<NodePtr> apply_statement_script(const std::vector<NodePtr>& insecure, const EditScript& script)
{
    std::vector<NodePtr> kept;
    std::map<int, NodePtr> replaced;
    std::vector<bool> deleted(insecure.size());
    for (const auto& op : script.ops) {
        if (op.kind == EditKind::Delete) {
            deleted[static_cast<std::size_t>(op.i_index)] = true;
        } else if (op.kind == EditKind::Update) {
            replaced[op.i_index] = op.new_node;
        }
    }
    for (std::size_t i = 0; i < insecure.size(); ++i) {
        if (deleted[i]) {
            continue;
        }
        auto it = replaced.find(static_cast<int>(i));
        kept.push_back(it == replaced.end() ? insecure[i] : it->second);
    }
    std::vector<const EditOp*> inserts;
    for (const auto& op : script.ops) {
        if (op.kind == EditKind::Insert) {
            inserts.push_back(&op);
        }
    }
    std::sort(inserts.begin(), inserts.end(),
              [](const EditOp* a, const EditOp* b) { return a->position < b->position; });
    for (const auto* op : inserts) {
        const auto at = std::min(static_cast<std::size_t>(op->position), kept.size());
        kept.insert(kept.begin() + static_cast<std::ptrdiff_t>(at), op->new_node);
    }
    return kept;
}

}  // namespace misuseforge

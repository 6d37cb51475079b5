#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "misuseforge/catalog.hpp"
#include "misuseforge/dataflow.hpp"
#include "misuseforge/frontend.hpp"

namespace misuseforge {

struct StmtRef {
    int method = -1;
    int stmt = -1;

    auto operator<=>(const StmtRef&) const = default;
};

struct MethodEntry {
    int id = -1;
    std::string file;  // relative to the scanned root, forward slashes
    const ClassDecl* cls = nullptr;
    const MethodDecl* method = nullptr;
    bool field_init = false;  // synthesized holder for field initializers
    std::unique_ptr<MethodFlow> flow;
};

struct ModelConfig {
    std::vector<std::string> extensions{".mj", ".java"};
    int jobs = 0;  // 0: hardware concurrency
};

class ProgramModel {
public:
    ProgramModel(ProgramModel&&) noexcept;
    ProgramModel& operator=(ProgramModel&&) noexcept;
    ~ProgramModel();

    [[nodiscard]] static ProgramModel load(const std::filesystem::path& root, const Catalog& catalog,
                                           const ModelConfig& config = {});
    [[nodiscard]] static ProgramModel from_units(std::vector<SourceUnit> units, const Catalog& catalog);

    [[nodiscard]] const Catalog& catalog() const;
    [[nodiscard]] const std::vector<std::shared_ptr<const SourceUnit>>& units() const;
    [[nodiscard]] const std::vector<MethodEntry>& methods() const;
    [[nodiscard]] const MethodEntry& method(int id) const;

    [[nodiscard]] const ClassDecl* find_class(const std::string& name) const;
    [[nodiscard]] int find_method(const std::string& cls, const std::string& name, std::size_t arity) const;
    [[nodiscard]] int find_method(const MethodDecl* decl) const;
    // Definitions of a field visible to other methods: the initializer plus each method's exit definitions.
    [[nodiscard]] std::vector<StmtRef> field_writers(const std::string& cls, const std::string& field) const;
    // "file:line" for a statement.
    [[nodiscard]] std::string location(StmtRef ref) const;
    [[nodiscard]] int line_of(StmtRef ref) const;

private:
    struct Impl;
    explicit ProgramModel(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> m_impl;
};

struct CallSite {
    StmtRef at;
    NodePtr call;
    int callee = -1;  // method id, -1 when external
    const ApiBinding* api = nullptr;
    std::string receiver_type;
};

class CallGraph {
public:
    [[nodiscard]] static CallGraph build(const ProgramModel& model);

    [[nodiscard]] const std::vector<CallSite>& sites() const { return m_sites; }
    [[nodiscard]] std::vector<const CallSite*> callers(int method) const;
    [[nodiscard]] std::vector<const CallSite*> calls_from(int method) const;
    [[nodiscard]] const CallSite* site_of(const Node* call) const;

private:
    std::vector<CallSite> m_sites;
    std::map<const Node*, std::size_t> m_by_call;
};

inline constexpr int kDefaultMaxDepth = 8;

struct Slice {
    StmtRef seed;
    std::set<StmtRef> statements;
    std::set<std::pair<StmtRef, StmtRef>> bindings;  // cross-method def-use edges (use, def)
    std::set<int> entry_params;                       // methods whose parameters had no caller
    bool depth_exceeded = false;
};

// Slice of `focus` (expressions evaluated at `seed`); an empty focus follows everything the statement reads.
[[nodiscard]] Slice backward_slice(const ProgramModel& model, const CallGraph& graph, StmtRef seed,
                                   const std::vector<NodePtr>& focus = {}, int max_depth = kDefaultMaxDepth);

enum class OriginKind { StringLiteral, IntLiteral, ArrayOfLength, RandomSource, ParameterOfEntry, Unknown };

struct Origin {
    OriginKind kind = OriginKind::Unknown;
    std::string value;            // literal value (strings unquoted), random source binding
    long long length = 0;         // arrayOfLength
    bool random_elements = false; // arrayOfLength filled by a random source
    std::vector<std::string> trace;

    [[nodiscard]] bool is_literal() const
    {
        return kind == OriginKind::StringLiteral || kind == OriginKind::IntLiteral;
    }
    [[nodiscard]] bool is_constant() const
    {
        return is_literal() || (kind == OriginKind::ArrayOfLength && !random_elements);
    }
    [[nodiscard]] std::string describe() const;
    [[nodiscard]] bool same_fact(const Origin& other) const;
};

using OriginSet = std::vector<Origin>;

[[nodiscard]] const char* origin_kind_name(OriginKind kind) noexcept;
[[nodiscard]] OriginSet const_origin(const ProgramModel& model, const CallGraph& graph, StmtRef at,
                                     const NodePtr& expr, int max_depth = kDefaultMaxDepth);

}  // namespace misuseforge

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "misuseforge/ast.hpp"
#include "misuseforge/catalog.hpp"

namespace misuseforge {

// Type facts a single method cannot know on its own.
struct TypeEnv {
    std::function<std::string(const std::string& cls, const std::string& field)> field_type;
    std::function<std::string(const std::string& cls, const std::string& method, std::size_t arity)> return_type;
};

enum class NameClass { Local, Param, Field, Class, Free };

struct FlatStmt {
    NodePtr node;
    int top = 0;
    std::vector<int> guards;  // enclosing if statements, outermost first
};

// Definition ids: >= 0 is a statement index, kFieldEntry the value a field has on entry,
// param_def(p) the value of parameter p.
inline constexpr int kFieldEntry = -1;
[[nodiscard]] constexpr int param_def(int p) { return -(2 + p); }
[[nodiscard]] constexpr bool is_param_def(int d) { return d <= -2; }
[[nodiscard]] constexpr int param_of(int d) { return -d - 2; }

struct CallInfo {
    std::string receiver_type;  // simple class name, "" when unknown
    std::string method;
    std::size_t arity = 0;
    const ApiBinding* api = nullptr;
};

// Reaching definitions over one method body (structured code, no loops).
class MethodFlow {
public:
    MethodFlow(const MethodDecl& method, std::string owner, std::vector<FieldDecl> fields,
               const Catalog* catalog, TypeEnv env = {});

    [[nodiscard]] const MethodDecl& method() const { return *m_method; }
    [[nodiscard]] const std::string& owner() const { return m_owner; }
    [[nodiscard]] const std::vector<FlatStmt>& stmts() const { return m_stmts; }
    [[nodiscard]] int index_of(const Node* stmt) const;

    [[nodiscard]] NameClass classify(const std::string& name) const;
    [[nodiscard]] std::optional<int> param_index(const std::string& name) const;
    // Variable key of a NameRef or `this.f` access: locals and params by name, fields as "this.f".
    [[nodiscard]] std::string key_of(const Node& expr) const;
    [[nodiscard]] std::vector<std::string> read_keys(const Node& expr) const;
    [[nodiscard]] std::vector<NodePtr> read_exprs(int stmt) const;

    [[nodiscard]] std::vector<std::string> defined_keys(int stmt) const;
    // Value assigned by a definition statement; for a random fill, the fill call.
    [[nodiscard]] NodePtr def_value(int stmt) const;
    [[nodiscard]] bool is_random_fill(int stmt) const;

    [[nodiscard]] std::vector<int> reaching(int stmt, const std::string& key) const;
    [[nodiscard]] std::vector<int> exit_defs(const std::string& key) const;
    [[nodiscard]] std::vector<int> users(int def_stmt) const;

    [[nodiscard]] std::string static_type(const Node& expr) const;
    [[nodiscard]] CallInfo resolve_call(const Node& call) const;
    [[nodiscard]] const FieldDecl* field(const std::string& name) const;

private:
    using State = std::map<std::string, std::set<int>>;

    void flatten(const std::vector<NodePtr>& body, int top, std::vector<int>& guards);
    std::optional<State> walk(const std::vector<NodePtr>& body, std::optional<State> state);
    void define(State& state, int stmt) const;
    std::set<int> lookup_defs(const State& state, const std::string& key) const;
    std::string fill_target(const Node& stmt) const;

    const MethodDecl* m_method;
    std::string m_owner;
    std::vector<FieldDecl> m_fields;
    const Catalog* m_catalog;
    TypeEnv m_env;
    std::vector<FlatStmt> m_stmts;
    std::map<const Node*, int> m_index;
    std::map<std::string, std::string> m_local_types;
    std::vector<State> m_before;
    std::vector<std::string> m_fill_targets;
    State m_exit;
};

}  // namespace misuseforge

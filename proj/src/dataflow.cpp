#include "misuseforge/dataflow.hpp"

#include <algorithm>

namespace misuseforge {

namespace {

bool is_field_key(const std::string& key)
{
    return key.rfind("this.", 0) == 0;
}

bool is_this_access(const Node& node)
{
    return node.kind == NodeKind::FieldAccess && node.children[0]->kind == NodeKind::NameRef &&
           node.children[0]->text == "this";
}

void join_into(std::map<std::string, std::set<int>>& into, const std::map<std::string, std::set<int>>& from)
{
    for (const auto& [key, defs] : from) {
        into[key].insert(defs.begin(), defs.end());
    }
}

}  // namespace

MethodFlow::MethodFlow(const MethodDecl& method, std::string owner, std::vector<FieldDecl> fields,
                       const Catalog* catalog, TypeEnv env)
    : m_method(&method), m_owner(std::move(owner)), m_fields(std::move(fields)), m_catalog(catalog),
      m_env(std::move(env))
{
    std::vector<int> guards;
    for (std::size_t i = 0; i < method.body.size(); ++i) {
        flatten({method.body[i]}, static_cast<int>(i), guards);
    }
    for (const auto& s : m_stmts) {
        if (s.node->kind == NodeKind::LocalDecl) {
            m_local_types.emplace(s.node->children[1]->text, s.node->children[0]->text);
        }
    }
    m_before.resize(m_stmts.size());
    m_fill_targets.resize(m_stmts.size());
    for (std::size_t i = 0; i < m_stmts.size(); ++i) {
        m_fill_targets[i] = fill_target(*m_stmts[i].node);
    }
    State entry;
    for (std::size_t p = 0; p < method.params.size(); ++p) {
        entry[method.params[p].name] = {param_def(static_cast<int>(p))};
    }
    m_exit.clear();
    auto end = walk(method.body, entry);
    if (end) {
        join_into(m_exit, *end);
    }
}

void MethodFlow::flatten(const std::vector<NodePtr>& body, int top, std::vector<int>& guards)
{
    for (const auto& stmt : body) {
        const int idx = static_cast<int>(m_stmts.size());
        m_stmts.push_back(FlatStmt{stmt, top, guards});
        m_index[stmt.get()] = idx;
        if (stmt->kind == NodeKind::If) {
            guards.push_back(idx);
            for (std::size_t b = 1; b < stmt->children.size(); ++b) {
                flatten(stmt->children[b]->children, top, guards);
            }
            guards.pop_back();
        } else if (stmt->kind == NodeKind::Block) {
            flatten(stmt->children, top, guards);
        }
    }
}

std::optional<MethodFlow::State> MethodFlow::walk(const std::vector<NodePtr>& body, std::optional<State> state)
{
    for (const auto& stmt : body) {
        const int idx = m_index.at(stmt.get());
        if (state) {
            m_before[idx] = *state;
        }
        switch (stmt->kind) {
            case NodeKind::Return:
                if (state) {
                    join_into(m_exit, *state);
                }
                state.reset();
                break;
            case NodeKind::If: {
                auto then_state = walk(stmt->children[1]->children, state);
                auto else_state = stmt->children.size() > 2 ? walk(stmt->children[2]->children, state) : state;
                if (then_state && else_state) {
                    join_into(*then_state, *else_state);
                    state = then_state;
                } else {
                    state = then_state ? then_state : else_state;
                }
                break;
            }
            case NodeKind::Block:
                state = walk(stmt->children, state);
                break;
            default:
                if (state) {
                    define(*state, idx);
                }
        }
    }
    return state;
}

void MethodFlow::define(State& state, int stmt) const
{
    for (const auto& key : defined_keys(stmt)) {
        state[key] = {stmt};
    }
}

std::set<int> MethodFlow::lookup_defs(const State& state, const std::string& key) const
{
    if (auto it = state.find(key); it != state.end()) {
        return it->second;
    }
    if (is_field_key(key)) {
        return {kFieldEntry};
    }
    return {};
}

int MethodFlow::index_of(const Node* stmt) const
{
    auto it = m_index.find(stmt);
    return it == m_index.end() ? -1 : it->second;
}

std::optional<int> MethodFlow::param_index(const std::string& name) const
{
    for (std::size_t p = 0; p < m_method->params.size(); ++p) {
        if (m_method->params[p].name == name) {
            return static_cast<int>(p);
        }
    }
    return std::nullopt;
}

const FieldDecl* MethodFlow::field(const std::string& name) const
{
    for (const auto& f : m_fields) {
        if (f.name == name) {
            return &f;
        }
    }
    return nullptr;
}

NameClass MethodFlow::classify(const std::string& name) const
{
    if (m_local_types.count(name)) {
        return NameClass::Local;
    }
    if (param_index(name)) {
        return NameClass::Param;
    }
    if (field(name)) {
        return NameClass::Field;
    }
    if (looks_like_class_name(name)) {
        return NameClass::Class;
    }
    return NameClass::Free;
}

std::string MethodFlow::key_of(const Node& expr) const
{
    if (expr.kind == NodeKind::NameRef) {
        if (expr.text == "this") {
            return {};
        }
        switch (classify(expr.text)) {
            case NameClass::Local:
            case NameClass::Param:
            case NameClass::Free:
                return expr.text;
            case NameClass::Field:
                return "this." + expr.text;
            case NameClass::Class:
                return {};
        }
    }
    if (is_this_access(expr)) {
        return "this." + expr.children[1]->text;
    }
    return {};
}

std::vector<std::string> MethodFlow::read_keys(const Node& expr) const
{
    std::vector<std::string> out;
    auto add = [&](const std::string& key) {
        if (!key.empty() && std::find(out.begin(), out.end(), key) == out.end()) {
            out.push_back(key);
        }
    };
    std::function<void(const Node&)> visit = [&](const Node& n) {
        switch (n.kind) {
            case NodeKind::NameRef:
                add(key_of(n));
                return;
            case NodeKind::FieldAccess:
                if (is_this_access(n)) {
                    add(key_of(n));
                } else {
                    visit(*n.children[0]);
                }
                return;
            case NodeKind::Type:
            case NodeKind::Ident:
                return;
            default:
                for (const auto& c : n.children) {
                    visit(*c);
                }
        }
    };
    visit(expr);
    return out;
}

std::vector<NodePtr> MethodFlow::read_exprs(int stmt) const
{
    const Node& n = *m_stmts.at(stmt).node;
    switch (n.kind) {
        case NodeKind::LocalDecl:
            if (n.children.size() > 2) {
                return {n.children[2]};
            }
            return {};
        case NodeKind::Assign:
            if (n.children[0]->kind == NodeKind::FieldAccess && !is_this_access(*n.children[0])) {
                return {n.children[1], n.children[0]->children[0]};
            }
            return {n.children[1]};
        case NodeKind::ExprStmt:
        case NodeKind::If:
            return {n.children[0]};
        case NodeKind::Return:
            if (!n.children.empty()) {
                return {n.children[0]};
            }
            return {};
        default:
            return {};
    }
}

std::string MethodFlow::fill_target(const Node& stmt) const
{
    if (stmt.kind != NodeKind::ExprStmt || stmt.children[0]->kind != NodeKind::MethodCall) {
        return {};
    }
    const Node& call = *stmt.children[0];
    auto info = resolve_call(call);
    if (info.api == nullptr || !info.api->random) {
        return {};
    }
    auto args = call_args(call);
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& type = info.api->params[i];
        if (type.size() > 2 && type.compare(type.size() - 2, 2, "[]") == 0) {
            auto key = key_of(*args[i]);
            if (!key.empty()) {
                return key;
            }
        }
    }
    return {};
}

std::vector<std::string> MethodFlow::defined_keys(int stmt) const
{
    const Node& n = *m_stmts.at(stmt).node;
    if (n.kind == NodeKind::LocalDecl) {
        return {n.children[1]->text};
    }
    if (n.kind == NodeKind::Assign) {
        auto key = key_of(*n.children[0]);
        if (!key.empty()) {
            return {key};
        }
        return {};
    }
    if (!m_fill_targets[stmt].empty()) {
        return {m_fill_targets[stmt]};
    }
    return {};
}

NodePtr MethodFlow::def_value(int stmt) const
{
    const Node& n = *m_stmts.at(stmt).node;
    if (n.kind == NodeKind::LocalDecl || n.kind == NodeKind::Assign) {
        return stmt_value(n);
    }
    if (is_random_fill(stmt)) {
        return n.children[0];
    }
    return nullptr;
}

bool MethodFlow::is_random_fill(int stmt) const
{
    return !m_fill_targets.at(stmt).empty();
}

std::vector<int> MethodFlow::reaching(int stmt, const std::string& key) const
{
    auto defs = lookup_defs(m_before.at(stmt), key);
    if (auto p = param_index(key); p && classify(key) == NameClass::Param && defs.empty()) {
        defs.insert(param_def(*p));
    }
    return {defs.begin(), defs.end()};
}

std::vector<int> MethodFlow::exit_defs(const std::string& key) const
{
    auto defs = lookup_defs(m_exit, key);
    return {defs.begin(), defs.end()};
}

std::vector<int> MethodFlow::users(int def_stmt) const
{
    std::vector<int> out;
    const auto keys = defined_keys(def_stmt);
    for (int j = 0; j < static_cast<int>(m_stmts.size()); ++j) {
        bool uses = false;
        for (const auto& expr : read_exprs(j)) {
            for (const auto& key : read_keys(*expr)) {
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                    continue;
                }
                auto defs = reaching(j, key);
                uses = uses || std::find(defs.begin(), defs.end(), def_stmt) != defs.end();
            }
        }
        if (uses) {
            out.push_back(j);
        }
    }
    return out;
}

std::string MethodFlow::static_type(const Node& expr) const
{
    switch (expr.kind) {
        case NodeKind::NameRef: {
            if (expr.text == "this") {
                return m_owner;
            }
            switch (classify(expr.text)) {
                case NameClass::Local:
                    return m_local_types.at(expr.text);
                case NameClass::Param:
                    return m_method->params[static_cast<std::size_t>(*param_index(expr.text))].type;
                case NameClass::Field:
                    return field(expr.text)->type;
                case NameClass::Class:
                    return expr.text;
                case NameClass::Free:
                    return {};
            }
            return {};
        }
        case NodeKind::FieldAccess:
            if (is_this_access(expr)) {
                const auto* f = field(expr.children[1]->text);
                return f ? f->type : std::string();
            }
            if (m_env.field_type) {
                auto owner = static_type(*expr.children[0]);
                if (!owner.empty()) {
                    return m_env.field_type(owner, expr.children[1]->text);
                }
            }
            return {};
        case NodeKind::ObjectCreation:
        case NodeKind::Cast:
            return expr.children[0]->text;
        case NodeKind::ArrayCreation:
            return expr.children[0]->text + "[]";
        case NodeKind::StringLit:
            return "String";
        case NodeKind::IntLit:
            return "int";
        case NodeKind::BoolLit:
        case NodeKind::Compare:
            return "boolean";
        case NodeKind::MethodCall: {
            if (!m_env.return_type) {
                return {};
            }
            auto info = resolve_call(expr);
            return info.receiver_type.empty() ? std::string()
                                              : m_env.return_type(info.receiver_type, info.method, info.arity);
        }
        default:
            return {};
    }
}

CallInfo MethodFlow::resolve_call(const Node& call) const
{
    CallInfo info;
    info.arity = call_args(call).size();
    if (call.kind == NodeKind::ObjectCreation) {
        info.receiver_type = call.children[0]->text;
        info.method = info.receiver_type;
    } else {
        info.method = call_name(call);
        info.receiver_type = call.qualified ? static_type(*call_receiver(call)) : m_owner;
    }
    if (m_catalog != nullptr && !info.receiver_type.empty()) {
        info.api = m_catalog->find(info.receiver_type, info.method, info.arity);
    }
    return info;
}

}  // namespace misuseforge

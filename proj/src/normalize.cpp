#include <algorithm>
#include <string>

#include "misuseforge/frontend.hpp"

namespace misuseforge {

namespace {

class Abstractor {
public:
    Abstractor(bool abstract_literals, const NameMap& seed, bool rename_only = false)
        : m_abstract_literals(abstract_literals), m_rename_only(rename_only), m_vars(seed)
    {
        for (const auto& [from, to] : seed) {
            if (is_abstract_var(to)) {
                m_next_var = std::max(m_next_var, std::stoi(to.substr(3)) + 1);
            }
        }
    }

    NodePtr rewrite(const NodePtr& node, bool receiver = false)
    {
        const Node& n = *node;
        switch (n.kind) {
            case NodeKind::NameRef:
                if (n.text == "this") {
                    return node;
                }
                if (is_abstract_const(n.text) && !m_rename_only) {
                    return m_abstract_literals ? renamed(n, const_name(n.text)) : node;
                }
                if (receiver && looks_like_class_name(n.text)) {
                    return node;
                }
                return renamed(n, var_name(n.text));
            case NodeKind::StringLit:
            case NodeKind::IntLit:
                if (m_abstract_literals) {
                    return as_name(n, const_name(n.text));
                }
                return node;
            case NodeKind::FieldAccess:
                if (m_abstract_literals && is_constant_placeholder(n)) {
                    return as_name(n, const_name(pretty_print(n)));
                }
                if (n.children[0]->kind == NodeKind::NameRef && n.children[0]->text == "this") {
                    auto name = var_name(n.children[1]->text);
                    if (m_rename_only && name == n.children[1]->text) {
                        return node;
                    }
                    return as_name(n, name);
                }
                return with_children(n, {rewrite(n.children[0], true), n.children[1]});
            case NodeKind::MethodCall: {
                if (m_abstract_literals && is_constant_placeholder(n)) {
                    return as_name(n, const_name(pretty_print(n)));
                }
                std::vector<NodePtr> children;
                std::size_t i = 0;
                if (n.qualified) {
                    children.push_back(rewrite(n.children[0], true));
                    i = 1;
                }
                children.push_back(n.children[i]);
                for (++i; i < n.children.size(); ++i) {
                    children.push_back(rewrite(n.children[i]));
                }
                return with_children(n, std::move(children));
            }
            case NodeKind::ObjectCreation:
                if (m_abstract_literals && is_option_set_creation(n)) {
                    return as_name(n, const_name(pretty_print(n)));
                }
                return rewrite_tail(n, 1);
            case NodeKind::ArrayCreation:
            case NodeKind::Cast:
                return rewrite_tail(n, 1);
            case NodeKind::LocalDecl: {
                std::vector<NodePtr> children{n.children[0], renamed(*n.children[1], var_name(n.children[1]->text))};
                if (n.children.size() > 2) {
                    children.push_back(rewrite(n.children[2]));
                }
                return with_children(n, std::move(children));
            }
            case NodeKind::Type:
            case NodeKind::Ident:
            case NodeKind::BoolLit:
            case NodeKind::NullLit:
                return node;
            default:
                return rewrite_tail(n, 0);
        }
    }

    std::string var_name(const std::string& concrete)
    {
        if (const auto* found = lookup(m_vars, concrete)) {
            return *found;
        }
        if (m_rename_only) {
            return concrete;
        }
        auto name = "$v_" + std::to_string(m_next_var++);
        m_vars.emplace_back(concrete, name);
        return name;
    }

    std::string const_name(const std::string& literal)
    {
        if (const auto* found = lookup(m_consts, literal)) {
            return *found;
        }
        auto name = "$c_" + std::to_string(m_consts.size());
        m_consts.emplace_back(literal, name);
        return name;
    }

    const NameMap& vars() const { return m_vars; }
    const NameMap& consts() const { return m_consts; }

private:
    NodePtr rewrite_tail(const Node& n, std::size_t first)
    {
        std::vector<NodePtr> children;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            children.push_back(i < first ? n.children[i] : rewrite(n.children[i]));
        }
        return with_children(n, std::move(children));
    }

    static NodePtr renamed(const Node& n, const std::string& name)
    {
        auto copy = std::make_shared<Node>(n);
        copy->text = name;
        return copy;
    }

    static NodePtr as_name(const Node& n, const std::string& name)
    {
        auto out = make_node(NodeKind::NameRef, name, {}, n.span);
        return out;
    }

    bool m_abstract_literals;
    bool m_rename_only;
    NameMap m_vars;
    NameMap m_consts;
    int m_next_var = 0;
};

}  // namespace

NormalizedForm normalize_matching(const Node& stmt)
{
    Abstractor abstractor(true, {});
    auto rewritten = abstractor.rewrite(std::make_shared<Node>(stmt));
    return NormalizedForm{pretty_print(*rewritten), abstractor.vars(), abstractor.consts()};
}

TemplateForm normalize_template(const std::vector<NodePtr>& stmts, const NameMap& seed)
{
    Abstractor abstractor(false, seed);
    TemplateForm out;
    for (const auto& stmt : stmts) {
        out.statements.push_back(abstractor.rewrite(stmt));
    }
    out.text = format_statements(out.statements, 0, false);
    out.var_map = abstractor.vars();
    return out;
}

NodePtr rename_variables(const NodePtr& node, const NameMap& renames)
{
    Abstractor abstractor(false, renames, true);
    return abstractor.rewrite(node);
}

void collect_variables(const NodePtr& node, std::vector<std::string>& out)
{
    NameMap seed;
    for (const auto& name : out) {
        seed.emplace_back(name, name);
    }
    Abstractor abstractor(false, seed);
    (void)abstractor.rewrite(node);
    for (std::size_t i = seed.size(); i < abstractor.vars().size(); ++i) {
        out.push_back(abstractor.vars()[i].first);
    }
}

}  // namespace misuseforge

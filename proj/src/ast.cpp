#include "misuseforge/ast.hpp"

#include <cctype>

namespace misuseforge {

const char* node_kind_name(NodeKind kind) noexcept
{
    switch (kind) {
        case NodeKind::LocalDecl: return "localDecl";
        case NodeKind::ExprStmt: return "exprStmt";
        case NodeKind::Assign: return "assign";
        case NodeKind::Return: return "return";
        case NodeKind::If: return "if";
        case NodeKind::Block: return "block";
        case NodeKind::StringLit: return "stringLit";
        case NodeKind::IntLit: return "intLit";
        case NodeKind::BoolLit: return "boolLit";
        case NodeKind::NullLit: return "nullLit";
        case NodeKind::NameRef: return "nameRef";
        case NodeKind::FieldAccess: return "fieldAccess";
        case NodeKind::MethodCall: return "methodCall";
        case NodeKind::ObjectCreation: return "objectCreation";
        case NodeKind::ArrayCreation: return "arrayCreation";
        case NodeKind::Cast: return "cast";
        case NodeKind::Compare: return "compare";
        case NodeKind::Type: return "type";
        case NodeKind::Ident: return "ident";
    }
    return "?";
}

bool is_statement_kind(NodeKind kind) noexcept
{
    switch (kind) {
        case NodeKind::LocalDecl:
        case NodeKind::ExprStmt:
        case NodeKind::Assign:
        case NodeKind::Return:
        case NodeKind::If:
        case NodeKind::Block:
            return true;
        default:
            return false;
    }
}

bool is_expression_kind(NodeKind kind) noexcept
{
    return !is_statement_kind(kind) && kind != NodeKind::Type && kind != NodeKind::Ident;
}

bool is_literal_kind(NodeKind kind) noexcept
{
    return kind == NodeKind::StringLit || kind == NodeKind::IntLit || kind == NodeKind::BoolLit ||
           kind == NodeKind::NullLit;
}

NodePtr make_node(NodeKind kind, std::string text, std::vector<NodePtr> children, Span span, bool qualified)
{
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->text = std::move(text);
    node->children = std::move(children);
    node->span = span;
    node->qualified = qualified;
    return node;
}

NodePtr with_children(const Node& node, std::vector<NodePtr> children)
{
    auto copy = std::make_shared<Node>(node);
    copy->children = std::move(children);
    return copy;
}

bool is_call(const Node& node) noexcept
{
    return node.kind == NodeKind::MethodCall || node.kind == NodeKind::ObjectCreation;
}

std::span<const NodePtr> call_args(const Node& call)
{
    std::size_t first = 1;
    if (call.kind == NodeKind::MethodCall && call.qualified) {
        first = 2;
    }
    if (call.children.size() <= first) {
        return {};
    }
    return std::span<const NodePtr>(call.children).subspan(first);
}

NodePtr call_receiver(const Node& call)
{
    if (call.kind == NodeKind::MethodCall && call.qualified) {
        return call.children[0];
    }
    return nullptr;
}

const std::string& call_name(const Node& call)
{
    if (call.kind == NodeKind::MethodCall) {
        return call.children[call.qualified ? 1 : 0]->text;
    }
    return call.children[0]->text;
}

NodePtr stmt_value(const Node& stmt)
{
    switch (stmt.kind) {
        case NodeKind::LocalDecl:
            return stmt.children.size() > 2 ? stmt.children[2] : nullptr;
        case NodeKind::Assign:
            return stmt.children[1];
        case NodeKind::ExprStmt:
            return stmt.children[0];
        case NodeKind::Return:
            return stmt.children.empty() ? nullptr : stmt.children[0];
        case NodeKind::If:
            return stmt.children[0];
        default:
            return nullptr;
    }
}

namespace {

bool abstract_name(const std::string& name, char tag) noexcept
{
    if (name.size() < 4 || name[0] != '$' || name[1] != tag || name[2] != '_') {
        return false;
    }
    for (std::size_t i = 3; i < name.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(name[i])) == 0) {
            return false;
        }
    }
    return true;
}

bool is_placeholder_field(const Node& node)
{
    if (node.kind != NodeKind::FieldAccess) {
        return false;
    }
    const auto& target = *node.children[0];
    return target.kind == NodeKind::NameRef &&
           (target.text == "StringLiterals" || target.text == "IntLiterals") &&
           node.children[1]->text == "CONSTANT";
}

}  // namespace

bool is_abstract_var(const std::string& name) noexcept
{
    return abstract_name(name, 'v');
}

bool is_abstract_const(const std::string& name) noexcept
{
    return abstract_name(name, 'c');
}

bool looks_like_class_name(const std::string& name) noexcept
{
    return !name.empty() && std::isupper(static_cast<unsigned char>(name[0])) != 0;
}

bool is_constant_placeholder(const Node& node)
{
    if (is_placeholder_field(node)) {
        return true;
    }
    if (node.kind == NodeKind::MethodCall && node.qualified && call_args(node).empty()) {
        const auto& name = call_name(node);
        if (name == "getBytes" || name == "toCharArray") {
            return is_placeholder_field(*node.children[0]);
        }
    }
    return false;
}

bool is_option_set_creation(const Node& node)
{
    return node.kind == NodeKind::ObjectCreation && node.children[0]->text == "StringLiterals";
}

bool is_option_pick(const Node& node)
{
    return node.kind == NodeKind::MethodCall && node.qualified && call_name(node) == "getAString" &&
           call_args(node).empty();
}

bool structurally_equal(const Node& a, const Node& b)
{
    if (a.kind != b.kind || a.text != b.text || a.qualified != b.qualified ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurally_equal(*a.children[i], *b.children[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace misuseforge

#include <sstream>

#include "misuseforge/frontend.hpp"

namespace misuseforge {

namespace {

std::string print_expr(const Node& node);

std::string print_operand(const Node& node)
{
    if (node.kind == NodeKind::Cast || node.kind == NodeKind::Compare) {
        return "(" + print_expr(node) + ")";
    }
    return print_expr(node);
}

std::string print_args(std::span<const NodePtr> args)
{
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += print_expr(*args[i]);
    }
    return out + ")";
}

std::string print_expr(const Node& node)
{
    switch (node.kind) {
        case NodeKind::FieldAccess:
            return print_operand(*node.children[0]) + "." + node.children[1]->text;
        case NodeKind::MethodCall: {
            std::string out;
            if (node.qualified) {
                out = print_operand(*node.children[0]) + ".";
            }
            return out + call_name(node) + print_args(call_args(node));
        }
        case NodeKind::ObjectCreation:
            return "new " + node.children[0]->text + print_args(call_args(node));
        case NodeKind::ArrayCreation:
            return "new " + node.children[0]->text + "[" + print_expr(*node.children[1]) + "]";
        case NodeKind::Cast:
            return "(" + node.children[0]->text + ") " + print_operand(*node.children[1]);
        case NodeKind::Compare:
            return print_operand(*node.children[0]) + " " + node.text + " " + print_operand(*node.children[1]);
        default:
            return node.text;
    }
}

std::string print_stmt(const Node& node)
{
    switch (node.kind) {
        case NodeKind::LocalDecl: {
            std::string out = node.children[0]->text + " " + node.children[1]->text;
            if (node.children.size() > 2) {
                out += " = " + print_expr(*node.children[2]);
            }
            return out + ";";
        }
        case NodeKind::ExprStmt:
            return print_expr(*node.children[0]) + ";";
        case NodeKind::Assign:
            return print_expr(*node.children[0]) + " = " + print_expr(*node.children[1]) + ";";
        case NodeKind::Return:
            if (node.children.empty()) {
                return "return;";
            }
            return "return " + print_expr(*node.children[0]) + ";";
        case NodeKind::If: {
            std::string out = "if (" + print_expr(*node.children[0]) + ") " + print_stmt(*node.children[1]);
            if (node.children.size() > 2) {
                out += " else " + print_stmt(*node.children[2]);
            }
            return out;
        }
        case NodeKind::Block: {
            if (node.children.empty()) {
                return "{}";
            }
            std::string out = "{";
            for (const auto& child : node.children) {
                out += " " + print_stmt(*child);
            }
            return out + " }";
        }
        default:
            return print_expr(node);
    }
}

void format_into(std::ostringstream& out, const Node& node, int indent, bool with_comments)
{
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    if (with_comments) {
        for (const auto& comment : node.comments) {
            out << pad << comment << "\n";
        }
    }
    auto block = [&](const Node& blk) {
        for (const auto& child : blk.children) {
            format_into(out, *child, indent + 1, with_comments);
        }
    };
    switch (node.kind) {
        case NodeKind::If:
            out << pad << "if (" << print_expr(*node.children[0]) << ") {\n";
            block(*node.children[1]);
            if (node.children.size() > 2) {
                out << pad << "} else {\n";
                block(*node.children[2]);
            }
            out << pad << "}\n";
            return;
        case NodeKind::Block:
            out << pad << "{\n";
            block(node);
            out << pad << "}\n";
            return;
        default:
            out << pad << print_stmt(node) << "\n";
    }
}

std::string strip_trailing_newline(std::string text)
{
    if (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    return text;
}

}  // namespace

std::string pretty_print(const Node& node)
{
    if (is_statement_kind(node.kind)) {
        return print_stmt(node);
    }
    return print_expr(node);
}

std::string format_statements(const std::vector<NodePtr>& stmts, int indent, bool with_comments)
{
    std::ostringstream out;
    for (const auto& stmt : stmts) {
        format_into(out, *stmt, indent, with_comments);
    }
    return strip_trailing_newline(out.str());
}

std::string format_method(const MethodDecl& method, int indent, bool with_comments)
{
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    std::ostringstream out;
    if (method.is_override) {
        out << pad << "@Override\n";
    }
    out << pad;
    for (const auto& modifier : method.modifiers) {
        out << modifier << " ";
    }
    if (!method.is_constructor) {
        out << method.return_type << " ";
    }
    out << method.name << "(";
    for (std::size_t i = 0; i < method.params.size(); ++i) {
        if (i > 0) {
            out << ", ";
        }
        out << method.params[i].type << " " << method.params[i].name;
    }
    out << ") {\n";
    for (const auto& stmt : method.body) {
        format_into(out, *stmt, indent + 1, with_comments);
    }
    out << pad << "}";
    return out.str();
}

}  // namespace misuseforge

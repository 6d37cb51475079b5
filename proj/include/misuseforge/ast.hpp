#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace misuseforge {

enum class NodeKind {
    // statements
    LocalDecl,
    ExprStmt,
    Assign,
    Return,
    If,
    Block,
    // expressions
    StringLit,
    IntLit,
    BoolLit,
    NullLit,
    NameRef,
    FieldAccess,
    MethodCall,
    ObjectCreation,
    ArrayCreation,
    Cast,
    Compare,
    // name leaves inside declarations, calls and creations
    Type,
    Ident,
};

[[nodiscard]] const char* node_kind_name(NodeKind kind) noexcept;
[[nodiscard]] bool is_statement_kind(NodeKind kind) noexcept;
[[nodiscard]] bool is_expression_kind(NodeKind kind) noexcept;
[[nodiscard]] bool is_literal_kind(NodeKind kind) noexcept;

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int column = 0;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Child layout per kind:
//   LocalDecl      [Type, Ident, init?]
//   ExprStmt       [expr]
//   Assign         [target, value]
//   Return         [expr?]            text "return" when bare
//   If             [cond, Block, Block?]
//   Block          [stmt*]            text "{}" when empty
//   FieldAccess    [target, Ident]
//   MethodCall     [receiver?, Ident, arg*]   receiver present iff qualified
//   ObjectCreation [Type, arg*]
//   ArrayCreation  [Type(element), size]
//   Cast           [Type, expr]
//   Compare        [lhs, rhs]         text "==" or "!="
struct Node {
    NodeKind kind = NodeKind::NameRef;
    std::string text;
    std::vector<NodePtr> children;
    Span span;
    bool qualified = false;
    std::vector<std::string> comments;
};

[[nodiscard]] NodePtr make_node(NodeKind kind, std::string text, std::vector<NodePtr> children = {},
                                Span span = {}, bool qualified = false);
[[nodiscard]] NodePtr with_children(const Node& node, std::vector<NodePtr> children);

// Call helpers; valid for MethodCall and ObjectCreation.
[[nodiscard]] std::span<const NodePtr> call_args(const Node& call);
[[nodiscard]] NodePtr call_receiver(const Node& call);
[[nodiscard]] const std::string& call_name(const Node& call);
[[nodiscard]] bool is_call(const Node& node) noexcept;

// Local declaration / assignment helpers.
[[nodiscard]] NodePtr stmt_value(const Node& stmt);

// Abstract names produced by the normalizations.
[[nodiscard]] bool is_abstract_var(const std::string& name) noexcept;
[[nodiscard]] bool is_abstract_const(const std::string& name) noexcept;
[[nodiscard]] bool looks_like_class_name(const std::string& name) noexcept;

// EDL constructs recognized in examples.
[[nodiscard]] bool is_constant_placeholder(const Node& node);
[[nodiscard]] bool is_option_set_creation(const Node& node);
[[nodiscard]] bool is_option_pick(const Node& node);

[[nodiscard]] bool structurally_equal(const Node& a, const Node& b);

template <typename Fn>
void visit_preorder(const NodePtr& node, Fn&& fn)
{
    if (!node) {
        return;
    }
    fn(node);
    for (const auto& child : node->children) {
        visit_preorder(child, fn);
    }
}

struct Param {
    std::string type;
    std::string name;
    Span span;
};

struct FieldDecl {
    std::vector<std::string> modifiers;
    std::string type;
    std::string name;
    NodePtr init;
    Span span;
};

struct MethodDecl {
    std::vector<std::string> modifiers;
    std::string name;
    std::vector<Param> params;
    std::string return_type;
    std::vector<NodePtr> body;
    bool is_override = false;
    bool is_constructor = false;
    Span span;
};

struct ClassDecl {
    std::vector<std::string> modifiers;
    std::string name;
    std::vector<std::string> super_types;
    std::vector<FieldDecl> fields;
    std::vector<MethodDecl> methods;
    Span span;
};

struct SourceUnit {
    std::string file_id;
    std::vector<ClassDecl> classes;
    std::string raw_text;
};

// A parsed example snippet: the method plus the header of the class it came from, if any.
struct Snippet {
    MethodDecl method;
    bool has_class = false;
    std::string class_name;
    std::vector<std::string> super_types;
    std::vector<FieldDecl> fields;
};

}  // namespace misuseforge

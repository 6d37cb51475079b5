#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "misuseforge/error.hpp"
#include "misuseforge/frontend.hpp"

namespace misuseforge {

namespace {

enum class Tok { Ident, String, Int, Punct, Comment, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int column = 1;
};

constexpr std::array kModifiers = {"public",    "private",  "protected", "static",   "final",
                                   "abstract",  "synchronized", "native", "transient", "volatile",
                                   "strictfp"};

constexpr std::array kUnsupportedKeywords = {
    "for",    "while",   "do",      "try",      "catch",  "finally", "throw",    "throws",
    "switch", "case",    "break",   "continue", "interface", "enum", "import",   "package",
    "instanceof", "super", "default", "assert", "goto",   "const"};

constexpr std::array kReserved = {"class", "extends", "implements", "new",  "return", "if",
                                  "else",  "true",    "false",      "null", "this"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& table, const std::string& word)
{
    return std::any_of(table.begin(), table.end(), [&](const char* entry) { return word == entry; });
}

bool is_ident_start(unsigned char c)
{
    return std::isalpha(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c)
{
    return is_ident_start(c) || std::isdigit(c) != 0;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : m_src(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token tok;
            tok.begin = m_pos;
            tok.line = m_line;
            tok.column = column();
            if (m_pos >= m_src.size()) {
                tok.kind = Tok::End;
                tok.end = m_pos;
                out.push_back(tok);
                return out;
            }
            const auto c = static_cast<unsigned char>(m_src[m_pos]);
            if (c == '/' && peek(1) == '/') {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n') {
                    ++m_pos;
                }
                tok.kind = Tok::Comment;
            } else if (c == '/' && peek(1) == '*') {
                m_pos += 2;
                while (m_pos < m_src.size() && !(m_src[m_pos] == '*' && peek(1) == '/')) {
                    bump();
                }
                if (m_pos >= m_src.size()) {
                    throw Error(ErrorKind::Syntax, "unterminated comment", tok.line, tok.column);
                }
                m_pos += 2;
                tok.kind = Tok::Comment;
            } else if (is_ident_start(c)) {
                while (m_pos < m_src.size() && is_ident_part(static_cast<unsigned char>(m_src[m_pos]))) {
                    ++m_pos;
                }
                tok.kind = Tok::Ident;
            } else if (std::isdigit(c) != 0) {
                while (m_pos < m_src.size() && std::isdigit(static_cast<unsigned char>(m_src[m_pos])) != 0) {
                    ++m_pos;
                }
                if (m_pos < m_src.size() &&
                    (is_ident_start(static_cast<unsigned char>(m_src[m_pos])) || m_src[m_pos] == '.')) {
                    throw Error(ErrorKind::UnsupportedConstruct, "only decimal int literals are supported",
                                tok.line, tok.column);
                }
                tok.kind = Tok::Int;
            } else if (c == '"') {
                ++m_pos;
                while (true) {
                    if (m_pos >= m_src.size() || m_src[m_pos] == '\n') {
                        throw Error(ErrorKind::Syntax, "unterminated string literal", tok.line, tok.column);
                    }
                    if (m_src[m_pos] == '\\') {
                        m_pos += 2;
                        continue;
                    }
                    if (m_src[m_pos] == '"') {
                        ++m_pos;
                        break;
                    }
                    ++m_pos;
                }
                tok.kind = Tok::String;
            } else if ((c == '=' || c == '!') && peek(1) == '=') {
                m_pos += 2;
                tok.kind = Tok::Punct;
            } else if (std::string_view("{}()[];,.=@").find(static_cast<char>(c)) != std::string_view::npos) {
                ++m_pos;
                tok.kind = Tok::Punct;
            } else if (c == '<' || c == '>') {
                throw Error(ErrorKind::UnsupportedConstruct, "generics and relational operators are not supported",
                            tok.line, tok.column);
            } else if (c == '\'') {
                throw Error(ErrorKind::UnsupportedConstruct, "char literals are not supported", tok.line,
                            tok.column);
            } else if (std::string_view("+-*/%!&|?:~^").find(static_cast<char>(c)) != std::string_view::npos) {
                throw Error(ErrorKind::UnsupportedConstruct,
                            std::string("operator '") + static_cast<char>(c) + "' is not supported", tok.line,
                            tok.column);
            } else {
                throw Error(ErrorKind::Syntax, std::string("unexpected character '") + static_cast<char>(c) + "'",
                            tok.line, tok.column);
            }
            tok.end = m_pos;
            tok.text = std::string(m_src.substr(tok.begin, tok.end - tok.begin));
            out.push_back(std::move(tok));
        }
    }

private:
    char peek(std::size_t ahead) const
    {
        return m_pos + ahead < m_src.size() ? m_src[m_pos + ahead] : '\0';
    }

    void bump()
    {
        if (m_src[m_pos] == '\n') {
            ++m_line;
            m_line_start = m_pos + 1;
        }
        ++m_pos;
    }

    void skip_space()
    {
        while (m_pos < m_src.size() && std::isspace(static_cast<unsigned char>(m_src[m_pos])) != 0) {
            bump();
        }
    }

    int column() const { return static_cast<int>(m_pos - m_line_start) + 1; }

    std::string_view m_src;
    std::size_t m_pos = 0;
    std::size_t m_line_start = 0;
    int m_line = 1;
};

class Parser {
public:
    Parser(std::string_view src, bool keep_comments) : m_keep_comments(keep_comments)
    {
        for (auto& tok : Lexer(src).run()) {
            if (tok.kind == Tok::Comment) {
                m_comment_before.emplace(m_tokens.size(), tok.text);
                continue;
            }
            m_tokens.push_back(std::move(tok));
        }
    }

    std::vector<ClassDecl> parse_classes()
    {
        std::vector<ClassDecl> classes;
        while (!at_end()) {
            classes.push_back(parse_class());
        }
        if (classes.empty()) {
            fail("expected a class declaration");
        }
        return classes;
    }

    std::vector<NodePtr> parse_statements_to_end()
    {
        std::vector<NodePtr> out;
        while (!at_end()) {
            out.push_back(parse_statement());
        }
        return out;
    }

    NodePtr parse_single_expression()
    {
        auto expr = parse_expr();
        expect_end();
        return expr;
    }

    NodePtr parse_single_statement()
    {
        auto stmt = parse_statement();
        expect_end();
        return stmt;
    }

    MethodDecl parse_single_method()
    {
        std::vector<std::string> modifiers;
        bool is_override = parse_annotation();
        parse_modifiers(modifiers);
        auto method = parse_method_after_modifiers("", std::move(modifiers), is_override);
        expect_end();
        return method;
    }

    // Classifies the snippet by its leading tokens.
    enum class Shape { Statements, Method, Class };

    Shape snippet_shape() const
    {
        std::size_t i = 0;
        bool decorated = false;
        while (i < m_tokens.size()) {
            const auto& tok = m_tokens[i];
            if (tok.kind == Tok::Punct && tok.text == "@") {
                decorated = true;
                i += 2;
                continue;
            }
            if (tok.kind == Tok::Ident && contains(kModifiers, tok.text)) {
                decorated = true;
                ++i;
                continue;
            }
            break;
        }
        if (i < m_tokens.size() && m_tokens[i].kind == Tok::Ident && m_tokens[i].text == "class") {
            return Shape::Class;
        }
        if (decorated) {
            return Shape::Method;
        }
        // type ID "(" starts a method header; no statement starts that way.
        std::size_t j = i;
        if (j < m_tokens.size() && m_tokens[j].kind == Tok::Ident) {
            ++j;
            while (j + 1 < m_tokens.size() && m_tokens[j].text == "[" && m_tokens[j + 1].text == "]") {
                j += 2;
            }
            if (j + 1 < m_tokens.size() && m_tokens[j].kind == Tok::Ident && m_tokens[j + 1].text == "(") {
                return Shape::Method;
            }
        }
        return Shape::Statements;
    }

private:
    // ---- token helpers ----

    const Token& cur() const { return m_tokens[m_index]; }
    const Token& ahead(std::size_t n) const
    {
        return m_tokens[std::min(m_index + n, m_tokens.size() - 1)];
    }
    bool at_end() const { return cur().kind == Tok::End; }

    bool is_punct(const Token& tok, std::string_view text) const
    {
        return tok.kind == Tok::Punct && tok.text == text;
    }
    bool is_word(const Token& tok, std::string_view text) const
    {
        return tok.kind == Tok::Ident && tok.text == text;
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        const auto& tok = cur();
        std::string found = tok.kind == Tok::End ? "end of input" : "'" + tok.text + "'";
        throw Error(ErrorKind::Syntax, message + ", found " + found, tok.line, tok.column);
    }

    [[noreturn]] void unsupported(const Token& tok, const std::string& what) const
    {
        throw Error(ErrorKind::UnsupportedConstruct, what, tok.line, tok.column);
    }

    const Token& advance()
    {
        const Token& tok = m_tokens[m_index];
        if (m_index + 1 < m_tokens.size()) {
            ++m_index;
        }
        return tok;
    }

    const Token& expect_punct(std::string_view text)
    {
        if (!is_punct(cur(), text)) {
            fail("expected '" + std::string(text) + "'");
        }
        return advance();
    }

    void expect_end()
    {
        if (!at_end()) {
            fail("expected end of input");
        }
    }

    void check_word(const Token& tok) const
    {
        if (contains(kUnsupportedKeywords, tok.text)) {
            unsupported(tok, "'" + tok.text + "' is outside the supported subset");
        }
    }

    const Token& expect_ident(const std::string& what)
    {
        if (cur().kind != Tok::Ident) {
            fail("expected " + what);
        }
        check_word(cur());
        if (contains(kReserved, cur().text) || contains(kModifiers, cur().text)) {
            fail("expected " + what);
        }
        return advance();
    }

    std::vector<std::string> take_comments()
    {
        std::vector<std::string> out;
        auto range = m_comment_before.equal_range(m_index);
        for (auto it = range.first; it != range.second; ++it) {
            if (m_keep_comments) {
                out.push_back(it->second);
            }
        }
        m_comment_before.erase(range.first, range.second);
        return out;
    }

    static Span span_of(const Token& first, const Token& last)
    {
        return Span{first.begin, last.end, first.line, first.column};
    }

    const Token& prev() const { return m_tokens[m_index - 1]; }

    // ---- declarations ----

    bool parse_annotation()
    {
        bool is_override = false;
        while (is_punct(cur(), "@")) {
            const auto& at = advance();
            if (!is_word(cur(), "Override")) {
                unsupported(at, "only the @Override annotation is supported");
            }
            advance();
            is_override = true;
        }
        return is_override;
    }

    void parse_modifiers(std::vector<std::string>& out)
    {
        while (cur().kind == Tok::Ident && contains(kModifiers, cur().text)) {
            out.push_back(advance().text);
        }
    }

    ClassDecl parse_class()
    {
        ClassDecl cls;
        const auto& first = cur();
        if (is_punct(cur(), "@")) {
            unsupported(cur(), "class annotations are not supported");
        }
        parse_modifiers(cls.modifiers);
        if (cur().kind == Tok::Ident) {
            check_word(cur());
        }
        if (!is_word(cur(), "class")) {
            fail("expected 'class'");
        }
        advance();
        cls.name = expect_ident("class name").text;
        if (is_word(cur(), "extends")) {
            advance();
            cls.super_types.push_back(expect_ident("super class name").text);
        }
        if (is_word(cur(), "implements")) {
            advance();
            cls.super_types.push_back(expect_ident("interface name").text);
            while (is_punct(cur(), ",")) {
                advance();
                cls.super_types.push_back(expect_ident("interface name").text);
            }
        }
        if (cur().kind == Tok::Ident) {
            check_word(cur());
        }
        expect_punct("{");
        while (!is_punct(cur(), "}")) {
            if (at_end()) {
                fail("expected '}'");
            }
            parse_member(cls);
        }
        take_comments();
        cls.span = span_of(first, advance());
        return cls;
    }

    void parse_member(ClassDecl& cls)
    {
        take_comments();
        std::vector<std::string> modifiers;
        const auto& first = cur();
        const bool is_override = parse_annotation();
        parse_modifiers(modifiers);
        if (cur().kind == Tok::Ident) {
            check_word(cur());
        }
        if (is_word(cur(), "class")) {
            unsupported(cur(), "nested classes are not supported");
        }
        if (cur().kind == Tok::Ident && cur().text == cls.name && is_punct(ahead(1), "(")) {
            auto ctor = parse_method_after_modifiers(cls.name, std::move(modifiers), is_override);
            ctor.span.begin = first.begin;
            cls.methods.push_back(std::move(ctor));
            return;
        }
        if (cur().kind == Tok::Ident && !is_punct(ahead(1), "(")) {
            // field or method: type then name
            std::size_t j = 1;
            while (is_punct(ahead(j), "[") && is_punct(ahead(j + 1), "]")) {
                j += 2;
            }
            if (ahead(j).kind == Tok::Ident && is_punct(ahead(j + 1), "(")) {
                auto method = parse_method_after_modifiers("", std::move(modifiers), is_override);
                method.span.begin = first.begin;
                cls.methods.push_back(std::move(method));
                return;
            }
        }
        if (is_override) {
            fail("expected a method after @Override");
        }
        FieldDecl field;
        field.modifiers = std::move(modifiers);
        const auto& type_tok = cur();
        field.type = parse_type_name();
        field.name = expect_ident("field name").text;
        if (is_punct(cur(), "=")) {
            advance();
            field.init = parse_expr();
        }
        field.span = span_of(type_tok, expect_punct(";"));
        cls.fields.push_back(std::move(field));
    }

    MethodDecl parse_method_after_modifiers(const std::string& class_name, std::vector<std::string> modifiers,
                                            bool is_override)
    {
        MethodDecl method;
        method.modifiers = std::move(modifiers);
        method.is_override = is_override;
        const auto& first = cur();
        if (!class_name.empty() && cur().text == class_name && is_punct(ahead(1), "(")) {
            method.is_constructor = true;
            method.name = advance().text;
        } else {
            method.return_type = parse_type_name();
            method.name = expect_ident("method name").text;
        }
        method.span = Span{first.begin, 0, prev().line, prev().column};
        expect_punct("(");
        std::set<std::string> seen;
        if (!is_punct(cur(), ")")) {
            while (true) {
                Param param;
                const auto& ptok = cur();
                param.type = parse_type_name();
                param.name = expect_ident("parameter name").text;
                param.span = span_of(ptok, prev());
                if (!seen.insert(param.name).second) {
                    throw Error(ErrorKind::Syntax, "duplicate parameter '" + param.name + "'", ptok.line,
                                ptok.column);
                }
                method.params.push_back(std::move(param));
                if (!is_punct(cur(), ",")) {
                    break;
                }
                advance();
            }
        }
        expect_punct(")");
        if (cur().kind == Tok::Ident) {
            check_word(cur());
        }
        method.body = parse_block_body();
        method.span.end = prev().end;
        return method;
    }

    std::string parse_type_name()
    {
        auto name = expect_ident("type name").text;
        while (is_punct(cur(), "[")) {
            advance();
            expect_punct("]");
            name += "[]";
        }
        return name;
    }

    NodePtr parse_type_leaf()
    {
        const auto& first = cur();
        auto name = parse_type_name();
        return make_node(NodeKind::Type, name, {}, span_of(first, prev()));
    }

    // ---- statements ----

    std::vector<NodePtr> parse_block_body()
    {
        expect_punct("{");
        std::vector<NodePtr> stmts;
        while (!is_punct(cur(), "}")) {
            if (at_end()) {
                fail("expected '}'");
            }
            stmts.push_back(parse_statement());
        }
        take_comments();
        advance();
        return stmts;
    }

    NodePtr parse_block()
    {
        const auto& first = cur();
        auto stmts = parse_block_body();
        return make_node(NodeKind::Block, stmts.empty() ? "{}" : "", std::move(stmts), span_of(first, prev()));
    }

    bool local_decl_ahead() const
    {
        if (cur().kind != Tok::Ident || contains(kReserved, cur().text)) {
            return false;
        }
        std::size_t j = 1;
        while (is_punct(ahead(j), "[") && is_punct(ahead(j + 1), "]")) {
            j += 2;
        }
        return ahead(j).kind == Tok::Ident;
    }

    NodePtr parse_statement()
    {
        auto comments = take_comments();
        auto stmt = parse_statement_inner();
        if (!comments.empty()) {
            auto copy = std::make_shared<Node>(*stmt);
            copy->comments = std::move(comments);
            stmt = copy;
        }
        return stmt;
    }

    NodePtr parse_statement_inner()
    {
        const auto& first = cur();
        if (is_punct(first, "{")) {
            return parse_block();
        }
        if (first.kind == Tok::Ident) {
            check_word(first);
        }
        if (is_word(first, "if")) {
            advance();
            expect_punct("(");
            auto cond = parse_expr();
            expect_punct(")");
            if (!is_punct(cur(), "{")) {
                fail("expected '{' after if condition");
            }
            std::vector<NodePtr> children{cond, parse_block()};
            if (is_word(cur(), "else")) {
                advance();
                if (is_word(cur(), "if")) {
                    unsupported(cur(), "'else if' is outside the supported subset");
                }
                if (!is_punct(cur(), "{")) {
                    fail("expected '{' after else");
                }
                children.push_back(parse_block());
            }
            return make_node(NodeKind::If, "", std::move(children), span_of(first, prev()));
        }
        if (is_word(first, "return")) {
            advance();
            if (is_punct(cur(), ";")) {
                return make_node(NodeKind::Return, "return", {}, span_of(first, advance()));
            }
            auto value = parse_expr();
            return make_node(NodeKind::Return, "", {value}, span_of(first, expect_punct(";")));
        }
        if (local_decl_ahead()) {
            auto type = parse_type_leaf();
            const auto& name_tok = expect_ident("variable name");
            std::vector<NodePtr> children{
                type, make_node(NodeKind::Ident, name_tok.text, {}, span_of(name_tok, name_tok))};
            if (is_punct(cur(), "=")) {
                advance();
                children.push_back(parse_expr());
            }
            return make_node(NodeKind::LocalDecl, "", std::move(children), span_of(first, expect_punct(";")));
        }
        auto expr = parse_expr();
        if (is_punct(cur(), "=")) {
            if (expr->kind != NodeKind::NameRef && expr->kind != NodeKind::FieldAccess) {
                fail("invalid assignment target");
            }
            advance();
            auto value = parse_expr();
            return make_node(NodeKind::Assign, "", {expr, value}, span_of(first, expect_punct(";")));
        }
        if (expr->kind != NodeKind::MethodCall && expr->kind != NodeKind::ObjectCreation) {
            fail("expected a statement");
        }
        return make_node(NodeKind::ExprStmt, "", {expr}, span_of(first, expect_punct(";")));
    }

    // ---- expressions ----

    NodePtr parse_expr()
    {
        const auto& first = cur();
        auto lhs = parse_postfix();
        while (is_punct(cur(), "==") || is_punct(cur(), "!=")) {
            auto op = advance().text;
            auto rhs = parse_postfix();
            lhs = make_node(NodeKind::Compare, op, {lhs, rhs}, span_of(first, prev()));
        }
        return lhs;
    }

    std::vector<NodePtr> parse_args()
    {
        expect_punct("(");
        std::vector<NodePtr> args;
        if (!is_punct(cur(), ")")) {
            while (true) {
                args.push_back(parse_expr());
                if (!is_punct(cur(), ",")) {
                    break;
                }
                advance();
            }
        }
        expect_punct(")");
        return args;
    }

    NodePtr parse_postfix()
    {
        const auto& first = cur();
        auto expr = parse_primary();
        while (true) {
            if (is_punct(cur(), "[")) {
                unsupported(cur(), "array indexing is not supported");
            }
            if (!is_punct(cur(), ".")) {
                return expr;
            }
            advance();
            const auto& name_tok = expect_ident("member name");
            auto name = make_node(NodeKind::Ident, name_tok.text, {}, span_of(name_tok, name_tok));
            if (is_punct(cur(), "(")) {
                std::vector<NodePtr> children{expr, name};
                for (auto& arg : parse_args()) {
                    children.push_back(std::move(arg));
                }
                expr = make_node(NodeKind::MethodCall, "", std::move(children), span_of(first, prev()), true);
            } else {
                expr = make_node(NodeKind::FieldAccess, "", {expr, name}, span_of(first, prev()));
            }
        }
    }

    bool starts_operand(const Token& tok) const
    {
        if (tok.kind == Tok::String || tok.kind == Tok::Int || is_punct(tok, "(")) {
            return true;
        }
        return tok.kind == Tok::Ident && !contains(kModifiers, tok.text) && tok.text != "class" &&
               tok.text != "else";
    }

    bool cast_ahead() const
    {
        // "(" ID ("[" "]")* ")" operand
        if (ahead(1).kind != Tok::Ident || contains(kReserved, ahead(1).text)) {
            return false;
        }
        std::size_t j = 2;
        while (is_punct(ahead(j), "[") && is_punct(ahead(j + 1), "]")) {
            j += 2;
        }
        return is_punct(ahead(j), ")") && starts_operand(ahead(j + 1));
    }

    NodePtr parse_primary()
    {
        const auto& tok = cur();
        switch (tok.kind) {
            case Tok::String:
                advance();
                return make_node(NodeKind::StringLit, tok.text, {}, span_of(tok, tok));
            case Tok::Int:
                advance();
                return make_node(NodeKind::IntLit, tok.text, {}, span_of(tok, tok));
            case Tok::Punct:
                if (is_punct(tok, "(")) {
                    if (cast_ahead()) {
                        advance();
                        auto type = parse_type_leaf();
                        expect_punct(")");
                        auto operand = parse_postfix();
                        return make_node(NodeKind::Cast, "", {type, operand}, span_of(tok, prev()));
                    }
                    advance();
                    auto inner = parse_expr();
                    expect_punct(")");
                    return inner;
                }
                fail("expected an expression");
            case Tok::Ident:
                break;
            default:
                fail("expected an expression");
        }
        check_word(tok);
        if (tok.text == "true" || tok.text == "false") {
            advance();
            return make_node(NodeKind::BoolLit, tok.text, {}, span_of(tok, tok));
        }
        if (tok.text == "null") {
            advance();
            return make_node(NodeKind::NullLit, tok.text, {}, span_of(tok, tok));
        }
        if (tok.text == "this") {
            advance();
            return make_node(NodeKind::NameRef, tok.text, {}, span_of(tok, tok));
        }
        if (tok.text == "new") {
            advance();
            const auto& type_tok = expect_ident("class or element type");
            auto type = make_node(NodeKind::Type, type_tok.text, {}, span_of(type_tok, type_tok));
            if (is_punct(cur(), "[")) {
                advance();
                if (is_punct(cur(), "]")) {
                    unsupported(cur(), "array initializers are not supported");
                }
                auto size = parse_expr();
                expect_punct("]");
                if (is_punct(cur(), "[")) {
                    unsupported(cur(), "multi-dimensional arrays are not supported");
                }
                return make_node(NodeKind::ArrayCreation, "", {type, size}, span_of(tok, prev()));
            }
            std::vector<NodePtr> children{type};
            for (auto& arg : parse_args()) {
                children.push_back(std::move(arg));
            }
            if (is_punct(cur(), "{")) {
                unsupported(cur(), "anonymous classes are not supported");
            }
            return make_node(NodeKind::ObjectCreation, "", std::move(children), span_of(tok, prev()));
        }
        if (contains(kReserved, tok.text) || contains(kModifiers, tok.text)) {
            fail("expected an expression");
        }
        advance();
        if (is_punct(cur(), "(")) {
            std::vector<NodePtr> children{make_node(NodeKind::Ident, tok.text, {}, span_of(tok, tok))};
            for (auto& arg : parse_args()) {
                children.push_back(std::move(arg));
            }
            return make_node(NodeKind::MethodCall, "", std::move(children), span_of(tok, prev()));
        }
        return make_node(NodeKind::NameRef, tok.text, {}, span_of(tok, tok));
    }

    std::vector<Token> m_tokens;
    std::multimap<std::size_t, std::string> m_comment_before;
    std::size_t m_index = 0;
    bool m_keep_comments;
};

}  // namespace

const std::string* lookup(const NameMap& map, const std::string& key)
{
    for (const auto& [from, to] : map) {
        if (from == key) {
            return &to;
        }
    }
    return nullptr;
}

SourceUnit parse_unit(std::string_view source, std::string file_id)
{
    Parser parser(source, false);
    SourceUnit unit;
    unit.file_id = std::move(file_id);
    unit.raw_text = std::string(source);
    unit.classes = parser.parse_classes();
    std::set<std::string> names;
    for (const auto& cls : unit.classes) {
        if (!names.insert(cls.name).second) {
            throw Error(ErrorKind::DuplicateClass, "class '" + cls.name + "' declared twice in " + unit.file_id,
                        cls.span.line, cls.span.column);
        }
    }
    return unit;
}

Snippet parse_snippet(std::string_view source)
{
    Parser parser(source, true);
    Snippet snippet;
    switch (parser.snippet_shape()) {
        case Parser::Shape::Statements:
            snippet.method.name = "__snippet";
            snippet.method.return_type = "void";
            snippet.method.body = parser.parse_statements_to_end();
            snippet.method.span = Span{0, source.size(), 1, 1};
            return snippet;
        case Parser::Shape::Method:
            snippet.method = parser.parse_single_method();
            return snippet;
        case Parser::Shape::Class:
            break;
    }
    auto classes = parser.parse_classes();
    if (classes.size() != 1) {
        throw Error(ErrorKind::AmbiguousSnippet, "snippet declares " + std::to_string(classes.size()) + " classes");
    }
    auto& cls = classes.front();
    if (cls.methods.size() != 1) {
        throw Error(ErrorKind::AmbiguousSnippet,
                    "snippet class '" + cls.name + "' declares " + std::to_string(cls.methods.size()) + " methods");
    }
    snippet.method = std::move(cls.methods.front());
    snippet.has_class = true;
    snippet.class_name = cls.name;
    snippet.super_types = cls.super_types;
    snippet.fields = std::move(cls.fields);
    return snippet;
}

NodePtr parse_expression(std::string_view source)
{
    Parser parser(source, false);
    return parser.parse_single_expression();
}

NodePtr parse_statement(std::string_view source)
{
    Parser parser(source, false);
    return parser.parse_single_statement();
}

std::string string_literal_value(const std::string& token_text)
{
    std::string out;
    if (token_text.size() < 2) {
        return out;
    }
    for (std::size_t i = 1; i + 1 < token_text.size(); ++i) {
        char c = token_text[i];
        if (c == '\\' && i + 2 < token_text.size()) {
            char e = token_text[++i];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '0': out += '\0'; break;
                default: out += e; break;
            }
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace misuseforge

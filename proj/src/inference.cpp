#include "misuseforge/inference.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "misuseforge/dataflow.hpp"
#include "misuseforge/error.hpp"

namespace misuseforge {

namespace {

MethodFlow flow_of(const Snippet& snippet, const Catalog& catalog)
{
    return MethodFlow(snippet.method, snippet.class_name, snippet.fields, &catalog);
}

bool contains(const NodePtr& root, const Node* target)
{
    bool found = false;
    visit_preorder(root, [&](const NodePtr& n) { found = found || n.get() == target; });
    return found;
}

const Node* parent_of(const NodePtr& root, const Node* target)
{
    const Node* parent = nullptr;
    visit_preorder(root, [&](const NodePtr& n) {
        for (const auto& c : n->children) {
            if (c.get() == target) {
                parent = n.get();
            }
        }
    });
    return parent;
}

bool is_placeholder_constant(const Node& n)
{
    return n.kind == NodeKind::FieldAccess && n.children[0]->kind == NodeKind::NameRef &&
           (n.children[0]->text == "StringLiterals" || n.children[0]->text == "IntLiterals") &&
           n.children[1]->text == "CONSTANT";
}

// Catalog calls inside a statement, outermost first.
std::vector<NodePtr> catalog_calls(const NodePtr& stmt, const MethodFlow& flow)
{
    std::vector<NodePtr> out;
    visit_preorder(stmt, [&](const NodePtr& n) {
        if (is_call(*n) && flow.resolve_call(*n).api != nullptr) {
            out.push_back(n);
        }
    });
    return out;
}

// Deepest flat statement whose evaluated expressions (or itself) contain `target`.
int stmt_containing(const MethodFlow& flow, const Node* target)
{
    int found = -1;
    for (int i = 0; i < static_cast<int>(flow.stmts().size()); ++i) {
        const auto& node = flow.stmts()[i].node;
        if (node.get() == target) {
            found = i;
            continue;
        }
        for (const auto& expr : flow.read_exprs(i)) {
            if (contains(expr, target)) {
                found = i;
            }
        }
        if (node->kind == NodeKind::Assign && contains(node->children[0], target)) {
            found = i;
        }
    }
    return found;
}

bool arg_reads_def(const MethodFlow& flow, const Node& arg, int at, int def)
{
    for (const auto& key : flow.read_keys(arg)) {
        auto defs = flow.reaching(at, key);
        if (std::find(defs.begin(), defs.end(), def) != defs.end()) {
            return true;
        }
    }
    return false;
}

// Argument of `call` (in statement `call_stmt`) reached by `expr` evaluated in statement `stmt`.
int reaches_arg(const MethodFlow& flow, int stmt, const Node* expr, int call_stmt, const Node& call)
{
    auto args = call_args(call);
    if (stmt == call_stmt) {
        for (std::size_t k = 0; k < args.size(); ++k) {
            if (contains(args[k], expr)) {
                return static_cast<int>(k);
            }
        }
        return -1;
    }
    std::deque<int> work{stmt};
    std::set<int> seen{stmt};
    while (!work.empty()) {
        const int d = work.front();
        work.pop_front();
        for (int j : flow.users(d)) {
            if (j == call_stmt) {
                for (std::size_t k = 0; k < args.size(); ++k) {
                    if (arg_reads_def(flow, *args[k], call_stmt, d)) {
                        return static_cast<int>(k);
                    }
                }
            }
            if (!flow.defined_keys(j).empty() && seen.insert(j).second) {
                work.push_back(j);
            }
        }
    }
    return -1;
}

struct Trace {
    int stmt = -1;
    NodePtr call;
    int arg = -1;
};

// Catalog invocation whose argument depends on `expr`, directly or through local def-use.
Trace trace_to_api(const MethodFlow& flow, const Node* expr)
{
    const int start = stmt_containing(flow, expr);
    if (start < 0) {
        return {};
    }
    const auto calls = catalog_calls(flow.stmts()[start].node, flow);
    for (auto it = calls.rbegin(); it != calls.rend(); ++it) {
        auto args = call_args(**it);
        for (std::size_t k = 0; k < args.size(); ++k) {
            if (contains(args[k], expr)) {
                return {start, *it, static_cast<int>(k)};
            }
        }
    }
    std::deque<int> work{start};
    std::set<int> seen{start};
    while (!work.empty()) {
        const int d = work.front();
        work.pop_front();
        if (flow.defined_keys(d).empty()) {
            continue;
        }
        for (int j : flow.users(d)) {
            for (const auto& call : catalog_calls(flow.stmts()[j].node, flow)) {
                auto args = call_args(*call);
                for (std::size_t k = 0; k < args.size(); ++k) {
                    if (arg_reads_def(flow, *args[k], j, d)) {
                        return {j, call, static_cast<int>(k)};
                    }
                }
            }
            if (seen.insert(j).second) {
                work.push_back(j);
            }
        }
    }
    return {};
}

// Flat statements the given expressions depend on through local definitions.
std::set<int> def_closure(const MethodFlow& flow, int at, const std::vector<NodePtr>& exprs)
{
    std::set<int> out;
    std::deque<int> work;
    auto add_reads = [&](int stmt, const Node& expr) {
        for (const auto& key : flow.read_keys(expr)) {
            for (int d : flow.reaching(stmt, key)) {
                if (d >= 0 && out.insert(d).second) {
                    work.push_back(d);
                }
            }
        }
    };
    for (const auto& e : exprs) {
        add_reads(at, *e);
    }
    while (!work.empty()) {
        const int d = work.front();
        work.pop_front();
        for (const auto& e : flow.read_exprs(d)) {
            add_reads(d, *e);
        }
    }
    return out;
}

std::vector<NodePtr> args_of(const Node& call)
{
    auto args = call_args(call);
    return {args.begin(), args.end()};
}

std::string abstract_text(const NodePtr& node, const NameMap& map)
{
    return pretty_print(*rename_variables(node, map));
}

NameMap seed_params(const MethodDecl& method, NameMap seed)
{
    int next = 0;
    for (const auto& [from, to] : seed) {
        if (is_abstract_var(to)) {
            next = std::max(next, std::stoi(to.substr(3)) + 1);
        }
    }
    for (const auto& p : method.params) {
        if (!lookup(seed, p.name)) {
            seed.emplace_back(p.name, "$v_" + std::to_string(next++));
        }
    }
    return seed;
}

bool options_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    auto lower = [](std::string s) {
        for (auto& c : s) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        return s;
    };
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (lower(x) == lower(y)) {
                return true;
            }
        }
    }
    return false;
}

struct OptionSite {
    NodePtr creation;
    NodePtr pick;  // getAString() call consuming it
    int pick_stmt = -1;
};

std::vector<OptionSite> option_sites(const MethodFlow& flow, const char* side)
{
    std::vector<OptionSite> out;
    for (int i = 0; i < static_cast<int>(flow.stmts().size()); ++i) {
        for (const auto& expr : flow.read_exprs(i)) {
            visit_preorder(expr, [&](const NodePtr& n) {
                if (is_option_set_creation(*n)) {
                    out.push_back(OptionSite{n, nullptr, -1});
                }
            });
        }
    }
    for (auto& site : out) {
        const int def = stmt_containing(flow, site.creation.get());
        for (int i = 0; i < static_cast<int>(flow.stmts().size()) && !site.pick; ++i) {
            for (const auto& expr : flow.read_exprs(i)) {
                visit_preorder(expr, [&](const NodePtr& n) {
                    if (site.pick || !is_option_pick(*n)) {
                        return;
                    }
                    const auto& receiver = *call_receiver(*n);
                    if (&receiver == site.creation.get() ||
                        (i != def && arg_reads_def(flow, receiver, i, def) &&
                         stmt_value(*flow.stmts()[def].node).get() == site.creation.get())) {
                        site.pick = n;
                        site.pick_stmt = i;
                    }
                });
            }
        }
        if (!site.pick) {
            throw Error(ErrorKind::MalformedEdl,
                        std::string("StringLiterals created in the ") + side + " example but getAString() is never used");
        }
    }
    return out;
}

std::vector<std::string> option_values(const Node& creation)
{
    std::vector<std::string> out;
    for (const auto& arg : call_args(creation)) {
        if (arg->kind != NodeKind::StringLit) {
            throw Error(ErrorKind::MalformedEdl, "StringLiterals options must be string literals", arg->span.line,
                        arg->span.column);
        }
        out.push_back(string_literal_value(arg->text));
    }
    return out;
}

}  // namespace

CriticalSite find_critical_api(const EditScript& refined, const Snippet& insecure, const Snippet& secure,
                               const Catalog& catalog)
{
    if (refined.ops.empty()) {
        throw Error(ErrorKind::NoCriticalApi, "no critical API: the examples do not differ");
    }
    const auto i_flow = flow_of(insecure, catalog);
    const auto s_flow = flow_of(secure, catalog);

    for (const auto& op : refined.ops) {
        if (op.kind != EditKind::Update) {
            continue;
        }
        auto found = trace_to_api(i_flow, op.old_node.get());
        if (!found.call) {
            auto s_found = trace_to_api(s_flow, op.new_node.get());
            if (s_found.call) {
                const auto* api = s_flow.resolve_call(*s_found.call).api;
                for (int i = 0; i < static_cast<int>(i_flow.stmts().size()) && !found.call; ++i) {
                    for (const auto& call : catalog_calls(i_flow.stmts()[i].node, i_flow)) {
                        if (i_flow.resolve_call(*call).api == api) {
                            found = {i, call, s_found.arg};
                            break;
                        }
                    }
                }
            }
        }
        if (found.call) {
            const auto* api = i_flow.resolve_call(*found.call).api;
            return CriticalSite{CriticalApi{api->binding, ApiForm::Invocation, found.arg}, found.stmt, found.call};
        }
    }

    if (insecure.has_class && insecure.method.is_override) {
        for (const auto& super : insecure.super_types) {
            const auto* api = catalog.find(super, insecure.method.name, insecure.method.params.size());
            if (api != nullptr && api->overridable) {
                return CriticalSite{CriticalApi{api->binding, ApiForm::Override, -1}, -1, nullptr};
            }
        }
    }

    for (const auto& op : refined.ops) {
        if (op.kind != EditKind::Delete) {
            continue;
        }
        const auto calls = catalog_calls(op.old_node, i_flow);
        if (!calls.empty()) {
            const auto* api = i_flow.resolve_call(*calls.front()).api;
            return CriticalSite{CriticalApi{api->binding, ApiForm::DeletedCall, -1},
                                i_flow.index_of(op.old_node.get()), calls.front()};
        }
    }
    throw Error(ErrorKind::NoCriticalApi, "no critical API: no edit reaches a catalog API");
}

std::vector<int> extract_context(const Snippet& insecure, const CriticalSite& critical, const Catalog& catalog)
{
    std::vector<int> out;
    if (critical.api.form == ApiForm::Override) {
        for (int i = 0; i < static_cast<int>(insecure.method.body.size()); ++i) {
            out.push_back(i);
        }
        return out;
    }
    const auto flow = flow_of(insecure, catalog);
    auto flat = def_closure(flow, critical.stmt, args_of(*critical.call));
    flat.insert(critical.stmt);
    std::set<int> tops;
    for (int f : flat) {
        tops.insert(flow.stmts()[f].top);
    }
    return {tops.begin(), tops.end()};
}

std::vector<EdlDirective> detect_edl(const Snippet& insecure, const Snippet& secure, const EditScript& refined,
                                     const CriticalSite& critical, const Catalog& catalog)
{
    const auto i_flow = flow_of(insecure, catalog);
    const auto s_flow = flow_of(secure, catalog);
    std::vector<EdlDirective> out;

    for (const auto& stmt : secure.method.body) {
        visit_preorder(stmt, [](const NodePtr& n) {
            if (is_placeholder_constant(*n)) {
                throw Error(ErrorKind::MalformedEdl, "CONSTANT placeholder used in the secure example", n->span.line,
                            n->span.column);
            }
        });
    }

    const bool invocation = critical.call != nullptr;
    for (const auto& stmt : insecure.method.body) {
        visit_preorder(stmt, [&](const NodePtr& n) {
            if (!is_placeholder_constant(*n)) {
                return;
            }
            EdlDirective d;
            d.kind = EdlKind::ConstantPlaceholder;
            d.literal_type = n->children[0]->text == "IntLiterals" ? "int" : "string";
            if (invocation) {
                d.arg_index = reaches_arg(i_flow, stmt_containing(i_flow, n.get()), n.get(), critical.stmt,
                                          *critical.call);
            }
            if (std::find(out.begin(), out.end(), d) == out.end()) {
                out.push_back(d);
            }
        });
    }

    const auto i_options = option_sites(i_flow, "insecure");
    const auto s_options = option_sites(s_flow, "secure");
    if (i_options.size() != s_options.size()) {
        throw Error(ErrorKind::MalformedEdl, "StringLiterals option sets are not paired between the examples");
    }
    for (std::size_t k = 0; k < i_options.size(); ++k) {
        EdlDirective d;
        d.kind = EdlKind::OptionSet;
        d.insecure = option_values(*i_options[k].creation);
        d.secure = option_values(*s_options[k].creation);
        if (d.insecure.empty() || d.secure.empty()) {
            throw Error(ErrorKind::MalformedEdl, "option sets must list at least one value on each side");
        }
        if (options_overlap(d.insecure, d.secure)) {
            throw Error(ErrorKind::MalformedEdl, "an option is listed as both insecure and secure");
        }
        if (invocation) {
            d.arg_index = reaches_arg(i_flow, i_options[k].pick_stmt, i_options[k].pick.get(), critical.stmt,
                                      *critical.call);
        }
        out.push_back(d);
    }

    if (!invocation) {
        return out;
    }
    for (const auto& op : refined.ops) {
        if (op.kind != EditKind::Update || op.old_node->kind != NodeKind::IntLit ||
            op.new_node->kind != NodeKind::IntLit) {
            continue;
        }
        const long long before = std::stoll(op.old_node->text);
        const long long after = std::stoll(op.new_node->text);
        if (before >= after) {
            continue;
        }
        const int stmt = stmt_containing(i_flow, op.old_node.get());
        const int arg = reaches_arg(i_flow, stmt, op.old_node.get(), critical.stmt, *critical.call);
        if (arg < 0) {
            continue;
        }
        const auto& stmt_node = i_flow.stmts()[stmt].node;
        const Node* parent = parent_of(stmt_node, op.old_node.get());
        EdlDirective d;
        d.kind = EdlKind::ValueRange;
        d.min = after;
        d.arg_index = arg;
        if (parent != nullptr && parent->kind == NodeKind::ArrayCreation) {
            d.dimension = RangeDimension::ArrayLength;
        } else if (stmt == critical.stmt && call_args(*critical.call)[static_cast<std::size_t>(arg)].get() ==
                                                  op.old_node.get()) {
            d.dimension = RangeDimension::ArgValue;
        } else if (stmt != critical.stmt && stmt_value(*stmt_node).get() == op.old_node.get()) {
            // an int variable: a size when some array creation reads it
            d.dimension = RangeDimension::ArgValue;
            for (int user : i_flow.users(stmt)) {
                visit_preorder(i_flow.stmts()[user].node, [&](const NodePtr& n) {
                    if (n->kind == NodeKind::ArrayCreation && arg_reads_def(i_flow, *n->children[1], user, stmt)) {
                        d.dimension = RangeDimension::ArrayLength;
                    }
                });
            }
        } else {
            continue;
        }
        out.push_back(d);
    }
    return out;
}

FixResult build_fix(const Snippet& secure, const EditScript& refined, const std::vector<int>& context,
                    const CriticalSite& critical, const NameMap& seed)
{
    FixResult out;
    if (critical.api.form == ApiForm::Override) {
        auto map = seed_params(secure.method, seed);
        auto form = normalize_template(secure.method.body, map);
        MethodDecl method = secure.method;
        for (auto& p : method.params) {
            p.name = *lookup(form.var_map, p.name);
        }
        method.body = form.statements;
        method.is_override = false;
        out.text = format_method(method, 0, true);
        out.var_map = form.var_map;
    } else {
        std::set<int> s_indices;
        for (const auto& m : refined.matches) {
            if (std::binary_search(context.begin(), context.end(), m.i_index)) {
                s_indices.insert(m.s_index);
            }
        }
        for (const auto& op : refined.ops) {
            if (op.kind == EditKind::Insert || op.kind == EditKind::Update) {
                s_indices.insert(op.s_index);
            }
        }
        std::vector<NodePtr> stmts;
        for (int s : s_indices) {
            stmts.push_back(secure.method.body[static_cast<std::size_t>(s)]);
        }
        auto form = normalize_template(stmts, seed);
        out.text = format_statements(form.statements, 0, true);
        out.var_map = form.var_map;
    }
    if (critical.api.form == ApiForm::DeletedCall) {
        out.mode = FixMode::None;
    } else if (refined.ops.size() == 1 && refined.ops[0].kind == EditKind::Update) {
        out.mode = FixMode::ExpressionReplacement;
        out.old_expr = abstract_text(refined.ops[0].old_node, out.var_map);
        out.new_expr = abstract_text(refined.ops[0].new_node, out.var_map);
    } else {
        out.mode = FixMode::SnippetReplacement;
    }
    return out;
}

Pattern infer_pattern_from_text(std::string_view insecure_text, std::string_view secure_text, const Catalog& catalog)
{
    const auto insecure = parse_snippet(insecure_text);
    const auto secure = parse_snippet(secure_text);
    const auto refined = refine_script(diff_statements(insecure.method, secure.method));
    const auto critical = find_critical_api(refined, insecure, secure, catalog);
    const auto context = extract_context(insecure, critical, catalog);
    auto edl = detect_edl(insecure, secure, refined, critical, catalog);

    Pattern p;
    p.critical = critical.api;
    p.edl = edl;

    std::vector<NodePtr> context_stmts;
    for (int t : context) {
        context_stmts.push_back(insecure.method.body[static_cast<std::size_t>(t)]);
    }
    NameMap seed;
    if (critical.api.form == ApiForm::Override) {
        seed = seed_params(insecure.method, {});
    }
    const auto form = normalize_template(context_stmts, seed);
    p.template_text = form.text;

    const auto i_flow = flow_of(insecure, catalog);
    if (critical.call) {
        const int critical_top = i_flow.stmts()[critical.stmt].top;
        p.template_critical = static_cast<int>(std::find(context.begin(), context.end(), critical_top) - context.begin());
        for (int t : context) {
            for (const auto& call : catalog_calls(insecure.method.body[static_cast<std::size_t>(t)], i_flow)) {
                const auto& binding = i_flow.resolve_call(*call).api->binding;
                if (call != critical.call &&
                    std::find(p.anchors.begin(), p.anchors.end(), binding) == p.anchors.end()) {
                    p.anchors.push_back(binding);
                }
            }
        }
        auto args = call_args(*critical.call);
        for (std::size_t k = 0; k < args.size(); ++k) {
            const int arg = static_cast<int>(k);
            auto covering = std::find_if(edl.begin(), edl.end(), [&](const EdlDirective& d) { return d.arg_index == arg; });
            if (covering != edl.end()) {
                static const char* kSources[] = {"edl:constant", "edl:option", "edl:range"};
                p.dataflow.push_back({kSources[static_cast<int>(covering->kind)], arg});
                continue;
            }
            if (args[k]->kind == NodeKind::StringLit || args[k]->kind == NodeKind::IntLit) {
                p.dataflow.push_back({"literal:" + args[k]->text, arg});
                continue;
            }
            std::set<int> tops;
            for (int f : def_closure(i_flow, critical.stmt, {args[k]})) {
                tops.insert(i_flow.stmts()[f].top);
            }
            for (int top : tops) {
                const auto pos = std::find(context.begin(), context.end(), top) - context.begin();
                if (top != critical_top) {
                    p.dataflow.push_back({"stmt:" + std::to_string(pos), arg});
                }
            }
        }
    }

    const auto fix = build_fix(secure, refined, context, critical, form.var_map);
    p.fix_text = fix.text;
    p.fix_mode = fix.mode;
    p.fix_old = fix.old_expr;
    p.fix_new = fix.new_expr;
    p.var_map = fix.var_map;
    p.id = compute_pattern_id(p);
    return p;
}

Pattern infer_pattern(const std::filesystem::path& insecure, const std::filesystem::path& secure,
                      const Catalog& catalog)
{
    auto read = [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error(ErrorKind::Io, "cannot read " + path.string());
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };
    return infer_pattern_from_text(read(insecure), read(secure), catalog);
}

}  // namespace misuseforge

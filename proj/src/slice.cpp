#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <tuple>

#include "misuseforge/progmodel.hpp"

namespace misuseforge {

namespace {

bool is_this_access(const Node& n)
{
    return n.kind == NodeKind::FieldAccess && n.children[0]->kind == NodeKind::NameRef &&
           n.children[0]->text == "this";
}

// `Cls.f` where Cls is an indexed class declaring f.
const ClassDecl* static_field_owner(const ProgramModel& model, const MethodFlow& flow, const Node& n)
{
    if (n.kind != NodeKind::FieldAccess || is_this_access(n) || n.children[0]->kind != NodeKind::NameRef) {
        return nullptr;
    }
    const auto& name = n.children[0]->text;
    if (flow.classify(name) != NameClass::Class) {
        return nullptr;
    }
    const auto* cls = model.find_class(name);
    if (cls == nullptr) {
        return nullptr;
    }
    for (const auto& f : cls->fields) {
        if (f.name == n.children[1]->text) {
            return cls;
        }
    }
    return nullptr;
}

std::vector<int> return_stmts(const MethodFlow& flow)
{
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(flow.stmts().size()); ++i) {
        const auto& n = *flow.stmts()[i].node;
        if (n.kind == NodeKind::Return && !n.children.empty()) {
            out.push_back(i);
        }
    }
    return out;
}

class Slicer {
public:
    Slicer(const ProgramModel& model, const CallGraph& graph, int max_depth)
        : m_model(model), m_graph(graph), m_max_depth(max_depth)
    {
    }

    Slice run(StmtRef seed, const std::vector<NodePtr>& focus)
    {
        m_slice.seed = seed;
        m_slice.statements.insert(seed);
        const auto& flow = *m_model.method(seed.method).flow;
        auto exprs = focus.empty() ? flow.read_exprs(seed.stmt) : focus;
        for (const auto& e : exprs) {
            push(seed, e, 0);
        }
        while (!m_work.empty()) {
            auto item = m_work.front();
            m_work.pop_front();
            if (!m_done.emplace(item.at.method, item.at.stmt, item.expr.get()).second) {
                continue;
            }
            process(item);
        }
        return std::move(m_slice);
    }

private:
    struct Item {
        StmtRef at;
        NodePtr expr;
        int depth = 0;
    };

    void push(StmtRef at, const NodePtr& expr, int depth, bool hop = false)
    {
        if (depth > m_max_depth) {
            m_slice.depth_exceeded = true;
            return;
        }
        m_slice.statements.insert(at);
        if (!expr) {
            return;
        }
        if (hop) {
            m_work.push_back({at, expr, depth});
        } else {
            m_work.push_front({at, expr, depth});
        }
    }

    void push_stmt(StmtRef at, int depth, bool hop = false)
    {
        const auto& flow = *m_model.method(at.method).flow;
        const auto exprs = flow.read_exprs(at.stmt);
        if (exprs.empty()) {
            push(at, nullptr, depth + (hop ? 1 : 0), hop);
        }
        for (const auto& e : exprs) {
            push(at, e, depth + (hop ? 1 : 0), hop);
        }
    }

    void process(const Item& item)
    {
        const auto& entry = m_model.method(item.at.method);
        const auto& flow = *entry.flow;
        for (int g : flow.stmts()[static_cast<std::size_t>(item.at.stmt)].guards) {
            push({item.at.method, g}, flow.stmts()[static_cast<std::size_t>(g)].node->children[0], item.depth);
        }
        for (const auto& key : flow.read_keys(*item.expr)) {
            for (int d : flow.reaching(item.at.stmt, key)) {
                if (d >= 0) {
                    push_stmt({item.at.method, d}, item.depth);
                } else if (d == kFieldEntry) {
                    for (const auto& w : m_model.field_writers(entry.cls->name, key.substr(5))) {
                        m_slice.bindings.insert({item.at, w});
                        push_stmt(w, item.depth);
                    }
                } else {
                    follow_param(item, param_of(d));
                }
            }
        }
        visit_preorder(item.expr, [&](const NodePtr& n) {
            if (const auto* owner = static_field_owner(m_model, flow, *n)) {
                for (const auto& w : m_model.field_writers(owner->name, n->children[1]->text)) {
                    m_slice.bindings.insert({item.at, w});
                    push_stmt(w, item.depth);
                }
            }
            if (!is_call(*n)) {
                return;
            }
            const auto* site = m_graph.site_of(n.get());
            if (site == nullptr || site->callee < 0 || n->kind == NodeKind::ObjectCreation) {
                return;
            }
            const auto& callee_flow = *m_model.method(site->callee).flow;
            for (int r : return_stmts(callee_flow)) {
                const StmtRef ret{site->callee, r};
                if (item.depth + 1 <= m_max_depth) {
                    m_slice.bindings.insert({item.at, ret});
                }
                push(ret, callee_flow.stmts()[static_cast<std::size_t>(r)].node->children[0], item.depth + 1, true);
            }
        });
    }

    void follow_param(const Item& item, int p)
    {
        const auto callers = m_graph.callers(item.at.method);
        if (callers.empty()) {
            m_slice.entry_params.insert(item.at.method);
            return;
        }
        for (const auto* site : callers) {
            auto args = call_args(*site->call);
            if (static_cast<std::size_t>(p) >= args.size()) {
                continue;
            }
            if (item.depth + 1 <= m_max_depth) {
                m_slice.bindings.insert({item.at, site->at});
            }
            push(site->at, args[static_cast<std::size_t>(p)], item.depth + 1, true);
        }
    }

    const ProgramModel& m_model;
    const CallGraph& m_graph;
    int m_max_depth;
    Slice m_slice;
    std::deque<Item> m_work;
    std::set<std::tuple<int, int, const Node*>> m_done;
};

class OriginEval {
public:
    OriginEval(const ProgramModel& model, const CallGraph& graph, int max_depth)
        : m_model(model), m_graph(graph), m_max_depth(max_depth)
    {
    }

    OriginSet eval(StmtRef at, const NodePtr& expr, int depth)
    {
        if (depth > m_max_depth) {
            return {unknown()};
        }
        const auto key = std::make_tuple(at.method, at.stmt, expr.get());
        if (!m_active.insert(key).second) {
            return {unknown()};
        }
        auto out = eval_inner(at, expr, depth);
        m_active.erase(key);
        return with_location(std::move(out), at);
    }

private:
    static Origin unknown()
    {
        return Origin{};
    }

    OriginSet with_location(OriginSet set, StmtRef at) const
    {
        const auto loc = m_model.location(at);
        OriginSet out;
        for (auto& o : set) {
            if (o.trace.empty() || o.trace.front() != loc) {
                o.trace.insert(o.trace.begin(), loc);
            }
            if (std::none_of(out.begin(), out.end(), [&](const Origin& x) { return x.same_fact(o); })) {
                out.push_back(std::move(o));
            }
        }
        if (out.empty()) {
            out.push_back(unknown());
            out.back().trace.push_back(loc);
        }
        return out;
    }

    static void append(OriginSet& into, OriginSet from)
    {
        for (auto& o : from) {
            into.push_back(std::move(o));
        }
    }

    OriginSet eval_inner(StmtRef at, const NodePtr& expr, int depth)
    {
        const auto& entry = m_model.method(at.method);
        const auto& flow = *entry.flow;
        const Node& n = *expr;
        switch (n.kind) {
            case NodeKind::StringLit: {
                Origin o;
                o.kind = OriginKind::StringLiteral;
                o.value = string_literal_value(n.text);
                return {o};
            }
            case NodeKind::IntLit: {
                Origin o;
                o.kind = OriginKind::IntLiteral;
                o.value = n.text;
                return {o};
            }
            case NodeKind::NameRef:
            case NodeKind::FieldAccess: {
                if (const auto* owner = static_field_owner(m_model, flow, n)) {
                    OriginSet out;
                    for (const auto& w : m_model.field_writers(owner->name, n.children[1]->text)) {
                        append(out, eval_def(w, n.children[1]->text, depth));
                    }
                    return out;
                }
                const auto key = flow.key_of(n);
                if (key.empty()) {
                    return {unknown()};
                }
                return eval_var(at, key, depth);
            }
            case NodeKind::Cast:
                return eval(at, n.children[1], depth);
            case NodeKind::ArrayCreation: {
                OriginSet out;
                for (auto& size : eval(at, n.children[1], depth)) {
                    if (size.kind != OriginKind::IntLiteral) {
                        out.push_back(unknown());
                        continue;
                    }
                    Origin o;
                    o.kind = OriginKind::ArrayOfLength;
                    o.length = std::stoll(size.value);
                    o.trace = size.trace;
                    out.push_back(std::move(o));
                }
                return out;
            }
            case NodeKind::ObjectCreation:
                if (n.children[0]->text == "String" && call_args(n).size() == 1) {
                    return eval(at, call_args(n)[0], depth);
                }
                return {unknown()};
            case NodeKind::MethodCall:
                return eval_call(at, expr, depth);
            default:
                return {unknown()};
        }
    }

    OriginSet eval_call(StmtRef at, const NodePtr& expr, int depth)
    {
        const Node& n = *expr;
        const auto args = call_args(n);
        const auto& name = call_name(n);
        if (n.qualified) {
            const auto& receiver = *call_receiver(n);
            if (args.empty() && (name == "getBytes" || name == "toCharArray")) {
                return eval(at, call_receiver(n), depth);
            }
            if (receiver.kind == NodeKind::NameRef && receiver.text == "String" && name == "valueOf" &&
                args.size() == 1) {
                return eval(at, args[0], depth);
            }
            if (receiver.kind == NodeKind::NameRef && receiver.text == "Arrays" && name == "copyOf" &&
                args.size() == 2) {
                return eval(at, args[0], depth);
            }
        }
        const auto* site = m_graph.site_of(&n);
        const ApiBinding* api = site ? site->api : m_model.method(at.method).flow->resolve_call(n).api;
        if (api != nullptr && api->random) {
            Origin o;
            o.kind = OriginKind::RandomSource;
            o.value = api->binding;
            return {o};
        }
        if (site == nullptr || site->callee < 0) {
            return {unknown()};
        }
        const auto& callee_flow = *m_model.method(site->callee).flow;
        OriginSet out;
        for (int r : return_stmts(callee_flow)) {
            append(out, eval({site->callee, r}, callee_flow.stmts()[static_cast<std::size_t>(r)].node->children[0],
                             depth + 1));
        }
        return out;
    }

    OriginSet eval_var(StmtRef at, const std::string& key, int depth)
    {
        const auto& entry = m_model.method(at.method);
        const auto& flow = *entry.flow;
        const auto defs = flow.reaching(at.stmt, key);
        if (defs.empty()) {
            return {unknown()};
        }
        OriginSet out;
        for (int d : defs) {
            if (d >= 0) {
                append(out, eval_def({at.method, d}, key, depth));
            } else if (d == kFieldEntry) {
                const auto field = key.substr(5);
                for (const auto& w : m_model.field_writers(entry.cls->name, field)) {
                    append(out, eval_def(w, "this." + field, depth));
                }
            } else {
                const auto callers = m_graph.callers(at.method);
                if (callers.empty()) {
                    Origin o;
                    o.kind = OriginKind::ParameterOfEntry;
                    o.value = entry.method->params[static_cast<std::size_t>(param_of(d))].name;
                    out.push_back(o);
                    continue;
                }
                for (const auto* site : callers) {
                    auto args = call_args(*site->call);
                    if (static_cast<std::size_t>(param_of(d)) < args.size()) {
                        append(out, eval(site->at, args[static_cast<std::size_t>(param_of(d))], depth + 1));
                    }
                }
            }
        }
        return out;
    }

    // Origins of the value a definition statement gives `key`.
    OriginSet eval_def(StmtRef def, const std::string& key, int depth)
    {
        const auto& flow = *m_model.method(def.method).flow;
        if (flow.is_random_fill(def.stmt)) {
            const auto target = flow.defined_keys(def.stmt).front();
            const auto* api = flow.resolve_call(*flow.def_value(def.stmt)).api;
            OriginSet out;
            for (auto o : eval_var(def, target, depth)) {
                if (o.kind == OriginKind::ArrayOfLength) {
                    o.random_elements = true;
                } else {
                    o = Origin{};
                    o.kind = OriginKind::RandomSource;
                    o.value = api->binding;
                }
                out.push_back(std::move(o));
            }
            return with_location(std::move(out), def);
        }
        (void)key;
        const auto value = flow.def_value(def.stmt);
        if (!value) {
            return with_location({unknown()}, def);
        }
        return eval(def, value, depth);
    }

    const ProgramModel& m_model;
    const CallGraph& m_graph;
    int m_max_depth;
    std::set<std::tuple<int, int, const Node*>> m_active;
};

}  // namespace

Slice backward_slice(const ProgramModel& model, const CallGraph& graph, StmtRef seed,
                     const std::vector<NodePtr>& focus, int max_depth)
{
    return Slicer(model, graph, max_depth).run(seed, focus);
}

const char* origin_kind_name(OriginKind kind) noexcept
{
    switch (kind) {
        case OriginKind::StringLiteral:
            return "stringLiteral";
        case OriginKind::IntLiteral:
            return "intLiteral";
        case OriginKind::ArrayOfLength:
            return "arrayOfLength";
        case OriginKind::RandomSource:
            return "randomSource";
        case OriginKind::ParameterOfEntry:
            return "parameterOfEntry";
        case OriginKind::Unknown:
            return "unknown";
    }
    return "unknown";
}

std::string Origin::describe() const
{
    switch (kind) {
        case OriginKind::StringLiteral:
            return "stringLiteral(\"" + value + "\")";
        case OriginKind::IntLiteral:
            return "intLiteral(" + value + ")";
        case OriginKind::ArrayOfLength:
            return "arrayOfLength(" + std::to_string(length) + (random_elements ? ", random)" : ", zero)");
        case OriginKind::RandomSource:
            return "randomSource(" + value + ")";
        case OriginKind::ParameterOfEntry:
            return "parameterOfEntry(" + value + ")";
        case OriginKind::Unknown:
            return "unknown";
    }
    return "unknown";
}

bool Origin::same_fact(const Origin& other) const
{
    return kind == other.kind && value == other.value && length == other.length &&
           random_elements == other.random_elements;
}

OriginSet const_origin(const ProgramModel& model, const CallGraph& graph, StmtRef at, const NodePtr& expr,
                       int max_depth)
{
    return OriginEval(model, graph, max_depth).eval(at, expr, 0);
}

}  // namespace misuseforge

#include "misuseforge/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "misuseforge/diffing.hpp"

namespace misuseforge {

namespace {

bool iequals(const std::string& a, const std::string& b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool weak_origin(const Origin& o)
{
    return o.kind == OriginKind::Unknown || o.kind == OriginKind::ParameterOfEntry;
}

bool any_weak(const OriginSet& set)
{
    return std::any_of(set.begin(), set.end(), weak_origin);
}

void bind_var(NameMap& bindings, const std::string& abstract, const std::string& concrete)
{
    if (is_abstract_var(abstract) && !lookup(bindings, abstract)) {
        bindings.emplace_back(abstract, concrete);
    }
}

std::vector<std::string> abstract_vars(const std::vector<NodePtr>& stmts)
{
    std::vector<std::string> out;
    for (const auto& s : stmts) {
        visit_preorder(s, [&](const NodePtr& n) {
            if ((n->kind == NodeKind::NameRef || n->kind == NodeKind::Ident) && is_abstract_var(n->text) &&
                std::find(out.begin(), out.end(), n->text) == out.end()) {
                out.push_back(n->text);
            }
        });
    }
    return out;
}

// Binds abstract names of `tmpl` to the concrete names they line up with in `concrete`.
void align_statement(const Node& tmpl, const Node& concrete, NameMap& bindings)
{
    const auto t = normalize_matching(tmpl);
    const auto c = normalize_matching(concrete);
    for (const auto& [name, norm] : t.var_map) {
        for (const auto& [cname, cnorm] : c.var_map) {
            if (cnorm == norm) {
                bind_var(bindings, name, cname);
            }
        }
    }
}

void align_expr(const Node& tmpl, const Node& concrete, NameMap& bindings)
{
    if (tmpl.kind == NodeKind::NameRef) {
        bind_var(bindings, tmpl.text, pretty_print(concrete));
        return;
    }
    if (tmpl.kind != concrete.kind || tmpl.children.size() != concrete.children.size()) {
        return;
    }
    for (std::size_t i = 0; i < tmpl.children.size(); ++i) {
        align_expr(*tmpl.children[i], *concrete.children[i], bindings);
    }
}

bool similar_enough(const Node& a, const Node& b)
{
    return similarity_score(normalize_matching(a).text, normalize_matching(b).text).meets_threshold();
}

// Template variables the site gives no evidence for stay bound to themselves.
void complete_bindings(NameMap& bindings, const std::vector<std::string>& vars)
{
    for (const auto& v : vars) {
        if (!lookup(bindings, v)) {
            bindings.emplace_back(v, v);
        }
    }
    std::sort(bindings.begin(), bindings.end(), [](const auto& a, const auto& b) {
        return std::stoi(a.first.substr(3)) < std::stoi(b.first.substr(3));
    });
}

NodePtr find_template_call(const NodePtr& stmt, const BindingShape& shape)
{
    NodePtr found;
    visit_preorder(stmt, [&](const NodePtr& n) {
        if (found || !is_call(*n) || call_args(*n).size() != shape.arity) {
            return;
        }
        if (n->kind == NodeKind::ObjectCreation ? n->children[0]->text == shape.simple_class
                                                : call_name(*n) == shape.method) {
            found = n;
        }
    });
    return found;
}

std::string origin_value(const Origin& o)
{
    switch (o.kind) {
        case OriginKind::StringLiteral:
        case OriginKind::IntLiteral:
        case OriginKind::RandomSource:
        case OriginKind::ParameterOfEntry:
            return o.value;
        case OriginKind::ArrayOfLength:
            return std::to_string(o.length);
        case OriginKind::Unknown:
            return {};
    }
    return {};
}

Evidence evidence_of(int arg, const char* constraint, const Origin& o)
{
    return Evidence{arg, constraint, o.describe(), origin_value(o), o.trace};
}

struct Prepared {
    std::vector<NodePtr> statements;
    std::vector<std::string> vars;
};

Prepared prepare(const Pattern& pattern)
{
    Prepared p;
    p.statements = parse_snippet(pattern.template_text).method.body;
    p.vars = abstract_vars(p.statements);
    return p;
}

MatchOutcome no_match(NoMatchReason reason)
{
    return MatchOutcome{std::nullopt, reason};
}

MatchOutcome match_invocation(const ProgramModel& model, const CallGraph& graph, const Pattern& pattern,
                              const Prepared& prepared, const Site& site, const ScanOptions& options)
{
    const auto& flow = *model.method(site.at.method).flow;
    MatchResult result;
    result.pattern_id = pattern.id;
    result.binding = pattern.critical.binding;
    result.site = site;

    const auto full = backward_slice(model, graph, site.at, {site.call}, options.max_depth);
    std::vector<std::string> present;
    for (const auto& s : graph.sites()) {
        if (s.api != nullptr && full.statements.count(s.at)) {
            present.push_back(s.api->binding);
        }
    }
    for (const auto& anchor : pattern.anchors) {
        if (std::find(present.begin(), present.end(), anchor) == present.end()) {
            return no_match(NoMatchReason::MissingAnchor);
        }
    }

    const auto shape = binding_shape(pattern.critical.binding);
    NodePtr tmpl_stmt;
    NodePtr tmpl_call;
    if (pattern.template_critical >= 0 &&
        static_cast<std::size_t>(pattern.template_critical) < prepared.statements.size()) {
        tmpl_stmt = prepared.statements[static_cast<std::size_t>(pattern.template_critical)];
        tmpl_call = find_template_call(tmpl_stmt, shape);
    }

    const auto args = call_args(*site.call);
    if (pattern.critical.form == ApiForm::Invocation) {
        for (std::size_t k = 0; k < args.size(); ++k) {
            const int arg = static_cast<int>(k);
            auto directive = std::find_if(pattern.edl.begin(), pattern.edl.end(),
                                          [&](const EdlDirective& d) { return d.arg_index == arg; });
            std::vector<const DataflowEdge*> edges;
            for (const auto& e : pattern.dataflow) {
                if (e.arg_index == arg) {
                    edges.push_back(&e);
                }
            }
            if (directive == pattern.edl.end() && edges.empty()) {
                continue;
            }
            if (directive != pattern.edl.end()) {
                const auto origins = const_origin(model, graph, site.at, args[k], options.max_depth);
                const Origin* hit = nullptr;
                bool secure_seen = false;
                for (const auto& o : origins) {
                    switch (directive->kind) {
                        case EdlKind::ConstantPlaceholder:
                            if (o.is_constant()) {
                                hit = hit ? hit : &o;
                            }
                            secure_seen = secure_seen || o.kind == OriginKind::RandomSource ||
                                          (o.kind == OriginKind::ArrayOfLength && o.random_elements);
                            break;
                        case EdlKind::OptionSet:
                            if (o.kind == OriginKind::StringLiteral) {
                                const bool insecure =
                                    std::any_of(directive->insecure.begin(), directive->insecure.end(),
                                                [&](const std::string& s) { return iequals(s, o.value); });
                                if (insecure) {
                                    hit = hit ? hit : &o;
                                } else {
                                    secure_seen = true;
                                }
                            }
                            break;
                        case EdlKind::ValueRange: {
                            long long value = 0;
                            bool relevant = false;
                            if (directive->dimension == RangeDimension::ArgValue && o.kind == OriginKind::IntLiteral) {
                                value = std::stoll(o.value);
                                relevant = true;
                            } else if (directive->dimension == RangeDimension::ArrayLength &&
                                       o.kind == OriginKind::ArrayOfLength) {
                                value = o.length;
                                relevant = true;
                            }
                            if (relevant && value < directive->min) {
                                hit = hit ? hit : &o;
                            } else if (relevant) {
                                secure_seen = true;
                            }
                            break;
                        }
                    }
                }
                if (hit == nullptr) {
                    return no_match(secure_seen ? NoMatchReason::ValueSecure : NoMatchReason::DependencyMismatch);
                }
                result.evidence.push_back(evidence_of(arg, edl_kind_name(directive->kind), *hit));
                result.low_confidence = result.low_confidence || any_weak(origins);
                continue;
            }
            const DataflowEdge* literal = nullptr;
            for (const auto* e : edges) {
                if (e->source.rfind("literal:", 0) == 0) {
                    literal = e;
                }
            }
            if (literal != nullptr) {
                const auto text = literal->source.substr(8);
                const bool is_string = !text.empty() && text.front() == '"';
                const auto wanted = is_string ? string_literal_value(text) : text;
                const auto origins = const_origin(model, graph, site.at, args[k], options.max_depth);
                auto it = std::find_if(origins.begin(), origins.end(), [&](const Origin& o) {
                    return o.value == wanted &&
                           o.kind == (is_string ? OriginKind::StringLiteral : OriginKind::IntLiteral);
                });
                if (it == origins.end()) {
                    return no_match(NoMatchReason::DependencyMismatch);
                }
                result.evidence.push_back(evidence_of(arg, "literal", *it));
                result.low_confidence = result.low_confidence || any_weak(origins);
                continue;
            }
            const auto arg_slice = backward_slice(model, graph, site.at, {args[k]}, options.max_depth);
            for (const auto* e : edges) {
                if (e->source.rfind("stmt:", 0) != 0) {
                    continue;
                }
                const auto t = static_cast<std::size_t>(std::stoi(e->source.substr(5)));
                if (t >= prepared.statements.size()) {
                    return no_match(NoMatchReason::DependencyMismatch);
                }
                const auto& tmpl = *prepared.statements[t];
                std::optional<StmtRef> matched;
                for (const auto& ref : arg_slice.statements) {
                    if (ref == site.at) {
                        continue;
                    }
                    const auto& node = *model.method(ref.method).flow->stmts()[static_cast<std::size_t>(ref.stmt)].node;
                    if (similar_enough(tmpl, node)) {
                        matched = ref;
                        align_statement(tmpl, node, result.bindings);
                        break;
                    }
                }
                if (!matched) {
                    return no_match(NoMatchReason::DependencyMismatch);
                }
                const auto& node = *model.method(matched->method).flow->stmts()[static_cast<std::size_t>(matched->stmt)].node;
                result.evidence.push_back(
                    Evidence{arg, "structural", "statement", pretty_print(node), {model.location(*matched)}});
            }
        }
    }


    if (tmpl_call) {
        auto targs = call_args(*tmpl_call);
        if (tmpl_call->kind == NodeKind::MethodCall && tmpl_call->qualified && site.call->qualified) {
            const auto& receiver = *call_receiver(*tmpl_call);
            if (receiver.kind == NodeKind::NameRef) {
                bind_var(result.bindings, receiver.text, pretty_print(*call_receiver(*site.call)));
            }
        }
        for (std::size_t k = 0; k < targs.size() && k < args.size(); ++k) {
            const int arg = static_cast<int>(k);
            if (std::any_of(pattern.edl.begin(), pattern.edl.end(),
                            [&](const EdlDirective& d) { return d.arg_index == arg; })) {
                visit_preorder(targs[k], [&](const NodePtr& n) {
                    if (n->kind == NodeKind::NameRef) {
                        bind_var(result.bindings, n->text, pretty_print(*args[k]));
                    }
                });
            }
            align_expr(*targs[k], *args[k], result.bindings);
        }
        const auto& site_stmt = *flow.stmts()[static_cast<std::size_t>(site.at.stmt)].node;
        std::string result_var;
        if (tmpl_stmt->kind == NodeKind::LocalDecl) {
            result_var = tmpl_stmt->children[1]->text;
        } else if (tmpl_stmt->kind == NodeKind::Assign && tmpl_stmt->children[0]->kind == NodeKind::NameRef) {
            result_var = tmpl_stmt->children[0]->text;
        }
        if (!result_var.empty()) {
            if (site_stmt.kind == NodeKind::LocalDecl) {
                bind_var(result.bindings, result_var, site_stmt.children[1]->text);
            } else if (site_stmt.kind == NodeKind::Assign) {
                bind_var(result.bindings, result_var, pretty_print(*site_stmt.children[0]));
            }
        }
    }
    complete_bindings(result.bindings, prepared.vars);
    return MatchOutcome{std::move(result), NoMatchReason::None};
}

}  // namespace

const char* no_match_reason_name(NoMatchReason reason) noexcept
{
    switch (reason) {
        case NoMatchReason::None:
            return "none";
        case NoMatchReason::NoCriticalApi:
            return "noCriticalApi";
        case NoMatchReason::MissingAnchor:
            return "missingAnchor";
        case NoMatchReason::DependencyMismatch:
            return "dependencyMismatch";
        case NoMatchReason::ValueSecure:
            return "valueSecure";
    }
    return "none";
}

BindingShape binding_shape(const std::string& binding)
{
    BindingShape shape;
    const auto open = binding.find('(');
    const auto head = binding.substr(0, open);
    const auto dot = head.rfind('.');
    shape.method = head.substr(dot == std::string::npos ? 0 : dot + 1);
    const auto cls = dot == std::string::npos ? std::string() : head.substr(0, dot);
    const auto cdot = cls.rfind('.');
    shape.simple_class = cls.substr(cdot == std::string::npos ? 0 : cdot + 1);
    if (open != std::string::npos) {
        const auto params = binding.substr(open + 1, binding.find(')', open) - open - 1);
        if (params.find_first_not_of(' ') != std::string::npos) {
            shape.arity = static_cast<std::size_t>(std::count(params.begin(), params.end(), ',')) + 1;
        }
    }
    return shape;
}

std::vector<Site> find_critical_sites(const ProgramModel& model, const CallGraph& graph, const Pattern& pattern)
{
    std::vector<Site> out;
    if (pattern.critical.form == ApiForm::Override) {
        const auto shape = binding_shape(pattern.critical.binding);
        for (const auto& entry : model.methods()) {
            if (entry.field_init || entry.method->name != shape.method ||
                entry.method->params.size() != shape.arity) {
                continue;
            }
            const auto& supers = entry.cls->super_types;
            if (std::find(supers.begin(), supers.end(), shape.simple_class) == supers.end()) {
                continue;
            }
            out.push_back(Site{{entry.id, -1}, nullptr, ApiForm::Override, entry.file, entry.method->span.line,
                               format_method(*entry.method, 0, true)});
        }
        return out;
    }
    for (const auto& s : graph.sites()) {
        if (s.api != nullptr && s.api->binding == pattern.critical.binding) {
            const auto& flow = *model.method(s.at.method).flow;
            out.push_back(Site{s.at, s.call, pattern.critical.form, model.method(s.at.method).file, s.call->span.line,
                               pretty_print(*flow.stmts()[static_cast<std::size_t>(s.at.stmt)].node)});
        }
    }
    return out;
}

std::optional<NameMap> match_override(const MethodDecl& method, const Pattern& pattern)
{
    const auto prepared = prepare(pattern);
    if (prepared.statements.size() != method.body.size()) {
        return std::nullopt;
    }
    NameMap bindings;
    for (std::size_t p = 0; p < method.params.size(); ++p) {
        bind_var(bindings, "$v_" + std::to_string(p), method.params[p].name);
    }
    for (std::size_t i = 0; i < method.body.size(); ++i) {
        if (!similar_enough(*prepared.statements[i], *method.body[i])) {
            return std::nullopt;
        }
        align_statement(*prepared.statements[i], *method.body[i], bindings);
    }
    complete_bindings(bindings, prepared.vars);
    return bindings;
}

MatchOutcome match_site(const ProgramModel& model, const CallGraph& graph, const Pattern& pattern, const Site& site,
                        const ScanOptions& options)
{
    if (site.form == ApiForm::Override) {
        const auto& entry = model.method(site.at.method);
        auto bindings = match_override(*entry.method, pattern);
        if (!bindings) {
            return no_match(NoMatchReason::DependencyMismatch);
        }
        MatchResult result;
        result.pattern_id = pattern.id;
        result.binding = pattern.critical.binding;
        result.site = site;
        result.bindings = std::move(*bindings);
        result.evidence.push_back(Evidence{-1, "override", "methodBody", entry.cls->name + "." + entry.method->name,
                                           {site.file + ":" + std::to_string(site.line)}});
        return MatchOutcome{std::move(result), NoMatchReason::None};
    }
    if (!site.call) {
        return no_match(NoMatchReason::NoCriticalApi);
    }
    if (site.form == ApiForm::DeletedCall) {
        MatchResult result;
        result.pattern_id = pattern.id;
        result.binding = pattern.critical.binding;
        result.site = site;
        result.evidence.push_back(Evidence{-1, "deletedCall", "invocation", site.text, {site.file + ":" + std::to_string(site.line)}});
        return MatchOutcome{std::move(result), NoMatchReason::None};
    }
    return match_invocation(model, graph, pattern, prepare(pattern), site, options);
}

std::vector<MatchResult> scan(const ProgramModel& model, const CallGraph& graph, const std::vector<Pattern>& patterns,
                              const ScanOptions& options)
{
    struct Work {
        const Pattern* pattern;
        const Prepared* prepared;
        Site site;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(patterns.size());
    for (const auto& p : patterns) {
        prepared.push_back(prepare(p));
    }
    std::vector<Work> work;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        for (auto& site : find_critical_sites(model, graph, patterns[i])) {
            work.push_back(Work{&patterns[i], &prepared[i], std::move(site)});
        }
    }
    std::vector<std::optional<MatchResult>> results(work.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            const auto& w = work[i];
            MatchOutcome outcome = w.site.form != ApiForm::Invocation
                                       ? match_site(model, graph, *w.pattern, w.site, options)
                                       : match_invocation(model, graph, *w.pattern, *w.prepared, w.site, options);
            results[i] = std::move(outcome.match);
        }
    };
    unsigned jobs = options.jobs > 0 ? static_cast<unsigned>(options.jobs) : std::thread::hardware_concurrency();
    jobs = std::clamp<unsigned>(jobs, 1, std::max<unsigned>(1, static_cast<unsigned>(work.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    std::vector<MatchResult> out;
    for (auto& r : results) {
        if (r) {
            out.push_back(std::move(*r));
        }
    }
    std::sort(out.begin(), out.end(), [](const MatchResult& a, const MatchResult& b) {
        return std::tie(a.site.file, a.site.line, a.pattern_id) < std::tie(b.site.file, b.site.line, b.pattern_id);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const MatchResult& a, const MatchResult& b) {
                              return a.site.file == b.site.file && a.site.line == b.site.line &&
                                     a.pattern_id == b.pattern_id;
                          }),
              out.end());
    return out;
}

}  // namespace misuseforge

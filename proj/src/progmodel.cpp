#include "misuseforge/progmodel.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "misuseforge/error.hpp"

namespace misuseforge {

struct ProgramModel::Impl {
    Catalog catalog;
    std::vector<std::shared_ptr<const SourceUnit>> units;
    std::vector<std::unique_ptr<MethodDecl>> field_holders;
    std::vector<MethodEntry> methods;
    std::map<std::string, const ClassDecl*> classes;
    std::map<std::string, int> field_holder_of;
    std::map<std::tuple<std::string, std::string, std::size_t>, int> method_index;
    std::map<const MethodDecl*, int> by_decl;

    void index();
    TypeEnv type_env() const;
};

namespace {

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TypeEnv ProgramModel::Impl::type_env() const
{
    TypeEnv env;
    env.field_type = [this](const std::string& cls, const std::string& field) -> std::string {
        auto it = classes.find(cls);
        if (it == classes.end()) {
            return {};
        }
        for (const auto& f : it->second->fields) {
            if (f.name == field) {
                return f.type;
            }
        }
        return {};
    };
    env.return_type = [this](const std::string& cls, const std::string& method, std::size_t arity) -> std::string {
        auto it = method_index.find({cls, method, arity});
        if (it == method_index.end()) {
            return {};
        }
        const auto& m = *methods[static_cast<std::size_t>(it->second)].method;
        return m.is_constructor ? cls : m.return_type;
    };
    return env;
}

void ProgramModel::Impl::index()
{
    for (const auto& unit : units) {
        for (const auto& cls : unit->classes) {
            if (classes.count(cls.name)) {
                throw Error(ErrorKind::DuplicateClass, "class " + cls.name + " is declared more than once (again in " +
                                                           unit->file_id + ")",
                            cls.span.line, cls.span.column);
            }
            classes[cls.name] = &cls;
        }
    }
    auto add = [&](const std::string& file, const ClassDecl& cls, const MethodDecl& method, bool holder) {
        MethodEntry entry;
        entry.id = static_cast<int>(methods.size());
        entry.file = file;
        entry.cls = &cls;
        entry.method = &method;
        entry.field_init = holder;
        by_decl[&method] = entry.id;
        if (!holder) {
            method_index.emplace(std::make_tuple(cls.name, method.name, method.params.size()), entry.id);
        } else {
            field_holder_of[cls.name] = entry.id;
        }
        methods.push_back(std::move(entry));
    };
    for (const auto& unit : units) {
        for (const auto& cls : unit->classes) {
            auto holder = std::make_unique<MethodDecl>();
            holder->name = "<fields>";
            holder->span = cls.span;
            for (const auto& f : cls.fields) {
                if (!f.init) {
                    continue;
                }
                holder->body.push_back(make_node(NodeKind::LocalDecl, "",
                                                 {make_node(NodeKind::Type, f.type, {}, f.span),
                                                  make_node(NodeKind::Ident, f.name, {}, f.span), f.init},
                                                 f.span));
            }
            add(unit->file_id, cls, *holder, true);
            field_holders.push_back(std::move(holder));
            for (const auto& m : cls.methods) {
                add(unit->file_id, cls, m, false);
            }
        }
    }
    const auto env = type_env();
    for (auto& entry : methods) {
        entry.flow = std::make_unique<MethodFlow>(*entry.method, entry.cls->name, entry.cls->fields, &catalog, env);
    }
}

ProgramModel::ProgramModel(std::unique_ptr<Impl> impl) : m_impl(std::move(impl)) {}
ProgramModel::ProgramModel(ProgramModel&&) noexcept = default;
ProgramModel& ProgramModel::operator=(ProgramModel&&) noexcept = default;
ProgramModel::~ProgramModel() = default;

ProgramModel ProgramModel::from_units(std::vector<SourceUnit> units, const Catalog& catalog)
{
    auto impl = std::make_unique<Impl>();
    impl->catalog = catalog;
    std::sort(units.begin(), units.end(),
              [](const SourceUnit& a, const SourceUnit& b) { return a.file_id < b.file_id; });
    for (auto& u : units) {
        impl->units.push_back(std::make_shared<const SourceUnit>(std::move(u)));
    }
    impl->index();
    return ProgramModel(std::move(impl));
}

ProgramModel ProgramModel::load(const std::filesystem::path& root, const Catalog& catalog, const ModelConfig& config)
{
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) {
        throw Error(ErrorKind::Io, "not a directory: " + root.string());
    }
    std::vector<std::filesystem::path> files;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (!it->is_regular_file()) {
            continue;
        }
        const auto ext = it->path().extension().string();
        if (std::find(config.extensions.begin(), config.extensions.end(), ext) != config.extensions.end()) {
            files.push_back(it->path());
        }
    }
    if (ec) {
        throw Error(ErrorKind::Io, "cannot list " + root.string() + ": " + ec.message());
    }
    if (files.empty()) {
        throw Error(ErrorKind::NoSources, "no source files under " + root.string());
    }
    std::sort(files.begin(), files.end(), [&](const auto& a, const auto& b) {
        return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
    });

    std::vector<std::optional<SourceUnit>> parsed(files.size());
    std::vector<std::optional<Error>> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            const auto rel = files[i].lexically_relative(root).generic_string();
            try {
                parsed[i] = parse_unit(read_text(files[i]), rel);
            } catch (const Error& e) {
                errors[i] = Error(e.kind(), rel + ": " + e.what(), e.line(), e.column());
            }
        }
    };
    unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs) : std::thread::hardware_concurrency();
    jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(files.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    std::optional<Error> first;
    std::string all;
    for (const auto& e : errors) {
        if (e) {
            first = first ? first : e;
            all += (all.empty() ? "" : "\n") + std::string(e->what());
        }
    }
    if (first) {
        throw Error(first->kind(), all);
    }
    std::vector<SourceUnit> units;
    for (auto& u : parsed) {
        units.push_back(std::move(*u));
    }
    return from_units(std::move(units), catalog);
}

const Catalog& ProgramModel::catalog() const { return m_impl->catalog; }
const std::vector<std::shared_ptr<const SourceUnit>>& ProgramModel::units() const { return m_impl->units; }
const std::vector<MethodEntry>& ProgramModel::methods() const { return m_impl->methods; }
const MethodEntry& ProgramModel::method(int id) const { return m_impl->methods.at(static_cast<std::size_t>(id)); }

const ClassDecl* ProgramModel::find_class(const std::string& name) const
{
    auto it = m_impl->classes.find(name);
    return it == m_impl->classes.end() ? nullptr : it->second;
}

int ProgramModel::find_method(const std::string& cls, const std::string& name, std::size_t arity) const
{
    auto it = m_impl->method_index.find({cls, name, arity});
    return it == m_impl->method_index.end() ? -1 : it->second;
}

int ProgramModel::find_method(const MethodDecl* decl) const
{
    auto it = m_impl->by_decl.find(decl);
    return it == m_impl->by_decl.end() ? -1 : it->second;
}

std::vector<StmtRef> ProgramModel::field_writers(const std::string& cls, const std::string& field) const
{
    std::vector<StmtRef> out;
    auto holder = m_impl->field_holder_of.find(cls);
    if (holder == m_impl->field_holder_of.end()) {
        return out;
    }
    const auto& init_flow = *method(holder->second).flow;
    for (int i = 0; i < static_cast<int>(init_flow.stmts().size()); ++i) {
        if (init_flow.stmts()[i].node->children[1]->text == field) {
            out.push_back({holder->second, i});
        }
    }
    for (const auto& entry : m_impl->methods) {
        if (entry.field_init || entry.cls->name != cls) {
            continue;
        }
        for (int d : entry.flow->exit_defs("this." + field)) {
            if (d >= 0) {
                out.push_back({entry.id, d});
            }
        }
    }
    return out;
}

int ProgramModel::line_of(StmtRef ref) const
{
    return method(ref.method).flow->stmts().at(static_cast<std::size_t>(ref.stmt)).node->span.line;
}

std::string ProgramModel::location(StmtRef ref) const
{
    return method(ref.method).file + ":" + std::to_string(line_of(ref));
}

CallGraph CallGraph::build(const ProgramModel& model)
{
    CallGraph graph;
    for (const auto& entry : model.methods()) {
        const auto& flow = *entry.flow;
        for (int i = 0; i < static_cast<int>(flow.stmts().size()); ++i) {
            std::vector<NodePtr> exprs = flow.read_exprs(i);
            const auto& node = *flow.stmts()[i].node;
            if (node.kind == NodeKind::Assign && node.children[0]->kind == NodeKind::FieldAccess) {
                exprs.push_back(node.children[0]->children[0]);
            }
            for (const auto& expr : exprs) {
                visit_preorder(expr, [&](const NodePtr& n) {
                    if (!is_call(*n)) {
                        return;
                    }
                    auto info = flow.resolve_call(*n);
                    CallSite site;
                    site.at = {entry.id, i};
                    site.call = n;
                    site.receiver_type = info.receiver_type;
                    site.callee = model.find_method(info.receiver_type, info.method, info.arity);
                    site.api = site.callee < 0 ? info.api : nullptr;
                    graph.m_by_call[n.get()] = graph.m_sites.size();
                    graph.m_sites.push_back(std::move(site));
                });
            }
        }
    }
    return graph;
}

std::vector<const CallSite*> CallGraph::callers(int method) const
{
    std::vector<const CallSite*> out;
    for (const auto& s : m_sites) {
        if (s.callee == method) {
            out.push_back(&s);
        }
    }
    return out;
}

std::vector<const CallSite*> CallGraph::calls_from(int method) const
{
    std::vector<const CallSite*> out;
    for (const auto& s : m_sites) {
        if (s.at.method == method) {
            out.push_back(&s);
        }
    }
    return out;
}

const CallSite* CallGraph::site_of(const Node* call) const
{
    auto it = m_by_call.find(call);
    return it == m_by_call.end() ? nullptr : &m_sites[it->second];
}

}  // namespace misuseforge

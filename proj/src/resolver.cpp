#include "vl/resolver.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace vl {

const char* to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::Module: return "module";
        case SymbolKind::Package: return "package";
        case SymbolKind::Param: return "param";
        case SymbolKind::Const: return "const";
        case SymbolKind::Port: return "port";
        case SymbolKind::Var: return "var";
        case SymbolKind::Inst: return "instance";
        case SymbolKind::Function: return "function";
        case SymbolKind::GenericParam: return "generic parameter";
        case SymbolKind::FunctionArg: return "function argument";
    }
    return "symbol";
}

const TypeSpec* Symbol::type() const {
    return std::visit(Overloaded{
                          [](const ParamDecl* d) -> const TypeSpec* { return &d->type; },
                          [](const ConstDecl* d) -> const TypeSpec* { return &d->type; },
                          [](const PortDecl* d) -> const TypeSpec* { return &d->type; },
                          [](const VarDecl* d) -> const TypeSpec* { return &d->type; },
                          [](const FunctionArg* d) -> const TypeSpec* { return &d->type; },
                          [](const auto&) -> const TypeSpec* { return nullptr; },
                      },
                      decl);
}

std::optional<SymbolId> SymbolTable::find_local(ScopeId scope, const std::string& name) const {
    const auto& entries = scopes_.at(scope).entries;
    auto it = entries.find(name);
    if (it == entries.end())
        return std::nullopt;
    return it->second;
}

std::optional<ScopeId> SymbolTable::scope_of(const ModuleDecl& module) const {
    auto it = decl_scopes_.find(&module);
    return it == decl_scopes_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<ScopeId> SymbolTable::scope_of(const PackageDecl& package) const {
    auto it = decl_scopes_.find(&package);
    return it == decl_scopes_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<ScopeId> SymbolTable::scope_of(const FunctionDecl& function) const {
    auto it = decl_scopes_.find(&function);
    return it == decl_scopes_.end() ? std::nullopt : std::optional(it->second);
}

// ---------------------------------------------------------------------------
// Symbol construction

class SymbolBuilder {
public:
    SymbolBuilder(std::string project_name, const std::map<std::string, const SymbolTable*>& deps) {
        table_.project_name = std::move(project_name);
        table_.dependencies_ = deps;
        table_.scopes_.push_back(Scope{ScopeKind::Project, table_.project_name, std::nullopt, {}});
    }

    void add_file(const SourceFile& file) {
        for (const Item& item : file.items) {
            std::visit(Overloaded{[&](const ModuleDecl& m) { add_module(m); },
                                  [&](const PackageDecl& p) { add_package(p); }},
                       item);
        }
    }

    SymbolBuildResult finish() { return SymbolBuildResult{std::move(table_), std::move(diags_)}; }

private:
    std::optional<SymbolId> declare(ScopeId scope, std::string name, SymbolKind kind, Span span, SymbolDecl decl,
                                    bool is_pub = false) {
        auto& entries = table_.scopes_[scope].entries;
        if (auto it = entries.find(name); it != entries.end()) {
            const Symbol& first = table_.symbols_[it->second];
            diags_.push_back(Diagnostic::make("E0201", "duplicate identifier '" + name + "'", span, {first.decl_span}));
            return std::nullopt;
        }
        auto id = static_cast<SymbolId>(table_.symbols_.size());
        table_.symbols_.push_back(Symbol{name, kind, span, scope, std::nullopt, decl, is_pub});
        entries.emplace(std::move(name), id);
        return id;
    }

    ScopeId open_scope(SymbolId owner, ScopeKind kind, ScopeId parent, const void* decl) {
        auto id = static_cast<ScopeId>(table_.scopes_.size());
        table_.scopes_.push_back(Scope{kind, table_.symbols_[owner].name, parent, {}});
        table_.symbols_[owner].inner = id;
        table_.decl_scopes_[decl] = id;
        return id;
    }

    void add_module(const ModuleDecl& m) {
        auto id = declare(SymbolTable::kRoot, m.name, SymbolKind::Module, m.name_span, &m, m.is_pub);
        if (!id)
            return;
        table_.modules_.push_back(*id);
        ScopeId scope = open_scope(*id, ScopeKind::Module, SymbolTable::kRoot, &m);
        for (const GenericParam& g : m.generic_params)
            declare(scope, g.name, SymbolKind::GenericParam, g.span, &g);
        for (const ParamDecl& p : m.params)
            declare(scope, p.name, SymbolKind::Param, p.name_span, &p);
        for (const PortDecl& p : m.ports)
            declare(scope, p.name, SymbolKind::Port, p.name_span, &p);
        add_module_items(m.body, scope);
    }

    void add_module_items(const std::vector<ModuleItem>& items, ScopeId scope) {
        for (const ModuleItem& item : items) {
            std::visit(Overloaded{
                           [&](const VarDecl& v) { declare(scope, v.name, SymbolKind::Var, v.name_span, &v); },
                           [&](const ConstDecl& c) { declare(scope, c.name, SymbolKind::Const, c.name_span, &c); },
                           [&](const InstDecl& i) { declare(scope, i.name, SymbolKind::Inst, i.name_span, &i); },
                           [&](const FunctionDecl& f) { add_function(f, scope); },
                           [&](const UnsafeCdc& u) { add_module_items(u.items, scope); },
                           [](const auto&) {},
                       },
                       item.node);
        }
    }

    void add_function(const FunctionDecl& f, ScopeId parent) {
        auto id = declare(parent, f.name, SymbolKind::Function, f.name_span, &f);
        if (!id)
            return;
        ScopeId scope = open_scope(*id, ScopeKind::Function, parent, &f);
        for (const FunctionArg& a : f.args)
            declare(scope, a.name, SymbolKind::FunctionArg, a.name_span, &a);
    }

    void add_package(const PackageDecl& p) {
        auto id = declare(SymbolTable::kRoot, p.name, SymbolKind::Package, p.name_span, &p, p.is_pub);
        if (!id)
            return;
        table_.packages_.push_back(*id);
        ScopeId scope = open_scope(*id, ScopeKind::Package, SymbolTable::kRoot, &p);
        for (const PackageItem& item : p.items) {
            std::visit(Overloaded{
                           [&](const ConstDecl& c) { declare(scope, c.name, SymbolKind::Const, c.name_span, &c); },
                           [&](const FunctionDecl& f) { add_function(f, scope); },
                       },
                       item.node);
        }
    }

    SymbolTable table_;
    Diagnostics diags_;
};

SymbolBuildResult build_symbols(const SourceManager& sources, const std::vector<SourceFile>& files,
                                std::string project_name,
                                const std::map<std::string, const SymbolTable*>& dependency_namespaces) {
    std::vector<const SourceFile*> ordered;
    for (const SourceFile& f : files)
        ordered.push_back(&f);
    std::stable_sort(ordered.begin(), ordered.end(), [&](const SourceFile* a, const SourceFile* b) {
        return sources.path(a->file) < sources.path(b->file);
    });

    SymbolBuilder builder(std::move(project_name), dependency_namespaces);
    for (const SourceFile* f : ordered)
        builder.add_file(*f);
    return builder.finish();
}

// ---------------------------------------------------------------------------
// Path resolution

namespace {

bool compatible(SymbolKind kind, UseKind use) {
    switch (use) {
        case UseKind::Any: return true;
        case UseKind::Instance: return kind == SymbolKind::Module || kind == SymbolKind::GenericParam;
        case UseKind::Module: return kind == SymbolKind::Module;
        case UseKind::Function: return kind == SymbolKind::Function;
        case UseKind::Value:
            return kind == SymbolKind::Param || kind == SymbolKind::Const || kind == SymbolKind::Port ||
                   kind == SymbolKind::Var || kind == SymbolKind::FunctionArg;
    }
    return false;
}

const char* use_text(UseKind use) {
    switch (use) {
        case UseKind::Instance: return "a module to instantiate";
        case UseKind::Module: return "a module";
        case UseKind::Function: return "a function";
        case UseKind::Value: return "a value";
        case UseKind::Any: return "a symbol";
    }
    return "a symbol";
}

Resolution undefined(const PathName& path, Span span, const std::string& detail = {}) {
    std::string msg = "undefined identifier '" + join_path(path) + "'";
    if (!detail.empty())
        msg += " (" + detail + ")";
    return Resolution{std::nullopt, Diagnostic::make("E0202", msg, span)};
}

}  // namespace

Resolution resolve(const SymbolTable& table, const PathName& path, ScopeId scope, UseKind use, Span span) {
    if (path.empty())
        return undefined(path, span);

    // Innermost-first lookup of the first segment.
    const SymbolTable* owner = &table;
    std::optional<SymbolId> current;
    std::optional<ScopeId> cursor = scope;
    while (cursor) {
        if (auto hit = table.find_local(*cursor, path[0])) {
            current = hit;
            break;
        }
        cursor = table.scope(*cursor).parent;
    }

    ResolvedPath resolved;
    resolved.segments = path;
    std::size_t next = 1;

    if (!current) {
        auto dep = table.dependencies().find(path[0]);
        if (dep == table.dependencies().end() || path.size() < 2)
            return undefined(path, span);
        owner = dep->second;
        resolved.dependency = path[0];
        current = owner->find_local(SymbolTable::kRoot, path[1]);
        if (!current)
            return undefined(path, span, "not found in dependency '" + path[0] + "'");
        if (!owner->symbol(*current).is_pub)
            return undefined(path, span, "'" + path[1] + "' is not public in dependency '" + path[0] + "'");
        next = 2;
    }

    for (; next < path.size(); ++next) {
        const Symbol& outer = owner->symbol(*current);
        if (outer.kind != SymbolKind::Package || !outer.inner) {
            return Resolution{std::nullopt,
                              Diagnostic::make("E0203", "'" + outer.name + "' is a " + to_string(outer.kind) +
                                                            ", not a package",
                                               span)};
        }
        current = owner->find_local(*outer.inner, path[next]);
        if (!current)
            return undefined(path, span);
    }

    const Symbol& target = owner->symbol(*current);
    if (!compatible(target.kind, use)) {
        return Resolution{std::nullopt,
                          Diagnostic::make("E0203",
                                           "'" + join_path(path) + "' is a " + to_string(target.kind) +
                                               ", expected " + use_text(use),
                                           span, {target.decl_span})};
    }
    resolved.table = owner;
    resolved.target = *current;
    return Resolution{std::move(resolved), std::nullopt};
}

namespace {

class ReferenceChecker {
public:
    explicit ReferenceChecker(const SymbolTable& table) : table_(table) {}

    Diagnostics run(const std::vector<SourceFile>& files) {
        for (const SourceFile& f : files) {
            for (const Item& item : f.items) {
                if (const auto* m = std::get_if<ModuleDecl>(&item))
                    module(*m);
                else if (const auto* p = std::get_if<PackageDecl>(&item))
                    package(*p);
            }
        }
        return std::move(diags_);
    }

private:
    void check(const PathName& path, ScopeId scope, UseKind use, Span span) {
        Resolution r = resolve(table_, path, scope, use, span);
        if (r.error)
            diags_.push_back(std::move(*r.error));
    }

    void expr(const Expr& e, ScopeId scope) {
        for_each_expr(e, [&](const Expr& sub) {
            if (sub.kind == ExprKind::Path)
                check(sub.path, scope, UseKind::Value, sub.span);
            else if (sub.kind == ExprKind::Call)
                check(sub.path, scope, UseKind::Function, sub.span);
        });
    }

    void type(const TypeSpec& t, ScopeId scope) {
        for (const Expr& d : t.packed_dims)
            expr(d, scope);
        for (const Expr& d : t.unpacked_dims)
            expr(d, scope);
    }

    void block(const Block& b, ScopeId scope) {
        for (const Stmt& s : b.stmts)
            stmt(s, scope);
    }

    void stmt(const Stmt& s, ScopeId scope) {
        std::visit(Overloaded{
                       [&](const AssignStmt& a) {
                           expr(a.target, scope);
                           expr(a.value, scope);
                       },
                       [&](const IfStmt& i) {
                           if (!i.is_reset)
                               expr(i.condition, scope);
                           block(i.then_block, scope);
                           for (const ElseClause& e : i.else_clause) {
                               std::visit(Overloaded{[&](const Block& b) { block(b, scope); },
                                                     [&](const Stmt& nested) { stmt(nested, scope); }},
                                          e.body);
                           }
                       },
                       [&](const ReturnStmt& r) { expr(r.value, scope); },
                       [&](const Block& b) { block(b, scope); },
                   },
                   s.node);
    }

    void function(const FunctionDecl& f) {
        auto scope = table_.scope_of(f);
        if (!scope)
            return;
        for (const FunctionArg& a : f.args)
            type(a.type, *scope);
        type(f.return_type, *scope);
        block(f.body, *scope);
    }

    void module(const ModuleDecl& m) {
        auto scope = table_.scope_of(m);
        if (!scope)
            return;  // duplicate declaration
        for (const ParamDecl& p : m.params) {
            type(p.type, *scope);
            expr(p.value, *scope);
        }
        for (const PortDecl& p : m.ports)
            type(p.type, *scope);
        items(m.body, *scope);
    }

    void items(const std::vector<ModuleItem>& list, ScopeId scope) {
        for (const ModuleItem& item : list) {
            std::visit(Overloaded{
                           [&](const VarDecl& v) { type(v.type, scope); },
                           [&](const ConstDecl& c) {
                               type(c.type, scope);
                               expr(c.value, scope);
                           },
                           [&](const InstDecl& i) {
                               check(i.target, scope, UseKind::Instance, i.target_span);
                               for (const GenericArg& g : i.generic_args)
                                   check(g.path, scope, UseKind::Any, g.span);
                               for (const Connection& c : i.params)
                                   expr(c.value, scope);
                               for (const Connection& c : i.ports)
                                   expr(c.value, scope);
                           },
                           [&](const AssignDecl& a) {
                               expr(a.target, scope);
                               expr(a.value, scope);
                           },
                           [&](const AlwaysFf& a) {
                               for (const SensitivityName& n : a.sensitivity)
                                   check({n.name}, scope, UseKind::Value, n.span);
                               block(a.body, scope);
                           },
                           [&](const AlwaysComb& a) { block(a.body, scope); },
                           [&](const UnsafeCdc& u) { items(u.items, scope); },
                           [&](const FunctionDecl& f) { function(f); },
                       },
                       item.node);
        }
    }

    void package(const PackageDecl& p) {
        auto scope = table_.scope_of(p);
        if (!scope)
            return;
        for (const PackageItem& item : p.items) {
            std::visit(Overloaded{[&](const ConstDecl& c) {
                                      type(c.type, *scope);
                                      expr(c.value, *scope);
                                  },
                                  [&](const FunctionDecl& f) { function(f); }},
                       item.node);
        }
    }

    const SymbolTable& table_;
    Diagnostics diags_;
};

}  // namespace

Diagnostics check_references(const SymbolTable& table, const std::vector<SourceFile>& files) {
    return ReferenceChecker(table).run(files);
}

// ---------------------------------------------------------------------------
// Monomorphization

std::string mangle(const std::string& template_name, const std::vector<PathName>& args) {
    std::string out = template_name;
    for (const PathName& arg : args)
        out += "__" + join_path(arg, "_");
    return out;
}

const ConcreteModule* Design::find(const std::string& emitted_name) const {
    for (const ConcreteModule& m : modules)
        if (!m.is_template && m.name == emitted_name)
            return &m;
    return nullptr;
}

std::vector<GenericInstance> Design::instances() const {
    std::vector<GenericInstance> out;
    for (const ConcreteModule& m : modules)
        if (m.instance)
            out.push_back(*m.instance);
    std::sort(out.begin(), out.end(),
              [](const GenericInstance& a, const GenericInstance& b) { return a.mangled_name < b.mangled_name; });
    return out;
}

namespace {

using Bindings = std::map<std::string, std::pair<ModuleRef, PathName>>;

struct InstanceKey {
    ModuleRef templ;
    std::vector<ModuleRef> args;
    auto operator<=>(const InstanceKey&) const = default;
};

class Monomorphizer {
public:
    Design run(const std::vector<const SymbolTable*>& tables) {
        for (const SymbolTable* table : tables) {
            for (SymbolId id : table->modules()) {
                ModuleRef ref{table, id};
                const ModuleDecl& decl = ref.decl();
                ConcreteModule cm;
                cm.decl = decl;
                cm.name = decl.name;
                cm.source = &decl;
                cm.table = table;
                cm.scope = *table->scope_of(decl);
                cm.is_template = decl.is_generic();
                std::size_t index = design_.modules.size();
                design_.modules.push_back(std::move(cm));
                process(index, {});
            }
        }
        check_name_collisions();
        return std::move(design_);
    }

private:
    std::optional<ModuleRef> resolve_module(const PathName& path, Span span, std::size_t owner,
                                            const Bindings& bindings, bool report) {
        if (path.size() == 1) {
            if (auto it = bindings.find(path[0]); it != bindings.end())
                return it->second.first;
        }
        const ConcreteModule& cm = design_.modules[owner];
        Resolution r = resolve(*cm.table, path, cm.scope, UseKind::Any, span);
        if (!r.path)
            return std::nullopt;  // reported by check_references
        const Symbol& sym = r.path->symbol();
        if (sym.kind == SymbolKind::GenericParam)
            return std::nullopt;  // template view
        if (sym.kind != SymbolKind::Module) {
            if (report)
                error("E0205", "generic argument '" + join_path(path) + "' does not name a module", span,
                      {sym.decl_span});
            return std::nullopt;
        }
        return ModuleRef{r.path->table, r.path->target};
    }

    void error(std::string code, std::string message, Span span, std::vector<Span> related = {}) {
        design_.diagnostics.push_back(Diagnostic::make(std::move(code), std::move(message), span, std::move(related)));
    }

    void process(std::size_t index, const Bindings& bindings) {
        ModuleDecl decl = design_.modules[index].decl;
        std::map<std::string, std::string> children;
        rewrite_items(decl.body, index, bindings, children);
        design_.modules[index].decl = std::move(decl);
        design_.modules[index].children = std::move(children);
    }

    void rewrite_items(std::vector<ModuleItem>& items, std::size_t index, const Bindings& bindings,
                       std::map<std::string, std::string>& children) {
        for (ModuleItem& item : items) {
            if (auto* u = std::get_if<UnsafeCdc>(&item.node)) {
                rewrite_items(u->items, index, bindings, children);
                continue;
            }
            auto* inst = std::get_if<InstDecl>(&item.node);
            if (!inst)
                continue;
            if (auto name = rewrite_inst(*inst, index, bindings)) {
                children[inst->name] = *name;
                inst->target = {*name};
                inst->generic_args.clear();
            }
        }
    }

    // Returns the emitted name of the child module, if it is known.
    std::optional<std::string> rewrite_inst(const InstDecl& inst, std::size_t index, const Bindings& bindings) {
        auto target = resolve_module(inst.target, inst.target_span, index, bindings, false);
        if (!target)
            return std::nullopt;
        const ModuleDecl& child = target->decl();

        if (!child.is_generic()) {
            if (!inst.generic_args.empty()) {
                error("E0204",
                      "module '" + child.name + "' is not generic but " + std::to_string(inst.generic_args.size()) +
                          " generic argument(s) were given",
                      inst.target_span, {child.name_span});
                return std::nullopt;
            }
            return child.name;
        }

        if (inst.generic_args.size() != child.generic_params.size()) {
            error("E0204",
                  "generic module '" + child.name + "' expects " + std::to_string(child.generic_params.size()) +
                      " argument(s), found " + std::to_string(inst.generic_args.size()),
                  inst.target_span, {child.name_span});
            return std::nullopt;
        }

        InstanceKey key{*target, {}};
        Bindings child_bindings;
        std::vector<PathName> spelled;
        bool complete = true;
        for (std::size_t i = 0; i < inst.generic_args.size(); ++i) {
            const GenericArg& arg = inst.generic_args[i];
            auto ref = resolve_module(arg.path, arg.span, index, bindings, true);
            if (!ref) {
                complete = false;
                continue;
            }
            if (ref->decl().is_generic()) {
                error("E0205", "generic argument '" + join_path(arg.path) + "' names a generic module", arg.span,
                      {ref->decl().name_span});
                complete = false;
                continue;
            }
            PathName written = arg.path;
            if (arg.path.size() == 1) {
                if (auto it = bindings.find(arg.path[0]); it != bindings.end())
                    written = it->second.second;
            }
            key.args.push_back(*ref);
            spelled.push_back(written);
            child_bindings[child.generic_params[i].name] = {*ref, written};
        }
        if (!complete)
            return std::nullopt;

        if (auto it = instances_.find(key); it != instances_.end()) {
            if (in_progress_.count(key)) {
                error("E0206", "recursive generic instantiation of '" + child.name + "'", inst.target_span,
                      {child.name_span});
                return std::nullopt;
            }
            return design_.modules[it->second].name;
        }

        ConcreteModule cm;
        cm.decl = child;
        cm.name = mangle(child.name, spelled);
        cm.decl.name = cm.name;
        cm.decl.generic_params.clear();
        cm.source = &child;
        cm.table = target->table;
        cm.scope = *target->table->scope_of(child);
        GenericInstance info{child.name, {}, cm.name};
        for (const PathName& p : spelled)
            info.args.push_back(join_path(p));
        cm.instance = std::move(info);

        std::size_t child_index = design_.modules.size();
        std::string name = cm.name;
        design_.modules.push_back(std::move(cm));
        instances_[key] = child_index;
        in_progress_.insert(key);
        process(child_index, child_bindings);
        in_progress_.erase(key);
        return name;
    }

    void check_name_collisions() {
        std::map<std::string, const ConcreteModule*> seen;
        for (const ConcreteModule& m : design_.modules) {
            if (m.is_template)
                continue;
            auto [it, inserted] = seen.emplace(m.name, &m);
            if (!inserted) {
                const ConcreteModule& first = *it->second;
                Span span = m.instance ? m.source->name_span : m.decl.name_span;
                error("E0201", "emitted module name '" + m.name + "' is already in use", span,
                      {first.source->name_span});
            }
        }
    }

    Design design_;
    std::map<InstanceKey, std::size_t> instances_;
    std::set<InstanceKey> in_progress_;
};

}  // namespace

Design monomorphize(const std::vector<const SymbolTable*>& tables) { return Monomorphizer().run(tables); }

}  // namespace vl

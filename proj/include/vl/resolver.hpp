#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"

namespace vl {

enum class SymbolKind { Module, Package, Param, Const, Port, Var, Inst, Function, GenericParam, FunctionArg };

const char* to_string(SymbolKind kind);

using SymbolId = std::uint32_t;
using ScopeId = std::uint32_t;

using SymbolDecl = std::variant<std::monostate, const ModuleDecl*, const PackageDecl*, const ParamDecl*,
                                const ConstDecl*, const PortDecl*, const VarDecl*, const InstDecl*,
                                const FunctionDecl*, const GenericParam*, const FunctionArg*>;

struct Symbol {
    std::string name;
    SymbolKind kind = SymbolKind::Var;
    Span decl_span;
    ScopeId scope = 0;
    std::optional<ScopeId> inner;  // scope introduced by modules, packages and functions
    SymbolDecl decl;
    bool is_pub = false;

    const TypeSpec* type() const;
    template <class T>
    const T* as() const {
        auto p = std::get_if<const T*>(&decl);
        return p ? *p : nullptr;
    }
};

enum class ScopeKind { Project, Module, Package, Function };

struct Scope {
    ScopeKind kind = ScopeKind::Project;
    std::string name;
    std::optional<ScopeId> parent;
    std::map<std::string, SymbolId> entries;
};

// Declarations of one project. Holds pointers into the SourceFiles it was
// built from; those must outlive the table.
class SymbolTable {
public:
    std::string project_name;

    static constexpr ScopeId kRoot = 0;

    const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
    const Scope& scope(ScopeId id) const { return scopes_.at(id); }
    std::size_t symbol_count() const { return symbols_.size(); }

    std::optional<SymbolId> find_local(ScopeId scope, const std::string& name) const;

    // Module symbols in project scope, ordered by (file path, offset).
    const std::vector<SymbolId>& modules() const { return modules_; }
    const std::vector<SymbolId>& packages() const { return packages_; }

    std::optional<ScopeId> scope_of(const ModuleDecl& module) const;
    std::optional<ScopeId> scope_of(const PackageDecl& package) const;
    std::optional<ScopeId> scope_of(const FunctionDecl& function) const;

    const std::map<std::string, const SymbolTable*>& dependencies() const { return dependencies_; }

private:
    friend class SymbolBuilder;
    std::vector<Symbol> symbols_;
    std::vector<Scope> scopes_;
    std::vector<SymbolId> modules_;
    std::vector<SymbolId> packages_;
    std::map<const void*, ScopeId> decl_scopes_;
    std::map<std::string, const SymbolTable*> dependencies_;
};

struct SymbolBuildResult {
    SymbolTable table;
    Diagnostics diagnostics;
};

// Files are processed in path order, so permuting `files` never changes which
// of two duplicates wins.
SymbolBuildResult build_symbols(const SourceManager& sources, const std::vector<SourceFile>& files,
                                std::string project_name,
                                const std::map<std::string, const SymbolTable*>& dependency_namespaces);

enum class UseKind { Any, Instance, Value, Function, Module };

struct ResolvedPath {
    PathName segments;
    const SymbolTable* table = nullptr;  // owner of the target
    SymbolId target = 0;
    std::optional<std::string> dependency;  // set when rooted at a dependency namespace

    const Symbol& symbol() const { return table->symbol(target); }
};

struct Resolution {
    std::optional<ResolvedPath> path;
    std::optional<Diagnostic> error;  // E0202 or E0203
};

Resolution resolve(const SymbolTable& table, const PathName& path, ScopeId scope, UseKind use, Span span);

// Resolves every path in the project's files (expressions, instance targets,
// sensitivity names) and reports E0202/E0203.
Diagnostics check_references(const SymbolTable& table, const std::vector<SourceFile>& files);

// ---------------------------------------------------------------------------
// Monomorphization

struct ModuleRef {
    const SymbolTable* table = nullptr;
    SymbolId symbol = 0;

    const ModuleDecl& decl() const { return *table->symbol(symbol).as<ModuleDecl>(); }
    auto operator<=>(const ModuleRef& other) const {
        return std::tie(table, symbol) <=> std::tie(other.table, other.symbol);
    }
    bool operator==(const ModuleRef&) const = default;
};

struct GenericInstance {
    std::string template_name;
    std::vector<std::string> args;  // as written at the first instantiation site
    std::string mangled_name;
};

// A module ready for analysis/emission. Instance targets inside `decl` are
// rewritten to the emitted name of the child (single segment) when resolved.
struct ConcreteModule {
    ModuleDecl decl;
    std::string name;
    const ModuleDecl* source = nullptr;
    const SymbolTable* table = nullptr;
    ScopeId scope = 0;
    bool is_template = false;  // uninstantiated view of a generic module; never emitted
    std::optional<GenericInstance> instance;
    std::map<std::string, std::string> children;  // inst name -> emitted child module name
};

struct Design {
    std::vector<ConcreteModule> modules;
    Diagnostics diagnostics;

    const ConcreteModule* find(const std::string& emitted_name) const;
    std::vector<GenericInstance> instances() const;
};

// `tables` lists every project (root and dependencies). Non-generic modules
// are roots; each distinct (template, args) pair reachable from them yields
// one instance named Template__Arg1__Arg2.
Design monomorphize(const std::vector<const SymbolTable*>& tables);

std::string mangle(const std::string& template_name, const std::vector<PathName>& args);

}  // namespace vl

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"
#include "vl/emitter.hpp"
#include "vl/project.hpp"
#include "vl/resolver.hpp"
#include "vl/source.hpp"

namespace vl {

enum class OutputFormat { Human, Json };

struct Options {
    std::filesystem::path manifest = "vl.toml";
    bool offline = false;
    OutputFormat format = OutputFormat::Human;
    bool check = false;                       // fmt dry run
    std::optional<std::filesystem::path> out;  // overrides [build] target_dir
    std::optional<std::filesystem::path> cache_root;  // defaults to VL_CACHE_DIR
};

enum ExitCode { kExitOk = 0, kExitDiagnostics = 1, kExitFailure = 2 };

// `error[E0311]: msg`, location, source line and caret underline, then one
// excerpt per related span.
std::string render_human_diagnostic(const Diagnostic& d, const SourceManager& sources);

// Configuration and I/O failures map to exit code 2.
bool is_failure_code(const std::string& code);
int exit_code_for(const Diagnostics& diags);

// ---------------------------------------------------------------------------
// Pipeline

struct Unit {
    CompileUnit plan;
    std::filesystem::path src_dir;
    std::vector<std::filesystem::path> relative_paths;  // below src/, sorted
    std::vector<SourceFile> files;
    std::unique_ptr<SymbolTable> table;
};

struct Session {
    SourceManager sources;
    Diagnostics diagnostics;
    std::optional<Manifest> manifest;
    std::vector<std::unique_ptr<Unit>> units;  // build order, root last
    Design design;
    FetchStats fetches;
    bool front_end_errors = false;  // lex/parse/resolve errors
    bool failed = false;            // configuration or I/O failure

    Unit* root() { return units.empty() ? nullptr : units.back().get(); }
    std::filesystem::path target_dir(const Options& opts) const;
};

// Loads the manifest, resolves dependencies and runs the front end plus
// analysis over every unit. Writes vl.lock when resolution changed it.
std::unique_ptr<Session> load_session(const Options& opts);

// `.vl` files under `src_dir`, recursive, sorted by path.
std::vector<std::filesystem::path> discover_sources(const std::filesystem::path& src_dir);

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code.

int cmd_new(const std::string& name, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_check(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_build(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_fmt(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_doc(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_update(const Options& opts, std::ostream& out, std::ostream& err);

// Files written by `new NAME` (relative path, content).
std::vector<std::pair<std::string, std::string>> scaffold(const std::string& name);

// ---------------------------------------------------------------------------
// Single-source helpers for embedding.

struct TextResult {
    std::string text;  // formatted source or SystemVerilog
    Diagnostics diagnostics;
    SourceManager sources;
};

TextResult check_text(const std::string& source, const std::string& path = "input.vl");
TextResult format_text(const std::string& source, const std::string& path = "input.vl");
TextResult transpile_text(const std::string& source, const EmitConfig& cfg, const std::string& path = "input.vl");

}  // namespace vl

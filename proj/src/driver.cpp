#include "vl/driver.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "vl/analyzer.hpp"
#include "vl/docgen.hpp"
#include "vl/formatter.hpp"
#include "vl/lexer.hpp"
#include "vl/parser.hpp"

namespace fs = std::filesystem;

namespace vl {

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return std::nullopt;
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        return false;
    os << text;
    return static_cast<bool>(os);
}

Diagnostic io_error(const std::string& message) { return Diagnostic::make("EIO01", message, std::nullopt); }

void append(Diagnostics& to, const Diagnostics& from) { to.insert(to.end(), from.begin(), from.end()); }

void excerpt(std::string& out, const Span& span, const SourceManager& sources) {
    std::string line_no = std::to_string(span.line);
    std::string gutter(line_no.size(), ' ');
    out += gutter + "--> " + sources.path(span.file) + ":" + line_no + ":" + std::to_string(span.column) + "\n";
    std::string_view line = sources.line_text(span.file, span.line);
    out += gutter + " |\n";
    out += line_no + " | " + std::string(line) + "\n";
    // Keep tabs in the padding so the carets line up under the lexeme.
    std::string pad;
    for (std::uint32_t i = 0; i + 1 < span.column && i < line.size(); ++i)
        pad += line[i] == '\t' ? '\t' : ' ';
    std::size_t start = span.column - 1;
    std::size_t room = start < line.size() ? line.size() - start : 0;
    std::size_t width = std::max<std::size_t>(1, std::min<std::size_t>(span.length(), room));
    out += gutter + " | " + pad + std::string(width, '^') + "\n";
}

void print_diagnostics(Diagnostics& diags, const SourceManager& sources, const Options& opts, std::ostream& out,
                       std::ostream& err) {
    sort_diagnostics(diags);
    if (opts.format == OutputFormat::Json) {
        out << diagnostics_to_json(diags, sources) << "\n";
        return;
    }
    for (const Diagnostic& d : diags)
        err << render_human_diagnostic(d, sources) << "\n";
    std::size_t errors = std::count_if(diags.begin(), diags.end(),
                                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
    std::size_t warnings = diags.size() - errors;
    if (!diags.empty())
        err << errors << (errors == 1 ? " error" : " errors") << ", " << warnings
            << (warnings == 1 ? " warning" : " warnings") << " emitted\n";
}

std::string display_path(const fs::path& path) { return path.lexically_normal().generic_string(); }

std::string with_extension(const fs::path& rel, const std::string& ext) {
    fs::path p = rel;
    p.replace_extension(ext);
    return p.generic_string();
}

fs::path cache_root(const Options& opts) { return opts.cache_root ? *opts.cache_root : default_cache_root(); }

// Reads vl.lock next to the manifest. Absent is fine; malformed is E0401.
bool read_lock(const Manifest& m, std::optional<Lockfile>& lock, Diagnostics& diags) {
    fs::path path = m.root / "vl.lock";
    if (!fs::exists(path))
        return true;
    auto text = read_file(path);
    if (!text) {
        diags.push_back(io_error("cannot read " + display_path(path)));
        return false;
    }
    lock = parse_lockfile(*text, diags);
    return lock.has_value();
}

bool parse_sources(SourceManager& sources, Unit& unit, Diagnostics& diags) {
    if (!fs::is_directory(unit.src_dir)) {
        diags.push_back(io_error("source directory " + display_path(unit.src_dir) + " not found"));
        return false;
    }
    for (const fs::path& path : discover_sources(unit.src_dir)) {
        auto text = read_file(path);
        if (!text) {
            diags.push_back(io_error("cannot read " + display_path(path)));
            return false;
        }
        FileId id = sources.add(display_path(path), std::move(*text));
        ParseResult parsed = parse_file(sources, id);
        append(diags, parsed.diagnostics);
        unit.relative_paths.push_back(path.lexically_relative(unit.src_dir));
        unit.files.push_back(std::move(parsed.file));
    }
    return true;
}

std::string project_module_name(const std::string& name) {
    std::string out;
    bool upper = true;
    for (char c : name) {
        if (c == '_') {
            upper = true;
            continue;
        }
        out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
        upper = false;
    }
    return out.empty() ? "Top" : out;
}

}  // namespace

bool is_failure_code(const std::string& code) { return code.starts_with("E04") || code.starts_with("EIO"); }

int exit_code_for(const Diagnostics& diags) {
    bool errors = false;
    for (const Diagnostic& d : diags) {
        if (d.severity != Severity::Error)
            continue;
        if (is_failure_code(d.code))
            return kExitFailure;
        errors = true;
    }
    return errors ? kExitDiagnostics : kExitOk;
}

std::string render_human_diagnostic(const Diagnostic& d, const SourceManager& sources) {
    std::string out = std::string(to_string(d.severity)) + "[" + d.code + "]: " + d.message + "\n";
    if (d.span)
        excerpt(out, *d.span, sources);
    for (const Span& related : d.related) {
        out += "note: related location\n";
        excerpt(out, related, sources);
    }
    return out;
}

std::vector<fs::path> discover_sources(const fs::path& src_dir) {
    std::vector<fs::path> paths;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(src_dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".vl")
            paths.push_back(it->path());
    }
    std::sort(paths.begin(), paths.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    return paths;
}

fs::path Session::target_dir(const Options& opts) const {
    if (opts.out)
        return *opts.out;
    return manifest->root / manifest->target_dir;
}

std::unique_ptr<Session> load_session(const Options& opts) {
    auto s = std::make_unique<Session>();
    ManifestResult loaded = load_manifest(s->sources, opts.manifest);
    append(s->diagnostics, loaded.diagnostics);
    if (!loaded.manifest) {
        s->failed = true;
        return s;
    }
    s->manifest = std::move(loaded.manifest);
    const Manifest& root = *s->manifest;

    std::optional<Lockfile> lock;
    if (!read_lock(root, lock, s->diagnostics)) {
        s->failed = true;
        return s;
    }
    DependencyResolution res =
        resolve_dependencies(s->sources, root, lock, ResolveOptions{cache_root(opts), opts.offline});
    append(s->diagnostics, res.diagnostics);
    s->fetches = res.stats;
    if (has_errors(res.diagnostics)) {
        s->failed = true;
        return s;
    }
    std::string serialized = res.lock.serialize();
    if ((lock || !res.lock.entries.empty()) && (!lock || lock->serialize() != serialized)) {
        if (!write_file(root.root / "vl.lock", serialized)) {
            s->diagnostics.push_back(io_error("cannot write " + display_path(root.root / "vl.lock")));
            s->failed = true;
            return s;
        }
    }

    BuildPlan plan = build_plan(root, res.dependencies);
    append(s->diagnostics, plan.diagnostics);
    if (has_errors(plan.diagnostics)) {
        s->failed = true;
        return s;
    }

    std::map<std::string, const SymbolTable*> tables_by_name;
    std::vector<const SymbolTable*> tables;
    for (CompileUnit& cu : plan.units) {
        auto unit = std::make_unique<Unit>();
        unit->src_dir = cu.manifest.root / "src";
        unit->plan = std::move(cu);
        if (!parse_sources(s->sources, *unit, s->diagnostics)) {
            s->failed = true;
            return s;
        }
        std::map<std::string, const SymbolTable*> deps;
        for (const std::string& name : unit->plan.dependencies) {
            if (auto it = tables_by_name.find(name); it != tables_by_name.end())
                deps.emplace(name, it->second);
        }
        SymbolBuildResult built = build_symbols(s->sources, unit->files, unit->plan.name, deps);
        append(s->diagnostics, built.diagnostics);
        unit->table = std::make_unique<SymbolTable>(std::move(built.table));
        append(s->diagnostics, check_references(*unit->table, unit->files));
        tables_by_name.emplace(unit->plan.name, unit->table.get());
        tables.push_back(unit->table.get());
        s->units.push_back(std::move(unit));
    }

    if (has_errors(s->diagnostics)) {
        s->front_end_errors = true;
        return s;
    }
    s->design = monomorphize(tables);
    append(s->diagnostics, s->design.diagnostics);
    if (has_errors(s->design.diagnostics)) {
        s->front_end_errors = true;
        return s;
    }
    append(s->diagnostics, analyze(s->design, tables));
    return s;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> scaffold(const std::string& name) {
    std::string manifest = "[project]\n"
                           "name = \"" + name + "\"\n"
                           "version = \"0.1.0\"\n"
                           "\n"
                           "[build]\n"
                           "clock_type = \"posedge\"\n"
                           "reset_type = \"async_low\"\n"
                           "target_dir = \"target\"\n";
    TextResult main = format_text("pub module " + project_module_name(name) + " {}\n", "main.vl");
    return {{"vl.toml", manifest}, {"src/main.vl", main.text}};
}

int cmd_new(const std::string& name, const Options&, std::ostream&, std::ostream& err) {
    if (!is_identifier(name)) {
        err << "error: project name \"" << name << "\" is not a valid identifier\n";
        return kExitFailure;
    }
    fs::path dir = name;
    if (fs::exists(dir)) {
        err << "error: destination " << display_path(dir) << " already exists\n";
        return kExitFailure;
    }
    for (const auto& [rel, text] : scaffold(name)) {
        if (!write_file(dir / rel, text)) {
            err << "error: cannot write " << display_path(dir / rel) << "\n";
            return kExitFailure;
        }
    }
    err << "created project " << name << "\n";
    return kExitOk;
}

int cmd_check(const Options& opts, std::ostream& out, std::ostream& err) {
    auto s = load_session(opts);
    print_diagnostics(s->diagnostics, s->sources, opts, out, err);
    return s->failed ? kExitFailure : exit_code_for(s->diagnostics);
}

int cmd_build(const Options& opts, std::ostream& out, std::ostream& err) {
    auto s = load_session(opts);
    if (s->failed || has_errors(s->diagnostics)) {
        print_diagnostics(s->diagnostics, s->sources, opts, out, err);
        return s->failed ? kExitFailure : exit_code_for(s->diagnostics);
    }
    std::vector<EmittedFile> files;
    for (const auto& unit : s->units) {
        std::vector<EmitInput> inputs;
        for (std::size_t i = 0; i < unit->files.size(); ++i)
            inputs.push_back(EmitInput{&unit->files[i], with_extension(unit->relative_paths[i], ".sv")});
        std::string prefix = unit->plan.is_root ? "" : "deps/" + unit->plan.name + "/";
        for (EmittedFile& f : emit_files(inputs, s->design, *unit->table, unit->plan.manifest.build)) {
            f.path = prefix + f.path;
            files.push_back(std::move(f));
        }
    }
    files.push_back(EmittedFile{"name_map.json", name_map_json(s->design)});
    append(s->diagnostics, write_files(s->target_dir(opts), files));
    print_diagnostics(s->diagnostics, s->sources, opts, out, err);
    return exit_code_for(s->diagnostics);
}

int cmd_doc(const Options& opts, std::ostream& out, std::ostream& err) {
    auto s = load_session(opts);
    if (s->failed || s->front_end_errors) {
        print_diagnostics(s->diagnostics, s->sources, opts, out, err);
        return s->failed ? kExitFailure : exit_code_for(s->diagnostics);
    }
    std::vector<const SourceFile*> sources;
    for (const SourceFile& f : s->root()->files)
        sources.push_back(&f);
    DocExtraction docs = extract_docs(sources);
    append(s->diagnostics, docs.diagnostics);

    std::vector<EmittedFile> pages;
    for (const DocModel& m : docs.models) {
        pages.push_back(EmittedFile{"doc/" + m.name + ".md", render_markdown(m)});
        pages.push_back(EmittedFile{"doc/" + m.name + ".html", render_html(m, s->manifest->wavedrom_url)});
    }
    pages.push_back(EmittedFile{"doc/index.md", render_index_markdown(docs.models)});
    pages.push_back(EmittedFile{"doc/index.html", render_index_html(docs.models)});
    append(s->diagnostics, write_files(s->target_dir(opts), pages));
    print_diagnostics(s->diagnostics, s->sources, opts, out, err);
    return exit_code_for(s->diagnostics);
}

int cmd_fmt(const Options& opts, std::ostream& out, std::ostream& err) {
    SourceManager sources;
    ManifestResult loaded = load_manifest(sources, opts.manifest);
    Diagnostics diags = loaded.diagnostics;
    if (!loaded.manifest) {
        print_diagnostics(diags, sources, opts, out, err);
        return kExitFailure;
    }
    Unit unit;
    unit.src_dir = loaded.manifest->root / "src";
    if (!parse_sources(sources, unit, diags)) {
        print_diagnostics(diags, sources, opts, out, err);
        return kExitFailure;
    }
    bool changed = false;
    for (const SourceFile& file : unit.files) {
        const std::string& path = sources.path(file.file);
        bool broken = std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
            return d.severity == Severity::Error && d.span && d.span->file == file.file;
        });
        if (broken)
            continue;
        std::string text = format(file);
        if (text == sources.text(file.file))
            continue;
        changed = true;
        if (opts.check) {
            err << "would reformat " << path << "\n";
        }
        else if (!write_file(path, text)) {
            diags.push_back(io_error("cannot write " + path));
        }
    }
    print_diagnostics(diags, sources, opts, out, err);
    int code = exit_code_for(diags);
    if (code == kExitOk && opts.check && changed)
        code = kExitDiagnostics;
    return code;
}

int cmd_update(const Options& opts, std::ostream& out, std::ostream& err) {
    SourceManager sources;
    ManifestResult loaded = load_manifest(sources, opts.manifest);
    Diagnostics diags = loaded.diagnostics;
    if (!loaded.manifest) {
        print_diagnostics(diags, sources, opts, out, err);
        return kExitFailure;
    }
    DependencyResolution res =
        resolve_dependencies(sources, *loaded.manifest, std::nullopt, ResolveOptions{cache_root(opts), opts.offline});
    append(diags, res.diagnostics);
    if (!has_errors(res.diagnostics)) {
        fs::path path = loaded.manifest->root / "vl.lock";
        if (!write_file(path, res.lock.serialize()))
            diags.push_back(io_error("cannot write " + display_path(path)));
        else if (opts.format == OutputFormat::Human)
            err << "locked " << res.lock.entries.size()
                << (res.lock.entries.size() == 1 ? " dependency\n" : " dependencies\n");
    }
    print_diagnostics(diags, sources, opts, out, err);
    return exit_code_for(diags);
}

// ---------------------------------------------------------------------------

namespace {

struct SingleFile {
    std::vector<SourceFile> files;
    std::unique_ptr<SymbolTable> table;
    Design design;
};

SingleFile compile_single(TextResult& r, const std::string& source, const std::string& path) {
    SingleFile s;
    FileId id = r.sources.add(path, source);
    ParseResult parsed = parse_file(r.sources, id);
    append(r.diagnostics, parsed.diagnostics);
    s.files.push_back(std::move(parsed.file));
    SymbolBuildResult built = build_symbols(r.sources, s.files, "top", {});
    append(r.diagnostics, built.diagnostics);
    s.table = std::make_unique<SymbolTable>(std::move(built.table));
    append(r.diagnostics, check_references(*s.table, s.files));
    if (has_errors(r.diagnostics))
        return s;
    s.design = monomorphize({s.table.get()});
    append(r.diagnostics, s.design.diagnostics);
    if (!has_errors(s.design.diagnostics))
        append(r.diagnostics, analyze(s.design, {s.table.get()}));
    return s;
}

}  // namespace

TextResult check_text(const std::string& source, const std::string& path) {
    TextResult r;
    compile_single(r, source, path);
    sort_diagnostics(r.diagnostics);
    return r;
}

TextResult format_text(const std::string& source, const std::string& path) {
    TextResult r;
    FileId id = r.sources.add(path, source);
    ParseResult parsed = parse_file(r.sources, id);
    r.diagnostics = std::move(parsed.diagnostics);
    r.text = has_errors(r.diagnostics) ? source : format(parsed.file);
    return r;
}

TextResult transpile_text(const std::string& source, const EmitConfig& cfg, const std::string& path) {
    TextResult r;
    SingleFile s = compile_single(r, source, path);
    sort_diagnostics(r.diagnostics);
    if (has_errors(r.diagnostics))
        return r;
    for (EmittedFile& f : emit_files({EmitInput{&s.files[0], with_extension(path, ".sv")}}, s.design, *s.table, cfg))
        r.text += f.text;
    return r;
}

}  // namespace vl

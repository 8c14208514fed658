#include "vl/project.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "vl/lexer.hpp"

namespace vl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest

bool is_exact_version(std::string_view text) {
    int parts = 0;
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9')
            ++i;
        if (i == start)
            return false;
        ++parts;
        if (i == text.size())
            break;
        if (text[i] != '.')
            return false;
        ++i;
    }
    return parts == 3;
}

namespace {


// Reads a basic TOML string starting at text[pos] == '"'. On success returns
// the decoded value and leaves pos after the closing quote.
std::optional<std::string> read_string(std::string_view text, std::size_t& pos) {
    std::string out;
    ++pos;
    while (pos < text.size()) {
        char c = text[pos++];
        if (c == '"')
            return out;
        if (c == '\\') {
            if (pos >= text.size())
                return std::nullopt;
            char e = text[pos++];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: return std::nullopt;
            }
            continue;
        }
        out += c;
    }
    return std::nullopt;
}

bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

void skip_ws(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r'))
        ++pos;
}

bool rest_is_comment(std::string_view text, std::size_t pos) {
    skip_ws(text, pos);
    return pos >= text.size() || text[pos] == '#';
}

class ManifestParser {
public:
    ManifestParser(const SourceManager& sources, FileId file, fs::path root)
        : sources_(sources), file_(file), text_(sources.text(file)) {
        m_.root = std::move(root);
    }

    ManifestResult run() {
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            std::size_t end = text_.find('\n', pos);
            if (end == std::string_view::npos)
                end = text_.size();
            line(pos, end);
            if (end == text_.size())
                break;
            pos = end + 1;
        }
        finish();
        bool failed = has_errors(diags_);
        return ManifestResult{failed ? std::nullopt : std::optional<Manifest>(std::move(m_)), std::move(diags_)};
    }

private:
    Span span(std::size_t start, std::size_t end) const {
        return sources_.make_span(file_, static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(end));
    }

    void error(const char* code, std::string message, std::size_t start, std::size_t end) {
        diags_.push_back(Diagnostic::make(code, std::move(message), span(start, end)));
    }

    void line(std::size_t begin, std::size_t end) {
        std::string_view text = text_.substr(0, end);
        std::size_t pos = begin;
        skip_ws(text, pos);
        if (pos >= end || text[pos] == '#')
            return;

        if (text[pos] == '[') {
            std::size_t close = text.find(']', pos);
            if (close == std::string_view::npos || !rest_is_comment(text, close + 1)) {
                error("E0401", "malformed table header", pos, end);
                table_ = Table::Invalid;
                return;
            }
            std::string name(text.substr(pos + 1, close - pos - 1));
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (!seen_tables_.insert(name).second) {
                error("E0401", "table [" + name + "] appears more than once", pos, close + 1);
                table_ = Table::Invalid;
                return;
            }
            if (name == "project") {
                table_ = Table::Project;
                project_seen_ = true;
            }
            else if (name == "build")
                table_ = Table::Build;
            else if (name == "dependencies")
                table_ = Table::Dependencies;
            else {
                error("W0401", "unknown table [" + name + "]", pos, close + 1);
                table_ = Table::Unknown;
            }
            return;
        }

        std::size_t key_start = pos;
        std::string key;
        if (text[pos] == '"') {
            auto k = read_string(text, pos);
            if (!k) {
                error("E0401", "unterminated string", key_start, end);
                return;
            }
            key = *k;
        }
        else {
            while (pos < end && bare_key_char(text[pos]))
                key += text[pos++];
            if (key.empty()) {
                error("E0401", "expected a key or a table header", pos, end);
                return;
            }
        }
        std::size_t key_end = pos;
        skip_ws(text, pos);
        if (pos >= end || text[pos] != '=') {
            error("E0401", "expected '=' after key", key_start, end);
            return;
        }
        ++pos;
        skip_ws(text, pos);
        std::size_t value_start = pos;
        if (pos >= end || text[pos] != '"') {
            error("E0401", "values must be strings", value_start, end);
            return;
        }
        auto value = read_string(text, pos);
        if (!value) {
            error("E0401", "unterminated string", value_start, end);
            return;
        }
        std::size_t value_end = pos;
        if (!rest_is_comment(text, pos)) {
            error("E0401", "unexpected text after value", pos, end);
            return;
        }
        entry(key, *value, key_start, key_end, value_start, value_end);
    }

    void entry(const std::string& key, const std::string& value, std::size_t ks, std::size_t ke, std::size_t vs,
               std::size_t ve) {
        if (table_ == Table::None) {
            error("E0401", "key " + key + " is outside of any table", ks, ke);
            return;
        }
        if (table_ == Table::Unknown || table_ == Table::Invalid)
            return;
        std::string full = table_name() + "." + key;
        if (!seen_keys_.insert(full).second) {
            error("E0401", "duplicate key " + full, ks, ke);
            return;
        }
        switch (table_) {
            case Table::Project:
                if (key == "name") {
                    if (!is_identifier(value))
                        error("E0401", "project name \"" + value + "\" is not a valid identifier", vs, ve);
                    m_.name = value;
                }
                else if (key == "version") {
                    if (!is_exact_version(value))
                        error("E0401", "version \"" + value + "\" is not of the form X.Y.Z", vs, ve);
                    m_.version = value;
                }
                else
                    error("W0401", "unknown key " + full, ks, ke);
                break;
            case Table::Build:
                if (key == "clock_type") {
                    if (auto c = parse_clock_type(value))
                        m_.build.clock_type = *c;
                    else
                        error("E0402", "clock_type must be posedge or negedge, found \"" + value + "\"", vs, ve);
                }
                else if (key == "reset_type") {
                    if (auto r = parse_reset_type(value))
                        m_.build.reset_type = *r;
                    else
                        error("E0402",
                              "reset_type must be async_low, async_high, sync_low or sync_high, found \"" + value +
                                  "\"",
                              vs, ve);
                }
                else if (key == "target_dir") {
                    if (value.empty() || fs::path(value).is_absolute())
                        error("E0401", "target_dir must be a relative path", vs, ve);
                    m_.target_dir = value;
                }
                else if (key == "wavedrom_url")
                    m_.wavedrom_url = value;
                else
                    error("W0401", "unknown key " + full, ks, ke);
                break;
            case Table::Dependencies:
                if (!is_exact_version(value))
                    error("E0401", "dependency version \"" + value + "\" must be an exact X.Y.Z version", vs, ve);
                m_.dependencies.push_back(ManifestDependency{key, value, span(ks, ve)});
                break;
            default: break;
        }
    }

    std::string table_name() const {
        switch (table_) {
            case Table::Project: return "project";
            case Table::Build: return "build";
            case Table::Dependencies: return "dependencies";
            default: return "";
        }
    }

    void finish() {
        if (!project_seen_)
            diags_.push_back(Diagnostic::make("E0401", "missing [project] table", span(0, 0)));
        else {
            if (m_.name.empty())
                diags_.push_back(Diagnostic::make("E0401", "missing project.name", span(0, 0)));
            if (m_.version.empty())
                diags_.push_back(Diagnostic::make("E0401", "missing project.version", span(0, 0)));
        }
        std::sort(m_.dependencies.begin(), m_.dependencies.end(),
                  [](const ManifestDependency& a, const ManifestDependency& b) { return a.url < b.url; });
    }

    enum class Table { None, Project, Build, Dependencies, Unknown, Invalid };

    const SourceManager& sources_;
    FileId file_;
    std::string_view text_;
    Manifest m_;
    Diagnostics diags_;
    Table table_ = Table::None;
    bool project_seen_ = false;
    std::set<std::string> seen_tables_;
    std::set<std::string> seen_keys_;
};

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return std::nullopt;
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Diagnostic config_error(const char* code, std::string message, std::optional<Span> span = std::nullopt) {
    return Diagnostic{code, Severity::Error, std::move(message), span, {}};
}

}  // namespace

ManifestResult parse_manifest(const SourceManager& sources, FileId file, fs::path root) {
    return ManifestParser(sources, file, std::move(root)).run();
}

ManifestResult load_manifest(SourceManager& sources, const fs::path& path) {
    auto text = read_file(path);
    if (!text) {
        ManifestResult r;
        r.diagnostics.push_back(config_error("E0401", "cannot read manifest " + path.string()));
        return r;
    }
    FileId id = sources.add(path.string(), std::move(*text));
    fs::path root = path.parent_path();
    if (root.empty())
        root = ".";
    return parse_manifest(sources, id, root);
}

// ---------------------------------------------------------------------------
// Lockfile

const LockEntry* Lockfile::find(const std::string& url) const {
    for (const LockEntry& e : entries)
        if (e.url == url)
            return &e;
    return nullptr;
}

std::string Lockfile::serialize() const {
    std::vector<LockEntry> sorted = entries;
    std::sort(sorted.begin(), sorted.end(), [](const LockEntry& a, const LockEntry& b) { return a.url < b.url; });
    std::string out;
    for (const LockEntry& e : sorted)
        out += e.url + '\t' + e.version + '\t' + e.revision + '\t' + e.name + '\n';
    return out;
}

namespace {

bool is_revision(std::string_view s) {
    return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

}  // namespace

std::optional<Lockfile> parse_lockfile(std::string_view text, Diagnostics& diags) {
    Lockfile lock;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::size_t f = 0;
        while (true) {
            std::size_t tab = line.find('\t', f);
            fields.emplace_back(line.substr(f, tab == std::string_view::npos ? std::string_view::npos : tab - f));
            if (tab == std::string_view::npos)
                break;
            f = tab + 1;
        }
        if (fields.size() != 4 || !is_exact_version(fields[1]) || !is_revision(fields[2]) ||
            !is_identifier(fields[3])) {
            diags.push_back(config_error("E0401", "malformed vl.lock line " + std::to_string(line_no)));
            return std::nullopt;
        }
        lock.entries.push_back(LockEntry{fields[0], fields[1], fields[2], fields[3]});
    }
    std::sort(lock.entries.begin(), lock.entries.end(),
              [](const LockEntry& a, const LockEntry& b) { return a.url < b.url; });
    return lock;
}

// ---------------------------------------------------------------------------
// Dependency resolution

fs::path default_cache_root() {
    if (const char* env = std::getenv("VL_CACHE_DIR"); env && *env)
        return fs::path(env);
    if (const char* home = std::getenv("HOME"); home && *home)
        return fs::path(home) / ".cache" / "vl";
    return fs::temp_directory_path() / "vl-cache";
}

std::string url_key(std::string_view url) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char c : url) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::string tail(url);
    while (!tail.empty() && (tail.back() == '/'))
        tail.pop_back();
    if (auto slash = tail.find_last_of('/'); slash != std::string::npos)
        tail = tail.substr(slash + 1);
    if (tail.size() > 4 && tail.substr(tail.size() - 4) == ".git")
        tail.resize(tail.size() - 4);
    std::string clean;
    for (char c : tail)
        clean += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    if (clean.empty())
        clean = "dep";
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return clean + "-" + hex;
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

struct CommandResult {
    int status = -1;
    std::string output;
};

CommandResult run_command(const std::string& command) {
    CommandResult r;
    std::string full = "GIT_TERMINAL_PROMPT=0 " + command;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.output.append(buf.data(), n);
    r.status = pclose(pipe);
    return r;
}

class Resolver {
public:
    Resolver(SourceManager& sources, const std::optional<Lockfile>& lock, const ResolveOptions& options)
        : sources_(sources), lock_(lock), options_(options) {}

    DependencyResolution run(const Manifest& root) {
        std::vector<std::string> chain;
        for (const ManifestDependency& d : root.dependencies)
            resolve(d, chain);

        DependencyResolution out;
        bool cyclic = std::any_of(diags_.begin(), diags_.end(), [](const Diagnostic& d) { return d.code == "E0405"; });
        if (!cyclic)
            check_names(root);
        for (auto& [url, dep] : resolved_) {
            out.lock.entries.push_back(LockEntry{dep.url, dep.version, dep.revision, dep.manifest.name});
            out.dependencies.push_back(std::move(dep));
        }
        out.diagnostics = std::move(diags_);
        out.stats = stats_;
        return out;
    }

private:
    void error(const char* code, std::string message, const ManifestDependency& dep, std::vector<Span> related = {}) {
        Diagnostic d{code, Severity::Error, std::move(message), dep.span, std::move(related)};
        diags_.push_back(std::move(d));
    }

    fs::path url_dir(const std::string& url) const { return options_.cache_root / url_key(url); }

    std::optional<std::string> remembered_tag(const ManifestDependency& dep) const {
        auto text = read_file(url_dir(dep.url) / "tags" / dep.version);
        if (!text)
            return std::nullopt;
        std::string rev = text->substr(0, text->find('\n'));
        return is_revision(rev) ? std::optional(rev) : std::nullopt;
    }

    void remember_tag(const ManifestDependency& dep, const std::string& rev) const {
        std::error_code ec;
        fs::create_directories(url_dir(dep.url) / "tags", ec);
        std::ofstream(url_dir(dep.url) / "tags" / dep.version) << rev << '\n';
    }

    std::optional<std::string> ls_remote(const ManifestDependency& dep) {
        ++stats_.ls_remote;
        std::string v = "refs/tags/v" + dep.version;
        std::string p = "refs/tags/" + dep.version;
        CommandResult r = run_command("git ls-remote -- " + shell_quote(dep.url) + ' ' + shell_quote(v) + ' ' +
                                      shell_quote(v + "^{}") + ' ' + shell_quote(p) + ' ' + shell_quote(p + "^{}") +
                                      " 2>/dev/null");
        if (r.status != 0)
            return std::nullopt;
        std::map<std::string, std::string> refs;
        std::istringstream lines(r.output);
        std::string line;
        while (std::getline(lines, line)) {
            auto tab = line.find('\t');
            if (tab != std::string::npos)
                refs[line.substr(tab + 1)] = line.substr(0, tab);
        }
        for (const std::string& ref : {v + "^{}", v, p + "^{}", p}) {
            auto it = refs.find(ref);
            if (it != refs.end() && is_revision(it->second))
                return it->second;
        }
        return std::nullopt;
    }

    bool clone(const ManifestDependency& dep, const std::string& rev, const fs::path& dest) {
        static std::atomic<int> counter{0};
        ++stats_.clones;
        std::error_code ec;
        fs::create_directories(dest.parent_path(), ec);
        fs::path tmp = options_.cache_root / (".tmp-" + url_key(dep.url) + "-" + std::to_string(::getpid()) + "-" +
                                              std::to_string(counter++));
        fs::remove_all(tmp, ec);
        CommandResult r = run_command("git clone --quiet -- " + shell_quote(dep.url) + ' ' + shell_quote(tmp.string()) +
                                      " >/dev/null 2>&1 && git -C " + shell_quote(tmp.string()) +
                                      " -c advice.detachedHead=false checkout --quiet " + shell_quote(rev) +
                                      " >/dev/null 2>&1");
        if (r.status != 0) {
            fs::remove_all(tmp, ec);
            return false;
        }
        fs::rename(tmp, dest, ec);
        if (ec) {
            // Another process may have finished the same entry first.
            fs::remove_all(tmp, ec);
            return fs::exists(dest / "vl.toml");
        }
        return true;
    }

    void resolve(const ManifestDependency& dep, std::vector<std::string>& chain) {
        if (std::find(chain.begin(), chain.end(), dep.url) != chain.end()) {
            std::string cycle;
            auto it = std::find(chain.begin(), chain.end(), dep.url);
            for (; it != chain.end(); ++it)
                cycle += *it + " -> ";
            error("E0405", "dependency cycle: " + cycle + dep.url, dep);
            return;
        }
        if (auto it = resolved_.find(dep.url); it != resolved_.end()) {
            if (it->second.version != dep.version)
                error("E0407",
                      "dependency " + dep.url + " is required at both " + it->second.version + " and " + dep.version,
                      dep);
            return;
        }
        if (failed_.count(dep.url))
            return;

        std::optional<std::string> rev;
        if (lock_) {
            if (const LockEntry* e = lock_->find(dep.url); e && e->version == dep.version)
                rev = e->revision;
        }
        if (!rev)
            rev = remembered_tag(dep);
        if (!rev) {
            if (options_.offline) {
                error("E0404", "dependency " + dep.url + " " + dep.version + " is not cached (offline mode)", dep);
                failed_.insert(dep.url);
                return;
            }
            rev = ls_remote(dep);
            if (!rev) {
                error("E0403", "cannot resolve version " + dep.version + " of " + dep.url, dep);
                failed_.insert(dep.url);
                return;
            }
            remember_tag(dep, *rev);
        }

        fs::path dest = url_dir(dep.url) / *rev;
        if (!fs::exists(dest / "vl.toml")) {
            if (options_.offline) {
                error("E0404", "dependency " + dep.url + " at " + rev->substr(0, 12) + " is not cached (offline mode)",
                      dep);
                failed_.insert(dep.url);
                return;
            }
            if (!clone(dep, *rev, dest)) {
                error("E0403", "cannot fetch " + dep.url + " at " + *rev, dep);
                failed_.insert(dep.url);
                return;
            }
        }

        ManifestResult mr = load_manifest(sources_, dest / "vl.toml");
        diags_.insert(diags_.end(), mr.diagnostics.begin(), mr.diagnostics.end());
        if (!mr.manifest) {
            failed_.insert(dep.url);
            return;
        }
        chain.push_back(dep.url);
        for (const ManifestDependency& sub : mr.manifest->dependencies)
            resolve(sub, chain);
        chain.pop_back();
        resolved_.emplace(dep.url, ResolvedDependency{dep.url, dep.version, *rev, dest, std::move(*mr.manifest)});
    }

    void check_names(const Manifest& root) {
        std::map<std::string, std::string> owners;  // project name -> url
        owners[root.name] = "";
        for (const auto& [url, dep] : resolved_) {
            auto [it, inserted] = owners.emplace(dep.manifest.name, url);
            if (!inserted) {
                ManifestDependency where{url, dep.version, std::nullopt};
                for (const ManifestDependency& d : root.dependencies)
                    if (d.url == url)
                        where.span = d.span;
                std::string other = it->second.empty() ? "the root project" : it->second;
                error("E0406", "project name '" + dep.manifest.name + "' of " + url + " is also used by " + other,
                      where);
            }
        }
    }

    SourceManager& sources_;
    const std::optional<Lockfile>& lock_;
    const ResolveOptions& options_;
    std::map<std::string, ResolvedDependency> resolved_;
    std::set<std::string> failed_;
    Diagnostics diags_;
    FetchStats stats_;
};

}  // namespace

DependencyResolution resolve_dependencies(SourceManager& sources, const Manifest& root,
                                          const std::optional<Lockfile>& lock, const ResolveOptions& options) {
    ResolveOptions opts = options;
    if (opts.cache_root.empty())
        opts.cache_root = default_cache_root();
    return Resolver(sources, lock, opts).run(root);
}

// ---------------------------------------------------------------------------
// Build plan

std::optional<std::vector<std::string>> topo_order(const std::map<std::string, std::set<std::string>>& graph) {
    std::map<std::string, std::set<std::string>> deps = graph;
    for (const auto& [node, list] : graph)
        for (const std::string& d : list)
            deps[d];
    std::map<std::string, std::set<std::string>> dependents;
    std::map<std::string, std::size_t> pending;
    for (const auto& [node, list] : deps) {
        pending[node] = list.size();
        for (const std::string& d : list)
            dependents[d].insert(node);
    }
    std::set<std::string> ready;
    for (const auto& [node, n] : pending)
        if (n == 0)
            ready.insert(node);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string node = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(node);
        for (const std::string& next : dependents[node])
            if (--pending[next] == 0)
                ready.insert(next);
    }
    if (order.size() != deps.size())
        return std::nullopt;
    return order;
}

BuildPlan build_plan(const Manifest& root, const std::vector<ResolvedDependency>& dependencies) {
    BuildPlan plan;
    std::map<std::string, std::string> name_of;  // url -> project name
    for (const ResolvedDependency& d : dependencies)
        name_of[d.url] = d.manifest.name;

    std::map<std::string, CompileUnit> units;
    std::map<std::string, std::set<std::string>> graph;
    auto add = [&](const Manifest& m, bool is_root) {
        CompileUnit unit{m.name, m, is_root, {}};
        for (const ManifestDependency& d : m.dependencies) {
            auto it = name_of.find(d.url);
            if (it == name_of.end())
                continue;
            unit.dependencies.push_back(it->second);
            graph[m.name].insert(it->second);
        }
        std::sort(unit.dependencies.begin(), unit.dependencies.end());
        graph[m.name];
        units.emplace(m.name, std::move(unit));
    };
    for (const ResolvedDependency& d : dependencies)
        add(d.manifest, false);
    add(root, true);

    auto order = topo_order(graph);
    if (!order) {
        plan.diagnostics.push_back(config_error("E0405", "dependency cycle between projects"));
        return plan;
    }
    for (const std::string& name : *order) {
        auto it = units.find(name);
        if (it != units.end())
            plan.units.push_back(std::move(it->second));
    }
    return plan;
}

}  // namespace vl

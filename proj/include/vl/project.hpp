#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vl/diagnostic.hpp"
#include "vl/emitter.hpp"
#include "vl/source.hpp"

namespace vl {

struct ManifestDependency {
    std::string url;
    std::string version;
    std::optional<Span> span;
};

struct Manifest {
    std::filesystem::path root;  // directory holding vl.toml
    std::string name;
    std::string version;
    EmitConfig build;
    std::string target_dir = "target";
    std::string wavedrom_url = "wavedrom.min.js";
    std::vector<ManifestDependency> dependencies;  // sorted by url
};

struct ManifestResult {
    std::optional<Manifest> manifest;  // absent when an error was reported
    Diagnostics diagnostics;
};

// Parses vl.toml text already registered in `sources`.
ManifestResult parse_manifest(const SourceManager& sources, FileId file, std::filesystem::path root);

// Reads and parses `path`. A missing or unreadable file is E0401.
ManifestResult load_manifest(SourceManager& sources, const std::filesystem::path& path);

bool is_exact_version(std::string_view text);

// ---------------------------------------------------------------------------
// Lockfile

struct LockEntry {
    std::string url;
    std::string version;
    std::string revision;
    std::string name;

    bool operator==(const LockEntry&) const = default;
};

struct Lockfile {
    std::vector<LockEntry> entries;  // sorted by url

    const LockEntry* find(const std::string& url) const;
    std::string serialize() const;
};

// nullopt with an E0401 diagnostic when a line is malformed.
std::optional<Lockfile> parse_lockfile(std::string_view text, Diagnostics& diags);

// ---------------------------------------------------------------------------
// Dependency resolution

std::filesystem::path default_cache_root();

// Stable directory name for a URL within the cache.
std::string url_key(std::string_view url);

struct ResolvedDependency {
    std::string url;
    std::string version;
    std::string revision;
    std::filesystem::path cache_path;
    Manifest manifest;
};

struct FetchStats {
    int ls_remote = 0;
    int clones = 0;

    int total() const { return ls_remote + clones; }
};

struct ResolveOptions {
    std::filesystem::path cache_root;
    bool offline = false;
};

struct DependencyResolution {
    std::vector<ResolvedDependency> dependencies;  // sorted by url
    Lockfile lock;
    Diagnostics diagnostics;
    FetchStats stats;
};

// Resolves the transitive dependencies of `root`, fetching into the cache
// through the system git executable as needed. Dependency manifests are
// registered in `sources` so their diagnostics carry spans.
DependencyResolution resolve_dependencies(SourceManager& sources, const Manifest& root,
                                          const std::optional<Lockfile>& lock, const ResolveOptions& options);

// ---------------------------------------------------------------------------
// Build plan

// Dependencies first; ties broken by name. nullopt when the graph has a cycle.
std::optional<std::vector<std::string>> topo_order(const std::map<std::string, std::set<std::string>>& graph);

struct CompileUnit {
    std::string name;
    Manifest manifest;
    bool is_root = false;
    std::vector<std::string> dependencies;  // direct, by project name
};

struct BuildPlan {
    std::vector<CompileUnit> units;
    Diagnostics diagnostics;
};

BuildPlan build_plan(const Manifest& root, const std::vector<ResolvedDependency>& dependencies);

}  // namespace vl

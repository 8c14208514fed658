#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>

#include "testing.hpp"
#include "vl/project.hpp"

using namespace vl;
namespace fs = std::filesystem;

namespace {

ManifestResult parse(const std::string& text) {
    static SourceManager sources;
    return parse_manifest(sources, sources.add("vl.toml", text), "/tmp/root");
}

std::vector<std::string> codes(const Diagnostics& d) {
    std::vector<std::string> out;
    for (const Diagnostic& x : d)
        out.push_back(x.code);
    return out;
}

std::string url_of(const fs::path& dir) { return "file://" + dir.string(); }

// A library repository at `dir` named `name` depending on `deps` (url -> version).
void make_library(const fs::path& dir, const std::string& name,
                  const std::vector<std::pair<std::string, std::string>>& deps = {},
                  const std::string& tag = "v0.1.0") {
    std::string toml = "[project]\nname = \"" + name + "\"\nversion = \"0.1.0\"\n";
    if (!deps.empty()) {
        toml += "\n[dependencies]\n";
        for (const auto& [url, version] : deps)
            toml += "\"" + url + "\" = \"" + version + "\"\n";
    }
    support::write_text(dir / "vl.toml", toml);
    support::write_text(dir / "src" / (name + ".vl"), "pub module Lib_" + name + " {}\n");
    ASSERT_TRUE(support::make_git_repo(dir, tag));
}

Manifest root_manifest(const std::vector<std::pair<std::string, std::string>>& deps) {
    Manifest m;
    m.name = "top";
    m.version = "0.1.0";
    for (const auto& [url, version] : deps)
        m.dependencies.push_back({url, version, std::nullopt});
    std::sort(m.dependencies.begin(), m.dependencies.end(),
              [](const auto& a, const auto& b) { return a.url < b.url; });
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

TEST(Project, Figure5Manifest) {
    auto r = parse("[project]\nname = \"top\"\nversion = \"0.1.0\"\n\n"
                   "[dependencies]\n\"https://github.com/veryl-lang/sample\" = \"0.1.0\"\n");
    ASSERT_TRUE(r.manifest.has_value());
    EXPECT_TRUE(r.diagnostics.empty());
    ASSERT_EQ(r.manifest->dependencies.size(), 1u);
    EXPECT_EQ(r.manifest->dependencies[0].url, "https://github.com/veryl-lang/sample");
    EXPECT_EQ(r.manifest->dependencies[0].version, "0.1.0");
    EXPECT_EQ(r.manifest->build.clock_type, ClockEdge::Posedge);
    EXPECT_EQ(r.manifest->build.reset_type, ResetType::AsyncLow);
    EXPECT_EQ(r.manifest->target_dir, "target");
}

TEST(Project, BuildSection) {
    auto r = parse("[project]\nname = \"top\"\nversion = \"1.2.3\"\n[build]\nclock_type = \"negedge\"\n"
                   "reset_type = \"sync_high\"\ntarget_dir = \"out\"\n");
    ASSERT_TRUE(r.manifest.has_value());
    EXPECT_TRUE(r.manifest->dependencies.empty());
    EXPECT_EQ(r.manifest->build.clock_type, ClockEdge::Negedge);
    EXPECT_EQ(r.manifest->build.reset_type, ResetType::SyncHigh);
    EXPECT_EQ(r.manifest->target_dir, "out");
}

TEST(Project, ManifestDiagnostics) {
    auto unknown = parse("[project]\nname = \"top\"\nversion = \"0.1.0\"\ncolour = \"red\"\n");
    EXPECT_TRUE(unknown.manifest.has_value());
    EXPECT_EQ(codes(unknown.diagnostics), std::vector<std::string>{"W0401"});
    EXPECT_EQ(unknown.diagnostics[0].span->line, 4u);

    auto missing = parse("[build]\nclock_type = \"posedge\"\n");
    EXPECT_FALSE(missing.manifest.has_value());
    EXPECT_EQ(codes(missing.diagnostics), std::vector<std::string>{"E0401"});

    auto bad_enum = parse("[project]\nname = \"top\"\nversion = \"0.1.0\"\n[build]\nreset_type = \"async_lo\"\n");
    EXPECT_EQ(codes(bad_enum.diagnostics), std::vector<std::string>{"E0402"});
    EXPECT_EQ(bad_enum.diagnostics[0].span->line, 5u);

    for (const char* bad : {"[project]\nname = \"9bad\"\nversion = \"0.1.0\"\n",
                            "[project]\nname = \"top\"\nversion = \"0.1.0\"\n[dependencies]\n\"u\" = \"^1.0\"\n",
                            "[project\nname = \"top\"\n"}) {
        auto r = parse(bad);
        auto c = codes(r.diagnostics);
        ASSERT_FALSE(c.empty()) << bad;
        EXPECT_TRUE(std::all_of(c.begin(), c.end(), [](const std::string& x) { return x == "E0401"; })) << bad;
    }
}

TEST(Project, MissingManifestFile) {
    SourceManager sources;
    auto r = load_manifest(sources, "/nonexistent/vl.toml");
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E0401"});
}

TEST(Project, ExactVersions) {
    EXPECT_TRUE(is_exact_version("0.1.0"));
    EXPECT_TRUE(is_exact_version("10.20.30"));
    EXPECT_FALSE(is_exact_version("0.1"));
    EXPECT_FALSE(is_exact_version("^0.1.0"));
    EXPECT_FALSE(is_exact_version("v0.1.0"));
}

// ---------------------------------------------------------------------------
// Lockfile

TEST(Project, LockfileRoundTrip) {
    Lockfile lock;
    lock.entries = {{"file:///a", "0.1.0", std::string(40, 'a'), "alpha"},
                    {"file:///b", "1.0.0", std::string(40, 'b'), "beta"}};
    std::string text = lock.serialize();
    EXPECT_EQ(text, "file:///a\t0.1.0\t" + std::string(40, 'a') + "\talpha\nfile:///b\t1.0.0\t" +
                        std::string(40, 'b') + "\tbeta\n");
    Diagnostics d;
    auto back = parse_lockfile(text, d);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->entries, lock.entries);
    EXPECT_EQ(back->serialize(), text);
    EXPECT_EQ(Lockfile{}.serialize(), "");

    Diagnostics bad;
    EXPECT_FALSE(parse_lockfile("only\ttwo\n", bad).has_value());
    EXPECT_EQ(codes(bad), std::vector<std::string>{"E0401"});
}

// ---------------------------------------------------------------------------
// Build order

TEST(Project, TopoDiamond) {
    auto order = topo_order({{"A", {"B", "C"}}, {"B", {"D"}}, {"C", {"D"}}, {"D", {}}});
    ASSERT_TRUE(order.has_value());
    EXPECT_EQ(*order, (std::vector<std::string>{"D", "B", "C", "A"}));
    EXPECT_FALSE(topo_order({{"A", {"B"}}, {"B", {"A"}}}).has_value());
    EXPECT_FALSE(topo_order({{"A", {"A"}}}).has_value());
}

// Random graphs: a valid order exists iff DFS finds no back edge, and every
// dependency precedes its dependents.
TEST(Project, TopoOracle) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 1 + static_cast<int>(rng() % 7);
        std::map<std::string, std::set<std::string>> g;
        for (int i = 0; i < n; ++i)
            g[std::string(1, static_cast<char>('a' + i))];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (rng() % 5 == 0)
                    g[std::string(1, static_cast<char>('a' + i))].insert(std::string(1, static_cast<char>('a' + j)));

        std::map<std::string, int> color;
        bool cyclic = false;
        std::function<void(const std::string&)> dfs = [&](const std::string& u) {
            color[u] = 1;
            for (const std::string& v : g[u]) {
                if (color[v] == 1)
                    cyclic = true;
                else if (color[v] == 0)
                    dfs(v);
            }
            color[u] = 2;
        };
        for (const auto& [u, _] : g)
            if (color[u] == 0)
                dfs(u);

        auto order = topo_order(g);
        EXPECT_EQ(order.has_value(), !cyclic);
        if (!order)
            continue;
        ASSERT_EQ(order->size(), g.size());
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < order->size(); ++i)
            pos[(*order)[i]] = i;
        for (const auto& [u, deps] : g)
            for (const std::string& v : deps)
                EXPECT_LT(pos[v], pos[u]);
        EXPECT_EQ(topo_order(g), order);
    }
}

TEST(Project, BuildPlanWithoutDependencies) {
    BuildPlan plan = build_plan(root_manifest({}), {});
    ASSERT_EQ(plan.units.size(), 1u);
    EXPECT_EQ(plan.units[0].name, "top");
    EXPECT_TRUE(plan.units[0].is_root);
}

// ---------------------------------------------------------------------------
// Resolution over file:// git repositories

class ProjectGit : public ::testing::Test {
protected:
    support::TempDir tmp;
    fs::path cache() const { return tmp.path() / "cache"; }
    DependencyResolution resolve(const Manifest& m, const std::optional<Lockfile>& lock, bool offline = false) {
        return resolve_dependencies(sources, m, lock, {cache(), offline});
    }
    SourceManager sources;
};

TEST_F(ProjectGit, ResolvesTagAndLocks) {
    fs::path lib = tmp.path() / "sample";
    support::copy_tree(support::fixtures_dir() / "sample", lib);
    ASSERT_TRUE(support::make_git_repo(lib, "v0.1.0"));
    Manifest root = root_manifest({{url_of(lib), "0.1.0"}});

    auto first = resolve(root, std::nullopt);
    ASSERT_TRUE(first.diagnostics.empty()) << first.diagnostics[0].message;
    ASSERT_EQ(first.dependencies.size(), 1u);
    EXPECT_EQ(first.dependencies[0].manifest.name, "sample");
    EXPECT_TRUE(fs::exists(first.dependencies[0].cache_path / "src/sample.vl"));
    ASSERT_EQ(first.lock.entries.size(), 1u);
    EXPECT_TRUE(std::regex_match(first.lock.entries[0].revision, std::regex("[0-9a-f]{40}")));
    EXPECT_EQ(first.lock.entries[0].name, "sample");
    EXPECT_GT(first.stats.total(), 0);

    // Locked and cached: no git traffic, identical lockfile bytes.
    auto second = resolve(root, first.lock);
    EXPECT_TRUE(second.diagnostics.empty());
    EXPECT_EQ(second.stats.total(), 0);
    EXPECT_EQ(second.lock.serialize(), first.lock.serialize());

    auto offline = resolve(root, first.lock, true);
    EXPECT_TRUE(offline.diagnostics.empty());
    EXPECT_EQ(offline.stats.total(), 0);

    BuildPlan plan = build_plan(root, first.dependencies);
    ASSERT_EQ(plan.units.size(), 2u);
    EXPECT_EQ(plan.units[0].name, "sample");
    EXPECT_EQ(plan.units[1].name, "top");
    EXPECT_EQ(plan.units[1].dependencies, std::vector<std::string>{"sample"});
}

TEST_F(ProjectGit, PlainVersionTagFallback) {
    fs::path lib = tmp.path() / "plain";
    make_library(lib, "plain", {}, "0.1.0");
    auto r = resolve(root_manifest({{url_of(lib), "0.1.0"}}), std::nullopt);
    EXPECT_TRUE(r.diagnostics.empty());
    EXPECT_EQ(r.dependencies.size(), 1u);
}

TEST_F(ProjectGit, OfflineWithoutCache) {
    fs::path lib = tmp.path() / "lib";
    make_library(lib, "lib");
    auto r = resolve(root_manifest({{url_of(lib), "0.1.0"}}), std::nullopt, true);
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E0404"});
    EXPECT_EQ(r.stats.total(), 0);
}

TEST_F(ProjectGit, FetchFailure) {
    auto missing = resolve(root_manifest({{url_of(tmp.path() / "nowhere"), "0.1.0"}}), std::nullopt);
    EXPECT_EQ(codes(missing.diagnostics), std::vector<std::string>{"E0403"});
    fs::path lib = tmp.path() / "lib";
    make_library(lib, "lib");
    auto no_tag = resolve(root_manifest({{url_of(lib), "9.9.9"}}), std::nullopt);
    EXPECT_EQ(codes(no_tag.diagnostics), std::vector<std::string>{"E0403"});
}

TEST_F(ProjectGit, DependencyCycle) {
    fs::path a = tmp.path() / "a";
    fs::path b = tmp.path() / "b";
    make_library(a, "liba", {{url_of(b), "0.1.0"}});
    make_library(b, "libb", {{url_of(a), "0.1.0"}});
    auto r = resolve(root_manifest({{url_of(a), "0.1.0"}}), std::nullopt);
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_EQ(r.diagnostics[0].code, "E0405");
}

TEST_F(ProjectGit, DuplicateNamespace) {
    fs::path a = tmp.path() / "a";
    fs::path b = tmp.path() / "b";
    make_library(a, "same");
    make_library(b, "same");
    auto r = resolve(root_manifest({{url_of(a), "0.1.0"}, {url_of(b), "0.1.0"}}), std::nullopt);
    EXPECT_EQ(codes(r.diagnostics), std::vector<std::string>{"E0406"});
}

TEST_F(ProjectGit, DiamondPlan) {
    fs::path d = tmp.path() / "d";
    fs::path b = tmp.path() / "b";
    fs::path c = tmp.path() / "c";
    make_library(d, "libd");
    make_library(b, "libb", {{url_of(d), "0.1.0"}});
    make_library(c, "libc", {{url_of(d), "0.1.0"}});
    Manifest root = root_manifest({{url_of(b), "0.1.0"}, {url_of(c), "0.1.0"}});
    auto r = resolve(root, std::nullopt);
    ASSERT_TRUE(r.diagnostics.empty());
    EXPECT_EQ(r.dependencies.size(), 3u);
    EXPECT_EQ(r.lock.entries.size(), 3u);
    BuildPlan plan = build_plan(root, r.dependencies);
    std::vector<std::string> names;
    for (const CompileUnit& u : plan.units)
        names.push_back(u.name);
    EXPECT_EQ(names, (std::vector<std::string>{"libd", "libb", "libc", "top"}));
}

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vl/analyzer.hpp"
#include "vl/diagnostic.hpp"
#include "vl/resolver.hpp"
#include "vl/source.hpp"

namespace vl::support {

std::filesystem::path fixtures_dir();

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// One project's files run through parse, symbols, references and
// monomorphization; `analyze` adds the semantic checks.
struct Compiled {
    SourceManager sources;
    std::vector<SourceFile> files;
    std::unique_ptr<SymbolTable> table;
    Design design;
    Diagnostics diags;

    std::vector<std::string> codes() const;
    const ConcreteModule* module(const std::string& name) const { return design.find(name); }
};

using NamedSource = std::pair<std::string, std::string>;

std::unique_ptr<Compiled> compile(const std::vector<NamedSource>& files, bool analyze = true);
std::unique_ptr<Compiled> compile(const std::string& source, bool analyze = true);

// `// expect: E0311 4:18` on the first line of a fixture.
struct Expectation {
    std::string code;
    std::uint32_t line = 0;
    std::uint32_t column = 0;
};

std::optional<Expectation> parse_expectation(const std::string& source);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Runs a shell command; returns its exit status.
int shell(const std::string& command);

// Turns `dir` into a git repository with one commit tagged `tag`.
bool make_git_repo(const std::filesystem::path& dir, const std::string& tag);

void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to);

// Sets an environment variable for the lifetime of the object.
class ScopedEnv {
public:
    ScopedEnv(std::string name, const std::string& value);
    ~ScopedEnv();

private:
    std::string name_;
    std::optional<std::string> old_;
};

// Changes the working directory for the lifetime of the object.
class ScopedCwd {
public:
    explicit ScopedCwd(const std::filesystem::path& dir);
    ~ScopedCwd();

private:
    std::filesystem::path old_;
};

}  // namespace vl::support

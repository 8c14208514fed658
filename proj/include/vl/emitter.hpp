#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"
#include "vl/formatter.hpp"
#include "vl/resolver.hpp"

namespace vl {

enum class ClockEdge { Posedge, Negedge };
enum class ResetType { AsyncLow, AsyncHigh, SyncLow, SyncHigh };

std::optional<ClockEdge> parse_clock_type(std::string_view text);
std::optional<ResetType> parse_reset_type(std::string_view text);
const char* to_string(ClockEdge edge);
const char* to_string(ResetType type);

// Applies only to the generic `clock` and `reset` types.
struct EmitConfig {
    ClockEdge clock_type = ClockEdge::Posedge;
    ResetType reset_type = ResetType::AsyncLow;
};

ClockEdge effective_edge(TypeKind clock, const EmitConfig& cfg);
ResetType effective_reset(TypeKind reset, const EmitConfig& cfg);

// `logic<WIDTH>` -> `logic [WIDTH-1:0]`. Unpacked dims are not included.
std::string lower_type(const TypeSpec& type, const PathPrinter& paths = {});

// Suffix for unpacked dims: `[4]` -> ` [0:3]`, empty when there are none.
std::string lower_unpacked(const TypeSpec& type, const PathPrinter& paths = {});

struct EmitUnit {
    std::string module_name;
    std::string text;
    std::map<std::string, std::string> name_map;  // source name -> emitted name
};

EmitUnit emit_module(const ConcreteModule& module, const EmitConfig& cfg);

std::string emit_package(const PackageDecl& package, const SymbolTable& table);

struct EmitInput {
    const SourceFile* file = nullptr;
    std::string output_path;  // relative, e.g. `counter.sv`
};

struct EmittedFile {
    std::string path;
    std::string text;
};

// One output per input file holding its packages and modules in source order.
// A generic template is replaced by its instances (sorted by name). Files with
// nothing to emit are skipped.
std::vector<EmittedFile> emit_files(const std::vector<EmitInput>& inputs, const Design& design,
                                    const SymbolTable& table, const EmitConfig& cfg);

// Sidecar mapping mangled instance names to their template and arguments.
std::string name_map_json(const Design& design, const SymbolTable* only = nullptr);

// Writes files below `out_dir`, creating directories. Failures are EIO01.
Diagnostics write_files(const std::filesystem::path& out_dir, const std::vector<EmittedFile>& files);

}  // namespace vl

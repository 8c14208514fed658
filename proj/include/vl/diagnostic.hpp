#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vl/source.hpp"

namespace vl {

enum class Severity { Warning, Error };

const char* to_string(Severity severity);

// A coded finding. Codes are `Ennnn` for errors and `Wnnnn` for warnings;
// configuration and I/O failures (E04xx, EIO01) may carry no source span.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::string message;
    std::optional<Span> span;
    std::vector<Span> related;

    static Diagnostic make(std::string code, std::string message, std::optional<Span> span,
                           std::vector<Span> related = {});
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

// Orders by (file, byte_start, code) and drops exact duplicates. Diagnostics
// without a span sort first.
void sort_diagnostics(Diagnostics& diags);

// One JSON array with one object per finding:
// {"code","severity","message","file","line","column","related":[{"file","line","column"}]}
std::string diagnostics_to_json(const Diagnostics& diags, const SourceManager& sources);

}  // namespace vl

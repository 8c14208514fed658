#include "vl/diagnostic.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

namespace vl {

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

Diagnostic Diagnostic::make(std::string code, std::string message, std::optional<Span> span,
                            std::vector<Span> related) {
    Severity severity = !code.empty() && code.front() == 'W' ? Severity::Warning : Severity::Error;
    return Diagnostic{std::move(code), severity, std::move(message), span, std::move(related)};
}

bool has_errors(const Diagnostics& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

auto sort_key(const Diagnostic& d) {
    bool located = d.span.has_value();
    std::uint32_t file = located ? d.span->file.value : 0;
    std::uint32_t start = located ? d.span->byte_start : 0;
    return std::tuple(located, file, start, std::string_view(d.code), std::string_view(d.message));
}

bool same(const Diagnostic& a, const Diagnostic& b) {
    return a.code == b.code && a.message == b.message && a.span == b.span && a.related == b.related;
}

}  // namespace

void sort_diagnostics(Diagnostics& diags) {
    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return sort_key(a) < sort_key(b); });
    diags.erase(std::unique(diags.begin(), diags.end(), same), diags.end());
}

std::string diagnostics_to_json(const Diagnostics& diags, const SourceManager& sources) {
    auto location = [&](nlohmann::json& obj, const std::optional<Span>& span) {
        if (span) {
            obj["file"] = sources.path(span->file);
            obj["line"] = span->line;
            obj["column"] = span->column;
        }
        else {
            obj["file"] = nullptr;
            obj["line"] = nullptr;
            obj["column"] = nullptr;
        }
    };

    nlohmann::json out = nlohmann::json::array();
    for (const Diagnostic& d : diags) {
        nlohmann::json obj;
        obj["code"] = d.code;
        obj["severity"] = to_string(d.severity);
        obj["message"] = d.message;
        location(obj, d.span);
        obj["related"] = nlohmann::json::array();
        for (const Span& r : d.related) {
            nlohmann::json rel;
            location(rel, r);
            obj["related"].push_back(std::move(rel));
        }
        out.push_back(std::move(obj));
    }
    return out.dump();
}

}  // namespace vl

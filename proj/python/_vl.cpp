#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "vl/driver.hpp"
#include "vl/lexer.hpp"

namespace py = pybind11;

namespace {

const char* kind_name(vl::TokenKind kind) {
    switch (kind) {
        case vl::TokenKind::Keyword: return "keyword";
        case vl::TokenKind::Identifier: return "identifier";
        case vl::TokenKind::SizedLiteral: return "sized_literal";
        case vl::TokenKind::DecimalLiteral: return "decimal_literal";
        case vl::TokenKind::Punct: return "punct";
        case vl::TokenKind::DomainTick: return "domain";
        case vl::TokenKind::EndOfFile: return "eof";
    }
    return "unknown";
}

std::string diagnostics_json(const vl::TextResult& r) { return vl::diagnostics_to_json(r.diagnostics, r.sources); }

[[noreturn]] void raise_diagnostics(const vl::TextResult& r) {
    std::string text;
    for (const vl::Diagnostic& d : r.diagnostics)
        text += vl::render_human_diagnostic(d, r.sources);
    throw py::value_error(text);
}

}  // namespace

PYBIND11_MODULE(_vl, m) {
    m.doc() = "Veryl-subset toolchain bindings";

    m.def(
        "tokenize",
        [](const std::string& source) {
            vl::SourceManager sources;
            vl::FileId id = sources.add("input.vl", source);
            vl::LexResult lexed = vl::tokenize(sources, id);
            py::list tokens;
            for (const vl::Token& t : lexed.tokens) {
                if (t.kind == vl::TokenKind::EndOfFile)
                    break;
                tokens.append(py::make_tuple(kind_name(t.kind), t.text, t.span.line, t.span.column));
            }
            return tokens;
        },
        py::arg("source"), "Tokens as (kind, text, line, column) tuples.");

    m.def(
        "format",
        [](const std::string& source) {
            vl::TextResult r = vl::format_text(source);
            if (vl::has_errors(r.diagnostics))
                raise_diagnostics(r);
            return r.text;
        },
        py::arg("source"));

    m.def(
        "check_json", [](const std::string& source) { return diagnostics_json(vl::check_text(source)); },
        py::arg("source"), "Diagnostics for a single source as the JSON array used by `vl check --format json`.");

    m.def(
        "transpile",
        [](const std::string& source, const std::string& clock_type, const std::string& reset_type) {
            vl::EmitConfig cfg;
            auto clock = vl::parse_clock_type(clock_type);
            auto reset = vl::parse_reset_type(reset_type);
            if (!clock)
                throw py::value_error("unknown clock_type " + clock_type);
            if (!reset)
                throw py::value_error("unknown reset_type " + reset_type);
            cfg.clock_type = *clock;
            cfg.reset_type = *reset;
            vl::TextResult r = vl::transpile_text(source, cfg);
            if (vl::has_errors(r.diagnostics))
                raise_diagnostics(r);
            return r.text;
        },
        py::arg("source"), py::arg("clock_type") = "posedge", py::arg("reset_type") = "async_low");

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = vl::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}

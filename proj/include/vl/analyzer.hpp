#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vl/ast.hpp"
#include "vl/diagnostic.hpp"
#include "vl/resolver.hpp"

namespace vl {

// ---------------------------------------------------------------------------
// Constant evaluation

struct ConstValue {
    std::uint64_t value = 0;
    Span origin;
};

// Maps a path to its constant value. Returning nullopt means the name is not
// constant; the lookup may append its own diagnostics.
using ConstLookup = std::function<std::optional<std::uint64_t>(const Expr& path, Diagnostics& diags)>;

// Unsigned 64-bit evaluation. Wrap, division by zero and non-constant
// operands are E0301.
std::optional<ConstValue> eval_const(const Expr& expr, const ConstLookup& lookup, Diagnostics& diags);

// Lookup over params and consts visible from `scope`, following references
// into packages and dependencies.
ConstLookup scope_lookup(const SymbolTable& table, ScopeId scope);

// ---------------------------------------------------------------------------
// Literals

struct SizedLiteral {
    std::uint64_t width = 0;  // saturates for absurd widths
    int base = 10;
    std::string digits;  // underscores removed
};

std::optional<SizedLiteral> parse_sized_literal(std::string_view text);

// Number of significant bits of the literal's value (0 for value zero).
std::size_t literal_bit_length(const SizedLiteral& lit);

// Value of the literal if it fits in 64 bits.
std::optional<std::uint64_t> literal_value(const SizedLiteral& lit);

Diagnostics check_literal_widths(const Expr& expr);

// ---------------------------------------------------------------------------
// Clock and reset binding

struct SignalRef {
    std::string name;
    TypeKind kind = TypeKind::Logic;
    std::optional<std::string> domain;
    Span span;
};

struct ClockResetBinding {
    SignalRef clock;
    std::optional<SignalRef> reset;
};

// Binds an always_ff to its clock and (when needed) reset. Explicit
// sensitivity names win; the abbreviated form picks the module's only clock
// and only reset. Reports E0312-E0314 into `diags` when given.
std::optional<ClockResetBinding> bind_clock_reset(const ConcreteModule& module, const AlwaysFf& ff, Span ff_span,
                                                  Diagnostics* diags);

bool uses_if_reset(const Block& block);

// ---------------------------------------------------------------------------
// Latches

// Variables assigned on some but not all paths through `block`, in order of
// first assignment.
struct LatchFinding {
    std::string name;
    Span first_assignment;
};

std::vector<LatchFinding> find_latches(const Block& block);

// ---------------------------------------------------------------------------
// Clock domains

enum class DomainKind { Default, Named, Mixed };

struct Domain {
    DomainKind kind = DomainKind::Default;
    std::string name;

    bool operator==(const Domain&) const = default;
};

// Default is the identity; differing named domains give Mixed.
Domain join(const Domain& a, const Domain& b);

// True when a value in `signal` must not be sampled by a process in `process`.
bool crosses(const Domain& signal, const Domain& process);

// ---------------------------------------------------------------------------
// Per-module checks

Diagnostics check_consts(const ConcreteModule& module);
Diagnostics check_drivers(const ConcreteModule& module, const Design& design);
Diagnostics check_latches(const ConcreteModule& module);
Diagnostics check_direction(const ConcreteModule& module, const Design& design);
Diagnostics check_connectivity(const ConcreteModule& module, const Design& design);
Diagnostics check_clock_reset(const ConcreteModule& module);
Diagnostics check_cdc(const ConcreteModule& module, const Design& design);

// Domain of every var/port of `module` after inference.
std::map<std::string, Domain> infer_domains(const ConcreteModule& module, const Design& design);

// Runs every check over all modules (templates and instances) and the
// packages of `tables`. Result is sorted and deduplicated.
Diagnostics analyze(const Design& design, const std::vector<const SymbolTable*>& tables);

}  // namespace vl

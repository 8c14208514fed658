#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "testing.hpp"
#include "vl/analyzer.hpp"

using namespace vl;
using support::compile;

namespace {

// Parses `text` as the value of a const and returns the compiled holder.
struct ParsedExpr {
    std::unique_ptr<support::Compiled> c;
    const Expr* expr = nullptr;
};

ParsedExpr parse_expr(const std::string& text) {
    ParsedExpr p;
    p.c = compile("module M {\n    const X: u32 = " + text + ";\n}\n", false);
    const ConcreteModule* m = p.c->module("M");
    if (!m)
        return p;
    for (const ModuleItem& item : m->decl.body)
        if (const auto* k = std::get_if<ConstDecl>(&item.node))
            p.expr = &k->value;
    return p;
}

ConstLookup table_lookup(std::map<std::string, std::uint64_t> values) {
    return [values](const Expr& path, Diagnostics&) -> std::optional<std::uint64_t> {
        auto it = values.find(path.path.empty() ? "" : path.path.back());
        if (it == values.end())
            return std::nullopt;
        return it->second;
    };
}

std::optional<std::uint64_t> eval(const std::string& text, Diagnostics& diags,
                                  std::map<std::string, std::uint64_t> values = {}) {
    ParsedExpr p = parse_expr(text);
    EXPECT_NE(p.expr, nullptr) << text;
    if (!p.expr)
        return std::nullopt;
    auto v = eval_const(*p.expr, table_lookup(std::move(values)), diags);
    return v ? std::optional<std::uint64_t>(v->value) : std::nullopt;
}

std::string to_base(unsigned __int128 v, int base) {
    if (v == 0)
        return "0";
    std::string out;
    while (v) {
        out.insert(out.begin(), "0123456789abcdef"[static_cast<int>(v % base)]);
        v /= base;
    }
    return out;
}

char base_letter(int base) { return base == 2 ? 'b' : base == 10 ? 'd' : 'h'; }

std::vector<std::string> codes_of(const Diagnostics& d) {
    std::vector<std::string> out;
    for (const Diagnostic& x : d)
        out.push_back(x.code);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constant evaluation

TEST(Analyzer, EvalConstExamples) {
    Diagnostics d;
    EXPECT_EQ(eval("WIDTH - 1", d, {{"WIDTH", 1}}), std::optional<std::uint64_t>(0));
    EXPECT_EQ(eval("(2 + 3) * 4 - 6 / 2 % 2", d), std::optional<std::uint64_t>(19));
    EXPECT_EQ(eval("1 << 10 | 3", d), std::optional<std::uint64_t>(1027));
    EXPECT_EQ(eval("8'hff + 1", d), std::optional<std::uint64_t>(256));
    EXPECT_TRUE(d.empty());
}

TEST(Analyzer, EvalConstErrors) {
    for (const char* text : {"1 / 0", "5 % 0", "0 - 1", "18446744073709551615 + 1", "4294967296 * 4294967296"}) {
        Diagnostics d;
        EXPECT_FALSE(eval(text, d).has_value()) << text;
        ASSERT_FALSE(d.empty()) << text;
        EXPECT_EQ(d[0].code, "E0301") << text;
    }
}

TEST(Analyzer, UnknownNameInConst) {
    auto c = compile("module M {\n    const X: u32 = unknown + 1;\n}\n");
    EXPECT_EQ(c->codes(), std::vector<std::string>{"E0202"});
}

TEST(Analyzer, ConstDivisionByZeroInModule) {
    auto c = compile(support::read_text(support::fixtures_dir() / "negative/e0301_const_div_zero.vl"));
    EXPECT_EQ(c->codes(), std::vector<std::string>{"E0301"});
}

TEST(Analyzer, ScopeLookupFollowsPackages) {
    auto c = compile(R"(package P {
    const A: u32 = 3;
}
module M #(
    param W: u32 = P::A + 1,
) (o: output logic<W>) {
    const B: u32 = W * 2;
    assign o = 0;
}
)");
    EXPECT_TRUE(c->diags.empty());
    const ConcreteModule* m = c->module("M");
    ASSERT_NE(m, nullptr);
    ConstLookup lookup = scope_lookup(*c->table, m->scope);
    const Expr* b = nullptr;
    for (const ModuleItem& item : m->decl.body)
        if (const auto* k = std::get_if<ConstDecl>(&item.node))
            b = &k->value;
    ASSERT_NE(b, nullptr);
    Diagnostics d;
    auto v = eval_const(*b, lookup, d);
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->value, 8u);
}

// ---------------------------------------------------------------------------
// Literal widths

TEST(Analyzer, LiteralWidthExamples) {
    auto over = parse_expr("4'd16");
    EXPECT_EQ(codes_of(check_literal_widths(*over.expr)), std::vector<std::string>{"E0311"});
    for (const char* ok : {"4'd15", "1'b0", "8'hff", "16'h00_ff"}) {
        auto p = parse_expr(ok);
        EXPECT_TRUE(check_literal_widths(*p.expr).empty()) << ok;
    }
    auto zero = parse_expr("0'd0");
    EXPECT_EQ(codes_of(check_literal_widths(*zero.expr)), std::vector<std::string>{"E0311"});
}

// E0311 fires iff value >= 2^w, for w in 1..16 and the two boundary values.
TEST(Analyzer, LiteralWidthOracle) {
    for (int w = 1; w <= 16; ++w) {
        for (std::uint64_t v : {(1ull << w) - 1, 1ull << w}) {
            for (int base : {2, 10, 16}) {
                std::string text = std::to_string(w) + "'" + base_letter(base) + to_base(v, base);
                auto p = parse_expr(text);
                ASSERT_NE(p.expr, nullptr) << text;
                bool fires = !check_literal_widths(*p.expr).empty();
                EXPECT_EQ(fires, v >= (1ull << w)) << text;
            }
        }
    }
}

// Agreement with exact 128-bit arithmetic for widths up to 64.
TEST(Analyzer, LiteralWidthAgainstWideIntegers) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        int w = 1 + static_cast<int>(rng() % 64);
        int bits = 1 + static_cast<int>(rng() % 100);
        unsigned __int128 v = (static_cast<unsigned __int128>(rng()) << 64) | rng();
        if (bits < 128)
            v &= (static_cast<unsigned __int128>(1) << bits) - 1;
        int base = std::vector<int>{2, 10, 16}[rng() % 3];
        std::string text = std::to_string(w) + "'" + base_letter(base) + to_base(v, base);
        auto lit = parse_sized_literal(text);
        ASSERT_TRUE(lit.has_value()) << text;
        std::size_t expected_bits = 0;
        for (unsigned __int128 t = v; t; t >>= 1)
            ++expected_bits;
        EXPECT_EQ(literal_bit_length(*lit), expected_bits) << text;
        bool over = v >> w != 0;
        auto p = parse_expr(text);
        EXPECT_EQ(!check_literal_widths(*p.expr).empty(), over) << text;
    }
}

TEST(Analyzer, LiteralWidthInCorpus) {
    auto c = compile(support::read_text(support::fixtures_dir() / "negative/e0311_literal_width.vl"));
    EXPECT_EQ(c->codes(), std::vector<std::string>{"E0311"});
}

// ---------------------------------------------------------------------------
// Latches

namespace {

// Random always_comb body over outputs y0..y2. Every `if` gets its own
// condition input, so the structural analysis and path enumeration see the
// same feasible paths.
struct LatchGen {
    std::mt19937 rng;
    int next_cond = 0;

    std::string block(int depth, const std::string& indent) {
        std::string out;
        int n = static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i)
            out += stmt(depth, indent);
        return out;
    }

    std::string stmt(int depth, const std::string& indent) {
        if (depth < 2 && next_cond < 3 && rng() % 2) {
            std::string c = "c" + std::to_string(next_cond++);
            std::string out = indent + "if " + c + " {\n" + block(depth + 1, indent + "    ") + indent + "}";
            if (rng() % 3)
                out += " else {\n" + block(depth + 1, indent + "    ") + indent + "}";
            return out + "\n";
        }
        return indent + "y" + std::to_string(rng() % 3) + " = 1;\n";
    }
};

// Tiny interpreter over the generated text's structure via the AST.
void run_block(const Block& b, const std::map<std::string, bool>& env, std::set<std::string>& assigned);

void run_stmt(const Stmt& s, const std::map<std::string, bool>& env, std::set<std::string>& assigned) {
    std::visit(Overloaded{
                   [&](const AssignStmt& a) { assigned.insert(lvalue_root(a.target)->path.back()); },
                   [&](const IfStmt& i) {
                       if (env.at(i.condition.path.back()))
                           run_block(i.then_block, env, assigned);
                       else
                           for (const ElseClause& e : i.else_clause)
                               std::visit(Overloaded{[&](const Block& x) { run_block(x, env, assigned); },
                                                     [&](const Stmt& x) { run_stmt(x, env, assigned); }},
                                          e.body);
                   },
                   [&](const ReturnStmt&) {},
                   [&](const Block& x) { run_block(x, env, assigned); },
               },
               s.node);
}

void run_block(const Block& b, const std::map<std::string, bool>& env, std::set<std::string>& assigned) {
    for (const Stmt& s : b.stmts)
        run_stmt(s, env, assigned);
}

}  // namespace

TEST(Analyzer, LatchExample) {
    auto c = compile(R"(module M (en: input logic, a: input logic, y: output logic) {
    always_comb {
        if en {
            y = a;
        }
    }
}
)");
    ASSERT_EQ(c->codes(), std::vector<std::string>{"W0305"});
    EXPECT_EQ(c->diags[0].severity, Severity::Warning);
    auto full = compile(R"(module M (en: input logic, a: input logic, y: output logic) {
    always_comb {
        y = 0;
        if en {
            y = a;
        }
    }
}
)");
    EXPECT_TRUE(full->diags.empty());
}

TEST(Analyzer, LatchBruteForceOracle) {
    LatchGen gen{std::mt19937(2024)};
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        gen.next_cond = 0;
        std::string body = gen.block(0, "        ");
        std::string src = "module M (c0: input logic, c1: input logic, c2: input logic) {\n"
                          "    var y0: logic;\n    var y1: logic;\n    var y2: logic;\n"
                          "    always_comb {\n" + body + "    }\n}\n";
        auto c = compile(src, false);
        ASSERT_TRUE(c->diags.empty()) << src;
        const ConcreteModule* m = c->module("M");
        const Block* block = nullptr;
        for (const ModuleItem& item : m->decl.body)
            if (const auto* comb = std::get_if<AlwaysComb>(&item.node))
                block = &comb->body;
        ASSERT_NE(block, nullptr);

        std::map<std::string, int> count;
        for (int bits = 0; bits < 8; ++bits) {
            std::map<std::string, bool> env{{"c0", bits & 1}, {"c1", bits & 2}, {"c2", bits & 4}};
            std::set<std::string> assigned;
            run_block(*block, env, assigned);
            for (const std::string& y : assigned)
                ++count[y];
        }
        std::set<std::string> expected;
        for (const auto& [y, n] : count)
            if (n > 0 && n < 8)
                expected.insert(y);

        std::set<std::string> actual;
        for (const LatchFinding& f : find_latches(*block))
            actual.insert(f.name);
        EXPECT_EQ(actual, expected) << src;
        ++checked;
    }
    EXPECT_GE(checked, 50);
}

// ---------------------------------------------------------------------------
// Drivers, direction, connectivity

TEST(Analyzer, MultipleDriversCiteBothSites) {
    auto c = compile(R"(module M (i_clk: input clock, i_rst: input reset, o: output logic) {
    var r_cnt: logic;
    always_ff {
        if_reset {
            r_cnt = 0;
        } else {
            r_cnt = 1;
        }
    }
    assign r_cnt = 1;
    assign o = r_cnt;
}
)");
    ASSERT_EQ(c->codes(), std::vector<std::string>{"E0302"});
    EXPECT_EQ(c->diags[0].related.size(), 1u);
}

TEST(Analyzer, UnusedAndUninitialized) {
    auto unused = compile("module M {\n    var x: logic;\n}\n");
    ASSERT_EQ(unused->codes(), std::vector<std::string>{"W0304"});
    EXPECT_EQ(unused->diags[0].severity, Severity::Warning);
    auto uninit = compile("module M (o: output logic) {\n    var x: logic;\n    assign o = x;\n}\n");
    EXPECT_EQ(uninit->codes(), std::vector<std::string>{"E0303"});
    auto output = compile("module M (o: output logic) {\n}\n");
    EXPECT_EQ(output->codes(), std::vector<std::string>{"E0303"});
}

TEST(Analyzer, Direction) {
    auto input = compile("module M (i: input logic, o: output logic) {\n    assign i = 1;\n    assign o = i;\n}\n");
    EXPECT_EQ(input->codes(), std::vector<std::string>{"E0306"});
    auto child = compile(R"(module C (o: output logic) {
    assign o = 1;
}
module M (a: input logic, b: input logic) {
    inst u: C (o: a + b);
}
)");
    EXPECT_EQ(child->codes(), std::vector<std::string>{"E0306"});
}

TEST(Analyzer, Connectivity) {
    std::string counter = support::read_text(support::fixtures_dir() / "fig1/src/counter.vl");
    auto missing = compile(counter + R"(
module Top (i_clk: input clock, i_rst: input reset) {
    inst u: Counter (i_clk: i_clk, i_rst: i_rst);
}
)");
    ASSERT_EQ(missing->codes(), std::vector<std::string>{"E0308"});
    EXPECT_NE(missing->diags[0].message.find("o_cnt"), std::string::npos);

    auto twice = compile(counter + R"(
module Top (i_clk: input clock, i_rst: input reset, o: output logic) {
    inst u: Counter (i_clk: i_clk, i_rst: i_rst, o_cnt: o, o_cnt: o);
}
)");
    auto twice_codes = twice->codes();
    EXPECT_NE(std::find(twice_codes.begin(), twice_codes.end(), "E0309"), twice_codes.end());

    auto unknown = compile(counter + R"(
module Top (i_clk: input clock, i_rst: input reset, o: output logic) {
    inst u: Counter (i_clk: i_clk, i_rst: i_rst, o_cnt: o, o_bad: o);
}
)");
    EXPECT_EQ(unknown->codes(), std::vector<std::string>{"E0307"});

    auto arity = compile(R"(module M (a: input logic, b: input logic, o: output logic) {
    function f (x: logic) -> logic {
        return x;
    }
    assign o = f(a, b);
}
)");
    EXPECT_EQ(arity->codes(), std::vector<std::string>{"E0310"});
}

// ---------------------------------------------------------------------------
// Clock and reset

TEST(Analyzer, ClockResetBinding) {
    auto c = compile(support::read_text(support::fixtures_dir() / "fig1/src/counter.vl"));
    EXPECT_TRUE(c->diags.empty());
    auto two = compile(support::read_text(support::fixtures_dir() / "negative/e0312_ambiguous_clock.vl"));
    EXPECT_EQ(two->codes(), std::vector<std::string>{"E0312"});
    auto none = compile("module M (o: output logic) {\n    always_ff {\n        o = 1;\n    }\n}\n");
    EXPECT_EQ(none->codes(), std::vector<std::string>{"E0312"});
    auto no_reset = compile(R"(module M (i_clk: input clock, o: output logic) {
    always_ff (i_clk) {
        if_reset {
            o = 0;
        }
    }
}
)");
    EXPECT_EQ(no_reset->codes(), std::vector<std::string>{"E0313"});
    auto not_clock = compile(R"(module M (i_clk: input clock, i_x: input logic, o: output logic) {
    always_ff (i_x) {
        o = 1;
    }
}
)");
    EXPECT_EQ(not_clock->codes(), std::vector<std::string>{"E0314"});
    auto data = compile(R"(module M (i_clk: input clock, o: output logic) {
    assign o = i_clk;
}
)");
    EXPECT_EQ(data->codes(), std::vector<std::string>{"E0315"});
}

TEST(Analyzer, ExplicitSensitivityPicksNamedSignals) {
    auto c = compile(support::read_text(support::fixtures_dir() / "fig2/src/module_a.vl"));
    EXPECT_TRUE(c->diags.empty());
    const ConcreteModule* m = c->module("ModuleA");
    ASSERT_NE(m, nullptr);
    int bound = 0;
    for (const ModuleItem& item : m->decl.body) {
        if (const auto* ff = std::get_if<AlwaysFf>(&item.node)) {
            auto b = bind_clock_reset(*m, *ff, item.span, nullptr);
            ASSERT_TRUE(b.has_value());
            EXPECT_TRUE(is_clock_kind(b->clock.kind));
            ++bound;
        }
    }
    EXPECT_GT(bound, 0);
}

// ---------------------------------------------------------------------------
// Clock domains

TEST(Analyzer, DomainJoin) {
    Domain def{};
    Domain a{DomainKind::Named, "a"};
    Domain b{DomainKind::Named, "b"};
    Domain mixed{DomainKind::Mixed, ""};
    EXPECT_EQ(join(def, a), a);
    EXPECT_EQ(join(a, def), a);
    EXPECT_EQ(join(a, a), a);
    EXPECT_EQ(join(a, b).kind, DomainKind::Mixed);
    EXPECT_EQ(join(mixed, a).kind, DomainKind::Mixed);
    EXPECT_EQ(join(def, def), def);
    EXPECT_FALSE(crosses(def, a));
    EXPECT_FALSE(crosses(a, a));
    EXPECT_TRUE(crosses(a, b));
    EXPECT_TRUE(crosses(mixed, a));
}

TEST(Analyzer, DomainInference) {
    auto c = compile(support::read_text(support::fixtures_dir() / "negative/e0316_cdc.vl"), false);
    const ConcreteModule* m = c->module("Top");
    ASSERT_NE(m, nullptr);
    auto domains = infer_domains(*m, c->design);
    EXPECT_EQ(domains.at("r_a"), (Domain{DomainKind::Named, "a"}));
    EXPECT_EQ(domains.at("r_b"), (Domain{DomainKind::Named, "b"}));
    EXPECT_EQ(domains.at("i_d"), (Domain{DomainKind::Named, "a"}));
}

TEST(Analyzer, CombJoinIsMixed) {
    auto c = compile(R"(module M (
    i_clk_a: input `a clock,
    i_clk_b: input `b clock,
    i_x: input `a logic,
    i_y: input `b logic,
    o: output `a logic,
) {
    var w: logic;
    assign w = i_x & i_y;
    always_ff (i_clk_a) {
        o = w;
    }
}
)");
    EXPECT_EQ(c->codes(), std::vector<std::string>{"E0316"});
    const ConcreteModule* m = c->module("M");
    EXPECT_EQ(infer_domains(*m, c->design).at("w").kind, DomainKind::Mixed);
}

TEST(Analyzer, Figure1HasNoCdcFindings) {
    auto c = compile(support::read_text(support::fixtures_dir() / "fig1/src/counter.vl"));
    EXPECT_TRUE(c->diags.empty());
    EXPECT_TRUE(check_cdc(*c->module("Counter"), c->design).empty());
}

// Wrapping the crossing in unsafe (cdc) removes E0316 and adds nothing.
TEST(Analyzer, UnsafeCdcSuppressesOnly) {
    auto crossing = compile(support::read_text(support::fixtures_dir() / "negative/e0316_cdc.vl"));
    EXPECT_EQ(crossing->codes(), std::vector<std::string>{"E0316"});
    auto wrapped = compile(support::read_text(support::fixtures_dir() / "clean/cdc_unsafe.vl"));
    EXPECT_TRUE(wrapped->diags.empty());
}

// Every negative fixture yields exactly its expected code and position.
TEST(Analyzer, NegativeCorpus) {
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(support::fixtures_dir() / "negative")) {
        std::string text = support::read_text(entry.path());
        auto expect = support::parse_expectation(text);
        ASSERT_TRUE(expect.has_value()) << entry.path();
        auto c = compile(std::vector<support::NamedSource>{{entry.path().filename().string(), text}});
        ASSERT_EQ(c->diags.size(), 1u) << entry.path();
        EXPECT_EQ(c->diags[0].code, expect->code) << entry.path();
        EXPECT_EQ(c->diags[0].span->line, expect->line) << entry.path();
        EXPECT_EQ(c->diags[0].span->column, expect->column) << entry.path();
        ++n;
    }
    EXPECT_GE(n, 14);
}

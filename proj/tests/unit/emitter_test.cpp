#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "sv_reader.hpp"
#include "testing.hpp"
#include "vl/emitter.hpp"
#include "vl/lexer.hpp"

using namespace vl;
using support::compile;
using support::SvNode;

namespace {

const char* kFigure1Reference = R"(// Counter
module Counter #(parameter WIDTH = 1)(input logic i_clk , input logic i_rst_n, output logic [WIDTH-1:0] o_cnt);
logic [WIDTH-1:0] r_cnt;
always_ff @ (posedge i_clk or negedge i_rst_n) begin
  if (!i_rst_n) begin
    r_cnt <= 0;
  end else begin
    r_cnt <= r_cnt + 1;
  end
end
always_comb begin
  o_cnt = r_cnt;
end
endmodule
)";

std::vector<EmitConfig> all_configs() {
    std::vector<EmitConfig> out;
    for (ClockEdge e : {ClockEdge::Posedge, ClockEdge::Negedge})
        for (ResetType r : {ResetType::AsyncLow, ResetType::AsyncHigh, ResetType::SyncLow, ResetType::SyncHigh})
            out.push_back({e, r});
    return out;
}

std::string emit(const std::string& source, const std::string& module, const EmitConfig& cfg = {}) {
    auto c = compile(source);
    EXPECT_TRUE(c->diags.empty()) << source;
    const ConcreteModule* m = c->module(module);
    EXPECT_NE(m, nullptr);
    return m ? emit_module(*m, cfg).text : "";
}

SvNode parse_one(const std::string& sv) {
    auto p = support::read_sv(sv);
    EXPECT_TRUE(p.error.empty()) << p.error << "\n" << sv;
    EXPECT_EQ(p.modules.size(), 1u);
    return p.modules.empty() ? SvNode{} : p.modules[0].tree;
}

// Replaces sensitivity lists and the condition of each process's first `if`.
SvNode strip_config(const SvNode& n, bool in_ff = false) {
    if (n.head == "sens")
        return SvNode{"sens", {}};
    SvNode out{n.head, {}};
    bool first_if = in_ff && n.head == "if";
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (first_if && i == 0)
            out.kids.push_back(SvNode{"cond", {}});
        else
            out.kids.push_back(strip_config(n.kids[i], n.head == "always_ff" || (in_ff && n.head == "block")));
    }
    return out;
}

std::string fig(const std::string& rel) { return support::read_text(support::fixtures_dir() / rel); }

TypeSpec var_type(const std::string& ty) {
    auto c = compile("module M {\n    var x: " + ty + ";\n}\n", false);
    for (const ModuleItem& item : c->module("M")->decl.body)
        if (const auto* v = std::get_if<VarDecl>(&item.node))
            return v->type;
    ADD_FAILURE();
    return {};
}

}  // namespace

TEST(Emitter, Figure1MatchesReference) {
    SvNode expected = support::rename(parse_one(kFigure1Reference), {{"i_rst_n", "i_rst"}});
    std::string sv = emit(fig("fig1/src/counter.vl"), "Counter");
    EXPECT_EQ(parse_one(sv).dump(), expected.dump()) << sv;
    EXPECT_NE(sv.find("always_ff @ (posedge i_clk or negedge i_rst) begin"), std::string::npos);
    EXPECT_NE(sv.find("if (!i_rst) begin"), std::string::npos);
    EXPECT_NE(sv.find("r_cnt <= r_cnt + (1);"), std::string::npos);
    EXPECT_NE(sv.find("o_cnt = r_cnt;"), std::string::npos);
    EXPECT_NE(sv.find("parameter int unsigned WIDTH = 1"), std::string::npos);
}

TEST(Emitter, Figure2Published) {
    std::string upper = emit(fig("fig2/src/module_a.vl"), "ModuleA", {ClockEdge::Posedge, ResetType::AsyncLow});
    EXPECT_NE(upper.find("always_ff @ (posedge i_clk_a or negedge i_rst_a) begin\n    if (!i_rst_a) begin"),
              std::string::npos)
        << upper;
    EXPECT_NE(upper.find("always_ff @ (negedge i_clk_b or posedge i_rst_b) begin\n    if (i_rst_b) begin"),
              std::string::npos);
    std::string lower = emit(fig("fig2/src/module_a.vl"), "ModuleA", {ClockEdge::Negedge, ResetType::SyncHigh});
    EXPECT_NE(lower.find("always_ff @ (negedge i_clk_a) begin\n    if (i_rst_a) begin"), std::string::npos) << lower;
    EXPECT_NE(lower.find("always_ff @ (negedge i_clk_b or posedge i_rst_b) begin\n    if (i_rst_b) begin"),
              std::string::npos);
}

// All eight configurations against the lowering rule; the explicit-typed
// `b process never changes.
TEST(Emitter, Figure2Matrix) {
    std::string source = fig("fig2/src/module_a.vl");
    std::string b_reference;
    for (const EmitConfig& cfg : all_configs()) {
        std::string sv = emit(source, "ModuleA", cfg);
        SvNode tree = parse_one(sv);
        auto ffs = support::find_all(tree, "always_ff");
        ASSERT_EQ(ffs.size(), 2u);

        bool async = cfg.reset_type == ResetType::AsyncLow || cfg.reset_type == ResetType::AsyncHigh;
        bool low = cfg.reset_type == ResetType::AsyncLow || cfg.reset_type == ResetType::SyncLow;
        std::string sens = std::string(cfg.clock_type == ClockEdge::Posedge ? "posedge" : "negedge") + " i_clk_a";
        if (async)
            sens += std::string(low ? " or negedge" : " or posedge") + " i_rst_a";
        std::string want = "module X; always_ff @ (" + sens + ") begin if (" + (low ? "!" : "") +
                           "i_rst_a) begin end end endmodule";
        EXPECT_EQ(ffs[0]->dump(), support::find_all(parse_one(want), "always_ff")[0]->dump())
            << to_string(cfg.clock_type) << " " << to_string(cfg.reset_type);

        std::size_t start = sv.find("always_ff @ (negedge i_clk_b");
        ASSERT_NE(start, std::string::npos);
        std::string b = sv.substr(start, sv.find("endmodule") - start);
        if (b_reference.empty())
            b_reference = b;
        EXPECT_EQ(b, b_reference);
    }
}

TEST(Emitter, ConfigOnlyTouchesSensitivityAndResetCondition) {
    for (const char* rel : {"fig1/src/counter.vl", "fig2/src/module_a.vl"}) {
        std::string source = fig(rel);
        auto c = compile(source);
        ASSERT_TRUE(c->diags.empty());
        const ConcreteModule& m = c->design.modules.front();
        std::string reference;
        for (const EmitConfig& cfg : all_configs()) {
            std::string stripped = strip_config(parse_one(emit_module(m, cfg).text)).dump();
            if (reference.empty())
                reference = stripped;
            EXPECT_EQ(stripped, reference) << rel;
        }
    }
}

TEST(Emitter, ExplicitTypesIgnoreConfig) {
    std::string source = R"(module M (
    i_clk: input clock_negedge,
    i_rst: input reset_sync_low,
    o: output logic,
) {
    always_ff {
        if_reset {
            o = 0;
        } else {
            o = 1;
        }
    }
}
)";
    std::string reference = emit(source, "M");
    for (const EmitConfig& cfg : all_configs())
        EXPECT_EQ(emit(source, "M", cfg), reference);
    EXPECT_NE(reference.find("always_ff @ (negedge i_clk) begin"), std::string::npos) << reference;
    EXPECT_NE(reference.find("if (!i_rst) begin"), std::string::npos);
}

TEST(Emitter, LowerType) {
    EXPECT_EQ(lower_type(var_type("logic<WIDTH>")), "logic [WIDTH-1:0]");
    EXPECT_EQ(lower_type(var_type("logic")), "logic");
    EXPECT_EQ(lower_type(var_type("logic<W, X>")), "logic [W-1:0][X-1:0]");
    EXPECT_EQ(lower_type(var_type("u32")), "int unsigned");
    EXPECT_EQ(lower_type(var_type("u64")), "longint unsigned");
    EXPECT_EQ(lower_unpacked(var_type("logic<8> [4]")), " [0:3]");
    EXPECT_EQ(lower_unpacked(var_type("logic")), "");
}

TEST(Emitter, EmptyModule) {
    EXPECT_EQ(emit("module M () {}\n", "M"), "module M;\nendmodule\n");
    EXPECT_EQ(emit("module M {}\n", "M"), "module M;\nendmodule\n");
}

TEST(Emitter, CompoundAssignments) {
    std::string ops[] = {"+", "-", "*", "&", "|", "^", "<<", ">>"};
    for (const std::string& op : ops) {
        std::string source = "module M (i_clk: input clock, i_a: input logic<8>, o: output logic<8>) {\n"
                             "    var r: logic<8>;\n    always_ff {\n        r " + op + "= i_a;\n    }\n"
                             "    always_comb {\n        o = r;\n        o " + op + "= i_a;\n    }\n}\n";
        std::string sv = emit(source, "M");
        EXPECT_NE(sv.find("r <= r " + op + " (i_a);"), std::string::npos) << sv;
        EXPECT_NE(sv.find("o = o " + op + " (i_a);"), std::string::npos) << sv;
    }
}

// Every identifier of a non-generic source survives into the output, and
// each module keeps its always_ff count.
TEST(Emitter, NamesAndProcessesPreserved) {
    for (const char* rel : {"fig1/src/counter.vl", "fig2/src/module_a.vl", "sample/src/sample.vl",
                            "clean/cdc_unsafe.vl"}) {
        std::string source = fig(rel);
        auto c = compile(source);
        ASSERT_TRUE(c->diags.empty()) << rel;
        std::string sv;
        int source_ff = 0;
        for (const ConcreteModule& m : c->design.modules)
            sv += emit_module(m, {}).text;
        LexResult lex = tokenize(c->sources, c->files[0].file);
        for (const Token& t : lex.tokens) {
            if (t.kind == TokenKind::Identifier) {
                EXPECT_NE(sv.find(t.text), std::string::npos) << rel << ": " << t.text;
            }
            if (t.kind == TokenKind::Keyword && t.text == "always_ff")
                ++source_ff;
        }
        auto parsed = support::read_sv(sv);
        ASSERT_TRUE(parsed.error.empty()) << parsed.error;
        int emitted_ff = 0;
        for (const auto& m : parsed.modules)
            emitted_ff += static_cast<int>(support::find_all(m.tree, "always_ff").size());
        EXPECT_EQ(emitted_ff, source_ff) << rel;
    }
}

TEST(Emitter, Figure3Files) {
    auto c = compile(std::vector<support::NamedSource>{{"sram.vl", fig("fig3/src/sram.vl")},
                                                       {"test.vl", fig("fig3/src/test.vl")}});
    ASSERT_TRUE(c->diags.empty());
    std::vector<EmitInput> inputs = {{&c->files[0], "sram.sv"}, {&c->files[1], "test.sv"}};
    auto files = emit_files(inputs, c->design, *c->table, {});
    auto again = emit_files(inputs, c->design, *c->table, {});
    ASSERT_EQ(files.size(), again.size());
    for (std::size_t i = 0; i < files.size(); ++i)
        EXPECT_EQ(files[i].text, again[i].text);

    std::string all;
    for (const EmittedFile& f : files)
        all += f.text;
    auto parsed = support::read_sv(all);
    ASSERT_TRUE(parsed.error.empty()) << parsed.error;
    for (const char* name : {"SramQueue__SramVendorA", "SramQueue__SramVendorB", "Test"})
        EXPECT_NE(parsed.find(name), nullptr) << name;
    EXPECT_EQ(parsed.find("SramQueue"), nullptr);
    std::vector<std::string> inst_types;
    for (const SvNode* inst : support::find_all(parsed.find("SramQueue__SramVendorA")->tree, "inst"))
        inst_types.push_back(inst->kids[0].head + " " + inst->kids[1].head);
    EXPECT_NE(std::find(inst_types.begin(), inst_types.end(), "SramVendorA u_sram"), inst_types.end());
}

TEST(Emitter, NameMap) {
    auto c = compile(std::vector<support::NamedSource>{{"sram.vl", fig("fig3/src/sram.vl")},
                                                       {"test.vl", fig("fig3/src/test.vl")}});
    auto j = nlohmann::json::parse(name_map_json(c->design));
    EXPECT_EQ(j.size(), 2u);
    EXPECT_EQ(j["SramQueue__SramVendorA"]["template"], "SramQueue");
    EXPECT_EQ(j["SramQueue__SramVendorB"]["args"], nlohmann::json::array({"SramVendorB"}));
}

TEST(Emitter, EmptyProjectWritesNothing) {
    auto c = compile(std::vector<support::NamedSource>{});
    EXPECT_TRUE(emit_files({}, c->design, *c->table, {}).empty());
}

TEST(Emitter, WriteFailureIsEio01) {
    support::TempDir dir;
    support::write_text(dir.path() / "blocker", "x");
    Diagnostics d = write_files(dir.path() / "blocker" / "out", {{"a.sv", "module A;\nendmodule\n"}});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].code, "EIO01");

    Diagnostics ok = write_files(dir.path() / "out", {{"sub/a.sv", "module A;\nendmodule\n"}});
    EXPECT_TRUE(ok.empty());
    EXPECT_EQ(support::read_text(dir.path() / "out/sub/a.sv"), "module A;\nendmodule\n");
}

#include "cli.hpp"

#include <CLI11.hpp>

#include "vl/driver.hpp"

namespace vl {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Veryl-subset hardware description toolchain", "vl"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Options opts;
    std::string manifest = opts.manifest.string();
    std::string format = "human";
    std::string out_dir;
    std::string name;
    app.add_option("--manifest", manifest, "Path to vl.toml");
    app.add_flag("--offline", opts.offline, "Never fetch dependencies");
    app.add_option("--format", format, "Diagnostic output format")->check(CLI::IsMember({"human", "json"}));

    auto* cmd_new_ = app.add_subcommand("new", "Create a new project");
    cmd_new_->add_option("name", name, "Project name")->required();
    auto* check = app.add_subcommand("check", "Run all checks");
    auto* build = app.add_subcommand("build", "Check and emit SystemVerilog");
    build->add_option("--out", out_dir, "Output directory");
    auto* fmt = app.add_subcommand("fmt", "Format sources");
    fmt->add_flag("--check", opts.check, "Report files that would change without writing");
    auto* doc = app.add_subcommand("doc", "Generate documentation");
    doc->add_option("--out", out_dir, "Output directory");
    auto* update = app.add_subcommand("update", "Resolve dependencies and write vl.lock");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    opts.manifest = manifest;
    opts.format = format == "json" ? OutputFormat::Json : OutputFormat::Human;
    if (!out_dir.empty())
        opts.out = out_dir;

    if (cmd_new_->parsed())
        return cmd_new(name, opts, out, err);
    if (check->parsed())
        return cmd_check(opts, out, err);
    if (build->parsed())
        return cmd_build(opts, out, err);
    if (fmt->parsed())
        return cmd_fmt(opts, out, err);
    if (doc->parsed())
        return cmd_doc(opts, out, err);
    if (update->parsed())
        return cmd_update(opts, out, err);
    return kExitFailure;
}

}  // namespace vl

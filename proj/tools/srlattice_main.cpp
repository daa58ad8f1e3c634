// Batch CLI: reproduces the result tables, runs the diagnostics, demo and
// Monte Carlo suites, and resumes checkpointed dynamic-program runs.
//
// Exit codes: 0 success, 1 invariant failure, 2 config error,
// 3 resource/resume error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "srlattice/runner.hpp"
#include "srlattice/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string checkpoint_dir;
    std::string projection;
    std::string bound = "both";
    std::string precision;
    int threads = -1;
    bool dry_run = false;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config file (defaults when omitted)");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)");
    cmd->add_option("--checkpoint", a.checkpoint_dir, "checkpoint directory");
    cmd->add_option("--projection", a.projection, "projection scheme: ps1|ps2|ps3");
    cmd->add_option("--bound", a.bound, "bound side: minus|plus|both");
    cmd->add_option("--precision", a.precision, "value storage: f64|f32");
    cmd->add_option("--seed", a.seed, "Monte Carlo seed override");
    cmd->add_flag("--dry-run", a.dry_run, "print size estimates, compute nothing");
}

srl::RunConfig make_config(const CommonArgs& a) {
    srl::RunConfig cfg = a.config_path.empty() ? srl::RunConfig::defaults()
                                               : srl::RunConfig::load(a.config_path);
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    if (a.threads >= 0) cfg.threads = a.threads;
    if (!a.checkpoint_dir.empty()) cfg.checkpoint_dir = a.checkpoint_dir;
    if (!a.projection.empty()) cfg.projection = srl::projection_from_name(a.projection);
    if (!a.precision.empty()) {
        if (a.precision == "f64") cfg.precision = srl::Precision::F64;
        else if (a.precision == "f32") cfg.precision = srl::Precision::F32;
        else throw srl::ConfigError("precision must be f64 or f32");
    }
    if (a.seed) cfg.mc.seed = *a.seed;
    cfg.validate();
    return cfg;
}

srl::TableRunOptions table_options(const CommonArgs& a, bool resume) {
    srl::TableRunOptions opt;
    opt.dry_run = a.dry_run;
    opt.resume = resume;
    if (a.bound == "minus") opt.bound = srl::BoundSide::Minus;
    else if (a.bound == "plus") opt.bound = srl::BoundSide::Plus;
    else if (a.bound != "both") throw srl::ConfigError("bound must be minus|plus|both");
    return opt;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(srl::kVersion) +
                 " - shortfall-risk lattice engine for the truncated Heston model"};
    app.require_subcommand(1);

    CommonArgs args;
    int table_no = 0;
    int resume_table = 1;

    CLI::App* t1 = app.add_subcommand("table1", "shortfall values over the capital grid");
    CLI::App* t2 = app.add_subcommand("table2", "sensitivity to the upper barrier");
    CLI::App* t3 = app.add_subcommand("table3", "sensitivity to the control grid M");
    CLI::App* t4 = app.add_subcommand("table4", "convergence ladder in n");
    CLI::App* diag = app.add_subcommand("diagnostics", "kernel and measure diagnostics");
    CLI::App* demos = app.add_subcommand("demos", "constructive counterexample demos");
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo reference suite");
    CLI::App* resume = app.add_subcommand("resume", "resume a checkpointed table run");
    resume->add_option("--table", resume_table, "table to resume (1..4)")->required();
    for (CLI::App* cmd : {t1, t2, t3, t4, diag, demos, mc, resume}) add_common(cmd, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        srl::RunConfig cfg = make_config(args);
        if (t1->parsed()) table_no = 1;
        if (t2->parsed()) table_no = 2;
        if (t3->parsed()) table_no = 3;
        if (t4->parsed()) table_no = 4;

        if (table_no != 0)
            return srl::run_table(table_no, cfg, table_options(args, false));
        if (diag->parsed()) return srl::run_diagnostics(cfg);
        if (demos->parsed()) return srl::run_demos(cfg);
        if (mc->parsed()) return srl::run_mc(cfg);
        if (resume->parsed()) {
            if (cfg.checkpoint_dir.empty())
                throw srl::CheckpointError("resume needs --checkpoint or a configured directory");
            if (!std::filesystem::exists(cfg.checkpoint_dir))
                throw srl::CheckpointError("checkpoint directory does not exist: " +
                                           cfg.checkpoint_dir);
            return srl::run_table(resume_table, cfg, table_options(args, true));
        }
        return 2;
    } catch (const srl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const srl::CheckpointError& e) {
        std::cerr << "resume/resource error: " << e.what() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return 1;
    }
}

// Command-line driver: bound evaluation, direct solves, Peclet sweeps,
// streamline rendering, and the invariant self-test.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "discflow/render.hpp"
#include "discflow/selftest.hpp"
#include "discflow/sweep.hpp"

namespace {

using namespace discflow;

struct CommonArgs {
    SweepConfig cfg;
    std::string config_path;
    bool nr_set = false, modes_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--source", args.cfg.source,
                    "source name[:params] (constant, gaussian-center, gaussian-ring, "
                    "quadrupole)");
    cmd->add_option("--flow", args.cfg.flow, "roll | branching | energy-roll");
    cmd->add_option_function<std::string>(
        "--constraint",
        [&](const std::string& v) { args.cfg.constraint = constraint_from_string(v); },
        "enstrophy | energy");
    cmd->add_option_function<std::string>(
        "--pe",
        [&](const std::string& v) {
            args.cfg.pe.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) args.cfg.pe.push_back(std::stod(item));
            if (args.cfg.pe.empty()) throw CLI::ValidationError("--pe", "empty list");
        },
        "Peclet value or comma list");
    cmd->add_option("--nr", args.cfg.nr, "radial nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--modes", args.cfg.modes, "theta Fourier modes")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--stretch", args.cfg.stretch, "radial clustering exponent");
    cmd->add_option("--exact-cap", args.cfg.exact_cap,
                    "largest pe for direct ground-truth solves");
    cmd->add_option("--roll-n", args.cfg.roll_n, "azimuthal periods for --flow roll");
    cmd->add_option("--roll-taper", args.cfg.roll_taper, "core taper radius for rolls");
    cmd->add_option("--jobs", args.cfg.jobs, "parallel sweep rows (0 = auto)");
    cmd->add_option("--out", args.cfg.out, "output path");
}

// flags > config file > defaults
void merge_config(CLI::App* cmd, CommonArgs& args) {
    if (args.config_path.empty()) return;
    SweepConfig from_file = parse_config_file(args.config_path);
    SweepConfig merged = from_file;
    const auto keep = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (keep("--source")) merged.source = args.cfg.source;
    if (keep("--flow")) merged.flow = args.cfg.flow;
    if (keep("--constraint")) merged.constraint = args.cfg.constraint;
    if (keep("--pe")) merged.pe = args.cfg.pe;
    if (keep("--nr")) merged.nr = args.cfg.nr;
    if (keep("--modes")) merged.modes = args.cfg.modes;
    if (keep("--stretch")) merged.stretch = args.cfg.stretch;
    if (keep("--exact-cap")) merged.exact_cap = args.cfg.exact_cap;
    if (keep("--roll-n")) merged.roll_n = args.cfg.roll_n;
    if (keep("--roll-taper")) merged.roll_taper = args.cfg.roll_taper;
    if (keep("--jobs")) merged.jobs = args.cfg.jobs;
    if (keep("--out")) merged.out = args.cfg.out;
    args.cfg = merged;
}

// Grid address must stay stable: the other members keep references to it.
struct BuiltProblem {
    std::unique_ptr<PolarGrid> grid;
    std::unique_ptr<Source> source;
    std::unique_ptr<PoissonSolver> solver;
    std::unique_ptr<FlowDesign> design;
};

BuiltProblem build_problem(const SweepConfig& cfg, double pe) {
    long finest = cfg.roll_n;
    if (cfg.flow == "branching") finest = branching_plan(pe).inv_l.back();
    if (cfg.flow == "energy-roll") finest = std::lround(std::sqrt(pe));
    const int modes = std::max<long>(cfg.modes, 8 * finest);
    BuiltProblem p;
    p.grid = std::make_unique<PolarGrid>(cfg.nr, modes, cfg.stretch);
    p.source = std::make_unique<Source>(make_source(cfg.source, *p.grid));
    p.solver = std::make_unique<PoissonSolver>(*p.grid);
    p.design = std::make_unique<FlowDesign>([&] {
        if (cfg.flow == "roll") return roll_flow(*p.source, cfg.roll_n, cfg.roll_taper);
        if (cfg.flow == "branching") return branching_flow(*p.source, branching_plan(pe));
        if (cfg.flow == "energy-roll") return energy_roll_design(*p.source, pe);
        throw std::invalid_argument("unknown flow '" + cfg.flow + "'");
    }());
    return p;
}

int cmd_bound(const SweepConfig& cfg) {
    const double pe = cfg.pe.front();
    auto prob = build_problem(cfg, pe);
    const auto rep = upper_bound(*prob.design, *prob.source, pe, cfg.constraint, *prob.solver);
    const auto lb =
        lower_bound_certify(*prob.design, *prob.source, pe, cfg.constraint, *prob.solver);
    std::printf("pe            %.17g\n", rep.pe);
    std::printf("constraint    %s\n", to_string(rep.constraint).c_str());
    std::printf("upper         %.17g\n", rep.upper);
    std::printf("  flux term   %.17g\n", rep.residual_flux);
    std::printf("  Q term      %.17g\n", rep.residual_q);
    std::printf("  grad_eta    %.17g\n", rep.grad_eta);
    std::printf("  flow_norm   %.17g\n", rep.flow_norm);
    std::printf("lower         %.17g\n", lb.lower);
    std::printf("delta_star    %.17g\n", lb.delta_star);
    return 0;
}

int cmd_solve(const SweepConfig& cfg) {
    const double pe = cfg.pe.front();
    auto prob = build_problem(cfg, pe);
    const auto sol = solve_steady(*prob.design, *prob.source, pe, cfg.constraint, *prob.solver);
    std::printf("pe            %.17g\n", pe);
    std::printf("lambda        %.17g\n", sol.lambda);
    std::printf("iterations    %d\n", sol.iterations);
    std::printf("residual      %.3e\n", sol.residual);
    std::printf("cooling       %.17g\n", sol.cooling);
    std::printf("mean fT       %.17g\n", sol.mean_fT);
    std::printf("identity gap  %.3e\n",
                std::abs(sol.cooling - sol.mean_fT) / std::max(sol.cooling, 1e-300));
    return 0;
}

int cmd_sweep(const SweepConfig& cfg) {
    const SweepTable table = run_sweep(cfg);
    for (const auto& row : table.rows) {
        std::fprintf(stderr, "pe=%.6g %s (%.1fs)%s%s\n", row.pe,
                     row.ok ? "done" : "FAILED", row.wall_seconds,
                     row.error.empty() ? "" : " note: ",
                     row.error.empty() ? "" : row.error.c_str());
    }
    if (cfg.out.empty()) {
        write_csv(table, std::cout);
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + cfg.out);
        write_csv(table, out);
        std::fprintf(stderr, "wrote %s\n", cfg.out.c_str());
    }
    for (const auto& row : table.rows)
        if (!row.ok) return 2;
    return 0;
}

int cmd_render(const SweepConfig& cfg) {
    const double pe = cfg.pe.front();
    auto prob = build_problem(cfg, pe);
    const std::string path = cfg.out.empty() ? "flow.svg" : cfg.out;
    render_streamlines(*prob.design, path);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
    return 0;
}

int cmd_selftest() {
    const auto summary = selftest(std::cout);
    std::printf("%d passed, %d failed, %d skipped\n", summary.passed, summary.failed,
                summary.skipped);
    return summary.failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convection designs and cooling bounds for an internally heated disc"};
    app.require_subcommand(1);

    CommonArgs bound_args, solve_args, sweep_args, render_args;
    bound_args.cfg.nr = 1024;
    solve_args.cfg.nr = 512;
    render_args.cfg.nr = 256;
    render_args.cfg.modes = 64;

    auto* bound = app.add_subcommand("bound", "evaluate the variational bounds at one pe");
    add_common(bound, bound_args);
    auto* solve = app.add_subcommand("solve", "direct steady advection-diffusion solve");
    add_common(solve, solve_args);
    auto* sweep = app.add_subcommand("sweep", "run a Peclet sweep and emit CSV");
    add_common(sweep, sweep_args);
    auto* render = app.add_subcommand("render", "render streamlines to SVG");
    add_common(render, render_args);
    app.add_subcommand("selftest", "run the invariant self-test battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (bound->parsed()) {
            merge_config(bound, bound_args);
            return cmd_bound(bound_args.cfg);
        }
        if (solve->parsed()) {
            merge_config(solve, solve_args);
            return cmd_solve(solve_args.cfg);
        }
        if (sweep->parsed()) {
            merge_config(sweep, sweep_args);
            return cmd_sweep(sweep_args.cfg);
        }
        if (render->parsed()) {
            merge_config(render, render_args);
            return cmd_render(render_args.cfg);
        }
        return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}

// Acceptance suite: end-to-end checks of the bound machinery, the direct
// solver, and the scaling laws, printed one line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <string>
#include <vector>

#include "discflow/render.hpp"
#include "discflow/sweep.hpp"

using namespace discflow;

namespace {

struct Criterion {
    int id;
    std::string label;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Criterion> g_results;
std::vector<std::pair<std::string, double>> g_energy_identity;  // label, rel gap

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void record(int id, const std::string& label, bool pass, const std::string& detail,
            double seconds) {
    g_results.push_back({id, label, pass, detail, seconds});
    std::printf("[%s] criterion %2d: %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

void note_solve(const std::string& label, const SteadySolution& sol) {
    g_energy_identity.emplace_back(
        label, std::abs(sol.cooling - sol.mean_fT) / std::max(sol.cooling, 1e-300));
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// 1. Poisson ground truth at nr = 512.
void criterion1() {
    Timer t;
    PolarGrid grid(512, 8, 2.0);
    PoissonSolver solver(grid);
    auto one = sample_field(grid, [](double, double) { return 1.0; });
    const double value = solver.hminus1_energy(one);
    const double err = std::abs(value - 0.125);
    const bool pass = err <= 1e-8 && t.seconds() < 1.0;
    record(1, "diffusive ground truth 1/8", pass,
           fmt("hminus1(1)=%.12f err=%.2e", value, err), t.seconds());
}

// 2. Flux/Q decomposition identity for roll flows.
void criterion2() {
    Timer t;
    PolarGrid grid(512, 256, 2.0);
    PoissonSolver solver(grid);
    bool pass = true;
    std::string detail;
    for (const char* src : {"constant", "quadrupole"}) {
        Source s = make_source(src, grid);
        for (int n : {8, 16}) {
            FlowDesign d = roll_flow(s, n);
            const auto dec = decompose_residual(d, s, solver);
            const double rel =
                std::abs(dec.lhs - dec.residual_flux - dec.residual_q) / dec.lhs;
            pass = pass && rel <= 1e-5;
            detail += fmt("%s n=%d rel=%.1e ", src, n, rel);
        }
    }
    pass = pass && t.seconds() < 30.0;
    record(2, "decomposition identity (rolls)", pass, detail, t.seconds());
}

// 3. Roll residual 1/n^2 scaling.
void criterion3() {
    Timer t;
    PolarGrid grid(512, 256, 2.0);
    PoissonSolver solver(grid);
    Source s = make_source("constant", grid);
    bool pass = true;
    std::string detail;
    double prev = decompose_residual(roll_flow(s, 8), s, solver).lhs;
    for (int n : {16, 32, 64}) {
        const double cur = decompose_residual(roll_flow(s, n), s, solver).lhs;
        const double ratio = prev / cur;
        pass = pass && ratio >= 3.0 && ratio <= 5.0;
        detail += fmt("r(%d)/r(%d)=%.2f ", n / 2, n, ratio);
        prev = cur;
    }
    pass = pass && t.seconds() < 60.0;
    record(3, "roll residual scaling", pass, detail, t.seconds());
}

// 4. Steady duality gaps at pe = 200.
void criterion4() {
    Timer t;
    PolarGrid grid(512, 256, 2.0);
    PoissonSolver solver(grid);
    Source s = make_source("constant", grid);
    FlowDesign d = roll_flow(s, 4);
    const auto rep = duality_check(d, s, 200.0, solver);
    const double tol = 1e-4 * rep.exact;
    const bool pass = rep.gap_upper <= tol && rep.gap_lower <= tol &&
                      rep.gap_upper >= -1e-6 && rep.gap_lower >= -1e-6 &&
                      t.seconds() < 300.0;
    record(4, "steady duality (roll n=4, pe=200)", pass,
           fmt("exact=%.6e gap_up=%.2e gap_low=%.2e", rep.exact, rep.gap_upper,
               rep.gap_lower),
           t.seconds());
}

// 5. Sandwich lower <= exact <= upper for branching flows.
void criterion5() {
    Timer t;
    bool pass = true;
    std::string detail;
    for (double pe : {316.22776601683793, 1000.0}) {
        PolarGrid coarse(512, 256, 2.0);
        PoissonSolver coarse_solver(coarse);
        Source cs = make_source("constant", coarse);
        FlowDesign cd = branching_flow(cs, branching_plan(pe));
        const auto sol_c = solve_steady(cd, cs, pe, Constraint::enstrophy, coarse_solver);

        PolarGrid fine(1024, 512, 2.0);
        PoissonSolver fine_solver(fine);
        Source fs = make_source("constant", fine);
        FlowDesign fd = branching_flow(fs, branching_plan(pe));
        const auto sol_f = solve_steady(fd, fs, pe, Constraint::enstrophy, fine_solver);
        note_solve(fmt("sandwich pe=%.0f coarse", pe), sol_c);
        note_solve(fmt("sandwich pe=%.0f fine", pe), sol_f);

        const auto rep = upper_bound(fd, fs, pe, Constraint::enstrophy, fine_solver);
        const auto lb = lower_bound_certify(fd, fs, pe, Constraint::enstrophy, fine_solver);
        const double err = std::abs(sol_f.cooling - sol_c.cooling);
        const bool ok = lb.lower <= sol_f.cooling + err + 1e-8 &&
                        sol_f.cooling <= rep.upper + err + 1e-8;
        pass = pass && ok;
        detail += fmt("pe=%.0f: %.4e <= %.4e <= %.4e (err %.1e) ", pe, lb.lower,
                      sol_f.cooling, rep.upper, err);
    }
    pass = pass && t.seconds() < 900.0;
    record(5, "sandwich (branching, exact in between)", pass, detail, t.seconds());
}

SweepTable g_sweep;  // shared by criteria 6 and 8

// 6. Enstrophy-constrained scaling over the default seven-point sweep.
void criterion6() {
    Timer t;
    SweepConfig cfg;
    cfg.flow = "branching";
    cfg.source = "constant";
    cfg.exact_cap = 0.0;  // bound evaluations only
    g_sweep = run_sweep(cfg);
    bool rows_ok = true;
    bool decreasing = true;
    std::string detail;
    double prev_upper = 1e300;
    double cmin = 1e300, cmax = 0.0;
    for (const auto& row : g_sweep.rows) {
        if (!row.ok) {
            rows_ok = false;
            detail += fmt("pe=%.0f FAILED(%s) ", row.pe, row.error.c_str());
            continue;
        }
        const double comp = row.report.upper * std::pow(row.pe, 2.0 / 3.0) /
                            std::pow(std::log(row.pe), 4.0 / 3.0);
        cmin = std::min(cmin, comp);
        cmax = std::max(cmax, comp);
        decreasing = decreasing && row.report.upper < prev_upper;
        prev_upper = row.report.upper;
    }
    const double spread = cmax / cmin;
    const bool pass = rows_ok && decreasing && spread <= 2.0 && t.seconds() < 1800.0;
    record(6, "enstrophy-constrained scaling", pass,
           fmt("compensated spread=%.3f (<=2 required), strictly decreasing=%s %s",
               spread, decreasing ? "yes" : "no", detail.c_str()),
           t.seconds());
}

// 7. Energy-constrained scaling for the bounded-energy rolls.
void criterion7() {
    Timer t;
    SweepConfig cfg;
    cfg.flow = "energy-roll";
    cfg.source = "constant";
    cfg.constraint = Constraint::energy;
    cfg.pe = {1e2, 1e3, 1e4};
    cfg.exact_cap = 0.0;
    const SweepTable table = run_sweep(cfg);
    bool pass = true;
    double cmin = 1e300, cmax = 0.0;
    std::string detail;
    for (const auto& row : table.rows) {
        if (!row.ok) {
            pass = false;
            detail += fmt("pe=%.0f FAILED(%s) ", row.pe, row.error.c_str());
            continue;
        }
        const double comp = row.report.upper * row.pe;
        cmin = std::min(cmin, comp);
        cmax = std::max(cmax, comp);
        detail += fmt("pe=%.0f upper*pe=%.4f ", row.pe, comp);
    }
    const double spread = cmax / cmin;
    pass = pass && spread <= 2.0 && t.seconds() < 600.0;
    record(7, "energy-constrained scaling", pass,
           fmt("spread=%.3f %s", spread, detail.c_str()), t.seconds());
}

// 8. Certified lower bound scaling across the criterion-6 sweep.
void criterion8() {
    Timer t;
    bool pass = true;
    double cmin = 1e300, cmax = 0.0;
    for (const auto& row : g_sweep.rows) {
        if (!row.ok || !row.report.lower) {
            pass = false;
            continue;
        }
        const double comp = *row.report.lower * std::pow(row.pe, 2.0 / 3.0);
        cmin = std::min(cmin, comp);
        cmax = std::max(cmax, comp);
    }
    const double spread = cmax / cmin;
    pass = pass && spread <= 3.0;
    record(8, "certified lower-bound scaling", pass,
           fmt("lower*pe^{2/3} spread=%.3f", spread), t.seconds());
}

// 9. Figure-layout structure: cell counts for rolls and branching designs.
void criterion9() {
    Timer t;
    bool pass = true;
    std::string detail;
    const char* sources[4] = {"constant", "gaussian-center", "gaussian-ring",
                              "quadrupole"};
    {
        PolarGrid grid(256, 64, 2.0);
        for (const char* src : sources) {
            Source s = make_source(src, grid);
            FlowDesign d = roll_flow(s, 8);
            const int cells = azimuthal_sign_changes(d, 0.6);
            pass = pass && cells == 16;
            render_streamlines(d, std::string("/tmp/discflow_roll_") + src + ".svg");
        }
        detail += "rolls: 2n cells; ";
    }
    {
        PolarGrid grid(256, 512, 2.0);
        const BranchingPlan plan = branching_plan(1e4);
        for (const char* src : sources) {
            Source s = make_source(src, grid);
            FlowDesign d = branching_flow(s, plan);
            for (int k = 0; k < plan.n; ++k) {
                const int cells = azimuthal_sign_changes(d, plan.r[k]);
                if (cells != 2 * plan.inv_l[k]) {
                    pass = false;
                    detail += fmt("%s ring %d: %d != %ld ", src, k, cells,
                                  2 * plan.inv_l[k]);
                }
            }
            render_streamlines(d, std::string("/tmp/discflow_branch_") + src + ".svg",
                               RenderOptions{15, 720});
        }
        detail += fmt("branching: cells double across %d rings", plan.n);
    }
    pass = pass && t.seconds() < 60.0;
    record(9, "figure structure (cell counts)", pass, detail, t.seconds());
}

// 10. Energy identity on every accepted solve of this suite.
void criterion10() {
    Timer t;
    bool pass = !g_energy_identity.empty();
    std::string detail;
    double worst = 0.0;
    for (const auto& [label, gap] : g_energy_identity) {
        worst = std::max(worst, gap);
        if (gap > 1e-6) {
            pass = false;
            detail += fmt("%s gap=%.2e ", label.c_str(), gap);
        }
    }
    record(10, "energy identity on accepted solves", pass,
           fmt("%zu solves, worst rel gap=%.2e %s", g_energy_identity.size(), worst,
               detail.c_str()),
           t.seconds());
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();

    int failed = 0;
    for (const auto& c : g_results) failed += c.pass ? 0 : 1;
    std::printf("%zu criteria, %d failed\n", g_results.size(), failed);
    return failed == 0 ? 0 : 1;
}

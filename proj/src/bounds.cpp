#include "discflow/bounds.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace discflow {

std::string to_string(Constraint c) {
    return c == Constraint::enstrophy ? "enstrophy" : "energy";
}

Constraint constraint_from_string(const std::string& s) {
    if (s == "enstrophy") return Constraint::enstrophy;
    if (s == "energy") return Constraint::energy;
    throw std::invalid_argument("unknown constraint '" + s + "'");
}

double boundary_cutoff(double r, double delta) {
    if (r <= 1.0 - delta) return 1.0;
    return std::cos(M_PI_2 * smoothstep5((r - (1.0 - delta)) / delta));
}

double boundary_cutoff_d1(double r, double delta) {
    if (r <= 1.0 - delta) return 0.0;
    const double t = (r - (1.0 - delta)) / delta;
    return -M_PI_2 * smoothstep5_d1(t) / delta *
           std::sin(M_PI_2 * smoothstep5(t));
}

namespace {

void check_pair(const FlowDesign& d, const Source& s) {
    if (!d.grid().same_as(s.grid()))
        throw std::invalid_argument("bounds: design and source on different grids");
}

// Flux profile (theta mean of u_r eta), the w = u eta - g e_r - mean e_r
// field, and optionally the pointwise advection residual u . grad eta - f.
struct ResidualFields {
    std::vector<double> flux;           // mean-flux profile minus F
    double residual_flux = 0.0;
    SpectralScalar rho_w;               // div of the mean-free part of w
    std::optional<SpectralScalar> rho_adv;
};

ResidualFields build_residual_fields(const FlowDesign& d, const Source& s,
                                     bool with_advection) {
    const PolarGrid& grid = d.grid();
    const int nr = grid.nr(), nt = grid.ntheta();
    VectorFieldPolar w(grid);
    std::vector<double> wr_row(nt), wt_row(nt), adv_row(nt);
    std::vector<double> comps(2 * grid.modes() - 1);
    std::vector<double> adv_colloc;
    if (with_advection) adv_colloc.resize(static_cast<size_t>(nr) * nt);

    ResidualFields out{std::vector<double>(nr, 0.0), 0.0, SpectralScalar(grid), {}};
    for (int i = 0; i < nr; ++i) {
        const double inv_r = 1.0 / grid.r(i);
        double mean = 0.0;
        for (int j = 0; j < nt; ++j) {
            const FlowSample fs = d.eval(i, j);
            const double flux = fs.u_r * fs.eta;
            wr_row[j] = flux - s.g(i, j);
            wt_row[j] = fs.u_t * fs.eta;
            mean += flux;
            if (with_advection)
                adv_row[j] = fs.u_r * fs.eta_r + fs.u_t * fs.eta_t * inv_r - s.f(i, j);
        }
        mean /= nt;
        out.flux[i] = mean - s.F(i);
        for (int j = 0; j < nt; ++j) wr_row[j] -= out.flux[i];
        theta_analysis_row(nt, grid.modes(), wr_row.data(), comps.data(), 1);
        for (int c = 0; c < w.r_comp.ncomp(); ++c) w.r_comp.at(c, i) = comps[c];
        theta_analysis_row(nt, grid.modes(), wt_row.data(), comps.data(), 1);
        for (int c = 0; c < w.theta_comp.ncomp(); ++c) w.theta_comp.at(c, i) = comps[c];
        if (with_advection)
            std::memcpy(adv_colloc.data() + static_cast<size_t>(i) * nt, adv_row.data(),
                        sizeof(double) * nt);
    }

    std::vector<double> flux_sq(nr);
    for (int i = 0; i < nr; ++i) flux_sq[i] = out.flux[i] * out.flux[i];
    out.residual_flux = 2.0 * grid.integrate_radial(flux_sq);

    out.rho_w = divergence(w);
    std::memset(out.rho_w.comp(0), 0, sizeof(double) * nr);
    if (with_advection) out.rho_adv = from_collocation(grid, adv_colloc);
    return out;
}

}  // namespace

ResidualDecomposition decompose_residual(const FlowDesign& d, const Source& s,
                                         const PoissonSolver& solver) {
    check_pair(d, s);
    auto fields = build_residual_fields(d, s, /*with_advection=*/true);
    ResidualDecomposition out;
    out.residual_flux = fields.residual_flux;
    out.residual_q = solver.hminus1_energy(fields.rho_w);
    out.lhs = solver.hminus1_energy(*fields.rho_adv);
    return out;
}

BoundReport upper_bound(const FlowDesign& d, const Source& s, double pe,
                        Constraint constraint, const PoissonSolver& solver) {
    check_pair(d, s);
    if (!(pe > 0.0)) throw std::invalid_argument("upper_bound: pe must be positive");
    if (d.plan()) {
        const long need = 4 * d.plan()->inv_l.back();
        if (d.grid().modes() < need)
            throw std::invalid_argument("upper_bound: grid under-resolved, needs >= " +
                                        std::to_string(need) + " theta modes");
    }
    auto fields = build_residual_fields(d, s, /*with_advection=*/false);
    BoundReport report;
    report.pe = pe;
    report.constraint = constraint;
    report.residual_flux = fields.residual_flux;
    report.residual_q = solver.hminus1_energy(fields.rho_w);
    report.grad_eta = d.grad_eta();
    report.flow_norm = d.norm_for(constraint == Constraint::energy);
    report.upper = report.residual_flux + report.residual_q +
                   report.flow_norm * report.grad_eta / (pe * pe);
    return report;
}

LowerBoundResult lower_bound_certify(const FlowDesign& d, const Source& s, double pe,
                                     Constraint constraint, const PoissonSolver& solver,
                                     int delta_points) {
    check_pair(d, s);
    if (!(s.mean() > 0.0))
        throw std::invalid_argument("lower_bound_certify: <f> must be positive");
    const PolarGrid& grid = d.grid();
    const int nr = grid.nr(), nt = grid.ntheta();

    const double norm = d.norm_for(constraint == Constraint::energy);
    if (!(norm > 0.0))
        throw std::invalid_argument("lower_bound_certify: flow norm is zero");
    const double lambda = pe / std::sqrt(norm);

    // Radial theta-mean of f, and the analytic radial velocity coefficients.
    std::vector<double> fbar(nr, 0.0);
    std::vector<double> row(nt);
    SpectralScalar ur(grid);
    std::vector<double> comps(2 * grid.modes() - 1);
    for (int i = 0; i < nr; ++i) {
        double m = 0.0;
        for (int j = 0; j < nt; ++j) {
            m += s.f(i, j);
            row[j] = d.eval(i, j).u_r;
        }
        fbar[i] = m / nt;
        theta_analysis_row(nt, grid.modes(), row.data(), comps.data(), 1);
        for (int c = 0; c < ur.ncomp(); ++c) ur.at(c, i) = comps[c];
    }
    double ur_max = 0.0;
    for (int c = 0; c < ur.ncomp(); ++c)
        for (int i = 0; i < nr; ++i) ur_max = std::max(ur_max, std::abs(ur.at(c, i)));

    const double dmax = 0.5;
    const double dmin = std::min(std::max(1.0 / pe, 1e-4), dmax);
    LowerBoundResult best;
    SpectralScalar rho(grid);
    std::vector<double> prof(nr);
    for (int p = 0; p < delta_points; ++p) {
        const double t = (delta_points == 1) ? 1.0
                                             : static_cast<double>(p) / (delta_points - 1);
        const double delta = dmin * std::pow(dmax / dmin, t);
        std::vector<double> chi(nr), dchi(nr);
        for (int i = 0; i < nr; ++i) {
            chi[i] = boundary_cutoff(grid.r(i), delta);
            dchi[i] = boundary_cutoff_d1(grid.r(i), delta);
        }
        for (int i = 0; i < nr; ++i) prof[i] = fbar[i] * chi[i];
        const double num = 2.0 * grid.integrate_radial(prof);
        for (int i = 0; i < nr; ++i) prof[i] = dchi[i] * dchi[i];
        const double den_grad = 2.0 * grid.integrate_radial(prof);

        // div(lambda u xi) = lambda u_r chi'(r): a per-radius scaling of the
        // radial velocity coefficients. Skip components that vanish.
        for (int c = 0; c < rho.ncomp(); ++c) {
            double mx = 0.0;
            for (int i = 0; i < nr; ++i) {
                const double v = lambda * ur.at(c, i) * dchi[i];
                rho.at(c, i) = v;
                mx = std::max(mx, std::abs(v));
            }
            if (mx <= 1e-14 * lambda * ur_max)
                std::memset(rho.comp(c), 0, sizeof(double) * nr);
        }
        const double den_proj = solver.hminus1_energy(rho);
        const double den = den_grad + den_proj;
        if (!(den > 0.0)) continue;
        const double quotient = num * num / den;
        if (quotient > best.lower) {
            best.lower = quotient;
            best.delta_star = delta;
        }
    }
    return best;
}

}  // namespace discflow

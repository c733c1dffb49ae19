#include "discflow/advdiff.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace discflow {

namespace {

// Coupled operator A x = -Delta x + lambda u . grad x on coefficient vectors,
// with the Dirichlet row kept as the identity. Scratch buffers are reused
// across GMRES iterations.
class AdvDiffOperator {
  public:
    AdvDiffOperator(const FlowDesign& d, double lambda, const PoissonSolver& solver)
        : grid_(&d.grid()), solver_(&solver), lambda_(lambda) {
        const int nr = grid_->nr(), nt = grid_->ntheta();
        ur_.resize(static_cast<size_t>(nr) * nt);
        ut_over_r_.resize(ur_.size());
        for (int i = 0; i < nr; ++i) {
            const double inv_r = 1.0 / grid_->r(i);
            for (int j = 0; j < nt; ++j) {
                const FlowSample fs = d.eval(i, j);
                ur_[static_cast<size_t>(i) * nt + j] = fs.u_r;
                ut_over_r_[static_cast<size_t>(i) * nt + j] = fs.u_t * inv_r;
            }
        }
        const int modes = grid_->modes();
        rows_.reserve(modes);
        for (int m = 0; m < modes; ++m) rows_.push_back(solver.mode_rows(m));
        ncomp_ = 2 * modes - 1;
        ndof_ = static_cast<size_t>(ncomp_) * nr;
        dr_.resize(ndof_);
        dt_.resize(ndof_);
        colloc_a_.resize(ur_.size());
        colloc_b_.resize(ur_.size());
    }

    size_t ndof() const { return ndof_; }
    int ncomp() const { return ncomp_; }
    double lambda() const { return lambda_; }
    double max_speed() const {
        double m = 0.0;
        for (size_t k = 0; k < ur_.size(); ++k)
            m = std::max(m, std::hypot(ur_[k], ut_over_r_[k]));
        return m;
    }

    // y = lambda u . grad x (coefficients in, coefficients out; boundary rows
    // are filled like any others and discarded by the caller if needed).
    void advect(const double* x, double* y) const {
        const int nr = grid_->nr(), nt = grid_->ntheta(), modes = grid_->modes();
        for (int c = 0; c < ncomp_; ++c) {
            const int m = SpectralScalar::mode_of_comp(c);
            const auto& rows = grid_->deriv1(m);
            const double* xc = x + static_cast<size_t>(c) * nr;
            double* dc = dr_.data() + static_cast<size_t>(c) * nr;
            for (int i = 0; i < nr; ++i) {
                const auto& row = rows[i];
                double sum = 0.0;
                for (size_t j = 0; j < row.w.size(); ++j)
                    sum += row.w[j] * xc[row.first + j];
                dc[i] = sum;
            }
        }
        std::memset(dt_.data(), 0, sizeof(double) * nr);
        for (int m = 1; m < modes; ++m) {
            const double* xa = x + static_cast<size_t>(2 * m - 1) * nr;
            const double* xb = x + static_cast<size_t>(2 * m) * nr;
            double* da = dt_.data() + static_cast<size_t>(2 * m - 1) * nr;
            double* db = dt_.data() + static_cast<size_t>(2 * m) * nr;
            for (int i = 0; i < nr; ++i) {
                da[i] = m * xb[i];
                db[i] = -m * xa[i];
            }
        }
        for (int i = 0; i < nr; ++i) {
            theta_synthesis_row(nt, modes, dr_.data() + i, nr,
                                colloc_a_.data() + static_cast<size_t>(i) * nt);
            theta_synthesis_row(nt, modes, dt_.data() + i, nr,
                                colloc_b_.data() + static_cast<size_t>(i) * nt);
        }
        for (size_t k = 0; k < colloc_a_.size(); ++k)
            colloc_a_[k] = lambda_ * (ur_[k] * colloc_a_[k] + ut_over_r_[k] * colloc_b_[k]);
        for (int i = 0; i < nr; ++i)
            theta_analysis_row(nt, modes, colloc_a_.data() + static_cast<size_t>(i) * nt,
                               y + i, nr);
    }

    void apply(const double* x, double* y) const {
        const int nr = grid_->nr();
        advect(x, y);
        for (int c = 0; c < ncomp_; ++c) {
            const int m = SpectralScalar::mode_of_comp(c);
            const auto& rows = rows_[m];
            const double* xc = x + static_cast<size_t>(c) * nr;
            double* yc = y + static_cast<size_t>(c) * nr;
            for (int i = 0; i < nr - 1; ++i) {
                const auto& row = rows[i];
                double sum = 0.0;
                for (size_t j = 0; j < row.w.size(); ++j)
                    sum += row.w[j] * xc[row.first + j];
                yc[i] -= sum;
            }
            yc[nr - 1] = xc[nr - 1];  // Dirichlet row
        }
    }

    // x = M^{-1} y with M = (-Delta interior, identity boundary).
    void precondition(const double* y, double* x) const {
        const int nr = grid_->nr();
        std::vector<double> rhs(2 * nr);
        for (int m = 0; m < grid_->modes(); ++m) {
            const int nrhs = (m == 0) ? 1 : 2;
            const int ca = (m == 0) ? 0 : 2 * m - 1;
            for (int k = 0; k < nrhs; ++k) {
                const double* yc = y + static_cast<size_t>(ca + k) * nr;
                for (int i = 0; i < nr - 1; ++i) rhs[k * nr + i] = -yc[i];
                rhs[k * nr + nr - 1] = yc[nr - 1];
            }
            solver_->solve_mode_inplace(m, rhs.data(), nrhs);
            for (int k = 0; k < nrhs; ++k)
                std::memcpy(x + static_cast<size_t>(ca + k) * nr, rhs.data() + k * nr,
                            sizeof(double) * nr);
        }
    }

  private:
    const PolarGrid* grid_;
    const PoissonSolver* solver_;
    double lambda_;
    std::vector<double> ur_, ut_over_r_;
    std::vector<std::vector<StencilRow>> rows_;
    int ncomp_ = 0;
    size_t ndof_ = 0;
    mutable std::vector<double> dr_, dt_, colloc_a_, colloc_b_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Right-preconditioned restarted GMRES; returns iterations taken.
int gmres(const AdvDiffOperator& op, const std::vector<double>& b,
          std::vector<double>& x, const SolveOptions& opts, double* final_resid,
          std::vector<double>* history) {
    const size_t n = b.size();
    const int m = opts.restart;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        *final_resid = 0.0;
        return 0;
    }
    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<double> H(static_cast<size_t>(m + 1) * m, 0.0);
    std::vector<double> cs(m), sn(m), gamma(m + 1);
    std::vector<double> w(n), z(n);
    int total_iter = 0;

    while (true) {
        // r = b - A x
        op.apply(x.data(), w.data());
        for (size_t k = 0; k < n; ++k) w[k] = b[k] - w[k];
        double beta = norm2(w);
        if (history) history->push_back(beta / bnorm);
        if (beta / bnorm <= opts.rtol || total_iter >= opts.max_iterations) {
            *final_resid = beta / bnorm;
            return total_iter;
        }
        for (size_t k = 0; k < n; ++k) V[0][k] = w[k] / beta;
        std::fill(gamma.begin(), gamma.end(), 0.0);
        gamma[0] = beta;
        int j = 0;
        for (; j < m && total_iter < opts.max_iterations; ++j, ++total_iter) {
            op.precondition(V[j].data(), z.data());
            op.apply(z.data(), w.data());
            // modified Gram-Schmidt
            for (int i = 0; i <= j; ++i) {
                const double h = dot(w, V[i]);
                H[static_cast<size_t>(i) * m + j] = h;
                for (size_t k = 0; k < n; ++k) w[k] -= h * V[i][k];
            }
            const double h1 = norm2(w);
            H[static_cast<size_t>(j + 1) * m + j] = h1;
            if (h1 > 0.0)
                for (size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / h1;
            // Givens rotations
            for (int i = 0; i < j; ++i) {
                const double t = H[static_cast<size_t>(i) * m + j];
                H[static_cast<size_t>(i) * m + j] =
                    cs[i] * t + sn[i] * H[static_cast<size_t>(i + 1) * m + j];
                H[static_cast<size_t>(i + 1) * m + j] =
                    -sn[i] * t + cs[i] * H[static_cast<size_t>(i + 1) * m + j];
            }
            const double a = H[static_cast<size_t>(j) * m + j];
            const double bb = H[static_cast<size_t>(j + 1) * m + j];
            const double rho = std::hypot(a, bb);
            cs[j] = a / rho;
            sn[j] = bb / rho;
            H[static_cast<size_t>(j) * m + j] = rho;
            H[static_cast<size_t>(j + 1) * m + j] = 0.0;
            gamma[j + 1] = -sn[j] * gamma[j];
            gamma[j] = cs[j] * gamma[j];
            if (history) history->push_back(std::abs(gamma[j + 1]) / bnorm);
            if (std::abs(gamma[j + 1]) / bnorm <= opts.rtol) {
                ++j;
                ++total_iter;
                break;
            }
        }
        // back substitution and update
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = gamma[i];
            for (int k = i + 1; k < j; ++k) s -= H[static_cast<size_t>(i) * m + k] * y[k];
            y[i] = s / H[static_cast<size_t>(i) * m + i];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < j; ++i)
            for (size_t k = 0; k < n; ++k) w[k] += y[i] * V[i][k];
        op.precondition(w.data(), z.data());
        for (size_t k = 0; k < n; ++k) x[k] += z[k];
    }
}

void check_resolvable(const PolarGrid& grid, const AdvDiffOperator& op, double lambda) {
    const int nr = grid.nr();
    const double dtheta = 2.0 * M_PI / grid.ntheta();
    double worst = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double below = (i == 0) ? grid.r(0) : grid.r(i) - grid.r(i - 1);
        const double above = (i + 1 < nr) ? grid.r(i + 1) - grid.r(i) : below;
        const double h = std::max({below, above, grid.r(i) * dtheta});
        worst = std::max(worst, h);
    }
    const double cell_pe = std::abs(lambda) * op.max_speed() * worst;
    if (cell_pe > 2.0) {
        const double factor = cell_pe / 2.0;
        const int need_nr = static_cast<int>(std::ceil(grid.nr() * factor));
        const int need_modes = static_cast<int>(std::ceil(grid.modes() * factor));
        std::ostringstream msg;
        msg << "solve_steady: cell Peclet " << cell_pe << " exceeds 2; needs"
            << " approximately nr >= " << need_nr << ", modes >= " << need_modes;
        throw ResolvabilityError(msg.str(), need_nr, need_modes);
    }
}

std::vector<double> rhs_from_source(const Source& s) {
    SpectralScalar f = s.sample_f();
    const int nr = s.grid().nr();
    std::vector<double> b(static_cast<size_t>(f.ncomp()) * nr);
    for (int c = 0; c < f.ncomp(); ++c) {
        std::memcpy(b.data() + static_cast<size_t>(c) * nr, f.comp(c),
                    sizeof(double) * nr);
        b[static_cast<size_t>(c) * nr + nr - 1] = 0.0;
    }
    return b;
}

SpectralScalar wrap(const PolarGrid& grid, const std::vector<double>& x) {
    SpectralScalar T(grid);
    std::memcpy(T.comp(0), x.data(), sizeof(double) * x.size());
    return T;
}

SteadySolution run_solve(const FlowDesign& d, const Source& s, double lambda,
                         const PoissonSolver& solver, const SolveOptions& opts) {
    const PolarGrid& grid = d.grid();
    AdvDiffOperator op(d, lambda, solver);
    check_resolvable(grid, op, lambda);
    auto b = rhs_from_source(s);
    std::vector<double> x(b.size(), 0.0);
    double resid = 0.0;
    std::vector<double> history;
    const int iters = gmres(op, b, x, opts, &resid, &history);
    if (resid > std::max(opts.rtol * 10.0, 1e-9)) {
        std::ostringstream msg;
        msg << "solve_steady: GMRES stalled at relative residual " << resid << " after "
            << iters << " iterations; history tail:";
        const size_t tail = std::min<size_t>(history.size(), 8);
        for (size_t k = history.size() - tail; k < history.size(); ++k)
            msg << " " << history[k];
        throw std::runtime_error(msg.str());
    }
    SteadySolution sol{wrap(grid, x), lambda, iters, resid, 0.0, 0.0};
    sol.cooling = grad_mean_square(sol.T);
    sol.mean_fT = inner_mean(s.sample_f(), sol.T);
    return sol;
}

}  // namespace

double cooling_value(const SpectralScalar& T) { return grad_mean_square(T); }

SteadySolution solve_steady(const FlowDesign& d, const Source& s, double pe,
                            Constraint constraint, const PoissonSolver& solver,
                            const SolveOptions& opts) {
    if (!d.grid().same_as(s.grid()))
        throw std::invalid_argument("solve_steady: design and source on different grids");
    const double norm = d.norm_for(constraint == Constraint::energy);
    const double lambda = (norm > 0.0) ? pe / std::sqrt(norm) : 0.0;
    return run_solve(d, s, lambda, solver, opts);
}

DualityReport duality_check(const FlowDesign& d, const Source& s, double pe,
                            const PoissonSolver& solver, Constraint constraint,
                            const SolveOptions& opts) {
    const PolarGrid& grid = d.grid();
    const double norm = d.norm_for(constraint == Constraint::energy);
    const double lambda = (norm > 0.0) ? pe / std::sqrt(norm) : 0.0;
    SteadySolution plus = run_solve(d, s, lambda, solver, opts);
    SteadySolution minus = run_solve(d, s, -lambda, solver, opts);

    SpectralScalar eta(grid), xi(grid);
    const int nr = grid.nr();
    for (int c = 0; c < eta.ncomp(); ++c)
        for (int i = 0; i < nr; ++i) {
            eta.at(c, i) = 0.5 * (plus.T.at(c, i) - minus.T.at(c, i));
            xi.at(c, i) = 0.5 * (plus.T.at(c, i) + minus.T.at(c, i));
        }

    AdvDiffOperator op(d, lambda, solver);
    SpectralScalar f = s.sample_f();
    const size_t ndof = static_cast<size_t>(eta.ncomp()) * nr;
    std::vector<double> adv(ndof);

    // Upper functional at eta*: fint|grad eta|^2 + fint|grad inv_lap(u.grad eta - f)|^2.
    op.advect(eta.comp(0), adv.data());
    SpectralScalar rho = wrap(grid, adv);
    for (int c = 0; c < rho.ncomp(); ++c)
        for (int i = 0; i < nr; ++i) rho.at(c, i) -= f.at(c, i);
    const double eta_value = grad_mean_square(eta) + solver.hminus1_energy(rho);

    // Quotient at xi*: <f xi>^2 / (fint|grad xi|^2 + fint|grad inv_lap div(u xi)|^2).
    op.advect(xi.comp(0), adv.data());
    SpectralScalar rho_xi = wrap(grid, adv);
    const double fxi = inner_mean(f, xi);
    const double xi_value =
        fxi * fxi / (grad_mean_square(xi) + solver.hminus1_energy(rho_xi));

    DualityReport rep;
    rep.exact = plus.cooling;
    rep.eta_value = eta_value;
    rep.xi_value = xi_value;
    rep.gap_upper = eta_value - rep.exact;
    rep.gap_lower = rep.exact - xi_value;
    rep.reversal_mismatch = std::abs(plus.cooling - minus.cooling);
    return rep;
}

}  // namespace discflow

#include "discflow/poisson.hpp"

#include <lapacke.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace discflow {

namespace {
std::atomic<bool> g_stencil_fault{false};
constexpr int kKl = 4;
constexpr int kKu = 4;
}  // namespace

void set_poisson_stencil_fault(bool enabled) { g_stencil_fault.store(enabled); }

struct PoissonSolver::Impl {
    const PolarGrid* grid;
    int nr;
    int ldab;
    // Lazily built banded LU factors, one per mode.
    mutable std::vector<std::vector<double>> ab;
    mutable std::vector<std::vector<lapack_int>> ipiv;
    mutable std::vector<std::once_flag> built;
    bool fault;

    explicit Impl(const PolarGrid& g)
        : grid(&g),
          nr(g.nr()),
          ldab(2 * kKl + kKu + 1),
          ab(g.modes()),
          ipiv(g.modes()),
          built(g.modes()),
          fault(g_stencil_fault.load()) {}

    // Rows of L_m: interior rows collocate the ODE, last row is a(1) = 0.
    // Returns dense-by-rows stencils to share between factorization and apply.
    std::vector<StencilRow> operator_rows(int m) const {
        const auto& d1 = grid->parity_deriv1(m);
        const auto& d2 = grid->parity_deriv2(m);
        std::vector<StencilRow> rows(nr);
        for (int i = 0; i < nr - 1; ++i) {
            const double r = grid->r(i);
            const double inv_r = 1.0 / r;
            const double m2r2 = m * m * inv_r * inv_r;
            const int lo = std::min(d1[i].first, d2[i].first);
            const int hi = std::max<int>(d1[i].first + d1[i].w.size(),
                                         d2[i].first + d2[i].w.size());
            StencilRow row;
            row.first = lo;
            row.w.assign(hi - lo, 0.0);
            for (size_t j = 0; j < d2[i].w.size(); ++j)
                row.w[d2[i].first - lo + j] += d2[i].w[j];
            for (size_t j = 0; j < d1[i].w.size(); ++j)
                row.w[d1[i].first - lo + j] += inv_r * d1[i].w[j];
            row.w[i - lo] -= m2r2;
            if (fault && i == nr / 2) row.w[i - lo] *= 1.0 + 1e-3;
            rows[i] = std::move(row);
        }
        rows[nr - 1].first = nr - 1;
        rows[nr - 1].w = {1.0};
        return rows;
    }

    void build(int m) const {
        std::call_once(built[m], [&] {
            auto rows = operator_rows(m);
            std::vector<double> band(static_cast<size_t>(ldab) * nr, 0.0);
            for (int i = 0; i < nr; ++i) {
                const auto& row = rows[i];
                for (size_t k = 0; k < row.w.size(); ++k) {
                    const int j = row.first + static_cast<int>(k);
                    band[static_cast<size_t>(j) * ldab + (kKl + kKu + i - j)] = row.w[k];
                }
            }
            std::vector<lapack_int> piv(nr);
            const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, nr, nr, kKl, kKu,
                                                   band.data(), ldab, piv.data());
            if (info != 0)
                throw std::runtime_error("PoissonSolver: banded factorization failed, mode " +
                                         std::to_string(m));
            ab[m] = std::move(band);
            ipiv[m] = std::move(piv);
        });
    }

    void solve_inplace(int m, double* rhs, int nrhs) const {
        build(m);
        const lapack_int info =
            LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', nr, kKl, kKu, nrhs, ab[m].data(), ldab,
                           ipiv[m].data(), rhs, nr);
        if (info != 0) throw std::runtime_error("PoissonSolver: banded solve failed");
    }
};

PoissonSolver::PoissonSolver(const PolarGrid& grid)
    : grid_(&grid), impl_(std::make_unique<Impl>(grid)) {}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

std::vector<double> PoissonSolver::solve_mode(int m, const std::vector<double>& rhs) const {
    std::vector<double> x = rhs;
    x[impl_->nr - 1] = 0.0;  // Dirichlet row
    impl_->solve_inplace(m, x.data(), 1);
    return x;
}

std::vector<double> PoissonSolver::apply_mode(int m, const std::vector<double>& a) const {
    auto rows = impl_->operator_rows(m);
    return PolarGrid::apply(rows, a);
}

std::vector<StencilRow> PoissonSolver::mode_rows(int m) const {
    return impl_->operator_rows(m);
}

void PoissonSolver::solve_mode_inplace(int m, double* rhs, int nrhs) const {
    impl_->solve_inplace(m, rhs, nrhs);
}

SpectralScalar PoissonSolver::inv_laplacian_dirichlet(const SpectralScalar& rho) const {
    if (!grid_->same_as(rho.grid()))
        throw std::invalid_argument("inv_laplacian_dirichlet: grid mismatch");
    SpectralScalar w(*grid_);
    const int nr = grid_->nr();
    std::vector<double> rhs(2 * nr);
    for (int m = 0; m < grid_->modes(); ++m) {
        const int nrhs = (m == 0) ? 1 : 2;
        const int ca = (m == 0) ? 0 : 2 * m - 1;
        for (int k = 0; k < nrhs; ++k) {
            std::memcpy(rhs.data() + k * nr, rho.comp(ca + k), sizeof(double) * nr);
            rhs[k * nr + nr - 1] = 0.0;
        }
        impl_->solve_inplace(m, rhs.data(), nrhs);
        for (int k = 0; k < nrhs; ++k)
            std::memcpy(w.comp(ca + k), rhs.data() + k * nr, sizeof(double) * nr);
    }
    return w;
}

SpectralScalar PoissonSolver::laplacian(const SpectralScalar& phi) const {
    SpectralScalar out(*grid_);
    for (int c = 0; c < phi.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        out.set_comp(c, apply_mode(m, phi.comp_vec(c)));
    }
    return out;
}

double PoissonSolver::hminus1_energy(const SpectralScalar& rho) const {
    if (!grid_->same_as(rho.grid()))
        throw std::invalid_argument("hminus1_energy: grid mismatch");
    const int nr = grid_->nr();
    const auto& w = grid_->quad_weights();
    std::vector<double> rhs(2 * nr);
    double energy = 0.0;
    for (int m = 0; m < grid_->modes(); ++m) {
        const int nrhs = (m == 0) ? 1 : 2;
        const int ca = (m == 0) ? 0 : 2 * m - 1;
        bool nonzero = false;
        for (int k = 0; k < nrhs && !nonzero; ++k) {
            const double* src = rho.comp(ca + k);
            for (int i = 0; i < nr; ++i)
                if (src[i] != 0.0) {
                    nonzero = true;
                    break;
                }
        }
        if (!nonzero) continue;
        for (int k = 0; k < nrhs; ++k) {
            std::memcpy(rhs.data() + k * nr, rho.comp(ca + k), sizeof(double) * nr);
            rhs[k * nr + nr - 1] = 0.0;
        }
        impl_->solve_inplace(m, rhs.data(), nrhs);
        const double fac = (m == 0) ? 2.0 : 1.0;
        for (int k = 0; k < nrhs; ++k) {
            std::vector<double> a(rhs.begin() + k * nr, rhs.begin() + (k + 1) * nr);
            auto d = PolarGrid::apply(grid_->deriv1(m), a);
            double s = 0.0;
            for (int i = 0; i < nr; ++i) {
                const double ang = (m > 0) ? m * a[i] / grid_->r(i) : 0.0;
                s += w[i] * (d[i] * d[i] + ang * ang);
            }
            energy += fac * s;
        }
    }
    return energy;
}

double PoissonSolver::qform(const VectorFieldPolar& v) const {
    // Divergence of v; its theta-mean corresponds to the radial part that the
    // flux term accounts for, so only modes m >= 1 enter Q.
    SpectralScalar rho = divergence(v);
    std::memset(rho.comp(0), 0, sizeof(double) * grid_->nr());
    return hminus1_energy(rho);
}

double PoissonSolver::qform_upper(const VectorFieldPolar& v) const {
    const PolarGrid& grid = v.r_comp.grid();
    SpectralScalar phi = theta_antiderivative(v.r_comp);
    SpectralScalar integrand(grid);
    const int nr = grid.nr();
    std::vector<double> rphi(nr);
    for (int c = 0; c < phi.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        for (int i = 0; i < nr; ++i) rphi[i] = grid.r(i) * phi.at(c, i);
        auto d = PolarGrid::apply(grid.deriv1(m), rphi);
        for (int i = 0; i < nr; ++i) integrand.at(c, i) = d[i] + v.theta_comp.at(c, i);
    }
    return l2_mean_square(integrand);
}

}  // namespace discflow

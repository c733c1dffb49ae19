#include "discflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace discflow {

namespace {

// FFTW planning is not thread-safe; execution on caller buffers is. Plans and
// scratch live in a thread-local cache keyed by transform length.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftPair {
    int n = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit FftPair(int n_) : n(n_) {
        real = fftw_alloc_real(n);
        cplx = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    }
    ~FftPair() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;
};

FftPair& fft_for(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<FftPair>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPair>(n);
    return *slot;
}

}  // namespace

SpectralScalar::SpectralScalar(const PolarGrid& grid)
    : grid_(&grid),
      ncomp_(2 * grid.modes() - 1),
      data_(static_cast<size_t>(2 * grid.modes() - 1) * grid.nr(), 0.0) {}

std::vector<double> SpectralScalar::comp_vec(int c) const {
    return std::vector<double>(comp(c), comp(c) + grid_->nr());
}

void SpectralScalar::set_comp(int c, const std::vector<double>& v) {
    std::memcpy(comp(c), v.data(), sizeof(double) * grid_->nr());
}

void theta_analysis_row(int ntheta, int modes, const double* samples, double* comps,
                        int comp_stride) {
    FftPair& fft = fft_for(ntheta);
    std::memcpy(fft.real, samples, sizeof(double) * ntheta);
    fftw_execute_dft_r2c(fft.fwd, fft.real, fft.cplx);
    const double scale = 1.0 / ntheta;
    comps[0] = fft.cplx[0][0] * scale;
    for (int m = 1; m < modes; ++m) {
        comps[static_cast<size_t>(2 * m - 1) * comp_stride] = 2.0 * scale * fft.cplx[m][0];
        comps[static_cast<size_t>(2 * m) * comp_stride] = -2.0 * scale * fft.cplx[m][1];
    }
}

void theta_synthesis_row(int ntheta, int modes, const double* comps, int comp_stride,
                         double* samples) {
    FftPair& fft = fft_for(ntheta);
    const int nc = ntheta / 2 + 1;
    for (int k = 0; k < nc; ++k) fft.cplx[k][0] = fft.cplx[k][1] = 0.0;
    fft.cplx[0][0] = comps[0];
    for (int m = 1; m < modes; ++m) {
        fft.cplx[m][0] = 0.5 * comps[static_cast<size_t>(2 * m - 1) * comp_stride];
        fft.cplx[m][1] = -0.5 * comps[static_cast<size_t>(2 * m) * comp_stride];
    }
    fftw_execute_dft_c2r(fft.bwd, fft.cplx, fft.real);
    std::memcpy(samples, fft.real, sizeof(double) * ntheta);
}

SpectralScalar from_collocation(const PolarGrid& grid, const std::vector<double>& colloc) {
    if (colloc.size() != static_cast<size_t>(grid.nr()) * grid.ntheta())
        throw std::invalid_argument("from_collocation: size mismatch");
    SpectralScalar phi(grid);
    const int nr = grid.nr();
    std::vector<double> row(2 * grid.modes() - 1);
    for (int i = 0; i < nr; ++i) {
        theta_analysis_row(grid.ntheta(), grid.modes(),
                           colloc.data() + static_cast<size_t>(i) * grid.ntheta(),
                           row.data(), 1);
        for (int c = 0; c < phi.ncomp(); ++c) phi.at(c, i) = row[c];
    }
    return phi;
}

std::vector<double> to_collocation(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    std::vector<double> colloc(static_cast<size_t>(grid.nr()) * grid.ntheta());
    std::vector<double> row(phi.ncomp());
    for (int i = 0; i < grid.nr(); ++i) {
        for (int c = 0; c < phi.ncomp(); ++c) row[c] = phi.at(c, i);
        theta_synthesis_row(grid.ntheta(), grid.modes(), row.data(), 1,
                            colloc.data() + static_cast<size_t>(i) * grid.ntheta());
    }
    return colloc;
}

double mean_over_disc(const SpectralScalar& phi) {
    return 2.0 * phi.grid().integrate_radial(phi.comp_vec(0));
}

VectorFieldPolar gradient(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    VectorFieldPolar v(grid);
    const int nr = grid.nr();
    for (int c = 0; c < phi.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        auto d = PolarGrid::apply(grid.deriv1(m), phi.comp_vec(c));
        v.r_comp.set_comp(c, d);
    }
    for (int m = 1; m < grid.modes(); ++m) {
        for (int i = 0; i < nr; ++i) {
            const double inv_r = 1.0 / grid.r(i);
            v.theta_comp.at(2 * m - 1, i) = m * phi.at(2 * m, i) * inv_r;
            v.theta_comp.at(2 * m, i) = -m * phi.at(2 * m - 1, i) * inv_r;
        }
    }
    return v;
}

SpectralScalar divergence(const VectorFieldPolar& v) {
    const PolarGrid& grid = v.r_comp.grid();
    if (!grid.same_as(v.theta_comp.grid()))
        throw std::invalid_argument("divergence: components on different grids");
    SpectralScalar out(grid);
    const int nr = grid.nr();
    std::vector<double> rvr(nr);
    for (int c = 0; c < out.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        for (int i = 0; i < nr; ++i) rvr[i] = grid.r(i) * v.r_comp.at(c, i);
        auto d = PolarGrid::apply(grid.deriv1(m), rvr);
        for (int i = 0; i < nr; ++i) out.at(c, i) = d[i] / grid.r(i);
    }
    for (int m = 1; m < grid.modes(); ++m) {
        for (int i = 0; i < nr; ++i) {
            const double inv_r = 1.0 / grid.r(i);
            out.at(2 * m - 1, i) += m * v.theta_comp.at(2 * m, i) * inv_r;
            out.at(2 * m, i) -= m * v.theta_comp.at(2 * m - 1, i) * inv_r;
        }
    }
    return out;
}

VectorFieldPolar perp_gradient(const SpectralScalar& psi) {
    const PolarGrid& grid = psi.grid();
    VectorFieldPolar u(grid);
    for (int m = 1; m < grid.modes(); ++m) {
        for (int i = 0; i < grid.nr(); ++i) {
            const double inv_r = 1.0 / grid.r(i);
            u.r_comp.at(2 * m - 1, i) = -m * psi.at(2 * m, i) * inv_r;
            u.r_comp.at(2 * m, i) = m * psi.at(2 * m - 1, i) * inv_r;
        }
    }
    for (int c = 0; c < psi.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        u.theta_comp.set_comp(c, PolarGrid::apply(grid.deriv1(m), psi.comp_vec(c)));
    }
    return u;
}

std::vector<double> theta_average(const SpectralScalar& phi) { return phi.comp_vec(0); }

SpectralScalar theta_antiderivative(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    SpectralScalar out(grid);
    for (int m = 1; m < grid.modes(); ++m) {
        for (int i = 0; i < grid.nr(); ++i) {
            out.at(2 * m - 1, i) = -phi.at(2 * m, i) / m;
            out.at(2 * m, i) = phi.at(2 * m - 1, i) / m;
        }
    }
    return out;
}

SpectralScalar theta_derivative(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    SpectralScalar out(grid);
    for (int m = 1; m < grid.modes(); ++m) {
        for (int i = 0; i < grid.nr(); ++i) {
            out.at(2 * m - 1, i) = m * phi.at(2 * m, i);
            out.at(2 * m, i) = -m * phi.at(2 * m - 1, i);
        }
    }
    return out;
}

double l2_mean_square(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    const auto& w = grid.quad_weights();
    double s = 0.0;
    for (int i = 0; i < grid.nr(); ++i) {
        const double a0 = phi.at(0, i);
        s += 2.0 * w[i] * a0 * a0;
    }
    for (int c = 1; c < phi.ncomp(); ++c) {
        const double* a = phi.comp(c);
        double sc = 0.0;
        for (int i = 0; i < grid.nr(); ++i) sc += w[i] * a[i] * a[i];
        s += sc;
    }
    return s;
}

double grad_mean_square(const SpectralScalar& phi) {
    const PolarGrid& grid = phi.grid();
    const auto& w = grid.quad_weights();
    double s = 0.0;
    for (int c = 0; c < phi.ncomp(); ++c) {
        const int m = SpectralScalar::mode_of_comp(c);
        auto d = PolarGrid::apply(grid.deriv1(m), phi.comp_vec(c));
        const double* a = phi.comp(c);
        const double fac = (c == 0) ? 2.0 : 1.0;
        double sc = 0.0;
        for (int i = 0; i < grid.nr(); ++i) {
            const double ang = (m > 0) ? m * a[i] / grid.r(i) : 0.0;
            sc += w[i] * (d[i] * d[i] + ang * ang);
        }
        s += fac * sc;
    }
    return s;
}

double inner_mean(const SpectralScalar& phi, const SpectralScalar& psi) {
    const PolarGrid& grid = phi.grid();
    if (!grid.same_as(psi.grid()))
        throw std::invalid_argument("inner_mean: fields on different grids");
    const auto& w = grid.quad_weights();
    double s = 0.0;
    for (int c = 0; c < phi.ncomp(); ++c) {
        const double* a = phi.comp(c);
        const double* b = psi.comp(c);
        const double fac = (c == 0) ? 2.0 : 1.0;
        double sc = 0.0;
        for (int i = 0; i < grid.nr(); ++i) sc += w[i] * a[i] * b[i];
        s += fac * sc;
    }
    return s;
}

double max_abs(const SpectralScalar& phi) {
    auto colloc = to_collocation(phi);
    double m = 0.0;
    for (double v : colloc) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace discflow

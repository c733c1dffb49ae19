// Scalar and vector fields on the disc, stored as theta-Fourier coefficients
// with one radial array per component. Component layout: index 0 is the
// theta-mean a_0; for m >= 1, component 2m-1 is a_m (cos) and 2m is b_m (sin).
//
// Products are formed on the ntheta = 3*modes collocation grid, which keeps
// quadratic nonlinearities alias-free for band-limited factors. Radial
// derivatives use the grid's parity-folded stencils; theta derivatives are
// exact per mode.

#pragma once

#include <vector>

#include "discflow/grid.hpp"

namespace discflow {

class SpectralScalar {
  public:
    explicit SpectralScalar(const PolarGrid& grid);

    const PolarGrid& grid() const { return *grid_; }
    int ncomp() const { return ncomp_; }

    double* comp(int c) { return data_.data() + static_cast<size_t>(c) * grid_->nr(); }
    const double* comp(int c) const {
        return data_.data() + static_cast<size_t>(c) * grid_->nr();
    }
    std::vector<double> comp_vec(int c) const;
    void set_comp(int c, const std::vector<double>& v);

    static int mode_of_comp(int c) { return (c + 1) / 2; }

    double& at(int c, int i) { return data_[static_cast<size_t>(c) * grid_->nr() + i]; }
    double at(int c, int i) const {
        return data_[static_cast<size_t>(c) * grid_->nr() + i];
    }

  private:
    const PolarGrid* grid_;
    int ncomp_;
    std::vector<double> data_;
};

struct VectorFieldPolar {
    SpectralScalar r_comp;
    SpectralScalar theta_comp;
    explicit VectorFieldPolar(const PolarGrid& grid) : r_comp(grid), theta_comp(grid) {}
};

// Collocation values are stored row-major: value(i, j) = colloc[i * ntheta + j]
// for radius i and angle j.
SpectralScalar from_collocation(const PolarGrid& grid, const std::vector<double>& colloc);
std::vector<double> to_collocation(const SpectralScalar& phi);

// Single-row transforms (one radius worth of samples).
void theta_analysis_row(int ntheta, int modes, const double* samples, double* comps,
                        int comp_stride);
void theta_synthesis_row(int ntheta, int modes, const double* comps, int comp_stride,
                         double* samples);

// Disc average (1/|D|) int_D phi.
double mean_over_disc(const SpectralScalar& phi);

// (d_r phi, (1/r) d_theta phi).
VectorFieldPolar gradient(const SpectralScalar& phi);

// (1/r) d_r (r v_r) + (1/r) d_theta v_theta.
SpectralScalar divergence(const VectorFieldPolar& v);

// u = perp-grad psi = -(1/r) d_theta psi e_r + d_r psi e_theta.
VectorFieldPolar perp_gradient(const SpectralScalar& psi);

// a_0(r).
std::vector<double> theta_average(const SpectralScalar& phi);

// Mean-free theta antiderivative: cos -> sin/m, sin -> -cos/m, mode 0 -> 0.
SpectralScalar theta_antiderivative(const SpectralScalar& phi);

// Exact per-mode d_theta.
SpectralScalar theta_derivative(const SpectralScalar& phi);

// fint_D phi^2 via the coefficient-space (Parseval) sum.
double l2_mean_square(const SpectralScalar& phi);

// fint_D |grad phi|^2 in coefficient space.
double grad_mean_square(const SpectralScalar& phi);

// fint_D phi * psi.
double inner_mean(const SpectralScalar& phi, const SpectralScalar& psi);

// max over collocation nodes of |phi|.
double max_abs(const SpectralScalar& phi);

// Sample an analytic function onto coefficients: fn(r, theta).
template <typename F>
SpectralScalar sample_field(const PolarGrid& grid, F&& fn) {
    std::vector<double> colloc(static_cast<size_t>(grid.nr()) * grid.ntheta());
    for (int i = 0; i < grid.nr(); ++i) {
        const double r = grid.r(i);
        double* row = colloc.data() + static_cast<size_t>(i) * grid.ntheta();
        for (int j = 0; j < grid.ntheta(); ++j) row[j] = fn(r, grid.theta(j));
    }
    return from_collocation(grid, colloc);
}

}  // namespace discflow

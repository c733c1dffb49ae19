// Inverse Dirichlet Laplacian on the disc and the quadratic functionals built
// from it. The Laplacian decouples per theta mode into the radial operator
//   L_m a = a'' + a'/r - m^2 a / r^2
// which is discretized with the grid's parity-folded stencils and factored as
// a banded matrix (one LU per mode, shared by the cos and sin components).
//
// Q(v), the non-radial part of the residual energy, is evaluated through the
// projection identity Q(v) = fint |grad inv_lap div w|^2 with w the field v
// minus the theta-mean of its radial component.

#pragma once

#include <memory>
#include <vector>

#include "discflow/spectral.hpp"

namespace discflow {

// Test hook: perturbs one interior stencil coefficient of every subsequently
// built mode operator, to let the self-test demonstrate that the identity
// checks actually catch a broken discretization.
void set_poisson_stencil_fault(bool enabled);

class PoissonSolver {
  public:
    explicit PoissonSolver(const PolarGrid& grid);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    const PolarGrid& grid() const { return *grid_; }

    // w with Delta w = rho per mode, w(1) = 0, pole-regular.
    SpectralScalar inv_laplacian_dirichlet(const SpectralScalar& rho) const;

    // Single-mode radial solve: L_m a = rhs, a(1) = 0.
    std::vector<double> solve_mode(int m, const std::vector<double>& rhs) const;

    // L_m applied to a radial coefficient array (boundary row is the BC row
    // and is reported as a(1) itself).
    std::vector<double> apply_mode(int m, const std::vector<double>& a) const;

    // Rows of the discrete L_m (interior rows collocate the ODE, last row is
    // the Dirichlet condition), for callers that assemble coupled operators.
    std::vector<StencilRow> mode_rows(int m) const;

    // In-place factored solve with caller-controlled boundary entries;
    // rhs holds nrhs stacked radial arrays.
    void solve_mode_inplace(int m, double* rhs, int nrhs) const;

    // Delta phi for all modes (interior rows; boundary row holds phi(1)).
    SpectralScalar laplacian(const SpectralScalar& phi) const;

    // fint_D |grad inv_lap rho|^2.
    double hminus1_energy(const SpectralScalar& rho) const;

    // Q(v) >= 0, invariant under adding any a(r) e_r to v.
    double qform(const VectorFieldPolar& v) const;

    // Remark-style upper bound on Q from the particular test function
    // phi = r * theta_antiderivative(v . e_r).
    double qform_upper(const VectorFieldPolar& v) const;

  private:
    struct Impl;
    const PolarGrid* grid_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace discflow

// Variational bounds on the mean-square temperature gradient for a given
// design and Peclet number. The upper bound is the scale-invariant functional
//   upper = fint |grad inv_lap (u . grad eta - f)|^2 + norm(u) fint|grad eta|^2 / Pe^2
// split through the flux/Q decomposition; the certified lower bound comes
// from the radial cutoff test functions xi_delta and the quotient inequality
//   <f xi>^2 <= <|grad T|^2> ( fint|grad xi|^2 + fint|grad inv_lap div(lambda u xi)|^2 ).

#pragma once

#include <optional>
#include <string>

#include "discflow/flow.hpp"
#include "discflow/poisson.hpp"

namespace discflow {

enum class Constraint { enstrophy, energy };

std::string to_string(Constraint c);
Constraint constraint_from_string(const std::string& s);

struct BoundReport {
    double pe = 0.0;
    Constraint constraint = Constraint::enstrophy;
    double residual_flux = 0.0;  // fint |mean flux - F|^2 (theta-mean part)
    double residual_q = 0.0;     // Q(u eta - g e_r)
    double grad_eta = 0.0;       // fint |grad eta|^2
    double flow_norm = 0.0;      // fint |grad u|^2 or fint |u|^2
    double upper = 0.0;
    std::optional<double> lower;
    std::optional<double> exact;
    std::optional<double> delta_star;
};

struct ResidualDecomposition {
    double residual_flux = 0.0;
    double residual_q = 0.0;
    double lhs = 0.0;  // fint |grad inv_lap (u . grad eta - f)|^2, independent route
};

// Flux profile and Q term of the residual, plus the directly-projected left
// side for the identity check. The advection product is formed pointwise on
// the dealiased collocation grid.
ResidualDecomposition decompose_residual(const FlowDesign& d, const Source& s,
                                         const PoissonSolver& solver);

BoundReport upper_bound(const FlowDesign& d, const Source& s, double pe,
                        Constraint constraint, const PoissonSolver& solver);

struct LowerBoundResult {
    double lower = 0.0;
    double delta_star = 0.0;
};

// Maximizes the xi_delta quotient over a logarithmic delta grid
// (32 points in [max(1/pe, 1e-4), 1/2] by default).
LowerBoundResult lower_bound_certify(const FlowDesign& d, const Source& s, double pe,
                                     Constraint constraint, const PoissonSolver& solver,
                                     int delta_points = 32);

// Boundary cutoff profile chi_delta: 1 on [0, 1-delta], smooth descent to 0
// at r = 1; |chi'| <= 8/delta.
double boundary_cutoff(double r, double delta);
double boundary_cutoff_d1(double r, double delta);

}  // namespace discflow

// Direct steady advection-diffusion solves on the disc:
//   lambda u . grad T = Delta T + f,   T = 0 at r = 1,
// discretized with the per-mode radial stencils coupled through the
// pseudospectral advection product, and solved by restarted GMRES
// preconditioned with the exact per-mode diffusion inverse.

#pragma once

#include "discflow/bounds.hpp"

namespace discflow {

struct SolveOptions {
    double rtol = 1e-10;
    int restart = 60;
    int max_iterations = 10000;
};

struct SteadySolution {
    SpectralScalar T;
    double lambda = 0.0;     // velocity scaling actually applied
    int iterations = 0;
    double residual = 0.0;   // relative true residual of the discrete system
    double cooling = 0.0;    // fint |grad T|^2
    double mean_fT = 0.0;    // fint f T
};

// Thrown when the advective cell Peclet number exceeds 2 on the given grid.
struct ResolvabilityError : std::runtime_error {
    ResolvabilityError(const std::string& msg, int need_nr, int need_modes)
        : std::runtime_error(msg), suggested_nr(need_nr), suggested_modes(need_modes) {}
    int suggested_nr;
    int suggested_modes;
};

SteadySolution solve_steady(const FlowDesign& d, const Source& s, double pe,
                            Constraint constraint, const PoissonSolver& solver,
                            const SolveOptions& opts = {});

// fint |grad T|^2.
double cooling_value(const SpectralScalar& T);

struct DualityReport {
    double exact = 0.0;      // cooling of the forward solve
    double eta_value = 0.0;  // upper functional at eta* = (T+ - T-)/2
    double xi_value = 0.0;   // quotient at xi* = (T+ + T-)/2
    double gap_upper = 0.0;  // eta_value - exact
    double gap_lower = 0.0;  // exact - xi_value
    double reversal_mismatch = 0.0;  // |cooling(T+) - cooling(T-)|
};

// Solves with +lambda u and -lambda u and evaluates both variational values
// at the optimal steady test functions they induce.
DualityReport duality_check(const FlowDesign& d, const Source& s, double pe,
                            const PoissonSolver& solver,
                            Constraint constraint = Constraint::enstrophy,
                            const SolveOptions& opts = {});

}  // namespace discflow

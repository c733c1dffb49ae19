"""Convection designs and cooling bounds for an internally heated disc.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. Typical use:

    import discflow as df

    grid = df.make_grid(nr=512, modes=96)
    source = df.make_source("constant", grid)
    solver = df.PoissonSolver(grid)
    design = df.roll_flow(source, n=8)
    report = df.upper_bound(design, source, pe=1e3, constraint="enstrophy",
                            solver=solver)
"""

try:
    from ._discflow import *  # noqa: F401,F403  (installed layout)
    from ._discflow import __doc__ as _core_doc
except ImportError:  # build-tree layout: extension on sys.path directly
    from _discflow import *  # noqa: F401,F403
    from _discflow import __doc__ as _core_doc

__all__ = [
    "PolarGrid",
    "Field",
    "Source",
    "BranchingPlan",
    "FlowDesign",
    "PoissonSolver",
    "make_grid",
    "make_source",
    "sample_field",
    "mean_over_disc",
    "l2_mean_square",
    "grad_mean_square",
    "theta_average",
    "branching_plan",
    "roll_flow",
    "branching_flow",
    "energy_roll_design",
    "rescale_to_pe",
    "upper_bound",
    "lower_bound_certify",
    "decompose_residual",
    "solve_steady",
    "duality_check",
    "render_streamlines",
    "azimuthal_sign_changes",
    "run_sweep",
    "fit_scaling",
    "selftest",
]

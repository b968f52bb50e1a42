"""Finite-volume solver and experiment harness for 1D reaction-diffusion
problems with piecewise-constant diffusivity."""

from .coefficients import (
    BistableReaction,
    DiffusivityProfile,
    FaceAverage,
    ProfileMode,
    diffusivity_at,
    face_diffusivity,
    sharp_profile,
    smoothed_profile,
    validate_bistable,
)
from .grid import Grid1D, Region, build_grid, inner_cell_range, outer_cell_mask, region_of
from .limits import (
    SubgridProblem,
    asymptotic_profile,
    inner_subgrid,
    solve_neumann_limit,
    solve_ode_limit,
)
from .analysis import (
    EnergyReport,
    GradientSide,
    InterfaceEnd,
    PowerLawFit,
    default_test_bank,
    detect_jump,
    energy_report,
    fit_power_law,
    interface_gradient,
    l2_space,
    l2_space_time,
    threshold_crossing,
    weak_residual,
)
from .solver import (
    Field,
    TimeStepConfig,
    Trajectory,
    TridiagonalOperator,
    assemble_diffusion,
    initial_field,
    sin_quarter,
    solve,
    step_theta,
    thomas_solve,
)

__version__ = "0.1.0"

from .harness import (  # noqa: E402  (harness imports __version__ above)
    ExperimentSpec,
    RunManifest,
    build_preset_spec,
    load_spec,
    run_experiment,
    run_preset,
    validate_spec,
)

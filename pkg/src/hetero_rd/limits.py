"""Solvers for the two vanishing-outer-diffusivity limit problems.

On the inner region the limit dynamics is the same reaction-diffusion
equation with unit diffusivity and zero-flux conditions at both interface
faces; on the outer region diffusion drops out entirely and every cell
follows the scalar ODE du/dt = f(u) on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import BistableReaction
from .errors import InvalidInitialData
from .grid import Grid1D, inner_cell_range
from .solver import Field, TimeStepConfig, Trajectory, assemble_diffusion, integrate


@dataclass(frozen=True)
class SubgridProblem:
    """Restriction of a problem to a cell range bounded by interface faces."""

    parent: Grid1D
    cell_start: int
    cell_stop: int
    initial: Field

    def __post_init__(self) -> None:
        faces = self.parent.interface_faces
        if self.cell_start not in faces or self.cell_stop not in faces:
            raise ValueError("subgrid boundaries must coincide with interface faces")
        if self.initial.values.shape != (self.n_cells,):
            raise ValueError("restricted initial field does not match the cell range")

    @property
    def n_cells(self) -> int:
        return self.cell_stop - self.cell_start

    @property
    def dx(self) -> float:
        return self.parent.dx

    @property
    def cell_centers(self) -> np.ndarray:
        return self.parent.cell_centers[self.cell_start:self.cell_stop]

    @property
    def face_positions(self) -> np.ndarray:
        return self.parent.face_positions[self.cell_start:self.cell_stop + 1]


def inner_subgrid(grid: Grid1D, u0: Field) -> SubgridProblem:
    """Restrict a full-grid initial field to the inner region.

    Built in two phases because the restricted field references the subgrid
    it lives on.
    """
    start, stop = inner_cell_range(grid)
    values = np.asarray(u0.values, dtype=float)[start:stop].copy()
    sub = SubgridProblem.__new__(SubgridProblem)
    object.__setattr__(sub, "parent", grid)
    object.__setattr__(sub, "cell_start", start)
    object.__setattr__(sub, "cell_stop", stop)
    object.__setattr__(sub, "initial", Field(grid=sub, values=values, t=u0.t))
    sub.__post_init__()
    return sub


def solve_neumann_limit(grid: Grid1D, r: BistableReaction, u0: Field,
                        cfg: TimeStepConfig) -> Trajectory:
    """Integrate the inner problem with unit diffusivity and zero-flux ends.

    Reuses the finite-volume machinery on the subgrid between the two
    interface faces; u0 is a full-grid field and is restricted here.
    """
    sub = inner_subgrid(grid, u0)
    values = sub.initial.values
    if np.any(values < 0.0) or np.any(values > r.bound):
        raise InvalidInitialData(
            f"restricted initial data outside [0, {r.bound}]"
        )
    face_d = np.ones(sub.n_cells + 1)
    op = assemble_diffusion(sub, face_d)
    fields = integrate(values, op, sub, r, cfg)
    metadata = {
        "problem": "neumann_limit",
        "alpha": r.alpha,
        "scale": r.scale,
        "bound": r.bound,
        "grid": {"length": grid.length, "n_cells": grid.n_cells,
                 "interfaces": list(grid.interface_positions)},
        "cell_range": [sub.cell_start, sub.cell_stop],
        "dt": cfg.dt,
        "theta": cfg.theta,
    }
    return Trajectory(fields=fields, metadata=metadata)


def _rk4_step(u: np.ndarray, r: BistableReaction, h: float) -> np.ndarray:
    k1 = r(u)
    k2 = r(u + 0.5 * h * k1)
    k3 = r(u + 0.5 * h * k2)
    k4 = r(u + h * k3)
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def solve_ode_limit(u0: Field, r: BistableReaction, times,
                    dt: float = 1e-4) -> Trajectory:
    """Integrate du/dt = f(u) independently in every cell with classical RK4.

    Cells never couple, so the result on a spatially constant field equals
    broadcasting a scalar solve, and callers may split the cells into
    concurrent batches at will.  Snapshots land exactly on the requested
    times by shortening the final step of each span.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    targets = sorted(set(float(t) for t in times))
    if targets and targets[0] < 0.0:
        raise ValueError("snapshot times must be nonnegative")

    u = np.asarray(u0.values, dtype=float).copy()
    fields = [Field(grid=u0.grid, values=u.copy(), t=0.0)]
    t = 0.0
    for target in targets:
        if target <= 1e-12:
            continue
        span = target - t
        n_full = int(math.floor(span / dt + 1e-9))
        remainder = span - n_full * dt
        for _ in range(n_full):
            u = _rk4_step(u, r, dt)
        if remainder > 1e-9 * dt:
            u = _rk4_step(u, r, remainder)
        t = target
        fields.append(Field(grid=u0.grid, values=u.copy(), t=t))
    metadata = {"problem": "ode_limit", "alpha": r.alpha, "scale": r.scale,
                "bound": r.bound, "dt": dt}
    return Trajectory(fields=fields, metadata=metadata)


# Values within this distance of alpha count as sitting on the unstable
# equilibrium and stay there in the asymptotic profile.
EQUILIBRIUM_TOL = 1e-12


def asymptotic_profile(u0: Field, r: BistableReaction) -> Field:
    """Long-time limit of the per-cell ODE: 0 below alpha, 1 above."""
    u = np.asarray(u0.values, dtype=float)
    out = np.where(u > r.alpha, 1.0, 0.0)
    out = np.where(np.abs(u - r.alpha) <= EQUILIBRIUM_TOL, r.alpha, out)
    return Field(grid=u0.grid, values=out, t=math.inf)

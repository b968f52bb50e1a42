"""Diagnostics: norms, interface gradients, power-law fits, energy audits,
weak-form residuals, jump detection, and threshold crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .coefficients import BistableReaction, DiffusivityProfile, FaceAverage, face_diffusivity
from .errors import (
    GridMismatch,
    InsufficientSnapshots,
    NoBracket,
    NonPositiveInput,
    TooFewCells,
)
from .grid import Grid1D, Region, inner_cell_range
from .solver import Field, Trajectory


class InterfaceEnd(Enum):
    LEFT = "left"
    RIGHT = "right"


class GradientSide(Enum):
    INNER = "inner"
    OUTER = "outer"


def _base_grid(grid_like) -> Grid1D:
    """Full grid behind either a Grid1D or a subgrid restriction."""
    return getattr(grid_like, "parent", grid_like)


def _region_mask(grid_like, region: Region | None) -> np.ndarray:
    """Boolean cell mask for a region (None selects every cell)."""
    centers = grid_like.cell_centers
    if region is None:
        return np.ones(centers.size, dtype=bool)
    base = _base_grid(grid_like)
    if not base.has_interfaces:
        if region is Region.OUTER:
            return np.ones(centers.size, dtype=bool)
        return np.zeros(centers.size, dtype=bool)
    left, right = base.interface_positions
    inner = (centers > left) & (centers < right)
    if region is Region.INNER:
        return inner
    if region is Region.OUTER:
        return ~inner
    raise ValueError(f"cannot mask cells by region {region!r}")


def _check_same_grid(a, b) -> None:
    ga, gb = a.grid, b.grid
    if ga is gb:
        return
    if (getattr(ga, "n_cells", None) != getattr(gb, "n_cells", None)
            or getattr(ga, "dx", None) != getattr(gb, "dx", None)
            or not np.array_equal(ga.cell_centers, gb.cell_centers)):
        raise GridMismatch("fields live on different grids")


def l2_space(u: Field, v: Field, region: Region | None = None) -> float:
    """Midpoint-rule L2 norm of u - v over the selected region."""
    _check_same_grid(u, v)
    mask = _region_mask(u.grid, region)
    diff = u.values[mask] - v.values[mask]
    return float(np.sqrt(np.sum(diff * diff) * u.grid.dx))


def l2_space_time(traj_a: Trajectory, traj_b: Trajectory,
                  region: Region | None = None) -> float:
    """Space-time L2 distance: midpoint in x, trapezoid in t."""
    times_a, times_b = traj_a.times, traj_b.times
    if times_a.size != times_b.size or not np.allclose(times_a, times_b,
                                                       rtol=0.0, atol=1e-12):
        raise GridMismatch("trajectories have different snapshot times")
    _check_same_grid(traj_a.fields[0], traj_b.fields[0])
    grid = traj_a.fields[0].grid
    mask = _region_mask(grid, region)
    diff = traj_a.values_matrix()[:, mask] - traj_b.values_matrix()[:, mask]
    sq = np.sum(diff * diff, axis=1) * grid.dx
    return float(np.sqrt(np.trapezoid(sq, times_a)))


def interface_gradient(state: Field, grid: Grid1D, which: InterfaceEnd,
                       side: GradientSide) -> float:
    """One-sided signed gradient at an interface face.

    Second-order three-point formula on the nearest cell centers of the
    requested side; exact on quadratics.
    """
    if not grid.has_interfaces:
        raise ValueError("grid has no interfaces")
    face = grid.interface_faces[0 if which is InterfaceEnd.LEFT else 1]
    # Cells to the right of the face carry the inner region at the left
    # interface and the outer region at the right one.
    use_right = (which is InterfaceEnd.LEFT) == (side is GradientSide.INNER)
    u = state.values
    n = u.size
    dx = grid.dx
    if use_right:
        if n - face < 3:
            raise TooFewCells(f"need 3 cells right of face {face}, have {n - face}")
        u0, u1, u2 = u[face], u[face + 1], u[face + 2]
        return float((-2.0 * u0 + 3.0 * u1 - u2) / dx)
    if face < 3:
        raise TooFewCells(f"need 3 cells left of face {face}, have {face}")
    u0, u1, u2 = u[face - 1], u[face - 2], u[face - 3]
    return float((2.0 * u0 - 3.0 * u1 + u2) / dx)


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line ln(value) = exponent * ln(eps) + log_prefactor."""

    exponent: float
    log_prefactor: float
    residual: float


def fit_power_law(eps_list, values) -> PowerLawFit:
    """Exact closed-form least squares in (ln eps, ln value) space."""
    eps = np.asarray(eps_list, dtype=float)
    val = np.asarray(values, dtype=float)
    if eps.size != val.size:
        raise ValueError("eps_list and values must have equal length")
    if eps.size < 3:
        raise ValueError(f"need at least 3 points, got {eps.size}")
    if np.any(eps <= 0.0) or np.any(val <= 0.0):
        raise NonPositiveInput("power-law fit requires strictly positive data")
    x = np.log(eps)
    y = np.log(val)
    xm, ym = x.mean(), y.mean()
    dx_ = x - xm
    a = float(np.sum(dx_ * (y - ym)) / np.sum(dx_ * dx_))
    b = float(ym - a * xm)
    res = y - (a * x + b)
    return PowerLawFit(exponent=a, log_prefactor=b,
                       residual=float(np.sqrt(np.mean(res * res))))


@dataclass(frozen=True)
class EnergyReport:
    """Both sides of the discrete energy identity and the a priori bound.

    lhs = 0.5 ||u(T)||^2 + int_0^T int D |u_x|^2,
    rhs = 0.5 ||u_0||^2 + int_0^T int f(u) u,
    bound_inner = int_0^T int_{inner} |u_x|^2, which must stay below
    c1_bound = 0.5 |domain| M^2 + M * sup|f| * |domain| * T.
    """

    lhs: float
    rhs: float
    bound_inner: float
    c1_bound: float
    identity_residual: float


def energy_report(traj: Trajectory, profile: DiffusivityProfile,
                  r: BistableReaction,
                  face_method: FaceAverage = FaceAverage.HARMONIC) -> EnergyReport:
    """Evaluate the energy identity on a (densely recorded) trajectory."""
    if len(traj.fields) < 2:
        raise InsufficientSnapshots("energy audit needs at least two snapshots")
    grid = traj.fields[0].grid
    if not isinstance(grid, Grid1D):
        raise GridMismatch("energy audit requires full-grid trajectories")
    face_d = face_diffusivity(profile, grid, face_method)
    w_interior = face_d[1:-1]
    dx = grid.dx

    if grid.has_interfaces:
        start, stop = inner_cell_range(grid)
        # Faces strictly between inner cells; the interface faces themselves
        # are the region boundary and are excluded.
        inner_faces = slice(start, stop - 1)
    else:
        inner_faces = slice(0, 0)

    times = traj.times
    values = traj.values_matrix()
    jumps = np.diff(values, axis=1)
    dissipation = np.sum(w_interior * jumps * jumps, axis=1) / dx
    inner_grad = np.sum(jumps[:, inner_faces] ** 2, axis=1) / dx
    reaction = np.sum(r(values) * values, axis=1) * dx
    norm2 = np.sum(values * values, axis=1) * dx

    duration = float(times[-1] - times[0])
    lhs = 0.5 * norm2[-1] + float(np.trapezoid(dissipation, times))
    rhs = 0.5 * norm2[0] + float(np.trapezoid(reaction, times))
    bound_inner = float(np.trapezoid(inner_grad, times))
    m = r.bound
    c1_bound = 0.5 * grid.length * m * m + m * r.max_abs * grid.length * duration
    return EnergyReport(lhs=lhs, rhs=rhs, bound_inner=bound_inner,
                        c1_bound=c1_bound, identity_residual=abs(lhs - rhs))


@dataclass(frozen=True)
class SpaceTimeTestFunction:
    """phi(t, x) together with its analytic time and space derivatives."""

    name: str
    phi: Callable[[float, np.ndarray], np.ndarray]
    phi_t: Callable[[float, np.ndarray], np.ndarray]
    phi_x: Callable[[float, np.ndarray], np.ndarray]


def default_test_bank(length: float, t_end: float,
                      max_mode: int = 3) -> list[SpaceTimeTestFunction]:
    """Tensor products of {1, x, x^2, cos(k pi x / L)} x {1, t, cos(k pi t / T)}."""
    space = [("1", lambda x: np.ones_like(x), lambda x: np.zeros_like(x)),
             ("x", lambda x: x, lambda x: np.ones_like(x)),
             ("x^2", lambda x: x * x, lambda x: 2.0 * x)]
    for k in range(1, max_mode + 1):
        wk = k * math.pi / length
        space.append((f"cos({k}pi x/L)",
                      lambda x, wk=wk: np.cos(wk * x),
                      lambda x, wk=wk: -wk * np.sin(wk * x)))
    time = [("1", lambda t: 1.0, lambda t: 0.0),
            ("t", lambda t: t, lambda t: 1.0)]
    for k in range(1, max_mode + 1):
        wk = k * math.pi / t_end
        time.append((f"cos({k}pi t/T)",
                     lambda t, wk=wk: math.cos(wk * t),
                     lambda t, wk=wk: -wk * math.sin(wk * t)))

    bank = []
    for sname, sx, sdx in space:
        for tname, tt, tdt in time:
            bank.append(SpaceTimeTestFunction(
                name=f"{sname}*{tname}",
                phi=lambda t, x, sx=sx, tt=tt: sx(x) * tt(t),
                phi_t=lambda t, x, sx=sx, tdt=tdt: sx(x) * tdt(t),
                phi_x=lambda t, x, sdx=sdx, tt=tt: sdx(x) * tt(t),
            ))
    return bank


def weak_residual(traj: Trajectory, profile: DiffusivityProfile,
                  r: BistableReaction,
                  test_bank: list[SpaceTimeTestFunction] | None = None,
                  face_method: FaceAverage = FaceAverage.HARMONIC) -> float:
    """Largest absolute weak-form defect over the test bank.

    For each phi the space-time integral of
    (-u phi_t + D u_x phi_x - f(u) phi) is compared against the boundary
    terms int u0 phi(0) - int u(T) phi(T).  Space uses midpoint quadrature
    over cells (face-based for the gradient term); time uses trapezoid over
    the recorded snapshots, except that the phi_t factor is integrated
    exactly per interval through phi endpoint differences against the
    interval-average of u, so the residual of a state constant in time
    telescopes to rounding.
    """
    grid = traj.fields[0].grid
    if not isinstance(grid, Grid1D):
        raise GridMismatch("weak residual requires full-grid trajectories")
    if test_bank is None:
        test_bank = default_test_bank(grid.length, float(traj.times[-1]))

    times = traj.times
    values = traj.values_matrix()
    centers = grid.cell_centers
    faces_interior = grid.face_positions[1:-1]
    face_d = face_diffusivity(profile, grid, face_method)[1:-1]
    dx = grid.dx
    grad_at_faces = np.diff(values, axis=1) / dx
    f_vals = r(values)

    worst = 0.0
    for tf in test_bank:
        phi_cells = np.stack([tf.phi(t, centers) for t in times])
        u_mid = 0.5 * (values[:-1] + values[1:])
        time_term = -float(np.sum(u_mid * np.diff(phi_cells, axis=0)) * dx)
        integrand = np.empty(times.size)
        for k, t in enumerate(times):
            flux = np.sum(face_d * grad_at_faces[k]
                          * tf.phi_x(t, faces_interior)) * dx
            integrand[k] = flux - np.sum(f_vals[k] * phi_cells[k]) * dx
        lhs = time_term + float(np.trapezoid(integrand, times))
        rhs = float(np.sum(values[0] * phi_cells[0]) * dx
                    - np.sum(values[-1] * phi_cells[-1]) * dx)
        worst = max(worst, abs(lhs - rhs))
    return worst


def detect_jump(state: Field, threshold: float = 0.25) -> list[tuple[float, float]]:
    """Faces where the cell-to-cell difference exceeds the threshold.

    Adjacent flagged faces merge into one jump whose height is the total
    signed difference and whose location is the face with the largest
    individual difference.
    """
    if threshold <= 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    diffs = np.diff(state.values)
    flagged = np.flatnonzero(np.abs(diffs) > threshold)
    faces = state.grid.face_positions

    jumps: list[tuple[float, float]] = []
    i = 0
    while i < flagged.size:
        j = i
        while j + 1 < flagged.size and flagged[j + 1] == flagged[j] + 1:
            j += 1
        run = flagged[i:j + 1]
        height = float(np.sum(diffs[run]))
        peak = run[np.argmax(np.abs(diffs[run]))]
        jumps.append((float(faces[peak + 1]), height))
        i = j + 1
    return jumps


def threshold_crossing(datum: Callable[[float], float], alpha: float,
                       bracket: tuple[float, float], tol: float = 1e-10) -> float:
    """Bisection root of datum(x) = alpha inside the bracket."""
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError(f"invalid bracket ({a}, {b})")
    fa = float(datum(a)) - alpha
    fb = float(datum(b)) - alpha
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoBracket(f"datum - alpha has the same sign at {a} and {b}")
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = float(datum(mid)) - alpha
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)

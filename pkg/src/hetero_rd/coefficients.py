"""Diffusivity profiles and the cubic bistable reaction family.

The diffusivity is 1 on the inner region and its boundary, and epsilon on
the outer region.  The smoothed variant replaces the jump by a quintic
smoothstep inside a collar of width delta on the outer side, so the profile
stays within [epsilon, 1] and converges pointwise to the sharp one as
delta -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotBistable, OutOfDomain
from .grid import Grid1D


class ProfileMode(Enum):
    SHARP = "sharp"
    SMOOTHED = "smoothed"


class FaceAverage(Enum):
    HARMONIC = "harmonic"
    ARITHMETIC = "arithmetic"


def _smoothstep(theta: np.ndarray) -> np.ndarray:
    """Quintic smoothstep 6t^5 - 15t^4 + 10t^3; C2, monotone on [0, 1]."""
    return theta * theta * theta * (theta * (6.0 * theta - 15.0) + 10.0)


@dataclass(frozen=True)
class DiffusivityProfile:
    """Sharp or smoothed piecewise diffusivity tied to a grid.

    delta is the collar width of the smoothed variant; 0 means sharp.
    """

    grid: Grid1D
    epsilon: float
    delta: float = 0.0
    mode: ProfileMode = ProfileMode.SHARP

    def __post_init__(self) -> None:
        self.grid.require_supported_interfaces()
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.mode is ProfileMode.SHARP and self.delta != 0.0:
            raise ValueError("sharp profile requires delta == 0")
        if self.mode is ProfileMode.SMOOTHED and self.delta <= 0.0:
            raise ValueError("smoothed profile requires delta > 0")


def sharp_profile(grid: Grid1D, epsilon: float) -> DiffusivityProfile:
    return DiffusivityProfile(grid=grid, epsilon=float(epsilon))


def smoothed_profile(grid: Grid1D, epsilon: float, delta: float) -> DiffusivityProfile:
    return DiffusivityProfile(grid=grid, epsilon=float(epsilon), delta=float(delta),
                              mode=ProfileMode.SMOOTHED)


def diffusivity_at(profile: DiffusivityProfile, x):
    """Evaluate the diffusivity at a coordinate or array of coordinates."""
    grid = profile.grid
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > grid.length):
        raise OutOfDomain(f"coordinates outside [0, {grid.length}]")

    eps = profile.epsilon
    if not grid.has_interfaces:
        out = np.full_like(xs, eps)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    left, right = grid.interface_positions
    inner = (xs >= left) & (xs <= right)

    if profile.mode is ProfileMode.SHARP:
        out = np.where(inner, 1.0, eps)
    else:
        dist = np.minimum(np.abs(xs - left), np.abs(xs - right))
        theta = np.clip(1.0 - dist / profile.delta, 0.0, 1.0)
        out = np.where(inner, 1.0, eps + (1.0 - eps) * _smoothstep(theta))
    return float(out) if np.isscalar(x) or xs.ndim == 0 else out


def face_diffusivity(profile: DiffusivityProfile, grid: Grid1D,
                     method: FaceAverage = FaceAverage.HARMONIC) -> np.ndarray:
    """Diffusivity at the n_cells+1 faces from the two adjacent cell centers.

    Interior faces combine the neighbors by the chosen mean; boundary faces
    copy the adjacent cell value.  The harmonic mean is the choice that keeps
    the discrete flux continuous across the coefficient jump.
    """
    if grid is not profile.grid and (
        grid.length != profile.grid.length
        or grid.n_cells != profile.grid.n_cells
        or grid.interface_faces != profile.grid.interface_faces
    ):
        raise ValueError("profile and grid do not share geometry")

    d_cells = diffusivity_at(profile, grid.cell_centers)
    faces = np.empty(grid.n_cells + 1)
    left, right = d_cells[:-1], d_cells[1:]
    if method is FaceAverage.HARMONIC:
        # Exact on equal neighbors (the formula would round within 1 ulp).
        faces[1:-1] = np.where(left == right, left,
                               2.0 * left * right / (left + right))
    elif method is FaceAverage.ARITHMETIC:
        faces[1:-1] = 0.5 * (left + right)
    else:
        raise ValueError(f"unknown face averaging method {method!r}")
    faces[0] = d_cells[0]
    faces[-1] = d_cells[-1]
    return faces


class ReactionBounds(NamedTuple):
    max_abs: float       # sup of |f| on [0, M]
    max_slope: float     # sup of f' on [0, M]


@dataclass(frozen=True)
class BistableReaction:
    """Cubic reaction s * u * (u - alpha) * (1 - u) with zeros at 0, alpha, 1.

    bound is the upper barrier M >= 1 of the admissible state interval
    [0, M].  scale = 0 is allowed as the pure-diffusion degenerate case and
    is rejected by validate_bistable.
    """

    alpha: float
    scale: float = 1.0
    bound: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.scale < 0.0:
            raise ValueError(f"scale must be >= 0, got {self.scale}")
        if self.bound < 1.0:
            raise ValueError(f"bound must be >= 1, got {self.bound}")

    def __call__(self, u):
        # Factored form: zeros at 0, alpha, 1 are exact in floating point.
        return self.scale * u * (u - self.alpha) * (1.0 - u)

    def derivative(self, u):
        return self.scale * (-3.0 * u * u + 2.0 * (1.0 + self.alpha) * u - self.alpha)

    @property
    def steady_states(self) -> tuple[float, float, float]:
        return 0.0, self.alpha, 1.0

    @cached_property
    def max_abs(self) -> float:
        """sup |f| on [0, bound], by dense scan plus local refinement."""
        return _scan_bounds(self).max_abs

    @cached_property
    def max_slope(self) -> float:
        """sup f' on [0, bound], by dense scan plus local refinement."""
        return _scan_bounds(self).max_slope


def _refine_max(fun, u_grid: np.ndarray, i_best: int) -> float:
    """Polish a sampled maximum of fun by bounded scalar maximization."""
    lo = u_grid[max(i_best - 1, 0)]
    hi = u_grid[min(i_best + 1, u_grid.size - 1)]
    if hi <= lo:
        return fun(u_grid[i_best])
    res = minimize_scalar(lambda u: -fun(u), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13})
    return max(fun(u_grid[i_best]), -res.fun)


def _scan_bounds(r: BistableReaction, samples: int = 100_000) -> ReactionBounds:
    """Sup-bounds of |f| and f' on [0, bound]: dense scan plus refinement."""
    u = np.linspace(0.0, r.bound, samples)
    f = r(u)
    i_abs = int(np.argmax(np.abs(f)))
    max_abs = _refine_max(lambda v: abs(r(v)), u, i_abs)
    fp = r.derivative(u)
    i_slope = int(np.argmax(fp))
    max_slope = _refine_max(r.derivative, u, i_slope)
    return ReactionBounds(max_abs=float(max_abs), max_slope=float(max_slope))


def validate_bistable(r: BistableReaction, samples: int = 100_000) -> ReactionBounds:
    """Check the bistability hypotheses on [0, bound] and return sup-bounds.

    Verifies the exact zeros, the derivative signs at the three steady
    states, and the sign pattern f < 0 on (0, alpha) and (1, bound],
    f > 0 on (alpha, 1), on a dense sample.  Raises NotBistable naming the
    violated condition.
    """
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")

    alpha, m = r.alpha, r.bound
    roots = (0.0, alpha, 1.0)
    for root in roots:
        if r(root) != 0.0:
            raise NotBistable(f"f({root}) = {r(root)!r} violates f(root) = 0")
    if not r.derivative(0.0) < 0.0:
        raise NotBistable(f"f'(0) = {r.derivative(0.0)} violates f'(0) < 0")
    if not r.derivative(1.0) < 0.0:
        raise NotBistable(f"f'(1) = {r.derivative(1.0)} violates f'(1) < 0")
    if not r.derivative(alpha) > 0.0:
        raise NotBistable(f"f'(alpha) = {r.derivative(alpha)} violates f'(alpha) > 0")

    u = np.linspace(0.0, m, samples)
    f = r(u)
    at_root = (u == 0.0) | (u == alpha) | (u == 1.0)
    neg_band = ((u > 0.0) & (u < alpha)) | ((u > 1.0) & (u <= m))
    pos_band = (u > alpha) & (u < 1.0)
    if np.any((f >= 0.0) & neg_band & ~at_root):
        bad = u[(f >= 0.0) & neg_band & ~at_root][0]
        raise NotBistable(f"f({bad}) >= 0 violates f < 0 on (0, alpha) u (1, M]")
    if np.any((f <= 0.0) & pos_band & ~at_root):
        bad = u[(f <= 0.0) & pos_band & ~at_root][0]
        raise NotBistable(f"f({bad}) <= 0 violates f > 0 on (alpha, 1)")

    return _scan_bounds(r, samples)

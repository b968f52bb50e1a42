"""Diffusivity profiles, face averaging, and the bistable reaction family."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetero_rd.coefficients import (
    BistableReaction,
    FaceAverage,
    diffusivity_at,
    face_diffusivity,
    sharp_profile,
    smoothed_profile,
    validate_bistable,
)
from hetero_rd.errors import NotBistable, OutOfDomain
from hetero_rd.grid import build_grid

# sup |f| on [0, 1] for alpha = 1/3, scale = 1: value of the cubic at its
# interior critical point (4 + sqrt(7)) / 9, frozen from a dense
# one-million-point scan refined at the best sample.
MAX_ABS_REFERENCE = 0.07824488114527335
# sup f' on [0, 1]: the parabola peak at u = (1 + alpha) / 3, exactly 7/27.
MAX_SLOPE_REFERENCE = 7.0 / 27.0


@pytest.fixture(scope="module")
def grid():
    return build_grid(4.0, 4000, [1.0, 3.0])


class TestDiffusivityAt:
    def test_sharp_inner(self, grid):
        assert diffusivity_at(sharp_profile(grid, 0.01), 2.0) == 1.0

    def test_sharp_outer(self, grid):
        assert diffusivity_at(sharp_profile(grid, 0.01), 0.5) == 0.01

    def test_sharp_on_interface(self, grid):
        # The interface belongs to the unit-diffusivity side.
        assert diffusivity_at(sharp_profile(grid, 0.01), 1.0) == 1.0

    def test_smoothstep_midpoint(self, grid):
        # dist = 0.05, delta = 0.1: smoothstep argument 0.5 gives exactly 0.5
        # by symmetry, so D = 0.2 + 0.8 * 0.5 = 0.6.
        prof = smoothed_profile(grid, 0.2, 0.1)
        assert diffusivity_at(prof, 0.95) == pytest.approx(0.6, abs=1e-14)
        assert diffusivity_at(prof, 3.05) == pytest.approx(0.6, abs=1e-14)

    def test_out_of_domain(self, grid):
        with pytest.raises(OutOfDomain):
            diffusivity_at(sharp_profile(grid, 0.5), 4.2)

    def test_smoothed_equals_sharp_outside_collar(self, grid):
        sharp = sharp_profile(grid, 0.3)
        xs = np.array([0.2, 0.85, 1.7, 3.2, 3.9])
        for delta in (0.1, 0.05, 0.01):
            smoothed = smoothed_profile(grid, 0.3, delta)
            for x in xs:
                dist = min(abs(x - 1.0), abs(x - 3.0))
                if dist > delta or 1.0 <= x <= 3.0:
                    assert diffusivity_at(smoothed, x) == diffusivity_at(sharp, x)

    def test_smoothed_within_sharp_band(self, grid):
        # |D_delta - D_sharp| never exceeds 1 - eps, anywhere.
        eps = 0.25
        xs = np.linspace(0.0, 4.0, 2001)
        d_sharp = diffusivity_at(sharp_profile(grid, eps), xs)
        d_smooth = diffusivity_at(smoothed_profile(grid, eps, 0.07), xs)
        assert np.all(np.abs(d_smooth - d_sharp) <= 1.0 - eps + 1e-15)
        assert np.all((d_smooth >= eps) & (d_smooth <= 1.0))

    def test_collar_monotone_toward_interface(self, grid):
        prof = smoothed_profile(grid, 0.1, 0.05)
        xs = np.linspace(0.95, 1.0, 200)  # approaching the left interface
        vals = diffusivity_at(prof, xs)
        assert np.all(np.diff(vals) >= -1e-15)

    def test_pointwise_convergence_as_delta_shrinks(self, grid):
        x = 0.98  # 0.02 away from the left interface
        sharp_val = diffusivity_at(sharp_profile(grid, 0.3), x)
        for delta in (0.1, 0.05, 0.021):
            assert diffusivity_at(smoothed_profile(grid, 0.3, delta), x) > sharp_val
        assert diffusivity_at(smoothed_profile(grid, 0.3, 0.015), x) == sharp_val

    def test_single_interface_grid_rejected(self):
        g = build_grid(1.0, 2, [0.5])
        with pytest.raises(ValueError):
            sharp_profile(g, 0.5)


class TestFaceDiffusivity:
    def test_uniform_profile(self):
        g = build_grid(1.0, 10, [])
        faces = face_diffusivity(sharp_profile(g, 1.0), g)
        assert np.all(faces == 1.0)

    def test_harmonic_interface_value(self, grid):
        eps = 0.01
        faces = face_diffusivity(sharp_profile(grid, eps), grid,
                                 FaceAverage.HARMONIC)
        expected = 2.0 * eps / (1.0 + eps)
        assert faces[1000] == pytest.approx(expected, rel=1e-14)
        assert faces[1000] == pytest.approx(0.019802, abs=5e-7)

    def test_arithmetic_interface_value(self, grid):
        faces = face_diffusivity(sharp_profile(grid, 0.01), grid,
                                 FaceAverage.ARITHMETIC)
        assert faces[1000] == pytest.approx(0.505, rel=1e-12)

    def test_boundary_faces_copy_cells(self, grid):
        faces = face_diffusivity(sharp_profile(grid, 0.07), grid)
        assert faces[0] == 0.07 and faces[-1] == 0.07

    @given(eps=st.floats(1e-6, 1.0), delta=st.floats(0.001, 0.4))
    @settings(max_examples=50, deadline=None)
    def test_harmonic_below_arithmetic(self, eps, delta):
        g = build_grid(4.0, 80, [1.0, 3.0])
        prof = smoothed_profile(g, eps, delta)
        harm = face_diffusivity(prof, g, FaceAverage.HARMONIC)
        arit = face_diffusivity(prof, g, FaceAverage.ARITHMETIC)
        assert np.all(harm <= arit + 1e-15)
        cells = np.asarray(
            [diffusivity_at(prof, x) for x in g.cell_centers])
        equal_neighbors = cells[:-1] == cells[1:]
        assert np.array_equal(harm[1:-1][equal_neighbors],
                              arit[1:-1][equal_neighbors])
        # Strict inequality is only resolvable in floating point when the
        # neighbors differ appreciably.
        apart = np.abs(cells[:-1] - cells[1:]) > 1e-6 * cells.max()
        assert np.all(harm[1:-1][apart] < arit[1:-1][apart])

    def test_range_stays_in_eps_one(self, grid):
        faces = face_diffusivity(sharp_profile(grid, 0.02), grid)
        assert faces.min() >= 0.02 and faces.max() <= 1.0

    def test_geometry_mismatch(self, grid):
        other = build_grid(4.0, 400, [1.0, 3.0])
        with pytest.raises(ValueError):
            face_diffusivity(sharp_profile(grid, 0.5), other)


class TestBistableReaction:
    def test_exact_zeros(self):
        r = BistableReaction(alpha=1.0 / 3.0)
        assert r(0.0) == 0.0
        assert r(1.0 / 3.0) == 0.0
        assert r(1.0) == 0.0

    def test_midpoint_value(self):
        r = BistableReaction(alpha=1.0 / 3.0)
        assert r(0.5) == pytest.approx(1.0 / 24.0, rel=1e-14)

    def test_derivative_at_alpha(self):
        r = BistableReaction(alpha=1.0 / 3.0)
        assert r.derivative(1.0 / 3.0) == pytest.approx(2.0 / 9.0, rel=1e-14)
        assert r.derivative(1.0 / 3.0) > 0.0

    def test_derivative_matches_central_differences(self):
        r = BistableReaction(alpha=0.4, scale=2.5, bound=2.0)
        rng = np.random.default_rng(42)
        u = rng.uniform(0.0, r.bound, 100)
        h = 1e-6
        fd = (r(u + h) - r(u - h)) / (2.0 * h)
        exact = r.derivative(u)
        scale = np.maximum(np.abs(exact), 1e-3)
        assert np.all(np.abs(fd - exact) / scale < 1e-6)

    def test_scale_multiplies(self):
        assert BistableReaction(alpha=0.3, scale=10.0)(0.5) == \
            pytest.approx(10.0 * BistableReaction(alpha=0.3)(0.5), rel=1e-15)

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            BistableReaction(alpha=1.0)
        with pytest.raises(ValueError):
            BistableReaction(alpha=0.5, scale=-1.0)
        with pytest.raises(ValueError):
            BistableReaction(alpha=0.5, bound=0.5)


class TestValidateBistable:
    def test_reference_cubic_passes(self):
        r = BistableReaction(alpha=1.0 / 3.0)
        bounds = validate_bistable(r)
        assert bounds.max_slope > 0.0
        assert bounds.max_abs == pytest.approx(MAX_ABS_REFERENCE, rel=1e-10)
        assert bounds.max_slope == pytest.approx(MAX_SLOPE_REFERENCE, rel=1e-10)

    def test_cached_bounds_match_validation(self):
        r = BistableReaction(alpha=1.0 / 3.0)
        assert r.max_abs == pytest.approx(MAX_ABS_REFERENCE, rel=1e-10)
        assert r.max_slope == pytest.approx(MAX_SLOPE_REFERENCE, rel=1e-10)

    def test_degenerate_alpha_zero_rejected(self):
        # alpha -> 0 collapses the cubic to the monostable u^2 (1 - u).
        r = BistableReaction(alpha=0.0)
        with pytest.raises(NotBistable, match="f'\\(0\\)"):
            validate_bistable(r)

    def test_pure_diffusion_scale_rejected(self):
        with pytest.raises(NotBistable):
            validate_bistable(BistableReaction(alpha=0.5, scale=0.0))

    def test_samples_floor(self):
        with pytest.raises(ValueError):
            validate_bistable(BistableReaction(alpha=0.5), samples=100)

    @pytest.mark.parametrize("scale", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("bound", [1.0, 2.0])
    @given(alpha=st.floats(0.05, 0.95, exclude_min=True, exclude_max=True))
    @settings(max_examples=25, deadline=None)
    def test_accepts_whole_parameter_box(self, scale, bound, alpha):
        r = BistableReaction(alpha=alpha, scale=scale, bound=bound)
        bounds = validate_bistable(r, samples=2000)
        assert bounds.max_abs > 0.0 and bounds.max_slope > 0.0

    def test_dense_scan_oracle_agreement(self):
        # Independent brute-force oracle: one-million-point scan, no
        # refinement.  The refined value may only exceed it by a hair.
        r = BistableReaction(alpha=1.0 / 3.0)
        u = np.linspace(0.0, 1.0, 1_000_001)
        oracle = np.max(np.abs(r(u)))
        assert r.max_abs >= oracle - 1e-15
        assert r.max_abs == pytest.approx(oracle, abs=1e-10)

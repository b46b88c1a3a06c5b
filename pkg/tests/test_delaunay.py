"""Tests for periodic cylinder profiles and the bump branch."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conflap.cylinder import calibrate_kernel, cyl_curvature, cyl_symbol
from conflap.delaunay import (
    DelaunaySolution,
    PeriodicGridFunction,
    apply_Ls_periodic,
    asymptotic_profile,
    bifurcation_period,
    bubble_tower_defect,
    continue_branch,
    delaunay_residual,
    functional_FL,
    kernel_functional_FL,
    limit_amplitude,
    solve_delaunay,
)
from conflap.errors import NewtonDivergenceError, ParameterError
from conflap.params import FracParams

# Root of xi coth(pi xi / 2) = 4 / pi mapped to the period 2 pi / xi,
# computed with mpmath.findroot at 40 digits for n = 3, s = 1/2.
PERIOD_THRESHOLD_3_HALF = 5.1538187584122886


class TestPeriodicGridFunction:
    def test_grid_layout(self):
        f = PeriodicGridFunction(8.0, np.zeros(16))
        assert f.size == 16
        assert f.dt == pytest.approx(0.5)
        assert f.t[0] == 0.0
        assert f.t[-1] == pytest.approx(7.5)

    def test_rejects_bad_period(self):
        with pytest.raises(ParameterError):
            PeriodicGridFunction(0.0, np.zeros(16))
        with pytest.raises(ParameterError):
            PeriodicGridFunction(math.inf, np.zeros(16))

    def test_rejects_bad_values(self):
        with pytest.raises(ParameterError):
            PeriodicGridFunction(8.0, np.zeros(24))
        with pytest.raises(ParameterError):
            PeriodicGridFunction(8.0, np.zeros(4))
        bad = np.zeros(16)
        bad[3] = math.nan
        with pytest.raises(ParameterError):
            PeriodicGridFunction(8.0, bad)

    def test_values_are_frozen(self):
        f = PeriodicGridFunction(8.0, np.zeros(16))
        with pytest.raises(ValueError):
            f.values[0] = 1.0


class TestApplyOperator:
    def test_single_mode_matches_symbol(self):
        p = FracParams(3, 0.5)
        period = 7.0
        f = PeriodicGridFunction(period, np.cos(4.0 * math.pi / period * np.arange(64) * period / 64))
        applied = apply_Ls_periodic(p, f)
        expected = cyl_symbol(p, 0, 4.0 * math.pi / period) * f.values
        assert np.max(np.abs(applied.values - expected)) < 1e-12

    def test_constant_is_exact_solution(self):
        p = FracParams(4, 0.35)
        f = PeriodicGridFunction(5.0, np.ones(32))
        res = delaunay_residual(p, f)
        assert np.max(np.abs(res)) < 1e-14

    def test_residual_not_equivariant_under_scaling(self):
        # the nonlinearity breaks v -> lam v covariance: 2 * constant misses
        p = FracParams(3, 0.5)
        f = PeriodicGridFunction(5.0, 2.0 * np.ones(32))
        assert np.max(np.abs(delaunay_residual(p, f))) > 0.1

    def test_residual_requires_positive_profile(self):
        p = FracParams(3, 0.5)
        f = PeriodicGridFunction(5.0, np.linspace(-1.0, 1.0, 32))
        with pytest.raises(ParameterError, match="v > 0"):
            delaunay_residual(p, f)

    def test_tower_sample_residual_shrinks_with_period(self):
        # unsolved bump-tower samples get closer to solving as L grows
        p = FracParams(3, 0.5)
        sups = []
        for period in (16.0, 24.0):
            t = (period / 1024) * np.arange(1024) - period / 2.0
            tower = sum(
                asymptotic_profile(p, t - j * period) for j in range(-2, 3)
            )
            f = PeriodicGridFunction(period, tower)
            sups.append(np.max(np.abs(delaunay_residual(p, f))))
        assert sups[0] > sups[1]
        assert sups[1] < 1e-8

    @settings(max_examples=15, deadline=None, derandomize=True)
    @given(
        seed=st.integers(0, 10_000),
        scale=st.floats(0.1, 5.0),
    )
    def test_apply_is_linear(self, seed, scale):
        p = FracParams(3, 0.4)
        rng = np.random.default_rng(seed)
        a = rng.standard_normal(32)
        b = rng.standard_normal(32)
        period = 6.0
        left = apply_Ls_periodic(p, PeriodicGridFunction(period, a + scale * b))
        right = (
            apply_Ls_periodic(p, PeriodicGridFunction(period, a)).values
            + scale * apply_Ls_periodic(p, PeriodicGridFunction(period, b)).values
        )
        assert np.max(np.abs(left.values - right)) < 1e-10 * (1.0 + scale)


class TestBifurcationPeriod:
    def test_matches_closed_form_root(self):
        p = FracParams(3, 0.5)
        assert bifurcation_period(p) == pytest.approx(
            PERIOD_THRESHOLD_3_HALF, abs=1e-10
        )

    def test_root_balances_symbol_and_slope(self):
        p = FracParams(4, 0.35)
        period = bifurcation_period(p)
        target = cyl_curvature(p) * p.q
        assert cyl_symbol(p, 0, 2.0 * math.pi / period) == pytest.approx(
            target, rel=1e-12
        )

    def test_linearization_sign_flips_across_threshold(self):
        # first-mode eigenvalue theta(2 pi / L) - c q crosses zero at L0
        p = FracParams(3, 0.5)
        period = bifurcation_period(p)
        target = cyl_curvature(p) * p.q
        assert cyl_symbol(p, 0, 2.0 * math.pi / (1.1 * period)) < target
        assert cyl_symbol(p, 0, 2.0 * math.pi / (0.9 * period)) > target

    def test_mode_k_crossings_are_multiples(self):
        # the symbol sees mode k of period k L0 at the same frequency
        p = FracParams(3, 0.5)
        period = bifurcation_period(p)
        target = cyl_curvature(p) * p.q
        for k in (2, 3):
            xi = 2.0 * math.pi * k / (k * period)
            assert cyl_symbol(p, 0, xi) == pytest.approx(target, rel=1e-12)


class TestSolveDelaunay:
    def test_bump_above_threshold(self):
        p = FracParams(3, 0.5)
        period = 1.2 * PERIOD_THRESHOLD_3_HALF
        sol = solve_delaunay(p, period)
        assert sol.nonconstant
        assert sol.residual_norm < 1e-11
        assert np.argmax(sol.values) == sol.values.size // 2
        assert 1.0 < sol.values.max() < limit_amplitude(p)
        assert sol.values.min() > 0.0
        mirrored = np.roll(sol.values[::-1], 1)
        assert np.max(np.abs(sol.values - mirrored)) < 1e-12

    def test_collapse_below_threshold(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 0.8 * PERIOD_THRESHOLD_3_HALF)
        assert not sol.nonconstant
        assert np.max(np.abs(sol.values - 1.0)) < 1e-9

    def test_constant_init_stays_constant(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 2.0 * PERIOD_THRESHOLD_3_HALF, init="constant")
        assert not sol.nonconstant

    def test_deterministic(self):
        p = FracParams(3, 0.5)
        period = 1.3 * PERIOD_THRESHOLD_3_HALF
        a = solve_delaunay(p, period)
        b = solve_delaunay(p, period)
        assert np.array_equal(a.values, b.values)

    def test_cyclic_shifts_still_solve(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 1.3 * PERIOD_THRESHOLD_3_HALF, tol=1e-12)
        shifted = PeriodicGridFunction(sol.period, np.roll(sol.values, 37))
        assert np.max(np.abs(delaunay_residual(p, shifted))) < 1e-12

    def test_rejects_bad_inputs(self):
        p = FracParams(3, 0.5)
        with pytest.raises(ParameterError, match="init"):
            solve_delaunay(p, 6.0, init="bogus")
        with pytest.raises(ParameterError, match="shape"):
            solve_delaunay(p, 6.0, init=np.ones(100))
        with pytest.raises(ParameterError, match="power of two"):
            solve_delaunay(p, 6.0, size=100)

    def test_divergence_reports_last_residual(self):
        p = FracParams(3, 0.5)
        period = 1.2 * PERIOD_THRESHOLD_3_HALF
        t = (period / 512) * np.arange(512) - period / 2.0
        far = 3.0 * asymptotic_profile(p, t)
        with pytest.raises(NewtonDivergenceError) as info:
            solve_delaunay(p, period, init=far, max_iter=1)
        assert info.value.last_residual is not None
        assert info.value.last_residual > 0.0

    def test_solution_certificate_is_enforced(self):
        with pytest.raises(ParameterError, match="residual"):
            DelaunaySolution(
                n=3,
                s=0.5,
                period=6.0,
                values=np.ones(16),
                residual_norm=1e-3,
                energy=0.0,
                nonconstant=False,
            )


class TestEnergy:
    def test_constant_value_is_closed_form(self):
        # quotient of v = 1 is c_(n,s) L^(1 - 2/2*)
        p = FracParams(3, 0.5)
        period = 7.25
        const = PeriodicGridFunction(period, np.ones(64))
        expected = cyl_curvature(p) * period ** (1.0 - 2.0 / p.two_star)
        assert functional_FL(p, const) == pytest.approx(expected, rel=1e-13)

    def test_scale_invariance(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 1.2 * PERIOD_THRESHOLD_3_HALF)
        scaled = PeriodicGridFunction(sol.period, 3.7 * sol.values)
        assert functional_FL(p, scaled) == pytest.approx(sol.energy, rel=1e-12)

    def test_requires_positive_profile(self):
        p = FracParams(3, 0.5)
        f = PeriodicGridFunction(5.0, np.linspace(-1.0, 1.0, 32))
        with pytest.raises(ParameterError, match="v > 0"):
            functional_FL(p, f)

    def test_bump_has_lower_energy_than_constant(self):
        p = FracParams(3, 0.5)
        period = 1.2 * PERIOD_THRESHOLD_3_HALF
        sol = solve_delaunay(p, period)
        const = PeriodicGridFunction(period, np.ones(sol.values.size))
        assert sol.energy < functional_FL(p, const)

    def test_energy_matches_stored_value(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 1.4 * PERIOD_THRESHOLD_3_HALF)
        assert functional_FL(p, sol.grid()) == pytest.approx(sol.energy, rel=1e-14)

    def test_kernel_route_agrees_and_refines(self):
        p = FracParams(3, 0.5)
        spec = calibrate_kernel(p)
        period = 1.2 * PERIOD_THRESHOLD_3_HALF
        errors = []
        for size in (128, 256):
            sol = solve_delaunay(p, period, size=size)
            other = kernel_functional_FL(spec, sol.grid())
            errors.append(abs(other - sol.energy) / abs(sol.energy))
        assert errors[0] < 1e-2
        assert errors[1] < errors[0] / 1.5


class TestTowerLimit:
    def test_limit_amplitude_matches_closed_form(self):
        # calibration must reproduce the oracle (Q_s / c_(n,s))^(1/(q-1)),
        # which is pi/2 exactly for n = 3, s = 1/2
        assert limit_amplitude(FracParams(3, 0.5)) == pytest.approx(
            math.pi / 2.0, rel=1e-12
        )

    def test_defect_decreases_along_branch(self):
        p = FracParams(3, 0.5)
        defects = []
        for mult in (2.0, 3.0, 4.0):
            sol = solve_delaunay(p, mult * PERIOD_THRESHOLD_3_HALF)
            defects.append(bubble_tower_defect(sol))
        assert defects[0] > defects[1] > defects[2]
        assert defects[2] < 1e-6

    def test_peak_approaches_limit_amplitude(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 2.0 * PERIOD_THRESHOLD_3_HALF)
        assert sol.values.max() == pytest.approx(limit_amplitude(p), rel=0.05)

    def test_large_period_profile_matches_limit_shape(self):
        p = FracParams(3, 0.5)
        sol = solve_delaunay(p, 24.0, size=1024)
        t = sol.grid().t - 12.0
        window = np.abs(t) <= 3.0
        ratio = sol.values[window] / asymptotic_profile(p, t[window])
        assert ratio.max() - ratio.min() < 1e-6
        assert ratio.mean() == pytest.approx(1.0, abs=1e-6)


class TestBranchContinuation:
    def test_peaks_grow_and_energy_beats_constant(self):
        p = FracParams(3, 0.5)
        base = PERIOD_THRESHOLD_3_HALF
        ladder = [1.1 * base, 1.5 * base, 2.0 * base, 3.0 * base]
        sols = continue_branch(p, ladder)
        peaks = [s.values.max() for s in sols]
        assert all(s.nonconstant for s in sols)
        assert peaks == sorted(peaks)
        for sol in sols:
            const = PeriodicGridFunction(sol.period, np.ones(sol.values.size))
            assert sol.energy < functional_FL(p, const)


@settings(max_examples=8, deadline=None, derandomize=True)
@given(
    n=st.sampled_from([3, 4]),
    s=st.floats(0.3, 0.7),
)
def test_bump_branch_exists_above_threshold(n, s):
    p = FracParams(n, s)
    period = 1.5 * bifurcation_period(p)
    sol = solve_delaunay(p, period, size=128)
    assert sol.nonconstant
    assert sol.residual_norm < 1e-11
    assert sol.values.min() > 0.0
    assert sol.values.max() < limit_amplitude(p) * 1.001

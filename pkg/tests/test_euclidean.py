"""Tests for the line realizations of the fractional Laplacian."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conflap.errors import ParameterError, SupportError, TaperError
from conflap.euclidean import (
    Bubble,
    LineGridFunction,
    bubble_eval,
    calibrate_integral_constant,
    commutator_check,
    cosine_taper,
    covariance_bridge,
    frac_lap_integral,
    frac_lap_spectral,
    line_quotient,
    _difference_weights,
    _factor_power_flat_lap,
)
from conflap.params import FracParams
from conflap.sphere import ModeSpectrum, sphere_curvature


def closed_form_constant(s):
    """2^(2s) s Gamma(1/2 + s) / (sqrt(pi) Gamma(1 - s)), the exact
    normalization of the one-dimensional difference integral."""
    return (
        2.0 ** (2.0 * s)
        * s
        * math.gamma(0.5 + s)
        / (math.sqrt(math.pi) * math.gamma(1.0 - s))
    )


def grid(half_width, size):
    return -half_width + (2.0 * half_width / size) * np.arange(size)


# (-Delta)^s exp(-x^2/2) = 2^s Gamma(s+1/2)/sqrt(pi) M(s+1/2, 1/2, -x^2/2),
# frozen from a 40-digit confluent hypergeometric evaluation
FRAC_GAUSSIAN_TABLE = {
    (0.6, 0.0): 0.8135490363898384243876,
    (0.6, 0.5): 0.6084236473846682236782,
    (0.6, 1.0): 0.1756264139461458297432,
    (0.6, 2.0): -0.2636051994499630492544,
    (0.6, 3.5): -0.08575236631184779161579,
    (0.25, 0.0): 0.8221789586624585523366,
    (0.25, 0.5): 0.6787627363589744198604,
    (0.25, 1.0): 0.3564112335685672928899,
    (0.25, 2.0): -0.09649308633366984985526,
    (0.25, 3.5): -0.09267855828430944992607,
}


class TestLineGridFunction:
    def test_grid_layout(self):
        f = LineGridFunction(4.0, np.zeros(16))
        assert f.dx == 0.5
        assert f.x[0] == -4.0
        assert f.x[-1] == 3.5
        assert f.size == 16

    def test_rejects_bad_lengths(self):
        with pytest.raises(ParameterError):
            LineGridFunction(1.0, np.zeros(12))
        with pytest.raises(ParameterError):
            LineGridFunction(1.0, np.zeros(4))

    def test_rejects_bad_values(self):
        with pytest.raises(ParameterError):
            LineGridFunction(0.0, np.zeros(8))
        with pytest.raises(ParameterError):
            LineGridFunction(1.0, np.full(8, np.nan))

    def test_values_are_frozen(self):
        f = LineGridFunction(1.0, np.zeros(8))
        with pytest.raises(ValueError):
            f.values[0] = 1.0


def test_cosine_taper_shape():
    w = cosine_taper(256, 0.1)
    assert w[0] == 0.0
    assert np.all(w[100:156] == 1.0)
    assert np.all(np.diff(w[:26]) > 0.0)
    with pytest.raises(ParameterError):
        cosine_taper(64, 0.7)


class TestSpectralRoute:
    def test_multiplier_on_pure_mode(self):
        # cos(k pi x / T) is an exact eigenfunction of the periodic operator
        p = FracParams(1, 0.45)
        x = grid(8.0, 256)
        mode = np.cos(3.0 * math.pi * x / 8.0)
        out = frac_lap_spectral(p, LineGridFunction(8.0, mode), edge_tol=1.1)
        expected = (3.0 * math.pi / 8.0) ** 0.9 * mode
        assert np.max(np.abs(out.values - expected)) < 1e-12

    def test_gaussian_against_closed_form(self):
        # periodic images limit the match; the kernel decays like t^(-2.2)
        p = FracParams(1, 0.6)
        x = grid(256.0, 1 << 15)
        out = frac_lap_spectral(p, LineGridFunction(256.0, np.exp(-0.5 * x**2)))
        for (s, xv), target in FRAC_GAUSSIAN_TABLE.items():
            if s != 0.6:
                continue
            idx = int(round((xv + 256.0) * 64))
            assert out.values[idx] == pytest.approx(target, rel=1e-4)

    def test_rejects_untapered_input(self):
        p = FracParams(1, 0.5)
        with pytest.raises(TaperError):
            frac_lap_spectral(p, LineGridFunction(4.0, np.ones(64)))

    def test_rejects_higher_dimensions(self):
        with pytest.raises(ParameterError):
            frac_lap_spectral(FracParams(2, 0.5), LineGridFunction(4.0, np.zeros(64)))


class TestIntegralRoute:
    def test_gaussian_against_closed_form(self):
        # free-space by construction, so the match is tight at every order
        x = grid(32.0, 4096)
        f = LineGridFunction(32.0, np.exp(-0.5 * x**2))
        for s, tol in ((0.6, 1e-6), (0.25, 1e-7)):
            p = FracParams(1, s)
            out = frac_lap_integral(p, f, closed_form_constant(s))
            for (sv, xv), target in FRAC_GAUSSIAN_TABLE.items():
                if sv != s:
                    continue
                idx = int(round((xv + 32.0) * 64))
                assert out.values[idx] == pytest.approx(target, rel=tol)

    def test_weights_integrate_squares_exactly(self):
        # the composite rule must reproduce int t^2 t^(-1-2s) dt on its range
        s = 0.35
        h = 0.01
        size = 500
        w = _difference_weights(size, h, s)
        nodes = h * np.arange(w.size)
        exact = (size * h) ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        assert float(w @ nodes**2) == pytest.approx(exact, rel=1e-12)

    def test_calibration_matches_closed_form(self):
        for s in (0.2, 0.5, 0.8):
            constant, record = calibrate_integral_constant(FracParams(1, s))
            assert constant == pytest.approx(closed_form_constant(s), rel=2e-5)
            assert record["residual"] < 2e-5

    def test_calibration_is_deterministic(self):
        first = calibrate_integral_constant(FracParams(1, 0.4))
        second = calibrate_integral_constant(FracParams(1, 0.4))
        assert first[0] == second[0]

    def test_rejects_bad_constant(self):
        f = LineGridFunction(4.0, np.zeros(64))
        with pytest.raises(ParameterError):
            frac_lap_integral(FracParams(1, 0.5), f, -1.0)

    def test_rejects_local_orders(self):
        f = LineGridFunction(4.0, np.zeros(64))
        with pytest.raises(ParameterError):
            frac_lap_integral(FracParams(1, 1.5), f, 1.0)


class TestBubble:
    def test_validation(self):
        with pytest.raises(ParameterError):
            Bubble(1.0, 0.0)
        with pytest.raises(ParameterError):
            Bubble(0.0, 1.0)

    def test_peak_and_decay(self):
        p = FracParams(1, 0.3)
        b = Bubble(2.0, 1.5, 0.5)
        assert bubble_eval(p, b, 0.5) == pytest.approx(2.0 * 1.5**-0.2)
        # far field falls off like |x|^(-(n-2s))
        ratio = bubble_eval(p, b, 4.0e5) / bubble_eval(p, b, 2.0e5)
        assert ratio == pytest.approx(2.0 ** -(1.0 - 0.6), rel=1e-4)

    def test_supercritical_rejected(self):
        with pytest.raises(ParameterError):
            bubble_eval(FracParams(1, 0.6), Bubble(1.0, 1.0), 0.0)


class TestLineQuotient:
    def test_scale_invariance(self):
        p = FracParams(1, 0.3)
        size = 1024
        x1 = grid(20.0, size)
        base = np.exp(-0.5 * x1**2) * (1.0 + 0.2 * np.cos(x1))
        q1 = line_quotient(p, LineGridFunction(20.0, base))
        mu = 2.0
        x2 = grid(mu * 20.0, size)
        scaled = mu ** (-0.5 * (1.0 - 2.0 * p.s)) * np.exp(
            -0.5 * (x2 / mu) ** 2
        ) * (1.0 + 0.2 * np.cos(x2 / mu))
        q2 = line_quotient(p, LineGridFunction(mu * 20.0, scaled))
        assert q2 == pytest.approx(q1, rel=5e-13)
        assert q1 > 0.0


class TestCommutator:
    def setup_method(self):
        x = grid(40.0, 4096)
        self.gaussian = LineGridFunction(40.0, np.exp(-0.5 * (x / 3.0) ** 2))

    def test_identity_below_half(self):
        # the order s-1 term needs the finite-part regularization here
        report = commutator_check(FracParams(1, 0.3), self.gaussian)
        assert report["branch"] == "fourier"
        assert report["residual"] < 1e-8

    def test_identity_above_half(self):
        report = commutator_check(FracParams(1, 0.75), self.gaussian)
        assert report["residual"] < 1e-8

    def test_local_limit(self):
        report = commutator_check(FracParams(1, 1.0), self.gaussian)
        assert report["branch"] == "local"
        assert report["residual"] < 1e-8

    def test_half_is_excluded(self):
        with pytest.raises(ParameterError, match="Dirac"):
            commutator_check(FracParams(1, 0.5), self.gaussian)

    def test_rejects_wide_support(self):
        x = grid(40.0, 1024)
        wide = LineGridFunction(40.0, np.exp(-0.5 * (x / 20.0) ** 2))
        with pytest.raises(SupportError):
            commutator_check(FracParams(1, 0.3), wide)

    def test_zero_input(self):
        report = commutator_check(
            FracParams(1, 0.3), LineGridFunction(40.0, np.zeros(1024))
        )
        assert report["residual"] == 0.0


class TestCovarianceBridge:
    def test_constant_pushforward(self):
        # a circle constant exercises the non-decaying pole route alone
        p = FracParams(1, 0.45)
        report = covariance_bridge(p, ModeSpectrum(1, np.array([1.0])))
        assert report["pole_constant"] == 1.0
        assert report["mismatch_max"] < 1e-4

    def test_mixed_spectrum(self):
        coeffs = np.array([0.7, -0.3, 0.45, 0.0, 0.2, 0.0, 0.0, -0.15, 0.05])
        spectrum = ModeSpectrum(1, coeffs)
        for s in (0.3, 0.7):
            report = covariance_bridge(FracParams(1, s), spectrum)
            assert report["mismatch_max"] < 1e-3

    def test_rejects_bad_inputs(self):
        p = FracParams(1, 0.5)
        with pytest.raises(ParameterError):
            covariance_bridge(p, ModeSpectrum(2, np.array([1.0])))
        with pytest.raises(ParameterError):
            covariance_bridge(p, ModeSpectrum(1, np.array([0.0, 0.0])))
        with pytest.raises(ParameterError):
            covariance_bridge(FracParams(2, 0.5), ModeSpectrum(1, np.array([1.0])))


def test_factor_power_flat_lap_closed_form():
    # pushing the circle constant through the projection gives
    # (-Delta)^s ((1+x^2)/2)^(s-1/2) = Q_s ((1+x^2)/2)^(-s-1/2) exactly
    points = np.linspace(-4.0, 4.0, 9)
    for s in (0.3, 0.45, 0.7):
        p = FracParams(1, s)
        out = _factor_power_flat_lap(p, points, closed_form_constant(s))
        expected = sphere_curvature(p) * (0.5 * (1.0 + points**2)) ** (-s - 0.5)
        assert np.max(np.abs(out - expected) / np.abs(expected)) < 1e-10


def test_factor_power_flat_lap_annihilates_constants():
    # at s = 1/2 the profile is identically one and the circle curvature
    # vanishes, so the quadrature must return zero
    out = _factor_power_flat_lap(
        FracParams(1, 0.5), np.linspace(-4.0, 4.0, 9), closed_form_constant(0.5)
    )
    assert np.max(np.abs(out)) < 1e-14


@settings(max_examples=20, deadline=None, derandomize=True)
@given(
    s=st.floats(0.15, 0.85),
    sigma=st.floats(0.5, 3.0),
)
def test_routes_agree_on_smooth_data(s, sigma):
    """The calibrated integral route reproduces the spectral route on
    moment-free profiles for any order and width."""
    p = FracParams(1, s)
    constant = closed_form_constant(s)
    x = grid(40.0, 2048)
    z = x / sigma
    f = LineGridFunction(40.0, (z**4 - 6.0 * z**2 + 3.0) * np.exp(-0.5 * z**2))
    spectral = frac_lap_spectral(p, f).values
    integral = frac_lap_integral(p, f, constant).values
    core = np.abs(x) <= 20.0
    scale = np.max(np.abs(spectral[core]))
    assert np.max(np.abs(spectral[core] - integral[core])) < 1e-4 * scale

"""Kernel-level checks: special functions, quadrature, roots, ODE stepping.

Reference values were frozen from independent oracles (mpmath's erfi,
Airy/Scorer functions, scipy's Dawson integral and shape-preserving
interpolant); the oracle packages are also imported directly where a
pointwise comparison over a sweep is cheaper than freezing a table.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mpmath as mp
from scipy.interpolate import PchipInterpolator
from scipy.special import dawsn

from rgsym.numerics import (
    Bracket,
    DomainError,
    EventHit,
    MaxIterationsError,
    MonotoneCubic,
    NoSignChangeError,
    QuadratureError,
    StepUnderflowError,
    Tolerance,
    adaptive_quadrature,
    cold_structure_functions,
    dawson,
    erfi,
    find_root,
    hot_structure_functions,
    integrate_ode,
)

# frozen oracle values (20 significant digits, mpmath)
ERFI_1 = 1.650425758797542876
ERFI_2_5 = 130.39575501324692681
ERFI_5_5 = 1432099172039.8328215
F1_AT_0 = 1.1153535259122478707
F2_AT_0 = 0.6439496584270345436
F1_AT_M3_3 = -1.3106125680735903294
F2_AT_M3_3 = -0.22176886574243957084
F1_AT_2 = 0.10971739157077058568
F2_AT_2 = 0.53078328065643976631
DAWSON_4 = 0.12934800123600511559


# ---------------------------------------------------------------------------
# tolerance / bracket contracts


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(abs_tol=0.0)
    with pytest.raises(ValueError):
        Tolerance(rel_tol=-1e-8)
    with pytest.raises(ValueError):
        Tolerance(max_iter=0)
    t = Tolerance()
    assert t.abs_tol == 1e-10 and t.rel_tol == 1e-8 and t.max_iter == 200


def test_bracket_validation():
    with pytest.raises(ValueError):
        Bracket(1.0, 1.0)
    with pytest.raises(ValueError):
        Bracket(2.0, -1.0)
    assert Bracket(-1.0, 2.0).width == 3.0


# ---------------------------------------------------------------------------
# erfi


def test_erfi_reference_values():
    assert erfi(1.0) == pytest.approx(ERFI_1, abs=1e-12)
    assert erfi(2.5) == pytest.approx(ERFI_2_5, rel=1e-12)
    assert erfi(5.5) == pytest.approx(ERFI_5_5, rel=1e-12)
    assert erfi(0.0) == 0.0


def test_erfi_matches_oracle_across_both_branches():
    for x in np.linspace(0.01, 6.0, 97):
        expected = float(mp.erfi(x))
        assert erfi(float(x)) == pytest.approx(expected, rel=5e-13)


def test_erfi_domain_error_past_six():
    with pytest.raises(DomainError):
        erfi(6.0001)
    with pytest.raises(DomainError):
        erfi(-7.0)
    with pytest.raises(DomainError):
        erfi(float("nan"))


def test_erfi_is_odd():
    # spot the symmetry on a fixed random sample of the full domain
    rng = np.random.default_rng(20250819)
    xs = rng.uniform(0.0, 6.0, size=100)
    for x in xs:
        assert erfi(-float(x)) == -erfi(float(x))


def test_dawson_against_oracle():
    for x in np.linspace(-6.0, 6.0, 61):
        assert dawson(float(x)) == pytest.approx(float(dawsn(x)), abs=1e-14, rel=1e-12)
    assert dawson(4.0) == pytest.approx(DAWSON_4, rel=1e-13)


# ---------------------------------------------------------------------------
# structure functions


def test_cold_structure_closed_form():
    f1, f2 = cold_structure_functions(0.0)
    assert f1 == 1.0 and f2 == 0.0
    f1, f2 = cold_structure_functions(2.0)
    assert f1 == pytest.approx(0.2)
    assert f2 == pytest.approx(0.4)


@given(st.floats(-50.0, 50.0, allow_nan=False))
def test_cold_structure_identities(eta):
    f1, f2 = cold_structure_functions(eta)
    assert f1 * f1 + f2 * f2 == pytest.approx(1.0 / (1.0 + eta * eta), rel=1e-12)
    assert f2 == pytest.approx(eta * f1, rel=1e-12, abs=1e-15)


def test_hot_structure_reference_values():
    f1, f2 = hot_structure_functions(0.0)
    assert 1.1153 <= f1 <= 1.1154
    assert f1 == pytest.approx(F1_AT_0, abs=1e-10)
    assert f2 > 0.0
    assert f2 == pytest.approx(F2_AT_0, abs=1e-10)
    f1, f2 = hot_structure_functions(-3.3)
    assert f1 == pytest.approx(F1_AT_M3_3, abs=1e-10)
    assert f2 == pytest.approx(F2_AT_M3_3, abs=1e-10)
    f1, f2 = hot_structure_functions(2.0)
    assert f1 == pytest.approx(F1_AT_2, abs=1e-10)
    assert f2 == pytest.approx(F2_AT_2, abs=1e-10)


def test_hot_structure_decays_at_large_argument():
    f1, _ = hot_structure_functions(20.0)
    assert abs(f1) < 1e-3


def test_hot_structure_oracle_sweep():
    for eta in np.linspace(-10.0, 10.0, 21):
        f1, f2 = hot_structure_functions(float(eta))
        assert f1 == pytest.approx(float(mp.pi * mp.airyai(eta)), abs=5e-11)
        assert f2 == pytest.approx(float(mp.pi * mp.scorergi(eta)), abs=5e-11)


def test_hot_structure_stable_under_tighter_controls():
    # halve the minimum panel width and double the panel budget: the
    # answer must not move at the 1e-6 level
    for eta in (-7.5, -1.0, 0.0, 2.5):
        base = hot_structure_functions(eta, min_width=1e-12, panel_budget=4096)
        tight = hot_structure_functions(eta, min_width=5e-13, panel_budget=8192)
        assert abs(base[0] - tight[0]) < 1e-6
        assert abs(base[1] - tight[1]) < 1e-6


def test_hot_structure_budget_exhaustion_raises():
    with pytest.raises(QuadratureError):
        hot_structure_functions(-8.0, panel_budget=3)


def test_adaptive_quadrature_polynomials():
    # a single 15-point panel integrates low-degree polynomials exactly
    for k in range(0, 12):
        val = adaptive_quadrature(lambda x, k=k: x**k, 0.0, 1.0)
        assert val == pytest.approx(1.0 / (k + 1), rel=1e-13)


def test_adaptive_quadrature_orientation():
    fwd = adaptive_quadrature(np.sin, 0.0, math.pi)
    assert fwd == pytest.approx(2.0, rel=1e-12)
    assert adaptive_quadrature(np.sin, math.pi, 0.0) == pytest.approx(-2.0, rel=1e-12)
    assert adaptive_quadrature(np.sin, 1.0, 1.0) == 0.0


# ---------------------------------------------------------------------------
# root finding


def test_find_root_reference_examples():
    r = find_root(lambda x: x * x - 2.0, Bracket(0.0, 2.0))
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-10)
    r = find_root(math.cos, Bracket(1.0, 2.0))
    assert r == pytest.approx(math.pi / 2.0, abs=1e-10)


def test_find_root_postcondition():
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-10, max_iter=200)
    f = lambda x: math.tanh(3.0 * (x - 0.37))
    r = find_root(f, Bracket(-1.0, 1.0), tol)
    assert abs(f(r)) <= tol.abs_tol or abs(r - 0.37) <= tol.rel_tol * abs(r) * 10


def test_find_root_no_sign_change():
    with pytest.raises(NoSignChangeError):
        find_root(lambda x: 1.0 + x * x, Bracket(-1.0, 1.0))


def test_find_root_iteration_budget():
    tol = Tolerance(abs_tol=1e-300, rel_tol=1e-300, max_iter=5)
    with pytest.raises(MaxIterationsError):
        find_root(lambda x: math.copysign(abs(x - 0.123456789) ** 0.2, x - 0.123456789),
                  Bracket(0.0, 1.0), tol)


@given(
    st.floats(-3.0, 3.0, allow_nan=False),
    st.floats(0.2, 4.0, allow_nan=False),
)
@settings(max_examples=40, deadline=None)
def test_find_root_recovers_cubic_root(center, spread):
    f = lambda x: (x - center) ** 3 + 0.5 * (x - center)
    r = find_root(f, Bracket(center - spread, center + spread + 1e-3))
    assert r == pytest.approx(center, abs=2e-7)


# ---------------------------------------------------------------------------
# ODE integration


def test_integration_reproduces_exponential():
    tol = Tolerance(abs_tol=1e-10, rel_tol=1e-12, max_iter=200)
    trace = integrate_ode(lambda a, y: y, [1.0], (0.0, 1.0), tol)
    assert abs(trace.final_state[0] - math.e) <= 10.0 * tol.abs_tol


@pytest.mark.parametrize("lam", [-2.0, -1.0, 0.5, 1.0, 2.0])
def test_integration_exponential_family(lam):
    tol = Tolerance()
    trace = integrate_ode(lambda a, y: lam * y, [1.0], (0.0, 1.0), tol)
    expected = math.exp(lam)
    assert abs(trace.final_state[0] - expected) / abs(expected) <= 100.0 * tol.rel_tol


def test_integration_params_monotone_and_dense_output():
    trace = integrate_ode(
        lambda a, y: np.array([math.cos(a)]), [0.0], (0.0, 3.0)
    )
    assert np.all(np.diff(trace.params) > 0.0)
    for a in (0.3, 1.7, 2.9):
        assert trace.sample(a)[0] == pytest.approx(math.sin(a), abs=2e-5)
    # tighter tolerances shrink the accepted steps and with them the
    # interpolation error
    tight = integrate_ode(
        lambda a, y: np.array([math.cos(a)]),
        [0.0],
        (0.0, 3.0),
        Tolerance(abs_tol=1e-12, rel_tol=1e-11, max_iter=200),
    )
    for a in (0.3, 1.7, 2.9):
        assert tight.sample(a)[0] == pytest.approx(math.sin(a), abs=5e-8)
    with pytest.raises(DomainError):
        trace.sample(3.5)


def test_integration_backward_span():
    trace = integrate_ode(lambda a, y: y, [1.0], (1.0, 0.0))
    assert np.all(np.diff(trace.params) < 0.0)
    assert trace.final_state[0] == pytest.approx(math.exp(-1.0), rel=1e-8)


def test_integration_event_location():
    trace = integrate_ode(
        lambda a, y: np.array([math.cos(a)]),
        [0.0],
        (0.0, 3.0),
        events=[lambda a, y: y[0] - 0.5],
    )
    hit = trace.terminal_event
    assert isinstance(hit, EventHit)
    assert hit.index == 0
    assert hit.param == pytest.approx(math.pi / 6.0, abs=1e-8)
    assert hit.state[0] == pytest.approx(0.5, abs=1e-8)
    # trace is truncated at the event
    assert trace.params[-1] == hit.param


def test_integration_step_underflow_carries_last_state():
    # y' = y^2 blows up at a = 1; the controller must fail loudly just
    # before the pole and report how far it got
    with pytest.raises(StepUnderflowError) as exc_info:
        integrate_ode(lambda a, y: y * y, [1.0], (0.0, 2.0))
    err = exc_info.value
    assert 0.99 < err.param <= 1.0
    assert err.state[0] > 1e6


def test_integration_two_dimensional_oscillator():
    # harmonic oscillator keeps its energy to the requested accuracy
    def rhs(a, y):
        return np.array([y[1], -y[0]])

    trace = integrate_ode(rhs, [1.0, 0.0], (0.0, 2.0 * math.pi))
    assert trace.final_state[0] == pytest.approx(1.0, abs=1e-7)
    assert trace.final_state[1] == pytest.approx(0.0, abs=1e-7)


# ---------------------------------------------------------------------------
# monotone cubic interpolation


def test_monotone_cubic_matches_reference_interpolant():
    rng = np.random.default_rng(7)
    x = np.cumsum(0.1 + rng.random(12))
    y = np.cumsum(rng.random(12))
    ours = MonotoneCubic(x, y)
    theirs = PchipInterpolator(x, y)
    q = np.linspace(x[0], x[-1], 301)
    assert np.max(np.abs(ours(q) - theirs(q))) < 1e-12


def test_monotone_cubic_preserves_monotonicity():
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    y = np.array([0.0, 0.1, 2.0, 2.05, 3.0, 3.01])
    interp = MonotoneCubic(x, y)
    q = np.linspace(0.0, 5.0, 2001)
    vals = interp(q)
    assert np.all(np.diff(vals) >= -1e-14)


def test_monotone_cubic_rejects_bad_nodes():
    with pytest.raises(ValueError):
        MonotoneCubic(np.array([0.0, 0.0, 1.0]), np.array([1.0, 2.0, 3.0]))
    interp = MonotoneCubic(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(DomainError):
        interp(1.5)

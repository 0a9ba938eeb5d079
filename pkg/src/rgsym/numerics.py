"""Low-level numerical kernels shared by every scenario module.

Self-contained on top of numpy: the imaginary error function, the pair of
oscillatory structure integrals that drive the warm-plasma fields, an
adaptive Gauss-Kronrod quadrature, a bracketed root finder, an embedded
Runge-Kutta integrator with dense output and event location, and a
monotone cubic interpolant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "Bracket",
    "NumericsError",
    "DomainError",
    "NoSignChangeError",
    "MaxIterationsError",
    "QuadratureError",
    "StepUnderflowError",
    "erfi",
    "dawson",
    "cold_structure_functions",
    "hot_structure_functions",
    "adaptive_quadrature",
    "find_root",
    "integrate_ode",
    "OdeTrace",
    "EventHit",
    "MonotoneCubic",
    "HermiteSpline",
]


# ---------------------------------------------------------------------------
# errors


class NumericsError(Exception):
    """Base class for every numerical failure raised by this package."""


class DomainError(NumericsError, ValueError):
    """Argument outside the range an algorithm is valid on."""


class NoSignChangeError(NumericsError):
    """Root bracket endpoints do not straddle a sign change."""


class MaxIterationsError(NumericsError):
    """Iteration budget exhausted before the stopping rule was met."""


class QuadratureError(NumericsError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class StepUnderflowError(NumericsError):
    """Adaptive ODE step shrank below machine resolution.

    Carries the last accepted point so callers can inspect how far the
    integration got before it stalled.
    """

    def __init__(self, message: str, param: float, state: np.ndarray):
        super().__init__(message)
        self.param = param
        self.state = np.asarray(state, dtype=float)


# ---------------------------------------------------------------------------
# tolerances and brackets


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative accuracy targets plus an iteration budget.

    ``max_iter`` caps *iterative* searches (root finding, fixed-point
    loops).  The ODE integrator has its own internal step cap since a
    step count is not an accuracy knob.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be positive")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class Bracket:
    """Closed interval [lo, hi] believed to contain a root."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise ValueError("bracket requires lo < hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo


_DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# imaginary error function


_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _dawson_cf(x: float, tol: Tolerance) -> float:
    # Dawson integral D(x) = exp(-x^2) * int_0^x exp(t^2) dt for x > 0,
    # evaluated as x * M(1, 3/2, -x^2) through the Gauss continued
    # fraction for ratios of confluent hypergeometric functions:
    # M = 1/(1 + c1 z/(1 + c2 z/(1 + ...))) with z = -x^2, b = 1/2,
    # c_{2k+1} = -(b + k)/((b+2k)(b+2k+1)),
    # c_{2k+2} = (k + 1)/((b+2k+1)(b+2k+2)).
    # Unlike the large-x asymptotic fraction this one converges for
    # every real x, so the branch point at |x| = 3 costs no accuracy.
    z = -x * x
    b = 0.5
    # modified Lentz evaluation; all denominator terms of the fraction are 1
    tiny = 1e-300
    f = 1.0
    c = 1.0
    d = 0.0
    for j in range(2 * tol.max_iter):
        kk = j // 2
        if j % 2 == 0:
            a_term = -(b + kk) / ((b + 2 * kk) * (b + 2 * kk + 1)) * z
        else:
            a_term = (kk + 1) / ((b + 2 * kk + 1) * (b + 2 * kk + 2)) * z
        d = 1.0 + a_term * d
        if d == 0.0:
            d = tiny
        c = 1.0 + a_term / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-15:
            return x / f
    raise MaxIterationsError("Dawson continued fraction did not converge")


def dawson(x: float, tol: Tolerance = _DEFAULT_TOL) -> float:
    """Dawson integral exp(-x^2) * int_0^x exp(t^2) dt, any real x."""
    x = float(x)
    if x == 0.0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    return sign * _dawson_cf(abs(x), tol)


def erfi(x: float, tol: Tolerance = _DEFAULT_TOL) -> float:
    """Imaginary error function on [-6, 6].

    Maclaurin series for |x| <= 3 (all terms share the sign of x, so the
    sum carries no cancellation), continued-fraction Dawson relation
    erfi(x) = 2/sqrt(pi) * exp(x^2) * D(x) for 3 < |x| <= 6.  Beyond 6
    the result would dwarf every quantity this package balances it
    against, so that range is rejected outright.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("erfi requires a finite argument")
    ax = abs(x)
    if ax > 6.0:
        raise DomainError(
            f"erfi argument {x!r} outside supported range |x| <= 6"
        )
    if ax <= 3.0:
        # sum_k x^(2k+1) / (k! (2k+1))
        total = 0.0
        u = ax  # x^(2k+1)/k!
        k = 0
        while True:
            term = u / (2 * k + 1)
            total += term
            if term < tol.abs_tol * 0.01 + total * 1e-17:
                break
            k += 1
            if k > 400:
                raise MaxIterationsError("erfi series did not converge")
            u *= ax * ax / k
        result = _TWO_OVER_SQRT_PI * total
    else:
        result = _TWO_OVER_SQRT_PI * math.exp(ax * ax) * _dawson_cf(ax, tol)
    return result if x >= 0 else -result


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature (7/15 pair)

# Kronrod nodes on [-1, 1] (positive half) and weights; the odd-indexed
# nodes form the embedded 7-point Gauss rule.
_GK_NODES_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_GK_WEIGHTS_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_GAUSS_WEIGHTS_HALF = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

_GK_X = np.concatenate((-_GK_NODES_HALF[:-1], _GK_NODES_HALF[::-1]))
_GK_W = np.concatenate((_GK_WEIGHTS_HALF[:-1], _GK_WEIGHTS_HALF[::-1]))
# Gauss points sit at odd positions 1,3,...,13 of the 15-point layout.
_G_IDX = np.arange(1, 15, 2)
_G_W = np.concatenate((_GAUSS_WEIGHTS_HALF[:-1], _GAUSS_WEIGHTS_HALF[::-1]))


def _gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * _GK_X
    y = np.asarray(f(x), dtype=float)
    kron = half * float(np.dot(_GK_W, y))
    gauss = half * float(np.dot(_G_W, y[_G_IDX]))
    return kron, abs(kron - gauss)


def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    min_width: float = 1e-12,
    panel_budget: int = 4096,
) -> float:
    """Integrate a vectorized integrand over [a, b].

    Recursive bisection on a 7/15 Gauss-Kronrod pair.  A panel is
    accepted when its error estimate fits inside its share of the
    budget or it is already narrower than ``min_width``.  Exceeding
    ``panel_budget`` panels with the accuracy target still unmet raises
    :class:`QuadratureError`.
    """
    if not (b > a):
        if b == a:
            return 0.0
        return -adaptive_quadrature(f, b, a, tol, min_width=min_width, panel_budget=panel_budget)

    target = tol.abs_tol
    stack = [(a, b, target)]
    total = 0.0
    panels = 0
    while stack:
        lo, hi, budget = stack.pop()
        panels += 1
        if panels > panel_budget:
            raise QuadratureError(
                "quadrature panel budget exhausted before reaching tolerance"
            )
        val, err = _gk15(f, lo, hi)
        if err <= budget or (hi - lo) <= min_width:
            total += val
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, 0.5 * budget))
            stack.append((mid, hi, 0.5 * budget))
    return total


# ---------------------------------------------------------------------------
# structure functions for the driven-oscillation envelope


def cold_structure_functions(eta: float) -> tuple[float, float]:
    """Closed-form envelope pair (1, eta)/(1 + eta^2)."""
    denom = 1.0 + eta * eta
    return 1.0 / denom, eta / denom


def _oscillatory_tail(eta: float, t_cut: float, abs_tol: float) -> complex:
    """int_{t_cut}^inf exp(i (eta x + x^3/3)) dx by repeated parts.

    Each pass trades the integral for a boundary term at ``t_cut`` plus a
    faster-decaying integrand; terms are tracked as coefficients of
    x^m / phi'(x)^n with phi' = eta + x^2.  Because phi'/x^2 increases
    with x, the remainder is bounded using
    phi'(x) >= (phi'(t_cut)/t_cut^2) * x^2 for x >= t_cut.
    """
    phase = eta * t_cut + t_cut**3 / 3.0
    edge = cmath.exp(1j * phase)
    dphi = eta + t_cut * t_cut
    if dphi <= 0.0:
        raise QuadratureError("tail cut must sit beyond the stationary point")
    rho = dphi / (t_cut * t_cut)

    terms: dict[tuple[int, int], complex] = {(0, 0): 1.0 + 0.0j}
    total = 0.0 + 0.0j
    for _ in range(60):
        boundary = 0.0 + 0.0j
        nxt: dict[tuple[int, int], complex] = {}
        for (m, n), coef in terms.items():
            boundary += 1j * coef * t_cut**m / dphi ** (n + 1) * edge
            if m > 0:
                key = (m - 1, n + 1)
                nxt[key] = nxt.get(key, 0.0) + 1j * coef * m
            key = (m + 1, n + 2)
            nxt[key] = nxt.get(key, 0.0) - 2j * coef * (n + 1)
        total += boundary
        # bound the remaining integral term by term
        remainder = 0.0
        for (m, n), coef in nxt.items():
            power = m - 2 * n
            if power >= -1:
                remainder = math.inf
                break
            remainder += abs(coef) * rho ** (-n) * t_cut ** (power + 1) / (-(power + 1))
        if remainder < abs_tol:
            return total
        terms = nxt
    raise QuadratureError("oscillatory tail expansion did not converge")


def hot_structure_functions(
    eta: float,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    min_width: float = 1e-12,
    panel_budget: int = 4096,
) -> tuple[float, float]:
    """Oscillatory envelope pair for the warm model.

    f1 = int_0^inf cos(eta x + x^3/3) dx and f2 the matching sine
    integral.  The finite part up to the cut is integrated with the
    adaptive Gauss-Kronrod rule; past the cut, where the phase is
    strictly monotone, the remainder is summed by repeated integration
    by parts.  Raises :class:`QuadratureError` if either piece fails to
    converge.
    """
    eta = float(eta)
    t_cut = max(6.0, math.sqrt(2.0 * abs(eta)) + 2.0)
    quad_tol = Tolerance(abs_tol=0.5 * tol.abs_tol, rel_tol=tol.rel_tol, max_iter=tol.max_iter)

    def integrand_cos(x: np.ndarray) -> np.ndarray:
        return np.cos(eta * x + x**3 / 3.0)

    def integrand_sin(x: np.ndarray) -> np.ndarray:
        return np.sin(eta * x + x**3 / 3.0)

    f1 = adaptive_quadrature(
        integrand_cos, 0.0, t_cut, quad_tol, min_width=min_width, panel_budget=panel_budget
    )
    f2 = adaptive_quadrature(
        integrand_sin, 0.0, t_cut, quad_tol, min_width=min_width, panel_budget=panel_budget
    )
    tail = _oscillatory_tail(eta, t_cut, 0.5 * tol.abs_tol)
    return f1 + tail.real, f2 + tail.imag


# ---------------------------------------------------------------------------
# bracketed root finding


def find_root(
    objective: Callable[[float], float],
    bracket: Bracket,
    tol: Tolerance = _DEFAULT_TOL,
) -> float:
    """Bisection-secant hybrid root finder.

    Keeps a guaranteed sign-change interval at every step; a secant
    candidate is used when it falls safely inside the interval,
    otherwise the step falls back to bisection.  Stops once
    |objective(r)| <= abs_tol or the interval width drops below
    rel_tol * |r|.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo = float(objective(lo))
    if abs(flo) <= tol.abs_tol:
        return lo
    fhi = float(objective(hi))
    if abs(fhi) <= tol.abs_tol:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChangeError(
            f"objective has the same sign at both bracket ends ({flo:+.3e}, {fhi:+.3e})"
        )

    x_prev, f_prev = lo, flo
    x_cur, f_cur = hi, fhi
    for _ in range(tol.max_iter):
        # secant proposal from the two most recent iterates
        denom = f_cur - f_prev
        use_secant = False
        if denom != 0.0:
            cand = x_cur - f_cur * (x_cur - x_prev) / denom
            gap = hi - lo
            if lo + 1e-3 * gap < cand < hi - 1e-3 * gap:
                use_secant = True
        if not use_secant:
            cand = 0.5 * (lo + hi)
        f_cand = float(objective(cand))
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = cand, f_cand
        if f_cand == 0.0 or abs(f_cand) <= tol.abs_tol:
            return cand
        if flo * f_cand < 0.0:
            hi, fhi = cand, f_cand
        else:
            lo, flo = cand, f_cand
        if (hi - lo) <= tol.rel_tol * abs(cand):
            return cand
    raise MaxIterationsError(
        f"root finder used all {tol.max_iter} iterations; best interval [{lo}, {hi}]"
    )


# ---------------------------------------------------------------------------
# embedded Runge-Kutta integration (Dormand-Prince 5(4))

_DP_C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1.0 / 5.0]),
    np.array([3.0 / 40.0, 9.0 / 40.0]),
    np.array([44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]),
    np.array([19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0]),
    np.array(
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0]
    ),
    np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0]),
]
_DP_B5 = np.array(
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0]
)
_DP_B4 = np.array(
    [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ]
)


@dataclass(frozen=True)
class EventHit:
    """Where an event function crossed zero along an orbit."""

    index: int
    param: float
    state: np.ndarray


class OdeTrace:
    """Accepted integration nodes plus a cubic dense interpolant.

    ``params`` is strictly monotone (increasing or decreasing following
    the requested span); ``states`` holds one row per node.  ``sample``
    evaluates the piecewise cubic Hermite interpolant built from stored
    derivatives, so no extra right-hand-side calls are needed after the
    run.
    """

    def __init__(
        self,
        params: np.ndarray,
        states: np.ndarray,
        derivs: np.ndarray,
        terminal_event: EventHit | None = None,
    ):
        self.params = np.asarray(params, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        self.terminal_event = terminal_event
        if self.params.ndim != 1 or self.states.shape[0] != self.params.size:
            raise ValueError("trace arrays are inconsistent")

    @property
    def final_param(self) -> float:
        return float(self.params[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()

    def sample(self, a: float) -> np.ndarray:
        p = self.params
        increasing = p[-1] >= p[0]
        lo, hi = (p[0], p[-1]) if increasing else (p[-1], p[0])
        if a < lo - 1e-12 * max(1.0, abs(lo)) or a > hi + 1e-12 * max(1.0, abs(hi)):
            raise DomainError(f"sample point {a} outside integrated span [{lo}, {hi}]")
        a = min(max(a, lo), hi)
        q = p if increasing else p[::-1]
        idx = int(np.searchsorted(q, a, side="right")) - 1
        idx = min(max(idx, 0), p.size - 2)
        if not increasing:
            idx = p.size - 2 - idx
        a0, a1 = p[idx], p[idx + 1]
        h = a1 - a0
        if h == 0.0:
            return self.states[idx].copy()
        s = (a - a0) / h
        y0, y1 = self.states[idx], self.states[idx + 1]
        d0, d1 = self.derivs[idx] * h, self.derivs[idx + 1] * h
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1


def _rk_step(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    a: float,
    y: np.ndarray,
    f0: np.ndarray,
    h: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Dormand-Prince step; returns (y_new, error_estimate, f_new)."""
    k = [f0]
    for i in range(1, 7):
        yi = y + h * sum(_DP_A[i][j] * k[j] for j in range(i))
        k.append(np.asarray(rhs(a + _DP_C[i] * h, yi), dtype=float))
    y5 = y + h * sum(_DP_B5[i] * k[i] for i in range(7))
    y4 = y + h * sum(_DP_B4[i] * k[i] for i in range(7))
    # stage 7 is evaluated at (a + h, y5): first-same-as-last
    return y5, y5 - y4, k[6]


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    start: Sequence[float] | np.ndarray,
    span: tuple[float, float],
    tol: Tolerance = _DEFAULT_TOL,
    *,
    events: Sequence[Callable[[float, np.ndarray], float]] | None = None,
    max_steps: int = 200_000,
    first_step: float | None = None,
) -> OdeTrace:
    """Adaptive Dormand-Prince 5(4) integration over ``span``.

    Step acceptance uses an error-per-unit-step criterion against the
    mixed scale ``abs_tol + rel_tol * |y|``, so the accumulated global
    error tracks the tolerance over order-one spans.  Event functions
    are scalar callables of (param, state); the first sign change along
    the orbit terminates it, with the crossing located by bisection and
    secant steps on re-integrated candidate points.  If the controller
    drives the step below machine resolution a
    :class:`StepUnderflowError` carrying the last accepted point is
    raised.
    """
    a0, a1 = float(span[0]), float(span[1])
    y = np.asarray(start, dtype=float).copy()
    if y.ndim != 1:
        raise ValueError("start state must be one-dimensional")
    if a0 == a1:
        f = np.asarray(rhs(a0, y), dtype=float)
        return OdeTrace(np.array([a0]), y[None, :].copy(), f[None, :])

    direction = 1.0 if a1 > a0 else -1.0
    span_len = abs(a1 - a0)
    h = first_step if first_step is not None else 1e-2 * span_len
    h = direction * min(abs(h), span_len)

    params = [a0]
    states = [y.copy()]
    f_cur = np.asarray(rhs(a0, y), dtype=float)
    derivs = [f_cur.copy()]
    a = a0

    ev_list = list(events) if events else []
    ev_vals = [float(g(a, y)) for g in ev_list]

    err_prev = 1.0
    terminal: EventHit | None = None

    for _ in range(max_steps):
        if (a - a1) * direction >= 0.0:
            break
        if abs(h) > abs(a1 - a):
            h = a1 - a
        if abs(h) < 16.0 * np.finfo(float).eps * max(1.0, abs(a)):
            raise StepUnderflowError(
                f"step size underflow at parameter {a!r}", a, states[-1]
            )
        y_new, err_vec, f_new = _rk_step(rhs, a, y, f_cur, h)
        if not np.all(np.isfinite(y_new)):
            h *= 0.25
            continue
        scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2))) / abs(h)
        if err <= 1.0:
            a_new = a + h
            # event scan across the accepted step
            hit_param = None
            hit_idx = -1
            if ev_list:
                for i_ev, g in enumerate(ev_list):
                    g_new = float(g(a_new, y_new))
                    g_old = ev_vals[i_ev]
                    if g_old == 0.0:
                        ev_vals[i_ev] = g_new
                        continue
                    if g_new == 0.0 or g_old * g_new < 0.0:
                        loc = _locate_event(rhs, g, a, y, a_new, g_old, g_new, tol)
                        if hit_param is None or (loc - hit_param) * direction < 0.0:
                            hit_param, hit_idx = loc, i_ev
                    ev_vals[i_ev] = g_new
            if hit_param is not None:
                y_hit = _advance(rhs, a, y, hit_param, tol)
                f_hit = np.asarray(rhs(hit_param, y_hit), dtype=float)
                params.append(hit_param)
                states.append(y_hit)
                derivs.append(f_hit)
                terminal = EventHit(hit_idx, hit_param, y_hit.copy())
                break
            a, y, f_cur = a_new, y_new, f_new
            params.append(a)
            states.append(y.copy())
            derivs.append(f_cur.copy())
            factor = 0.9 * err ** -0.22 * err_prev**0.05 if err > 0.0 else 5.0
            err_prev = max(err, 1e-10)
            h *= min(5.0, max(0.2, factor))
        else:
            h *= max(0.2, 0.9 * err**-0.25)
    else:
        raise MaxIterationsError("ODE step cap exhausted before reaching span end")

    return OdeTrace(np.array(params), np.vstack(states), np.vstack(derivs), terminal)


def _advance(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    a0: float,
    y0: np.ndarray,
    a_target: float,
    tol: Tolerance,
) -> np.ndarray:
    """Re-integrate from a known node to an interior parameter value."""
    if a_target == a0:
        return y0.copy()
    sub = integrate_ode(
        rhs,
        y0,
        (a0, a_target),
        Tolerance(abs_tol=tol.abs_tol * 0.1, rel_tol=tol.rel_tol * 0.1, max_iter=tol.max_iter),
        first_step=(a_target - a0),
    )
    return sub.final_state


def _locate_event(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    g: Callable[[float, np.ndarray], float],
    a0: float,
    y0: np.ndarray,
    a1: float,
    g0: float,
    g1: float,
    tol: Tolerance,
) -> float:
    """Find the zero of g along the orbit inside one accepted step."""
    lo, hi = a0, a1
    glo, ghi = g0, g1
    if g1 == 0.0:
        return a1
    for _ in range(80):
        if abs(hi - lo) <= tol.abs_tol + tol.rel_tol * max(abs(lo), abs(hi)):
            break
        denom = ghi - glo
        mid = 0.5 * (lo + hi)
        if denom != 0.0:
            cand = hi - ghi * (hi - lo) / denom
            lo_, hi_ = (lo, hi) if hi > lo else (hi, lo)
            if not (lo_ + 0.05 * (hi_ - lo_) < cand < hi_ - 0.05 * (hi_ - lo_)):
                cand = mid
        else:
            cand = mid
        y_cand = _advance(rhs, a0, y0, cand, tol)
        g_cand = float(g(cand, y_cand))
        if g_cand == 0.0:
            return cand
        if glo * g_cand < 0.0:
            hi, ghi = cand, g_cand
        else:
            lo, glo = cand, g_cand
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# cubic interpolation


class HermiteSpline:
    """Piecewise cubic with caller-supplied node derivatives."""

    def __init__(self, x: np.ndarray, y: np.ndarray, dydx: np.ndarray):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.d = np.asarray(dydx, dtype=float)
        if self.x.ndim != 1 or self.x.size < 2:
            raise ValueError("need at least two nodes")
        if np.any(np.diff(self.x) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if self.y.shape != self.x.shape or self.d.shape != self.x.shape:
            raise ValueError("node arrays must share one shape")

    def _locate(self, q: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.x, q, side="right") - 1
        return np.clip(idx, 0, self.x.size - 2)

    def __call__(self, q):
        q_arr = np.asarray(q, dtype=float)
        scalar = q_arr.ndim == 0
        q_arr = np.atleast_1d(q_arr)
        if np.any(q_arr < self.x[0] - 1e-12) or np.any(q_arr > self.x[-1] + 1e-12):
            raise DomainError("interpolation query outside the tabulated range")
        idx = self._locate(q_arr)
        h = self.x[idx + 1] - self.x[idx]
        s = (q_arr - self.x[idx]) / h
        y0, y1 = self.y[idx], self.y[idx + 1]
        d0, d1 = self.d[idx] * h, self.d[idx + 1] * h
        out = (
            (1.0 + 2.0 * s) * (1.0 - s) ** 2 * y0
            + s * (1.0 - s) ** 2 * d0
            + s * s * (3.0 - 2.0 * s) * y1
            + s * s * (s - 1.0) * d1
        )
        return float(out[0]) if scalar else out

    def derivative(self, q):
        q_arr = np.asarray(q, dtype=float)
        scalar = q_arr.ndim == 0
        q_arr = np.atleast_1d(q_arr)
        idx = self._locate(np.clip(q_arr, self.x[0], self.x[-1]))
        h = self.x[idx + 1] - self.x[idx]
        s = (q_arr - self.x[idx]) / h
        y0, y1 = self.y[idx], self.y[idx + 1]
        d0, d1 = self.d[idx], self.d[idx + 1]
        out = (
            6.0 * s * (s - 1.0) * (y0 - y1) / h
            + (3.0 * s * s - 4.0 * s + 1.0) * d0
            + s * (3.0 * s - 2.0) * d1
        )
        return float(out[0]) if scalar else out


class MonotoneCubic(HermiteSpline):
    """Shape-preserving cubic interpolant on monotone data.

    Node slopes follow the weighted-harmonic-mean rule (interior) and a
    clipped three-point formula (ends), which keeps the interpolant
    monotone wherever the data are.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("need at least two nodes")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        h = np.diff(x)
        delta = np.diff(y) / h
        n = x.size
        d = np.zeros(n)
        if n == 2:
            d[:] = delta[0]
        else:
            for k in range(1, n - 1):
                if delta[k - 1] * delta[k] <= 0.0:
                    d[k] = 0.0
                else:
                    w1 = 2.0 * h[k] + h[k - 1]
                    w2 = h[k] + 2.0 * h[k - 1]
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k])
            d[0] = _edge_slope(h[0], h[1], delta[0], delta[1])
            d[-1] = _edge_slope(h[-1], h[-2], delta[-1], delta[-2])
        super().__init__(x, y, d)


def _edge_slope(h0: float, h1: float, d0: float, d1: float) -> float:
    slope = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
    if slope * d0 <= 0.0:
        return 0.0
    if d0 * d1 < 0.0 and abs(slope) > 3.0 * abs(d0):
        return 3.0 * d0
    return slope

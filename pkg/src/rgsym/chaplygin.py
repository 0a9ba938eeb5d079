"""Closed-form beam-collapse and expanding-layer solutions with their
higher-symmetry invariance checks.

The module houses two exact solutions of the coupled density/velocity
system (a focusing soliton-profile beam and an expanding gaussian
layer), an on-axis reduction of the first, and the machinery needed to
evaluate second-order symmetry coordinate pairs on solution data
expressed in hodograph form (tau = n*t, chi = x - v*t as functions of
n and v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .groups import StencilDomainError
from .numerics import (
    Bracket,
    DomainError,
    NumericsError,
    Tolerance,
    erfi,
    find_root,
    integrate_ode,
)

__all__ = [
    "BranchLossError",
    "ChaplyginConfig",
    "HodographPoint",
    "HodographSampler",
    "GaussianOracle",
    "soliton_solution",
    "soliton_field",
    "soliton_axis_slope",
    "slab_solution",
    "slab_field",
    "slab_time_of_q",
    "onaxis_density",
    "onaxis_density_path",
    "liebacklund_coordinates",
    "liebacklund_residual",
]

_DEFAULT_TOL = Tolerance()

# the erfi kernel is capped at argument 6, so the layer clock is only
# invertible up to q = 8.4 (q/sqrt(2) < 6); beyond that the time is
# astronomically large anyway
_Q_CAP = 8.4

_LB_CASES = ("soliton", "slab", "f0g0", "f1g1", "gauss1", "gauss2")


class BranchLossError(NumericsError):
    """The continuous solution branch ceased to exist (or iteration stalled)."""


@dataclass(frozen=True)
class ChaplyginConfig:
    """Boundary-value problem selector for the coupled density/velocity pair.

    alpha scales the nonlinear coupling (its sign decides whether the
    system is focusing or wave-like), phi chooses the nonlinearity
    factor and profile the boundary density shape.  Only the published
    profile/phi combinations are accepted.  The boundary velocity is
    fixed at zero.
    """

    alpha: float = 1.0
    phi: str = "unity"
    profile: str = "soliton"
    w0: float = 0.0

    def __post_init__(self):
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        if self.phi not in ("unity", "inverse"):
            raise ValueError(f"unknown nonlinearity factor {self.phi!r}")
        if self.profile not in ("soliton", "gaussian"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if (self.profile, self.phi) == ("soliton", "inverse"):
            raise ValueError("the soliton profile is only published with phi='unity'")
        if self.w0 != 0.0:
            raise ValueError("boundary velocity is fixed at zero")

    def phi_callable(self) -> Callable[[np.ndarray], np.ndarray]:
        if self.phi == "unity":
            return lambda n: np.ones_like(np.asarray(n, dtype=float))
        return lambda n: 1.0 / np.asarray(n, dtype=float)


@dataclass
class HodographPoint:
    """Solution sample in hodograph form with optional derivative slots.

    tau = n*t and chi = x - v*t; the *_n entries are derivatives at
    fixed v, the *_alpha entries derivatives with respect to the
    coupling at fixed (n, w = v/alpha).
    """

    tau: float
    chi: float
    n: float
    v: float
    tau_n: float | None = None
    chi_n: float | None = None
    tau_nn: float | None = None
    chi_nn: float | None = None
    tau_alpha: float | None = None
    chi_alpha: float | None = None

    def __post_init__(self):
        if not self.n > 0.0:
            raise ValueError("density must be positive")

    def physical(self) -> tuple[float, float]:
        """Recover (t, x) from the hodograph data."""
        t = self.tau / self.n
        return t, self.chi + self.v * t


# ---------------------------------------------------------------------------
# soliton-profile beam


def _soliton_branch_density(c2, tsq4):
    """Continuous-branch density 2/(cosh^2 + sqrt(cosh^4 - 4t^2)).

    Written in rationalized form so the small root never suffers
    cancellation; the discriminant is clamped only within rounding of
    zero, a genuinely negative value means the branch is gone.
    """
    disc = c2 * c2 - tsq4
    lost = disc < -1e-13 * c2 * c2
    if np.any(lost):
        raise BranchLossError(
            "density branch lost: cosh^4(chi) < 4 t^2 at the requested point"
        )
    disc = np.maximum(disc, 0.0)
    return 2.0 / (c2 + np.sqrt(disc))


def _soliton_iterate(tc, x, chi, tol):
    """Advance the damped fixed point for chi at fixed time tc.

    chi and x may be scalars or arrays.  Under-relaxation by 0.5 keeps
    the map contracting on the continuous branch; once the damped loop
    has squeezed the update, a short vectorized secant polish removes
    the critical slowing-down near the axis singularity.
    """
    tsq4 = 4.0 * tc * tc
    two_t2 = 2.0 * tc * tc

    def advance(c):
        n = _soliton_branch_density(np.cosh(c) ** 2, tsq4)
        return x + two_t2 * n * np.tanh(c)

    goal = 0.1 * tol.abs_tol
    settled = False
    for _ in range(60):
        target = advance(chi)
        delta = target - chi
        chi = chi + 0.5 * delta
        if np.max(np.abs(delta)) <= goal:
            settled = True
            break
    if settled:
        return chi

    def residue(c):
        return c - advance(c)

    c0 = chi
    c1 = chi + 1e-9
    r0, r1 = residue(c0), residue(c1)
    for _ in range(30):
        dr = r1 - r0
        safe = np.where(dr == 0.0, 1.0, dr)
        step = np.where(dr == 0.0, 0.0, r1 * (c1 - c0) / safe)
        c0, r0 = c1, r1
        c1 = c1 - step
        r1 = residue(c1)
        if np.max(np.abs(step)) <= 1e-15 * (1.0 + np.max(np.abs(c1))):
            break
    return c1


def _soliton_state(tc, chi):
    tsq4 = 4.0 * tc * tc
    n = _soliton_branch_density(np.cosh(chi) ** 2, tsq4)
    v = -2.0 * n * tc * np.tanh(chi)
    return n, v


def soliton_solution(
    t: float, x: float, tol: Tolerance = _DEFAULT_TOL
) -> tuple[float, float]:
    """Density and velocity of the focusing soliton-profile beam.

    Solves v = -2nt*tanh(x - vt), n^2 t^2 = n*cosh^2(x - vt) - 1 on the
    branch continuous from (n, v) = (cosh^-2 x, 0) at t = 0, marching
    the time up in continuation steps of 1e-3 with a damped fixed-point
    iteration at each step.
    """
    if t < 0.0:
        raise DomainError("the beam solution is defined for t >= 0")
    if t == 0.0:
        return 1.0 / math.cosh(x) ** 2, 0.0
    chi = float(x)
    steps = int(math.ceil(t / 1e-3))
    for k in range(1, steps + 1):
        tc = t * k / steps
        chi = _soliton_iterate(tc, x, chi, tol)
    n, v = _soliton_state(t, chi)
    return float(n), float(v)


def soliton_field(
    t_axis: np.ndarray, x_axis: np.ndarray, tol: Tolerance = _DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Soliton-beam (n, v) sampled on a tensor grid, shape (nt, nx).

    The continuation in t is shared across all columns, so the cost is
    one damped sweep per 1e-3 of time rather than per grid point.
    """
    t_axis = np.asarray(t_axis, dtype=float)
    x_axis = np.asarray(x_axis, dtype=float)
    if t_axis.ndim != 1 or x_axis.ndim != 1:
        raise ValueError("t_axis and x_axis must be one-dimensional")
    if np.any(t_axis < 0.0) or np.any(np.diff(t_axis) <= 0.0):
        raise DomainError("t_axis must be nonnegative and strictly increasing")
    nt, nx = t_axis.size, x_axis.size
    dens = np.empty((nt, nx))
    vel = np.empty((nt, nx))
    chi = x_axis.copy()
    t_prev = 0.0
    for i, t_row in enumerate(t_axis):
        if t_row == 0.0:
            dens[i] = 1.0 / np.cosh(x_axis) ** 2
            vel[i] = 0.0
            continue
        span = t_row - t_prev
        substeps = max(1, int(math.ceil(span / 1e-3)))
        for k in range(1, substeps + 1):
            tc = t_prev + span * k / substeps
            chi = _soliton_iterate(tc, x_axis, chi, tol)
        t_prev = t_row
        n_row, v_row = _soliton_state(t_row, chi)
        dens[i] = n_row
        vel[i] = v_row
    return dens, vel


def soliton_axis_slope(t: float) -> float:
    """Closed-form velocity gradient on the axis, -2tn/sqrt(1 - 4t^2)."""
    if not 0.0 <= t < 0.5:
        raise DomainError("axis gradient defined for 0 <= t < 1/2")
    s = math.sqrt(1.0 - 4.0 * t * t)
    n = 2.0 / (1.0 + s)
    return -2.0 * t * n / s


# ---------------------------------------------------------------------------
# expanding-layer solution


def slab_time_of_q(q: float) -> float:
    """Layer clock t(q) = (sqrt(pi)/2) * erfi(q/sqrt(2))."""
    return 0.5 * math.sqrt(math.pi) * erfi(q / math.sqrt(2.0))


def _slab_q_from_t(t: float, tol: Tolerance) -> float:
    if t < 0.0:
        raise DomainError("the layer solution is defined for t >= 0")
    if t == 0.0:
        return 0.0
    if t > slab_time_of_q(_Q_CAP):
        raise DomainError(
            f"time {t!r} beyond the invertible window of the layer clock (q <= {_Q_CAP})"
        )
    return find_root(lambda q: slab_time_of_q(q) - t, Bracket(0.0, _Q_CAP), tol)


def slab_solution(
    t: float, x: float, tol: Tolerance = _DEFAULT_TOL
) -> tuple[float, float]:
    """Expanding-layer density and velocity at (t, x).

    Inverts the monotone map t(q) by bracketed root finding and then
    evaluates the closed forms v = x*sqrt(2)*q*exp(-q^2/2) and
    n = exp(-q^2/2) * exp(-x^2 exp(-q^2)).
    """
    q = _slab_q_from_t(t, tol)
    g = math.exp(-0.5 * q * q)
    v = x * math.sqrt(2.0) * q * g
    n = g * math.exp(-x * x * g * g)
    return n, v


def slab_field(
    t_axis: np.ndarray, x_axis: np.ndarray, tol: Tolerance = _DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Layer (n, v) on a tensor grid, shape (nt, nx)."""
    t_axis = np.asarray(t_axis, dtype=float)
    x_axis = np.asarray(x_axis, dtype=float)
    dens = np.empty((t_axis.size, x_axis.size))
    vel = np.empty((t_axis.size, x_axis.size))
    for i, t in enumerate(t_axis):
        q = _slab_q_from_t(float(t), tol)
        g = math.exp(-0.5 * q * q)
        vel[i] = x_axis * math.sqrt(2.0) * q * g
        dens[i] = g * np.exp(-x_axis * x_axis * g * g)
    return dens, vel


# ---------------------------------------------------------------------------
# on-axis reduction of the soliton beam


def onaxis_density(t: float, tol: Tolerance = _DEFAULT_TOL) -> float:
    """Axis density from the reduced relation t = sqrt(n - 1)/n.

    Returns the root on the branch through n(0) = 1, which lives in
    [1, 2] for 0 <= t <= 1/2.
    """
    if not 0.0 <= t <= 0.5:
        raise DomainError("axis reduction defined for 0 <= t <= 1/2 only")
    if t == 0.0:
        return 1.0

    def gap(n):
        return math.sqrt(n - 1.0) / n - t

    return find_root(gap, Bracket(1.0, 2.0), tol)


def _onaxis_rhs(t, y):
    n, m = y
    return np.array([m, (5.0 * n - 4.0 + t * m) * m * m / (2.0 * (n - 1.0) * n)])


def onaxis_density_path(
    ts: np.ndarray, tol: Tolerance = Tolerance(abs_tol=1e-12, rel_tol=1e-10)
) -> np.ndarray:
    """Axis density at the requested times via the reduced second-order ODE.

    The invariance condition collapses to an ODE for n(t) alone; it is
    integrated from a series seed near t = 0 (the equation is singular
    right at n = 1) with the axis slope condition n_t/sqrt(n-1) -> 2.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("ts must be a nonempty one-dimensional array")
    t_seed = 1e-2
    if np.any(ts < 2e-2) or np.any(ts >= 0.5):
        raise DomainError("path evaluation supported for 0.02 <= t < 0.5")
    # series through n(0)=1 consistent with the slope condition
    n0 = 1.0 + t_seed**2 + 2.0 * t_seed**4
    m0 = 2.0 * t_seed + 8.0 * t_seed**3
    trace = integrate_ode(
        _onaxis_rhs, np.array([n0, m0]), (t_seed, float(np.max(ts))), tol
    )
    return np.array([trace.sample(float(t))[0] for t in ts])


# ---------------------------------------------------------------------------
# numerical reference for the gaussian-profile problem (wave-like regime)


class GaussianOracle:
    """Pseudo-spectral reference solution with gaussian boundary density.

    Integrates the coupled pair n_t + (n v)_x = 0,
    v_t + v v_x = alpha*phi(n)*n_x on a periodic window with a Fourier
    collocation RK4 stepper.  Only the wave-like regime (alpha < 0 with
    phi = unity) is accepted: the focusing regime is ill-posed for
    forward marching.  Snapshots keep full spectra, so evaluation at
    arbitrary (t, x) uses exact spectral summation in x and cubic
    Hermite interpolation in t.
    """

    def __init__(
        self,
        alpha: float,
        t_max: float = 0.3,
        modes: int = 512,
        half_width: float = 8.0,
        dt: float = 1e-3,
        keep_every: int = 2,
    ):
        if alpha >= 0.0:
            raise ValueError("the spectral reference requires alpha < 0 (wave-like)")
        self.alpha = float(alpha)
        self.t_max = float(t_max)
        self.half_width = float(half_width)
        n_grid = modes
        x = -half_width + 2.0 * half_width * np.arange(n_grid) / n_grid
        self._k = 2.0 * np.pi * np.fft.fftfreq(n_grid, d=2.0 * half_width / n_grid)
        self._dealias = np.abs(self._k) <= (2.0 / 3.0) * np.max(np.abs(self._k))
        dens = np.exp(-(x**2))
        vel = np.zeros_like(x)
        steps = int(round(t_max / dt))
        self._times = [0.0]
        self._snaps = [self._spectra(dens, vel)]
        for step in range(1, steps + 1):
            dens, vel = self._rk4(dens, vel, dt)
            if step % keep_every == 0 or step == steps:
                self._times.append(step * dt)
                self._snaps.append(self._spectra(dens, vel))
        self._times = np.array(self._times)

    def _deriv(self, field_hat):
        return np.real(np.fft.ifft(1j * self._k * field_hat))

    def _rhs(self, dens, vel):
        dens_hat = np.fft.fft(dens) * self._dealias
        vel_hat = np.fft.fft(vel) * self._dealias
        dens_x = self._deriv(dens_hat)
        vel_x = self._deriv(vel_hat)
        return (
            -(dens * vel_x + vel * dens_x),
            -vel * vel_x + self.alpha * dens_x,
        )

    def _rk4(self, dens, vel, dt):
        k1n, k1v = self._rhs(dens, vel)
        k2n, k2v = self._rhs(dens + 0.5 * dt * k1n, vel + 0.5 * dt * k1v)
        k3n, k3v = self._rhs(dens + 0.5 * dt * k2n, vel + 0.5 * dt * k2v)
        k4n, k4v = self._rhs(dens + dt * k3n, vel + dt * k3v)
        dens = dens + dt * (k1n + 2.0 * k2n + 2.0 * k3n + k4n) / 6.0
        vel = vel + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        return dens, vel

    def _spectra(self, dens, vel):
        dn, dv = self._rhs(dens, vel)
        return (np.fft.fft(dens), np.fft.fft(vel), np.fft.fft(dn), np.fft.fft(dv))

    def _eval_hat(self, field_hat, x):
        # spectra are indexed from the left edge of the periodic window
        phase = np.exp(1j * self._k * (x + self.half_width))
        return float(np.real(field_hat @ phase) / field_hat.size)

    def __call__(self, t: float, x: float) -> tuple[float, float]:
        if not 0.0 <= t <= self.t_max:
            raise DomainError(f"reference solution covers 0 <= t <= {self.t_max}")
        j = int(np.searchsorted(self._times, t, side="right") - 1)
        j = min(max(j, 0), self._times.size - 2)
        t0, t1 = self._times[j], self._times[j + 1]
        h = t1 - t0
        s = (t - t0) / h
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        out = []
        for comp in (0, 1):
            y0 = self._eval_hat(self._snaps[j][comp], x)
            y1 = self._eval_hat(self._snaps[j + 1][comp], x)
            d0 = self._eval_hat(self._snaps[j][comp + 2], x)
            d1 = self._eval_hat(self._snaps[j + 1][comp + 2], x)
            out.append(h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1)
        return out[0], out[1]


# ---------------------------------------------------------------------------
# hodograph sampling (map inversion + derivative stencils)


class HodographSampler:
    """Supplies tau/chi and their derivatives from a physical-plane solver.

    The solver maps (t, x) to (n, v).  Derivatives at fixed v are taken
    by inverting the map for density values n0 +/- dn with a 2x2 Newton
    iteration (finite-difference Jacobian) and differencing tau = n*t,
    chi = x - v*t along the resulting hodograph patch.  Coupling
    derivatives come from a family of solvers evaluated at rescaled
    couplings with w = v/alpha held fixed.
    """

    def __init__(
        self,
        solver: Callable[[float, float], tuple[float, float]],
        dn: float = 1e-3,
        family: Callable[[float], Callable] | None = None,
        alpha: float | None = None,
        dalpha: float = 1e-2,
    ):
        self.solver = solver
        self.dn = float(dn)
        self.family = family
        self.alpha = alpha
        self.dalpha = float(dalpha)
        self._family_cache: dict[float, Callable] = {}

    def locate(self, t: float, x: float) -> HodographPoint:
        n, v = self.solver(t, x)
        return HodographPoint(tau=n * t, chi=x - v * t, n=n, v=v)

    def _solver_at(self, alpha: float) -> Callable:
        if alpha not in self._family_cache:
            self._family_cache[alpha] = self.family(alpha)
        return self._family_cache[alpha]

    def _invert(self, solver, n_goal, v_goal, t_seed, x_seed):
        """Newton-invert (t, x) -> (n, v) for one hodograph node."""
        t, x = float(t_seed), float(x_seed)
        scale = 1.0 + abs(n_goal) + abs(v_goal)
        for _ in range(40):
            n, v = solver(t, x)
            rn, rv = n - n_goal, v - v_goal
            if abs(rn) + abs(rv) <= 1e-12 * scale:
                return t, x
            ht = 1e-6 * (1.0 + abs(t))
            hx = 1e-6 * (1.0 + abs(x))
            n_t, v_t = solver(t + ht, x)
            n_x, v_x = solver(t, x + hx)
            j11 = (n_t - n) / ht
            j12 = (n_x - n) / hx
            j21 = (v_t - v) / ht
            j22 = (v_x - v) / hx
            det = j11 * j22 - j12 * j21
            if det == 0.0 or not math.isfinite(det):
                break
            dt = (rn * j22 - rv * j12) / det
            dx = (rv * j11 - rn * j21) / det
            t -= dt
            x -= dx
        raise StencilDomainError(
            f"hodograph map inversion failed near (n={n_goal}, v={v_goal})"
        )

    def _patch_node(self, solver, n_goal, v_goal, t_seed, x_seed):
        t, x = self._invert(solver, n_goal, v_goal, t_seed, x_seed)
        return n_goal * t, x - v_goal * t

    def enriched(self, t: float, x: float, with_alpha: bool = False) -> HodographPoint:
        n0, v0 = self.solver(t, x)
        if n0 <= self.dn:
            raise StencilDomainError("density too small for the derivative stencil")
        tau0, chi0 = n0 * t, x - v0 * t
        # five-node fourth-order stencil; outermost nodes sit at the patch
        # half-width dn, inner nodes at dn/2
        h = 0.5 * self.dn
        tau_m2, chi_m2 = self._patch_node(self.solver, n0 - 2.0 * h, v0, t, x)
        tau_m1, chi_m1 = self._patch_node(self.solver, n0 - h, v0, t, x)
        tau_p1, chi_p1 = self._patch_node(self.solver, n0 + h, v0, t, x)
        tau_p2, chi_p2 = self._patch_node(self.solver, n0 + 2.0 * h, v0, t, x)

        def d1(m2, m1, p1, p2):
            return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)

        def d2(m2, m1, c, p1, p2):
            return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)

        point = HodographPoint(
            tau=tau0,
            chi=chi0,
            n=n0,
            v=v0,
            tau_n=d1(tau_m2, tau_m1, tau_p1, tau_p2),
            chi_n=d1(chi_m2, chi_m1, chi_p1, chi_p2),
            tau_nn=d2(tau_m2, tau_m1, tau0, tau_p1, tau_p2),
            chi_nn=d2(chi_m2, chi_m1, chi0, chi_p1, chi_p2),
        )
        if with_alpha:
            if self.family is None or self.alpha is None:
                raise ValueError(
                    "coupling derivatives need a solver family and base alpha"
                )
            w = v0 / self.alpha
            da = self.dalpha * abs(self.alpha)
            taus, chis = [], []
            for a in (self.alpha + da, self.alpha - da):
                v_goal = a * w
                tau_a, chi_a = self._patch_node(
                    self._solver_at(a), n0, v_goal, t, x
                )
                taus.append(tau_a)
                chis.append(chi_a)
            point.tau_alpha = (taus[0] - taus[1]) / (2.0 * da)
            point.chi_alpha = (chis[0] - chis[1]) / (2.0 * da)
        return point


# ---------------------------------------------------------------------------
# second-order symmetry coordinate pairs


def _require(point: HodographPoint, names: tuple[str, ...], case: str):
    for name in names:
        if getattr(point, name) is None:
            raise ValueError(f"case {case!r} needs {name} on the hodograph point")


def liebacklund_coordinates(
    case: str, point: HodographPoint, alpha: float = 1.0
) -> tuple[float, float]:
    """Signed coordinate pair (f, g) of the selected symmetry operator.

    Cases 'soliton' and 'slab' are the exact second-order pairs tied to
    the two published solutions; 'f0g0' and 'f1g1' are the zeroth- and
    first-order pieces of the small-coupling expansion (w = v/alpha);
    'gauss1' and 'gauss2' are the approximate pairs for the gaussian
    boundary profile, the latter involving coupling derivatives.
    """
    if case not in _LB_CASES:
        raise ValueError(f"unknown coordinate pair {case!r}")
    n, v = point.n, point.v
    tau, chi = point.tau, point.chi
    if case == "soliton":
        _require(point, ("tau_n", "chi_n", "tau_nn", "chi_nn"), case)
        t1, c1, t2, c2 = point.tau_n, point.chi_n, point.tau_nn, point.chi_nn
        f = (
            2.0 * n * (1.0 - n) * t2
            - n * t1
            - 2.0 * n * v * (c1 + n * c2)
            + n * v * v * t2 / 2.0
        )
        g = (
            2.0 * n * (1.0 - n) * c2
            + (2.0 - 3.0 * n) * c1
            + v * (2.0 * n * t2 + t1)
            + (v * v / 2.0) * (n * c2 + c1)
        )
        return f, g
    if case == "slab":
        _require(point, ("tau_n", "chi_n", "tau_nn", "chi_nn"), case)
        t1, c1, t2, c2 = point.tau_n, point.chi_n, point.tau_nn, point.chi_nn
        ln_n = math.log(n)
        f = (
            -(n * n) * ln_n * t2
            - 0.5 * n * t1
            + 0.5 * tau
            + v * (n**3 * c2 + 1.5 * n * n * c1)
        )
        # NB: the sign of the (n/2)(1+4 ln n) term is fixed by the linearized
        # hodograph system; with a plus sign the pair stops annihilating the
        # expanding-layer solution.
        g = (
            -(n * n) * ln_n * c2
            - 0.5 * n * (1.0 + 4.0 * ln_n) * c1
            + 0.5 * chi
            + v * (n * t2 + 0.5 * t1)
        )
        return f, g
    if case == "f0g0":
        _require(point, ("tau_n", "chi_n", "tau_nn", "chi_nn"), case)
        t1, c1, t2, c2 = point.tau_n, point.chi_n, point.tau_nn, point.chi_nn
        w = v / alpha
        f = 2.0 * n * (1.0 - n) * t2 - n * t1 - 2.0 * n * w * (c1 + n * c2)
        g = 2.0 * n * (1.0 - n) * c2 + (2.0 - 3.0 * n) * c1
        return f, g
    if case == "f1g1":
        _require(point, ("tau_n", "chi_n", "tau_nn", "chi_nn"), case)
        t1, c1, t2, c2 = point.tau_n, point.chi_n, point.tau_nn, point.chi_nn
        w = v / alpha
        f = n * w * w * t2 / 2.0
        g = w * (2.0 * n * t2 + t1) + (w * w / 2.0) * (n * c2 + c1)
        return f, g
    if case == "gauss1":
        _require(point, ("tau_n", "chi_n"), case)
        t1, c1 = point.tau_n, point.chi_n
        f = 1.0 + 2.0 * n * chi * c1 + alpha * (-2.0 * tau * t1 + tau * tau / n)
        g = -2.0 * alpha * (tau * c1 + chi * t1)
        return f, g
    # gauss2
    _require(point, ("tau_n", "chi_n", "tau_alpha", "chi_alpha"), case)
    t1, c1 = point.tau_n, point.chi_n
    f = 2.0 * n * (tau * c1 + t1 * chi) + 2.0 * alpha * chi * point.tau_alpha
    g = (
        1.0
        + 2.0 * n * chi * c1
        + 2.0 * alpha * (chi * point.chi_alpha - tau * t1)
    )
    return f, g


def liebacklund_residual(
    case: str,
    point: HodographPoint,
    solution: HodographSampler | None = None,
    alpha: float = 1.0,
) -> tuple[float, float]:
    """Absolute value of the coordinate pair evaluated on solution data.

    When a sampler is given, the point is re-enriched at its physical
    location so all derivative slots are filled; exact symmetries must
    annihilate their own solutions up to stencil error.
    """
    if solution is not None:
        t, x = point.physical()
        point = solution.enriched(t, x, with_alpha=(case == "gauss2"))
    f, g = liebacklund_coordinates(case, point, alpha=alpha)
    return abs(f), abs(g)

"""Axially symmetric self-focusing beam scenario.

Builds the combined refraction/diffraction drive profile from the
boundary intensity, integrates orbits of the associated point-symmetry
operator, reconstructs interior (intensity, slope) fields by shooting a
fan of orbits from the boundary, and detects the on-axis blow-up.  The
drive profile is evaluated on the co-moving coordinate chi = x - v*t
throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .groups import Generator, OrbitTrace, VariableSpace, integrate_lie
from .numerics import (
    DomainError,
    HermiteSpline,
    NumericsError,
    StepUnderflowError,
    Tolerance,
)

__all__ = [
    "NoSingularityError",
    "CausticCrossedError",
    "BeamConfig",
    "SProfile",
    "CanonicalPair",
    "build_s_profile",
    "beam_generator",
    "integrate_beam_orbit",
    "beam_singularity_time",
    "beam_field",
    "canonical_coordinates",
]

_DEFAULT_TOL = Tolerance()


class NoSingularityError(NumericsError):
    """The configuration focuses too weakly for an on-axis blow-up."""


class CausticCrossedError(NumericsError):
    """The fan of boundary orbits folded before the requested time."""


@dataclass(frozen=True)
class BeamConfig:
    """Boundary-value problem selector for the beam pair.

    alpha scales the refraction channel, beta the diffraction channel;
    they may not both vanish.  nu_geom picks planar (0) or axially
    symmetric (1) geometry.  The boundary slope is fixed at zero
    (collimated input).  For the "binomial" profile the drive is given
    directly through (s0, s2) instead of being built from a boundary
    intensity; s0 and s2 are ignored by the "gaussian" profile.
    """

    alpha: float = 1.0
    beta: float = 0.5
    nu_geom: int = 1
    profile: str = "gaussian"
    s0: float = 1.0
    s2: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("alpha and beta must be nonnegative")
        if self.alpha == 0.0 and self.beta == 0.0:
            raise ValueError("alpha and beta must not both vanish")
        if self.nu_geom not in (0, 1):
            raise ValueError("nu_geom must be 0 (planar) or 1 (axially symmetric)")
        if self.profile not in ("gaussian", "binomial"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.v0 != 0.0:
            raise ValueError("boundary slope is fixed at zero")

    def boundary_intensity(self, x):
        """Boundary intensity the orbit fan is seeded from.

        The gaussian profile carries exp(-x^2).  A directly supplied
        drive has no elementary intensity behind it, so orbits are
        seeded with a unit value; the intensity equation is linear in
        the seed, which therefore only sets the overall normalization.
        """
        x = np.asarray(x, dtype=float)
        if self.profile == "gaussian":
            return np.exp(-x * x)
        return np.ones_like(x)


@dataclass(frozen=True)
class SProfile:
    """Drive profile with its first two derivatives and axis limits.

    ``value``/``slope``/``curvature`` evaluate the profile and its
    chi-derivatives; ``axis_curvature`` is the curvature at chi = 0 and
    ``axis_slope_ratio`` the limit of slope(chi)/chi there (the two
    agree for an even profile).
    """

    value: Callable[[float], float]
    slope: Callable[[float], float]
    curvature: Callable[[float], float]
    axis_curvature: float
    axis_slope_ratio: float

    def __post_init__(self):
        if not (math.isfinite(self.axis_curvature) and math.isfinite(self.axis_slope_ratio)):
            raise ValueError("axis limits of the drive profile must be finite")


def build_s_profile(config: BeamConfig, *, intensity=None) -> SProfile:
    """Combined refraction/diffraction drive for the given configuration.

    The gaussian profile uses the closed form alpha*exp(-chi^2) +
    beta*(chi^2 - 2) in the axially symmetric geometry (the diffraction
    constant drops to beta*(chi^2 - 1) in the planar one); a binomial
    configuration returns s0 + s2*chi^2/2 directly.  Passing a callable
    ``intensity`` overrides the built-in boundary shape: the drive is
    then assembled from finite differences of sqrt(intensity), which
    raises :class:`DomainError` wherever the intensity is not positive.
    """
    if intensity is not None:
        return _profile_from_intensity(intensity, config.alpha, config.beta, config.nu_geom)
    if config.profile == "binomial":
        s0, s2 = config.s0, config.s2
        return SProfile(
            value=lambda c: s0 + 0.5 * s2 * c * c,
            slope=lambda c: s2 * c,
            curvature=lambda c: s2,
            axis_curvature=s2,
            axis_slope_ratio=s2,
        )
    alpha, beta = config.alpha, config.beta
    # planar geometry shifts the diffraction term by a constant only,
    # so both geometries share slope and curvature
    shift = 2.0 if config.nu_geom == 1 else 1.0

    def value(c: float) -> float:
        return alpha * math.exp(-c * c) + beta * (c * c - shift)

    def slope(c: float) -> float:
        return 2.0 * c * (beta - alpha * math.exp(-c * c))

    def curvature(c: float) -> float:
        return 2.0 * alpha * math.exp(-c * c) * (2.0 * c * c - 1.0) + 2.0 * beta

    return SProfile(
        value=value,
        slope=slope,
        curvature=curvature,
        axis_curvature=2.0 * (beta - alpha),
        axis_slope_ratio=2.0 * (beta - alpha),
    )


def _profile_from_intensity(intensity, alpha: float, beta: float, nu_geom: int) -> SProfile:
    """Assemble the drive from a sampled boundary intensity."""

    def root(c: float) -> float:
        val = float(intensity(c))
        if not val > 0.0:
            raise DomainError(f"boundary intensity must stay positive (got {val} at {c})")
        return math.sqrt(val)

    h = 1e-4

    def value(c: float) -> float:
        u0 = root(c)
        up, um = root(c + h), root(c - h)
        d1 = (up - um) / (2.0 * h)
        d2 = (up - 2.0 * u0 + um) / (h * h)
        if nu_geom == 1:
            # (u'/chi + u'')/u, with the even-profile limit on the axis
            if abs(c) <= 1e-3:
                geom = 2.0 * d2 / u0
            else:
                geom = (d1 / c + d2) / u0
        else:
            geom = d2 / u0
        return alpha * float(intensity(c)) + beta * geom

    # derivatives of the assembled drive are themselves differenced;
    # the wider step keeps roundoff out of the curvature
    hs = 1e-2

    def slope(c: float) -> float:
        return (value(c + hs) - value(c - hs)) / (2.0 * hs)

    def curvature(c: float) -> float:
        return (value(c + hs) - 2.0 * value(c) + value(c - hs)) / (hs * hs)

    return SProfile(
        value=value,
        slope=slope,
        curvature=curvature,
        axis_curvature=curvature(0.0),
        axis_slope_ratio=slope(hs) / hs,
    )


# ---------------------------------------------------------------------------
# point-symmetry orbits


def beam_generator(config: BeamConfig, profile: SProfile | None = None) -> Generator:
    """Point-symmetry vector field on (t, x, v, n).

    Moves time by 1 + t^2*curvature, the ray position by t*slope +
    v*t^2*curvature, the slope by slope(chi), and the intensity by
    -n*t*[(1 + v*t/x)*curvature + slope/x], everything evaluated at
    chi = x - v*t.  On the axis the intensity bracket collapses to
    twice the axis curvature: slope/x tends to the axis slope ratio,
    and the v*t/x part cancels against the co-moving shift of chi for
    an even profile with vanishing axis slope.
    """
    prof = profile if profile is not None else build_s_profile(config)
    axis_bracket = prof.axis_curvature + prof.axis_slope_ratio
    space = VariableSpace(("t", "x", "v", "n"))

    def coord_t(pt):
        chi = pt["x"] - pt["v"] * pt["t"]
        return 1.0 + pt["t"] ** 2 * prof.curvature(chi)

    def coord_x(pt):
        chi = pt["x"] - pt["v"] * pt["t"]
        return pt["t"] * prof.slope(chi) + pt["v"] * pt["t"] ** 2 * prof.curvature(chi)

    def coord_v(pt):
        return prof.slope(pt["x"] - pt["v"] * pt["t"])

    def coord_n(pt):
        t, x, v, n = pt["t"], pt["x"], pt["v"], pt["n"]
        if x == 0.0:
            bracket = axis_bracket
        else:
            chi = x - v * t
            bracket = (1.0 + v * t / x) * prof.curvature(chi) + prof.slope(chi) / x
        return -n * t * bracket

    return Generator(space, {"t": coord_t, "x": coord_x, "v": coord_v, "n": coord_n})


def integrate_beam_orbit(
    config: BeamConfig,
    chi0: float,
    a_max: float,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    blowup_threshold: float | None = None,
) -> OrbitTrace:
    """Flow the boundary point at chi0 along the point symmetry.

    The start state is (t=0, x=chi0, v=0, n = boundary intensity at
    chi0).  With ``blowup_threshold`` set, the orbit terminates once n
    crosses threshold times the axis boundary intensity.  Near the
    focus the group parameter compresses, time blows up along the
    orbit and the adaptive integrator underflows; the
    :class:`StepUnderflowError` it raises carries the last state
    reached.
    """
    chi0 = float(chi0)
    gen = beam_generator(config)
    n0 = float(config.boundary_intensity(chi0))
    start = {"t": 0.0, "x": chi0, "v": 0.0, "n": n0}
    events = None
    if blowup_threshold is not None:
        cap = float(blowup_threshold) * float(config.boundary_intensity(0.0))
        events = [lambda a, pt: pt["n"] - cap]
    return integrate_lie(gen, start, (0.0, float(a_max)), tol, events=events)


def _focus_time_estimate(config: BeamConfig, profile: SProfile) -> float | None:
    """Analytic on-axis blow-up time, when the axis actually focuses."""
    s2 = profile.axis_curvature
    if s2 >= 0.0:
        return None
    return 1.0 / math.sqrt(-s2)


def beam_singularity_time(
    config: BeamConfig,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    threshold: float = 1e6,
) -> float:
    """Time at which the on-axis intensity exceeds threshold times its start.

    Only the gaussian profile is accepted; a refraction channel no
    stronger than the diffraction one never focuses and raises
    :class:`NoSingularityError`.
    """
    if config.profile != "gaussian":
        raise ValueError("blow-up detection is defined for the gaussian profile")
    if config.alpha <= config.beta:
        raise NoSingularityError(
            f"no on-axis blow-up for alpha={config.alpha} <= beta={config.beta}"
        )
    if threshold <= 1.0:
        raise ValueError("blow-up threshold must exceed 1")
    prof = build_s_profile(config)
    mu = math.sqrt(-prof.axis_curvature)
    # on the axis n grows like cosh^2(mu*a); budget the parameter span
    # from the threshold with a generous safety margin
    a_cap = (math.acosh(math.sqrt(threshold)) + 2.0) / mu * 1.2
    trace = integrate_beam_orbit(config, 0.0, a_cap, tol, blowup_threshold=threshold)
    if trace.terminal_event is None:
        raise NumericsError("blow-up threshold was not reached inside the parameter budget")
    return trace.terminal_event.point["t"]


# ---------------------------------------------------------------------------
# interior fields from a fan of orbits


def _fd_slope_uniform(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative on a uniform grid, one-sided at the ends."""
    v = np.asarray(values, dtype=float)
    if v.size < 5:
        raise ValueError("need at least five nodes for the fan slopes")
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    head, tail = v[:5], v[-5:]
    d[0] = ((-25.0 / 12.0) * head[0] + 4.0 * head[1] - 3.0 * head[2]
            + (4.0 / 3.0) * head[3] - 0.25 * head[4]) / h
    d[1] = (-0.25 * head[0] - (5.0 / 6.0) * head[1] + 1.5 * head[2]
            - 0.5 * head[3] + (1.0 / 12.0) * head[4]) / h
    d[-2] = (0.25 * tail[4] + (5.0 / 6.0) * tail[3] - 1.5 * tail[2]
             + 0.5 * tail[1] - (1.0 / 12.0) * tail[0]) / h
    d[-1] = ((25.0 / 12.0) * tail[4] - 4.0 * tail[3] + 3.0 * tail[2]
             - (4.0 / 3.0) * tail[1] + 0.25 * tail[0]) / h
    return d


def _ray_endpoint(config, gen, chi0, t_target, a_cap, tol):
    """March one boundary orbit to the requested time."""
    n0 = float(config.boundary_intensity(chi0))
    start = {"t": 0.0, "x": float(chi0), "v": 0.0, "n": n0}
    try:
        trace = integrate_lie(
            gen, start, (0.0, a_cap), tol, events=[lambda a, pt: pt["t"] - t_target]
        )
    except StepUnderflowError as exc:
        raise CausticCrossedError(
            f"ray from chi0={chi0} stalled at t={exc.state[0]:.6f} before reaching"
            f" t={t_target}; the fan has folded"
        ) from exc
    if trace.terminal_event is None:
        raise CausticCrossedError(
            f"ray from chi0={chi0} never reached t={t_target}; the fan has folded"
        )
    pt = trace.terminal_event.point
    return pt["x"], pt["v"], pt["n"]


def beam_field(
    config: BeamConfig,
    t: float,
    x_targets: Sequence[float] | np.ndarray,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    fan_nodes: int = 72,
    chi0_max: float | None = None,
    workers: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Intensity and slope fields at time t on the requested positions.

    Shoots a fan of point-symmetry orbits from a uniform boundary grid,
    stops each at the requested time, checks that the boundary-to-ray
    map stays orientation-preserving (its failure is the caustic,
    raised as :class:`CausticCrossedError`), and interpolates the
    endpoint data with a quartic-accurate Hermite rule.  The boundary
    data are even, so the fan is mirrored across the axis and the
    returned intensity is even, the slope odd.  Orbit integrations are
    independent of each other; ``workers`` hands them to a thread pool
    (``None`` keeps them on the calling thread).
    """
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"field time must be nonnegative and finite, got {t}")
    x_arr = np.atleast_1d(np.asarray(x_targets, dtype=float))
    if t == 0.0:
        return config.boundary_intensity(x_arr), np.zeros_like(x_arr)

    prof = build_s_profile(config)
    t_focus = _focus_time_estimate(config, prof)
    if t_focus is not None:
        # past the focus the inner rays stall short of t; budget the
        # group parameter from the slowest (axis) ray
        frac = min(t / t_focus, 1.0 - 1e-9)
        a_cap = t_focus * (math.atanh(frac) + 3.0)
    else:
        a_cap = 2.0 * t + 3.0

    x_need = float(np.max(np.abs(x_arr))) if x_arr.size else 0.0
    reach = float(chi0_max) if chi0_max is not None else max(1.0, x_need + 1.0)
    gen = beam_generator(config, prof)

    for attempt in range(3):
        if fan_nodes < 8:
            raise ValueError("fan_nodes must be at least 8")
        chi_grid = np.linspace(0.0, reach, fan_nodes + 1)
        h_chi = chi_grid[1] - chi_grid[0]

        def shoot(c0: float):
            return _ray_endpoint(config, gen, c0, t, a_cap, tol)

        if workers is not None and workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                hits = list(pool.map(shoot, chi_grid))
        else:
            hits = [shoot(c0) for c0 in chi_grid]

        x_fan = np.array([h[0] for h in hits])
        v_fan = np.array([h[1] for h in hits])
        n_fan = np.array([h[2] for h in hits])
        if x_fan[-1] >= x_need or chi0_max is not None:
            break
        reach *= 1.6  # focusing pulled the fan short of the targets
    else:
        raise DomainError("fan does not reach the outermost requested position")

    jac = _fd_slope_uniform(x_fan, h_chi)
    if np.any(jac <= 0.0) or np.any(np.diff(x_fan) <= 0.0):
        raise CausticCrossedError(
            f"boundary-to-ray map lost monotonicity at t={t}; the fan has crossed a caustic"
        )
    if x_fan[-1] < x_need:
        raise DomainError("fan does not reach the outermost requested position")

    n_x = _fd_slope_uniform(n_fan, h_chi) / jac
    v_x = _fd_slope_uniform(v_fan, h_chi) / jac
    # even intensity / odd slope: mirror the fan across the axis
    x_full = np.concatenate((-x_fan[:0:-1], x_fan))
    n_full = np.concatenate((n_fan[:0:-1], n_fan))
    v_full = np.concatenate((-v_fan[:0:-1], v_fan))
    nx_full = np.concatenate((-n_x[:0:-1], n_x))
    vx_full = np.concatenate((v_x[:0:-1], v_x))
    nx_full[x_fan.size - 1] = 0.0
    v_full[x_fan.size - 1] = 0.0

    n_out = HermiteSpline(x_full, n_full, nx_full)(x_arr)
    v_out = HermiteSpline(x_full, v_full, vx_full)(x_arr)
    return np.atleast_1d(n_out), np.atleast_1d(v_out)


# ---------------------------------------------------------------------------
# canonical coordinate pair on field data


@dataclass(frozen=True)
class CanonicalPair:
    """Canonical symmetry coordinates sampled on an x-grid at fixed time.

    ``f`` lives on ``x_f`` (three columns inside the input grid, the
    reach of its nested differences), ``g`` on ``x_g`` (one column in).
    Both vanish on data the symmetry actually generates, up to the
    truncation the construction carries.
    """

    x_f: np.ndarray
    f: np.ndarray
    x_g: np.ndarray
    g: np.ndarray


def canonical_coordinates(
    config: BeamConfig,
    t: float,
    x: np.ndarray,
    n: np.ndarray,
    v: np.ndarray,
) -> CanonicalPair:
    """Evaluate the canonical pair of the beam symmetry on sampled fields.

    The slope coordinate is the x-derivative of (drive profile on the
    co-moving coordinate) minus (the same refraction/diffraction
    combination rebuilt from the sampled intensity); the intensity
    coordinate is (1/x) d/dx of x*n*(v - t*slope(chi)).  Central
    differences throughout; the grid must be uniform and avoid x = 0,
    where the axially symmetric combination is singular.
    """
    if config.nu_geom != 1:
        raise ValueError("the canonical pair is built for the axially symmetric geometry")
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size < 7:
        raise ValueError("need a one-dimensional grid of at least seven points")
    if n.shape != x.shape or v.shape != x.shape:
        raise ValueError("fields must match the grid")
    dx_all = np.diff(x)
    dx = float(dx_all[0])
    if np.max(np.abs(dx_all - dx)) > 1e-9 * max(abs(dx), 1.0):
        raise ValueError("grid must be uniform")
    if np.any(x == 0.0):
        raise ValueError("grid must avoid the axis")
    if np.any(n <= 0.0):
        raise DomainError("intensity must be positive on the grid")

    prof = build_s_profile(config)
    chi = x - v * t
    s_val = np.array([prof.value(c) for c in chi])
    s_slope = np.array([prof.slope(c) for c in chi])

    def d_x(arr: np.ndarray) -> np.ndarray:
        return (arr[2:] - arr[:-2]) / (2.0 * dx)

    root_n = np.sqrt(n)
    inner = x[1:-1] * d_x(root_n)                      # on x[1:-1]
    mid = d_x(inner) / (x[2:-2] * root_n[2:-2])        # on x[2:-2]
    rebuilt = config.alpha * n[2:-2] + config.beta * mid
    f = d_x(s_val[2:-2] - rebuilt)                     # on x[3:-3]

    flux = x * n * (v - t * s_slope)
    g = d_x(flux) / x[1:-1]                            # on x[1:-1]

    return CanonicalPair(x_f=x[3:-3], f=f, x_g=x[1:-1], g=g)

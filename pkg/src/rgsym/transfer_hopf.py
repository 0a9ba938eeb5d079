"""Amplitude transfer maps and the scalar advection (shear-wave) solver.

Two channels of amplitude renormalization are implemented in closed
form together with their truncated perturbation series, and the scalar
conservation law u_t + eps*u*u_x = 0 is solved through its implicit
characteristic relation x - eps*t*u = H(u), with H the inverse of the
initial profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .groups import Generator, VariableSpace
from .numerics import (
    Bracket,
    DomainError,
    MonotoneCubic,
    NumericsError,
    Tolerance,
    find_root,
)

__all__ = [
    "TransferConfig",
    "HopfConfig",
    "MultivaluedRegionError",
    "RootNotFoundError",
    "CharacteristicCrossingError",
    "transfer_rg",
    "transfer_pt",
    "transfer_generator",
    "transfer_flow",
    "load_profile_table",
    "hopf_solve",
    "hopf_field",
    "hopf_pt",
    "hopf_singularity_time",
    "hopf_axis_slope",
    "hopf_characteristics_oracle",
    "hopf_rg_generator",
    "hopf_rg_flow",
    "axis_slope_generator",
    "axis_slope_flow",
]

_DEFAULT_TOL = Tolerance()


class MultivaluedRegionError(NumericsError):
    """The implicit solution has folded: several branches coexist here."""


class RootNotFoundError(NumericsError):
    """No branch of the implicit solution was found in the scanned range."""


class CharacteristicCrossingError(NumericsError):
    """Characteristics have crossed; the requested time is past breaking."""


# ---------------------------------------------------------------------------
# amplitude transfer


@dataclass(frozen=True)
class TransferConfig:
    """Amplitude transfer problem: one decay channel active at a time.

    ``nu`` drives exponential relaxation, ``beta`` drives saturating
    (self-limiting) decay; exactly one of them must be nonzero.
    ``depth_max`` is the truncation order of the perturbative branch.
    """

    alpha0: float = 1.0
    nu: float = 0.0
    beta: float = 0.0
    depth_max: int = 1

    def __post_init__(self) -> None:
        if self.alpha0 < 0.0:
            raise ValueError("alpha0 must be nonnegative")
        if self.nu < 0.0 or self.beta < 0.0:
            raise ValueError("decay rates must be nonnegative")
        if (self.nu > 0.0) == (self.beta > 0.0):
            raise ValueError("exactly one of nu, beta must be nonzero")
        if self.depth_max < 1:
            raise ValueError("depth_max must be positive")


def transfer_rg(config: TransferConfig, lam: float) -> float:
    """Renormalized amplitude after running the scale parameter to lam."""
    a0 = config.alpha0
    if config.nu > 0.0:
        return a0 * math.exp(-config.nu * lam)
    denom = 1.0 + config.beta * a0 * lam
    if denom <= 0.0:
        raise DomainError(
            f"saturating channel pole crossed at lam = {lam!r} (denominator {denom!r})"
        )
    return a0 / denom


def transfer_pt(config: TransferConfig, lam: float) -> float:
    """Perturbation series truncated at depth_max; unprotected at large lam.

    First order gives alpha0*(1 - nu*lam) or alpha0*(1 - beta*alpha0*lam);
    unlike the renormalized map the truncation can go negative.
    """
    a0 = config.alpha0
    if config.nu > 0.0:
        z = -config.nu * lam
        total = 0.0
        term = 1.0
        for k in range(config.depth_max + 1):
            total += term
            term *= z / (k + 1)
        return a0 * total
    z = -config.beta * a0 * lam
    total = 0.0
    term = 1.0
    for _ in range(config.depth_max + 1):
        total += term
        term *= z
    return a0 * total


def transfer_generator(config: TransferConfig) -> Generator:
    """Infinitesimal form of the active transfer channel on (lam, alpha)."""
    space = VariableSpace(("lam", "alpha"))
    if config.nu > 0.0:
        nu = config.nu
        return Generator(space, {"lam": 1.0, "alpha": lambda pt: -nu * pt["alpha"]})
    beta = config.beta
    return Generator(space, {"lam": 1.0, "alpha": lambda pt: -beta * pt["alpha"] ** 2})


def transfer_flow(config: TransferConfig) -> Callable[[float, dict], dict]:
    """Closed-form group action matching :func:`transfer_generator`."""
    if config.nu > 0.0:
        nu = config.nu

        def flow(s: float, pt: dict) -> dict:
            return {"lam": pt["lam"] + s, "alpha": pt["alpha"] * math.exp(-nu * s)}

        return flow
    beta = config.beta

    def flow(s: float, pt: dict) -> dict:
        return {"lam": pt["lam"] + s, "alpha": pt["alpha"] / (1.0 + beta * pt["alpha"] * s)}

    return flow


# ---------------------------------------------------------------------------
# scalar advection solver


@dataclass(frozen=True)
class HopfConfig:
    """Initial-profile advection problem u_t + eps*u*u_x = 0.

    ``profile`` picks the initial condition: ``linear`` (u = x at t=0),
    ``sine`` (u = -sin x), or ``tabulated`` (two-column text file named
    by ``table_path``).  ``grid`` = (lo, hi, n) bounds scans over the
    spatial domain.
    """

    profile: str = "linear"
    eps: float = 1.0
    grid: tuple[float, float, int] = (-3.0, 3.0, 257)
    table_path: str | None = None

    def __post_init__(self) -> None:
        if self.profile not in ("linear", "sine", "tabulated"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if not (self.eps > 0.0):
            raise ValueError("eps must be positive")
        lo, hi, n = self.grid
        if not (lo < hi) or int(n) < 16:
            raise ValueError("grid must be (lo, hi, n) with lo < hi and n >= 16")
        if self.profile == "tabulated" and not self.table_path:
            raise ValueError("tabulated profile needs table_path")


def load_profile_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (x, u) text table; '#' starts a comment.

    The x column must be strictly increasing and the u column strictly
    monotone, otherwise the profile cannot be inverted for the implicit
    solution.
    """
    data = np.loadtxt(path, comments="#", dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"profile table {path!r} must have exactly two columns")
    if data.shape[0] < 4:
        raise ValueError("profile table needs at least four rows")
    x, u = data[:, 0], data[:, 1]
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("profile table x column must be strictly increasing")
    du = np.diff(u)
    if not (np.all(du > 0.0) or np.all(du < 0.0)):
        raise ValueError("profile table u column must be strictly monotone")
    return x, u


class _Profile:
    """Initial profile with value, slope and inverse."""

    def __init__(self, config: HopfConfig):
        lo, hi, _ = config.grid
        self.lo, self.hi = lo, hi
        self.kind = config.profile
        if config.profile == "linear":
            self.value = lambda x: np.asarray(x, dtype=float) + 0.0
            self.slope = lambda x: np.ones_like(np.asarray(x, dtype=float))
            self.u_lo, self.u_hi = lo, hi
            self.inverse = lambda u: float(u)
            self.inverse_vec = lambda u: np.asarray(u, dtype=float) + 0.0
            self.min_slope = 1.0
        elif config.profile == "sine":
            self.value = lambda x: -np.sin(np.asarray(x, dtype=float))
            self.slope = lambda x: -np.cos(np.asarray(x, dtype=float))
            self.u_lo, self.u_hi = -1.0, 1.0

            def inverse(u: float) -> float:
                if not -1.0 <= u <= 1.0:
                    raise DomainError("sine profile only takes values in [-1, 1]")
                return -math.asin(u)

            self.inverse = inverse
            self.inverse_vec = lambda u: -np.arcsin(np.asarray(u, dtype=float))
            # slope minimum on the configured window
            if lo <= 0.0 <= hi:
                self.min_slope = -1.0
            else:
                self.min_slope = float(min(-math.cos(lo), -math.cos(hi)))
        else:
            x, u = load_profile_table(config.table_path)
            increasing = u[1] > u[0]
            interp = MonotoneCubic(x, u)
            self.value = interp
            self.slope = interp.derivative
            if increasing:
                inv = MonotoneCubic(u, x)
            else:
                inv = MonotoneCubic(u[::-1].copy(), x[::-1].copy())
            self.inverse = lambda q: float(inv(q))
            self.inverse_vec = inv
            self.u_lo, self.u_hi = float(np.min(u)), float(np.max(u))
            dense = np.linspace(x[0], x[-1], max(1024, 8 * x.size))
            slopes = interp.derivative(dense)
            k = int(np.argmin(slopes))
            self.min_slope = float(slopes[k])
            # parabolic sharpening around the discrete minimum
            if 0 < k < dense.size - 1:
                xm = _parabolic_min(dense[k - 1 : k + 2], slopes[k - 1 : k + 2])
                self.min_slope = min(self.min_slope, float(interp.derivative(xm)))
            self.lo, self.hi = float(x[0]), float(x[-1])

    def scan_range(self) -> tuple[float, float]:
        if self.kind == "sine":
            return -1.0, 1.0
        if self.kind == "linear":
            pad = max(1.0, 0.01 * (self.u_hi - self.u_lo))
            return self.u_lo - pad, self.u_hi + pad
        return self.u_lo, self.u_hi


@lru_cache(maxsize=32)
def _profile_for(config: HopfConfig) -> _Profile:
    return _Profile(config)


def _parabolic_min(xs: np.ndarray, ys: np.ndarray) -> float:
    a, b, c = np.polyfit(xs, ys, 2)
    if a <= 0.0:
        return float(xs[1])
    return float(np.clip(-b / (2.0 * a), xs[0], xs[-1]))


def hopf_solve(
    config: HopfConfig, t: float, x: float, tol: Tolerance = _DEFAULT_TOL
) -> float:
    """Field value u(t, x) from the implicit relation x - eps*t*u = H(u).

    The admissible u-range is scanned with 512 uniform cells; exactly
    one sign change may survive.  Several changes mean the profile has
    folded (:class:`MultivaluedRegionError`), none that no branch covers
    the requested point (:class:`RootNotFoundError`).
    """
    prof = _profile_for(config)
    eps = config.eps

    def implicit(u: float) -> float:
        return x - eps * t * u - prof.inverse(u)

    u_lo, u_hi = prof.scan_range()
    cells = 512
    us = np.linspace(u_lo, u_hi, cells + 1)
    vals = x - eps * t * us - prof.inverse_vec(us)

    exact = np.flatnonzero(vals == 0.0)
    sign_changes = np.flatnonzero(vals[:-1] * vals[1:] < 0.0)
    n_roots = exact.size + sign_changes.size
    if n_roots == 0:
        raise RootNotFoundError(
            f"no branch of the implicit solution found at (t={t}, x={x})"
        )
    if n_roots > 1:
        raise MultivaluedRegionError(
            f"{n_roots} branches coexist at (t={t}, x={x}); "
            "the profile has folded here"
        )
    if exact.size:
        return float(us[exact[0]])
    i = int(sign_changes[0])
    return find_root(implicit, Bracket(float(us[i]), float(us[i + 1])), tol)


def hopf_field(
    config: HopfConfig, t: np.ndarray, x: np.ndarray, *, cells: int = 512
) -> np.ndarray:
    """Batched :func:`hopf_solve` over a (t, x) tensor grid.

    Returns u with shape (len(t), len(x)).  Each row is solved by a
    vectorized scan plus bisection, so building fine grids for residual
    studies stays cheap; branch counting and the fold/no-branch errors
    match the scalar entry point.
    """
    prof = _profile_for(config)
    eps = config.eps
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u_lo, u_hi = prof.scan_range()
    t_star = hopf_singularity_time(config)
    us = np.linspace(u_lo, u_hi, cells + 1)
    hs = prof.inverse_vec(us)
    out = np.empty((t.size, x.size))
    cols = np.arange(x.size)
    for i, tv in enumerate(t):
        if 0.0 <= tv < t_star:
            # before breaking the implicit function is strictly monotone
            # in u, so the endpoints of the scan range already bracket
            # the single admissible branch
            lo = np.full(x.size, us[0])
            hi = np.full(x.size, us[-1])
            flo = x - eps * tv * us[0] - hs[0]
            fhi = x - eps * tv * us[-1] - hs[-1]
            missing = flo * fhi > 0.0
            if np.any(missing):
                j = int(np.flatnonzero(missing)[0])
                raise RootNotFoundError(
                    f"no branch of the implicit solution found at (t={tv}, x={x[j]})"
                )
        else:
            vals = x[None, :] - eps * tv * us[:, None] - hs[:, None]
            hits = vals[:-1, :] * vals[1:, :] < 0.0
            exact = vals == 0.0
            counts = hits.sum(axis=0) + exact.sum(axis=0)
            if np.any(counts == 0):
                j = int(np.flatnonzero(counts == 0)[0])
                raise RootNotFoundError(
                    f"no branch of the implicit solution found at (t={tv}, x={x[j]})"
                )
            if np.any(counts > 1):
                j = int(np.flatnonzero(counts > 1)[0])
                raise MultivaluedRegionError(
                    f"{int(counts[j])} branches coexist at (t={tv}, x={x[j]}); "
                    "the profile has folded here"
                )
            k = np.argmax(hits, axis=0)
            lo, hi = us[k].copy(), us[k + 1].copy()
            flo = vals[k, cols].copy()
            on_node = exact.any(axis=0)
        for _ in range(62):
            mid = 0.5 * (lo + hi)
            fm = x - eps * tv * mid - prof.inverse_vec(mid)
            same = flo * fm > 0.0
            lo = np.where(same, mid, lo)
            flo = np.where(same, fm, flo)
            hi = np.where(same, hi, mid)
        row = 0.5 * (lo + hi)
        if tv < 0.0 or tv >= t_star:
            if np.any(on_node):
                kz = np.argmax(exact, axis=0)
                row = np.where(on_node, us[kz], row)
        out[i] = row
    return out


def hopf_pt(config: HopfConfig, t: float, x: float) -> float:
    """First-order perturbative field U - eps*t*U*U'."""
    prof = _profile_for(config)
    u0 = float(prof.value(x))
    s0 = float(prof.slope(x))
    return u0 - config.eps * t * u0 * s0


def hopf_singularity_time(config: HopfConfig) -> float:
    """Breaking time -1/(eps * min U'), or +inf for non-steepening data."""
    prof = _profile_for(config)
    if prof.min_slope >= 0.0:
        return math.inf
    return -1.0 / (config.eps * prof.min_slope)


def hopf_axis_slope(config: HopfConfig, t: float) -> float:
    """Slope of the field at x = 0, available for the linear profile only.

    The reduced flow for the slope functional closes only when the
    profile is exactly linear, so other profiles are rejected rather
    than silently approximated.
    """
    if config.profile != "linear":
        raise DomainError("axis slope functional is restricted to the linear profile")
    return 1.0 / (1.0 + config.eps * t)


def hopf_characteristics_oracle(
    config: HopfConfig, t: float, x: float, tol: Tolerance = _DEFAULT_TOL
) -> float:
    """Independent solution by tracing straight characteristics.

    Inverts x = x0 + eps*t*U(x0) for the foot point and returns U(x0);
    once characteristics cross (t at or past the breaking time) the
    inversion is refused.
    """
    if t < 0.0:
        raise DomainError("oracle only integrates forward in time")
    t_star = hopf_singularity_time(config)
    if t >= t_star:
        raise CharacteristicCrossingError(
            f"characteristics cross at t = {t_star}; requested t = {t}"
        )
    prof = _profile_for(config)
    eps = config.eps
    u_amp = max(abs(prof.u_lo), abs(prof.u_hi)) + 1.0
    pad = eps * t * u_amp + 1.0

    def foot(x0: float) -> float:
        return x0 + eps * t * float(prof.value(x0)) - x

    lo, hi = x - pad, x + pad
    if config.profile == "tabulated":
        lo, hi = max(lo, prof.lo), min(hi, prof.hi)
        if not lo < hi:
            raise DomainError("requested point outside the tabulated footprint")
    x0 = find_root(foot, Bracket(lo, hi), tol)
    return float(prof.value(x0))


# ---------------------------------------------------------------------------
# generators for the catalog


def hopf_rg_generator() -> Generator:
    """Field that advects position along t*u while growing the coupling."""
    space = VariableSpace(("t", "x", "eps", "u"))
    return Generator(space, {"x": lambda pt: pt["t"] * pt["u"], "eps": 1.0})


def hopf_rg_flow(s: float, pt: dict) -> dict:
    return {
        "t": pt["t"],
        "x": pt["x"] + s * pt["t"] * pt["u"],
        "eps": pt["eps"] + s,
        "u": pt["u"],
    }


def axis_slope_generator() -> Generator:
    """Reduced flow of the axis-slope functional: coupling shift bends the slope."""
    space = VariableSpace(("t", "eps", "slope"))
    return Generator(
        space,
        {"eps": 1.0, "slope": lambda pt: -pt["t"] * pt["slope"] ** 2},
    )


def axis_slope_flow(s: float, pt: dict) -> dict:
    denom = 1.0 + pt["t"] * pt["slope"] * s
    return {"t": pt["t"], "eps": pt["eps"] + s, "slope": pt["slope"] / denom}


def hopf_solution_sampler(config: HopfConfig, tol: Tolerance = _DEFAULT_TOL):
    """Solution family probe over (t, x, eps) for invariance checks."""
    from .groups import SolutionSampler

    def evaluate(pt):
        cfg = replace(config, eps=float(pt["eps"]))
        return {"u": hopf_solve(cfg, float(pt["t"]), float(pt["x"]), tol)}

    return SolutionSampler(evaluate, independent=("t", "x", "eps"), dependent=("u",))

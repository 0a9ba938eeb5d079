"""Registry of symmetry pairs shared by every scenario.

Each worked scenario publishes a point operator together with the
solution family it preserves.  This module runs the two checks those
pairs have in common — the one-parameter group law on randomized
inputs, and tangency of the operator to the solution surface — and
returns uniform records that the command-line runner and the
acceptance suite both consume.  The quasi-Chaplygin pairs act through
derivatives rather than point coordinates, so their tangency check
evaluates the published canonical coordinate pair on hodograph data
instead of a finite-difference invariance residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .beam import BeamConfig, beam_field, beam_generator
from .bunch import (
    BunchConfig,
    bunch_invariant,
    density_generator,
    isothermal_bunch,
    kinetic_generator,
)
from .chaplygin import (
    HodographSampler,
    liebacklund_residual,
    slab_solution,
    soliton_solution,
)
from .groups import Generator, SolutionSampler, check_group_law, invariance_residual
from .numerics import Bracket, Tolerance, adaptive_quadrature, find_root
from .resonance import ResonanceConfig, resonance_fields, resonance_flow, resonance_generator
from .transfer_hopf import (
    HopfConfig,
    TransferConfig,
    hopf_rg_flow,
    hopf_rg_generator,
    hopf_solution_sampler,
    transfer_flow,
    transfer_generator,
    transfer_rg,
)

__all__ = ["PairRecord", "catalog_scenarios", "check_catalog"]

_LAW_TOL = Tolerance(abs_tol=1e-10, rel_tol=1e-9)
_LAW_BOUND = 10.0 * (_LAW_TOL.abs_tol + _LAW_TOL.rel_tol)
_QUAD_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-11)


@dataclass(frozen=True)
class PairRecord:
    """One symmetry check outcome: a defect against its stated bound."""

    scenario: str
    check: str
    defect: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.bound

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return f"{verdict}  {self.scenario:<18} {self.check:<22} defect {self.defect:.3e}  bound {self.bound:.1e}"


def catalog_scenarios() -> tuple:
    return (
        "transfer",
        "hopf",
        "chaplygin-soliton",
        "chaplygin-slab",
        "resonance",
        "beam",
        "bunch",
    )


def _law(scenario, gen, start, a, b, flow=None) -> PairRecord:
    defect = check_group_law(gen, start, a, b, _LAW_TOL, flow=flow)
    return PairRecord(scenario, "group-law", defect, _LAW_BOUND)


def _tangency(scenario, gen, sampler, points, bound) -> PairRecord:
    worst = max(invariance_residual(gen, sampler, pt) for pt in points)
    return PairRecord(scenario, "family-tangency", worst, bound)


# --- transfer -------------------------------------------------------------


def _check_transfer(rng: np.random.Generator, draws: int) -> list:
    records = []
    for channel in ("relaxing", "saturating"):
        worst_law = 0.0
        worst_tan = 0.0
        for _ in range(draws):
            alpha0 = float(rng.uniform(0.5, 1.5))
            if channel == "relaxing":
                cfg = TransferConfig(alpha0=alpha0, nu=float(rng.uniform(0.4, 1.2)))
            else:
                cfg = TransferConfig(alpha0=alpha0, beta=float(rng.uniform(0.3, 0.9)))
            gen = transfer_generator(cfg)
            flow = transfer_flow(cfg)
            start = {"lam": float(rng.uniform(0.0, 0.5)), "alpha": alpha0}
            a, b = float(rng.uniform(0.2, 0.6)), float(rng.uniform(0.2, 0.6))
            worst_law = max(
                worst_law, check_group_law(gen, start, a, b, _LAW_TOL, flow=flow)
            )

            sampler = SolutionSampler(
                lambda pt, _c=cfg: {"alpha": transfer_rg(_c, float(pt["lam"]))},
                independent=("lam",),
                dependent=("alpha",),
            )
            pts = [{"lam": float(rng.uniform(0.0, 2.0))} for _ in range(3)]
            worst_tan = max(
                worst_tan, max(invariance_residual(gen, sampler, p) for p in pts)
            )
        records.append(PairRecord("transfer", f"group-law[{channel}]", worst_law, _LAW_BOUND))
        records.append(PairRecord("transfer", f"family-tangency[{channel}]", worst_tan, 1e-6))
    return records


# --- hopf ------------------------------------------------------------------


def _check_hopf(rng: np.random.Generator, draws: int) -> list:
    gen = hopf_rg_generator()
    worst_law = 0.0
    for _ in range(draws):
        start = {
            "t": float(rng.uniform(0.1, 0.8)),
            "x": float(rng.uniform(-0.8, 0.8)),
            "eps": float(rng.uniform(0.2, 0.8)),
            "u": float(rng.uniform(-0.8, 0.8)),
        }
        a, b = float(rng.uniform(0.1, 0.4)), float(rng.uniform(0.1, 0.4))
        worst_law = max(worst_law, check_group_law(gen, start, a, b, _LAW_TOL, flow=hopf_rg_flow))
    records = [PairRecord("hopf", "group-law", worst_law, _LAW_BOUND)]

    worst_tan = 0.0
    for profile in ("linear", "sine"):
        sampler = hopf_solution_sampler(HopfConfig(profile=profile, eps=1.0))
        pts = []
        for _ in range(max(2, draws // 2)):
            eps = float(rng.uniform(0.2, 0.8))
            t = float(rng.uniform(0.1, 0.5)) / eps * 0.5
            pts.append({"t": t, "x": float(rng.uniform(-0.7, 0.7)), "eps": eps})
        worst_tan = max(worst_tan, max(invariance_residual(gen, sampler, p) for p in pts))
    records.append(PairRecord("hopf", "family-tangency", worst_tan, 1e-6))
    return records


# --- quasi-Chaplygin -------------------------------------------------------


def _check_chaplygin(fast: bool) -> list:
    # chart folds make random draws fragile; probe fixed safe windows
    times = (0.2,) if fast else (0.1, 0.2, 0.3)
    records = []
    samp = HodographSampler(soliton_solution)
    worst = 0.0
    for t in times:
        for x in (0.2, 0.5):
            f, g = liebacklund_residual("soliton", samp.enriched(t, x))
            worst = max(worst, f, g)
    records.append(PairRecord("chaplygin-soliton", "pair-annihilation", worst, 1e-4))

    samp = HodographSampler(slab_solution)
    worst = 0.0
    for t in times:
        for x in (0.6, 0.9):
            f, g = liebacklund_residual("slab", samp.enriched(t, x))
            worst = max(worst, f, g)
    records.append(PairRecord("chaplygin-slab", "pair-annihilation", worst, 1e-4))
    return records


# --- resonance -------------------------------------------------------------


def _resonance_family_sampler(config: ResonanceConfig, tau0: float) -> SolutionSampler:
    """Drive-family probe over (x, a) at frozen phase.

    The family member at amplitude parameter a places the secondary
    fields at x = eta + (a eps / omega^2) g(eta); evaluation inverts
    that map for eta (the shifted-amplitude objective stays monotone
    for the probed a-window) and reads the fields there.
    """
    eps = config.eps
    w2 = config.omega**2

    def g_of(eta: float) -> float:
        return -resonance_fields(config, tau0, eta).p / eps

    def evaluate(pt):
        x, a = float(pt["x"]), float(pt["a"])
        shift = a * eps / w2

        def objective(eta: float) -> float:
            return eta + shift * g_of(eta) - x

        pad = 1.2 * abs(shift) + 1e-6
        eta = find_root(objective, Bracket(x - pad, x + pad), Tolerance(1e-13, 1e-13))
        state = resonance_fields(config, tau0, eta)
        return {"v": state.v, "p": state.p}

    return SolutionSampler(evaluate, independent=("x", "a"), dependent=("v", "p"))


def _check_resonance(rng: np.random.Generator, draws: int) -> list:
    cfg = ResonanceConfig(eps=0.3)
    gen = resonance_generator(cfg)
    worst_law = 0.0
    for _ in range(draws):
        start = {
            "tau": float(rng.uniform(0.0, 2.0 * math.pi)),
            "x": float(rng.uniform(-1.0, 1.0)),
            "a": float(rng.uniform(0.5, 1.5)),
            "v": float(rng.uniform(-0.3, 0.3)),
            "p": float(rng.uniform(-0.3, 0.3)),
        }
        a, b = float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-0.5, 0.5))
        worst_law = max(
            worst_law,
            check_group_law(gen, start, a, b, _LAW_TOL, flow=lambda s, pt: resonance_flow(cfg, s, pt)),
        )
    sampler = _resonance_family_sampler(cfg, tau0=0.7)
    pts = [
        {"x": float(rng.uniform(-1.0, 1.0)), "a": float(rng.uniform(0.5, 1.5))}
        for _ in range(max(3, draws // 2))
    ]
    worst_tan = max(invariance_residual(gen, sampler, p) for p in pts)
    return [
        PairRecord("resonance", "group-law", worst_law, _LAW_BOUND),
        PairRecord("resonance", "family-tangency", worst_tan, 1e-6),
    ]


# --- beam ------------------------------------------------------------------


def _check_beam(rng: np.random.Generator, draws: int, fast: bool) -> list:
    cfg = BeamConfig()
    gen = beam_generator(cfg)
    tol = Tolerance(abs_tol=1e-10, rel_tol=1e-9)
    worst_law = 0.0
    for _ in range(draws):
        start = {
            "t": float(rng.uniform(0.1, 0.4)),
            "x": float(rng.uniform(0.2, 0.8)),
            "v": float(rng.uniform(-0.1, 0.1)),
            "n": float(rng.uniform(0.5, 1.5)),
        }
        a, b = float(rng.uniform(0.15, 0.35)), float(rng.uniform(0.15, 0.35))
        worst_law = max(worst_law, check_group_law(gen, start, a, b, tol))

    def evaluate(pt):
        n, v = beam_field(cfg, pt["t"], [pt["x"]], tol, chi0_max=2.6)
        return {"v": float(v[0]), "n": float(n[0])}

    sampler = SolutionSampler(
        evaluate, ("t", "x"), ("v", "n"), steps={"t": 1e-3, "x": 1e-3}
    )
    pts = [{"t": 0.3, "x": 0.4}] if fast else [{"t": 0.3, "x": 0.4}, {"t": 0.5, "x": 0.7}]
    worst_tan = max(invariance_residual(gen, sampler, p) for p in pts)
    return [
        PairRecord("beam", "group-law", worst_law, _LAW_BOUND),
        PairRecord("beam", "family-tangency", worst_tan, 5e-6),
    ]


# --- bunch -----------------------------------------------------------------


def _bunch_density_direct(config: BunchConfig, species_index: int) -> Callable:
    """Quadrature-backed density (no table) for stencil-clean tangency."""
    sp = config.species[species_index]
    ratio = sp.charge / sp.mass
    w2 = config.omega**2

    def density(t: float, x: float) -> float:
        s = math.sqrt(1.0 + w2 * t * t)
        xp = x / s
        psi = 0.5 * w2 * xp * xp + ratio * float(np.asarray(config.phi0(xp), dtype=float))
        integrand = lambda u: np.asarray(
            sp.f0(psi + 0.5 * np.asarray(u, dtype=float) ** 2), dtype=float
        )
        return 2.0 * adaptive_quadrature(integrand, 0.0, 16.0, _QUAD_TOL) / s

    return density


def _check_bunch(rng: np.random.Generator, draws: int) -> list:
    pair = isothermal_bunch()
    gen_k = kinetic_generator(pair)
    gen_n = density_generator(pair)
    worst_law = 0.0
    for _ in range(draws):
        start_k = {
            "t": float(rng.uniform(0.0, 0.5)),
            "x": float(rng.uniform(-0.8, 0.8)),
            "v": float(rng.uniform(-0.8, 0.8)),
        }
        a, b = float(rng.uniform(0.1, 0.3)), float(rng.uniform(0.1, 0.3))
        worst_law = max(worst_law, check_group_law(gen_k, start_k, a, b, _LAW_TOL))
        start_n = {
            "t": float(rng.uniform(0.0, 0.5)),
            "x": float(rng.uniform(-0.8, 0.8)),
            "n": float(rng.uniform(0.2, 1.0)),
        }
        worst_law = max(worst_law, check_group_law(gen_n, start_n, a, b, _LAW_TOL))
    records = [PairRecord("bunch", "group-law", worst_law, _LAW_BOUND)]

    profile = pair.species[0].f0
    kinetic_sampler = SolutionSampler(
        lambda pt: {
            "f": float(
                profile(np.asarray(bunch_invariant(pair, 0, pt["t"], pt["x"], pt["v"])))
            )
        },
        independent=("t", "x", "v"),
        dependent=("f",),
    )
    pts_k = [
        {
            "t": float(rng.uniform(0.0, 2.0)),
            "x": float(rng.uniform(-0.8, 0.8)),
            "v": float(rng.uniform(-0.8, 0.8)),
        }
        for _ in range(max(3, draws))
    ]
    worst = max(invariance_residual(gen_k, kinetic_sampler, p) for p in pts_k)
    records.append(PairRecord("bunch", "family-tangency[kinetic]", worst, 1e-6))

    density = _bunch_density_direct(pair, 0)
    density_sampler = SolutionSampler(
        lambda pt: {"n": density(float(pt["t"]), float(pt["x"]))},
        independent=("t", "x"),
        dependent=("n",),
    )
    pts_n = [
        {"t": float(rng.uniform(0.0, 2.0)), "x": float(rng.uniform(-0.8, 0.8))}
        for _ in range(max(3, draws // 2))
    ]
    worst = max(invariance_residual(gen_n, density_sampler, p) for p in pts_n)
    records.append(PairRecord("bunch", "family-tangency[density]", worst, 1e-6))
    return records


def check_catalog(seed: int = 0, *, fast: bool = False) -> list:
    """Run every published-pair check; returns PairRecord rows in catalog order."""
    rng = np.random.default_rng(seed)
    draws = 2 if fast else 5
    records = []
    records.extend(_check_transfer(rng, draws))
    records.extend(_check_hopf(rng, draws))
    records.extend(_check_chaplygin(fast))
    records.extend(_check_resonance(rng, draws))
    records.extend(_check_beam(rng, draws, fast))
    records.extend(_check_bunch(rng, draws))
    return records

"""Finite-dimensional symmetry machinery: named spaces, generators,
orbit integration, group-law checking and invariance residuals.

A generator is stored by its coordinate functions on a named variable
space.  Orbits of the one-parameter group it spans are produced by
integrating the associated autonomous system d(state)/da = coords(state)
with the shared Runge-Kutta kernel.  Higher-order (derivative-dependent)
generators fit the same interface in canonical form: their coordinate
functions may read derivative entries that a solution sampler provides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .numerics import (
    DomainError,
    EventHit,
    NumericsError,
    OdeTrace,
    Tolerance,
    integrate_ode,
)

__all__ = [
    "VariableSpace",
    "Generator",
    "OrbitTrace",
    "OrbitEvent",
    "SolutionSampler",
    "StencilDomainError",
    "integrate_lie",
    "check_group_law",
    "invariant_defect",
    "invariance_residual",
]

_DEFAULT_TOL = Tolerance()


class StencilDomainError(NumericsError):
    """A finite-difference stencil point left the usable domain."""


def _default_step(value: float) -> float:
    return max(1e-5, 1e-5 * abs(value))


@dataclass(frozen=True)
class VariableSpace:
    """Ordered collection of variable names, optionally with a point.

    The order fixes how dict-like points are packed into state vectors.
    """

    names: tuple[str, ...]
    point: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        if not self.names:
            raise ValueError("a variable space needs at least one name")
        if self.point is not None:
            self.validate(self.point)

    def validate(self, point: Mapping[str, float]) -> None:
        missing = [n for n in self.names if n not in point]
        if missing:
            raise ValueError(f"point is missing variables {missing}")

    def pack(self, point: Mapping[str, float]) -> np.ndarray:
        self.validate(point)
        return np.array([float(point[n]) for n in self.names])

    def unpack(self, vec: np.ndarray) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, vec)}


CoordFunc = Callable[[Mapping[str, float]], float]


class Generator:
    """Vector field on a named space, one coordinate function per name.

    Coordinates may be callables of the full point dict or plain
    numbers; names absent from ``coords`` do not move.  Coordinate
    functions are free to read extra entries (solution derivatives, say)
    if the caller guarantees they are present in the point.
    """

    def __init__(self, space: VariableSpace, coords: Mapping[str, CoordFunc | float]):
        unknown = [k for k in coords if k not in space.names]
        if unknown:
            raise ValueError(f"coordinates given for unknown variables {unknown}")
        self.space = space
        self.coords: dict[str, CoordFunc] = {}
        for name, c in coords.items():
            if callable(c):
                self.coords[name] = c
            else:
                value = float(c)
                self.coords[name] = (lambda pt, _v=value: _v)

    def coordinate(self, name: str, point: Mapping[str, float]) -> float:
        fn = self.coords.get(name)
        if fn is None:
            return 0.0
        try:
            return float(fn(point))
        except (ZeroDivisionError, FloatingPointError, OverflowError) as exc:
            raise StencilDomainError(
                f"coordinate of {name!r} undefined at {dict(point)!r}"
            ) from exc

    def apply(self, point: Mapping[str, float]) -> dict[str, float]:
        return {n: self.coordinate(n, point) for n in self.space.names}

    def scaled(self, factor: float) -> "Generator":
        return Generator(
            self.space,
            {n: (lambda pt, f=fn, c=float(factor): c * f(pt)) for n, fn in self.coords.items()},
        )

    def _rhs(self) -> Callable[[float, np.ndarray], np.ndarray]:
        names = self.space.names

        def rhs(a: float, y: np.ndarray) -> np.ndarray:
            pt = {n: float(v) for n, v in zip(names, y)}
            return np.array([self.coordinate(n, pt) for n in names])

        return rhs


@dataclass(frozen=True)
class OrbitEvent:
    """Event crossing along an orbit, in named form."""

    index: int
    param: float
    point: dict[str, float]


class OrbitTrace:
    """Orbit of a one-parameter group, sampled at accepted nodes.

    ``param_samples`` is strictly monotone; ``states`` yields one point
    dict per node.  ``sample`` evaluates the dense interpolant of the
    underlying integration.
    """

    def __init__(self, space: VariableSpace, trace: OdeTrace):
        self.space = space
        self._trace = trace
        step = np.diff(trace.params)
        if step.size and not (np.all(step > 0.0) or np.all(step < 0.0)):
            raise ValueError("orbit parameter samples must be strictly monotone")
        self.terminal_event: OrbitEvent | None = None
        if trace.terminal_event is not None:
            hit: EventHit = trace.terminal_event
            self.terminal_event = OrbitEvent(
                hit.index, hit.param, space.unpack(hit.state)
            )

    @property
    def param_samples(self) -> np.ndarray:
        return self._trace.params

    @property
    def states(self) -> list[dict[str, float]]:
        return [self.space.unpack(row) for row in self._trace.states]

    def __len__(self) -> int:
        return self._trace.params.size

    def state(self, i: int) -> dict[str, float]:
        return self.space.unpack(self._trace.states[i])

    @property
    def final(self) -> dict[str, float]:
        return self.space.unpack(self._trace.states[-1])

    def sample(self, a: float) -> dict[str, float]:
        return self.space.unpack(self._trace.sample(a))

    def component(self, name: str) -> np.ndarray:
        idx = self.space.names.index(name)
        return self._trace.states[:, idx].copy()


def integrate_lie(
    generator: Generator,
    start: Mapping[str, float],
    span: float | tuple[float, float],
    tol: Tolerance = _DEFAULT_TOL,
    *,
    events: Sequence[Callable[[float, Mapping[str, float]], float]] | None = None,
    max_steps: int = 200_000,
) -> OrbitTrace:
    """Flow ``start`` along the generator over the given parameter span.

    ``span`` may be a single end value (meaning from 0) or an explicit
    (a0, a1) pair.  Event callables receive (param, point dict); the
    first zero crossing terminates the orbit.
    """
    if isinstance(span, (int, float)):
        span = (0.0, float(span))
    space = generator.space
    y0 = space.pack(start)

    wrapped_events = None
    if events:
        wrapped_events = [
            (lambda a, y, g=g: float(g(a, space.unpack(y)))) for g in events
        ]

    trace = integrate_ode(
        generator._rhs(), y0, span, tol, events=wrapped_events, max_steps=max_steps
    )
    return OrbitTrace(space, trace)


def check_group_law(
    generator: Generator,
    start: Mapping[str, float],
    a: float,
    b: float,
    tol: Tolerance = _DEFAULT_TOL,
    *,
    flow: Callable[[float, Mapping[str, float]], Mapping[str, float]] | None = None,
) -> float:
    """Defect of one-parameter additivity: flow(b, flow(a, p)) vs flow(a+b, p).

    With a closed-form ``flow`` the defect reflects the map itself;
    otherwise orbits are integrated and the defect is bounded by the
    integration tolerance.
    """
    space = generator.space

    def advance(point: Mapping[str, float], s: float) -> dict[str, float]:
        if flow is not None:
            out = flow(s, dict(point))
            return {n: float(out[n]) for n in space.names}
        if s == 0.0:
            return {n: float(point[n]) for n in space.names}
        return integrate_lie(generator, point, (0.0, s), tol).final

    composed = advance(advance(start, a), b)
    direct = advance(start, a + b)
    return max(abs(composed[n] - direct[n]) for n in space.names)


def invariant_defect(
    generator: Generator,
    invariant: Callable[[Mapping[str, float]], float],
    points: Iterable[Mapping[str, float]],
    *,
    steps: Mapping[str, float] | None = None,
) -> float:
    """Largest |X J| over the sampled points, by central differences.

    The step for each variable follows max(1e-5, 1e-5 |value|) unless
    overridden through ``steps``.
    """
    space = generator.space
    worst = 0.0
    for point in points:
        space.validate(point)
        total = 0.0
        for name in space.names:
            xi = generator.coordinate(name, point)
            if xi == 0.0:
                continue
            value = float(point[name])
            h = steps.get(name) if steps and name in steps else _default_step(value)
            plus = dict(point)
            minus = dict(point)
            plus[name] = value + h
            minus[name] = value - h
            try:
                dj = (float(invariant(plus)) - float(invariant(minus))) / (2.0 * h)
            except (ZeroDivisionError, FloatingPointError, OverflowError, DomainError) as exc:
                raise StencilDomainError(
                    f"invariant stencil for {name!r} left the domain at {dict(point)!r}"
                ) from exc
            total += xi * dj
        worst = max(worst, abs(total))
    return worst


DerivativeSpec = tuple[str, tuple[str, ...]]


class SolutionSampler:
    """Finite-difference probe of a solution family.

    ``evaluate`` maps a point of the independent variables to a dict of
    dependent values.  ``derivative_entries`` requests extra entries in
    sampled points, each built from a central stencil: an entry named
    ``"u_x"`` mapped to ``("u", ("x",))`` adds the first derivative of
    dependent ``u`` along independent ``x``; ``("u", ("x", "x"))`` adds
    the second.  Steps default to max(1e-5, 1e-5 |value|) per variable.
    """

    def __init__(
        self,
        evaluate: Callable[[Mapping[str, float]], Mapping[str, float]],
        independent: Sequence[str],
        dependent: Sequence[str],
        *,
        steps: Mapping[str, float] | None = None,
        derivative_entries: Mapping[str, DerivativeSpec] | None = None,
    ):
        self.evaluate = evaluate
        self.independent = tuple(independent)
        self.dependent = tuple(dependent)
        self.steps = dict(steps) if steps else {}
        self.derivative_entries = dict(derivative_entries) if derivative_entries else {}

    def _step(self, name: str, value: float) -> float:
        return self.steps.get(name, _default_step(value))

    def _eval(self, point: Mapping[str, float]) -> dict[str, float]:
        try:
            out = self.evaluate(point)
        except StencilDomainError:
            raise
        except Exception as exc:  # noqa: BLE001 - mapped onto one failure type
            raise StencilDomainError(
                f"solution evaluation failed at {dict(point)!r}: {exc}"
            ) from exc
        missing = [n for n in self.dependent if n not in out]
        if missing:
            raise ValueError(f"solution sampler did not produce {missing}")
        return {n: float(out[n]) for n in out}

    def value(self, point: Mapping[str, float]) -> dict[str, float]:
        return self._eval(point)

    def derivative(self, point: Mapping[str, float], dep: str, wrt: str) -> float:
        value = float(point[wrt])
        h = self._step(wrt, value)
        plus = dict(point)
        minus = dict(point)
        plus[wrt] = value + h
        minus[wrt] = value - h
        return (self._eval(plus)[dep] - self._eval(minus)[dep]) / (2.0 * h)

    def second_derivative(
        self, point: Mapping[str, float], dep: str, wrt1: str, wrt2: str
    ) -> float:
        v1 = float(point[wrt1])
        h1 = self._step(wrt1, v1)
        if wrt1 == wrt2:
            plus = dict(point)
            minus = dict(point)
            plus[wrt1] = v1 + h1
            minus[wrt1] = v1 - h1
            f0 = self._eval(point)[dep]
            return (
                self._eval(plus)[dep] - 2.0 * f0 + self._eval(minus)[dep]
            ) / (h1 * h1)
        plus = dict(point)
        minus = dict(point)
        plus[wrt1] = v1 + h1
        minus[wrt1] = v1 - h1
        return (
            self.derivative(plus, dep, wrt2) - self.derivative(minus, dep, wrt2)
        ) / (2.0 * h1)

    def enriched(self, point: Mapping[str, float]) -> dict[str, float]:
        """Point dict with dependents and requested derivative entries."""
        indep_pt = {n: float(point[n]) for n in self.independent}
        full = dict(point)
        full.update(self._eval(indep_pt))
        for entry, (dep, wrt) in self.derivative_entries.items():
            if len(wrt) == 1:
                full[entry] = self.derivative(indep_pt, dep, wrt[0])
            elif len(wrt) == 2:
                full[entry] = self.second_derivative(indep_pt, dep, wrt[0], wrt[1])
            else:
                raise ValueError("only first and second derivatives are supported")
        return full


def invariance_residual(
    generator: Generator,
    sampler: SolutionSampler,
    point: Mapping[str, float],
) -> float:
    """How far the sampled solution family is from being invariant.

    Evaluates, on the solution surface, the generator applied to
    (dependent - solution) for every dependent variable and returns the
    largest magnitude.  Point generators use the chain rule against
    finite-difference slopes of the sampler; canonical higher-order
    generators contribute through coordinate functions that read the
    derivative entries the sampler provides.
    """
    surface = sampler.enriched(point)
    worst = 0.0
    for dep in sampler.dependent:
        xi_dep = generator.coordinate(dep, surface)
        total = xi_dep
        for ind in sampler.independent:
            if ind not in generator.space.names:
                continue
            xi_ind = generator.coordinate(ind, surface)
            if xi_ind == 0.0:
                continue
            indep_pt = {n: float(point[n]) for n in sampler.independent}
            slope = sampler.derivative(indep_pt, dep, ind)
            total -= xi_ind * slope
        worst = max(worst, abs(total))
    return worst

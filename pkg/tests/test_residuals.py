"""Residual kernel: manufactured solutions, convergence orders, grid guards."""

import numpy as np
import pytest

from rgsym.residuals import (
    GridTooSmallError,
    ResidualReport,
    convergence_order,
    pde_residual,
)


def padded_axis(lo, hi, n, ghosts=2):
    # keep the scored interior at [lo, hi] for every resolution by
    # placing the ghost nodes outside it
    h = (hi - lo) / (n - 1)
    return np.linspace(lo - ghosts * h, hi + ghosts * h, n + 2 * ghosts)


def shear_grid(nt, nx, eps=0.5, t0=0.1, t1=0.6, x0=-1.0, x1=1.0):
    t = padded_axis(t0, t1, nt)
    x = padded_axis(x0, x1, nx)
    u = x[None, :] / (1.0 + eps * t[:, None])
    return t, x, u


def test_hopf_shear_solution_small_residual():
    t, x, u = shear_grid(33, 33)
    rep = pde_residual("hopf", t, x, {"u": u}, {"eps": 0.5})
    assert isinstance(rep, ResidualReport)
    assert rep.max_residual < 5e-4
    assert rep.l2_residual <= rep.max_residual


def test_hopf_shear_solution_converges_at_order_two():
    eps = 0.5
    samples = []
    for nt in (17, 33, 65, 129):
        t, x, u = shear_grid(nt, nt, eps=eps)
        rep = pde_residual("hopf", t, x, {"u": u}, {"eps": eps})
        samples.append((rep.spacings[0], rep.max_residual))
    order = convergence_order(samples)
    assert abs(order - 2.0) <= 0.1


def test_kcs_free_streaming_solution():
    # alpha = 0 decouples the pressure: v = x/(1+t), n = N(x/(1+t))/(1+t)
    samples = []
    for nn in (17, 33, 65):
        t = padded_axis(0.0, 1.0, nn)
        x = padded_axis(-1.5, 1.5, nn)
        tt, xx = np.meshgrid(t, x, indexing="ij")
        v = xx / (1.0 + tt)
        n = np.exp(-((xx / (1.0 + tt)) ** 2)) / (1.0 + tt)
        rep = pde_residual("kcs", t, x, {"v": v, "n": n}, {"alpha": 0.0})
        samples.append((rep.spacings[0], rep.max_residual))
    assert samples[-1][1] < 3e-3
    assert abs(convergence_order(samples) - 2.0) <= 0.1


def test_twoeq_uniform_oscillator_is_exact_in_space():
    samples = []
    for nn in (17, 33, 65, 129):
        t = padded_axis(0.0, 2.0, nn)
        x = np.linspace(-1.0, 1.0, 9)
        v = np.sin(t)[:, None] * np.ones_like(x)[None, :]
        p = np.cos(t)[:, None] * np.ones_like(x)[None, :]
        rep = pde_residual("twoeq", t, x, {"v": v, "p": p}, {"sigma": 1.0})
        samples.append((rep.spacings[0], rep.max_residual))
    assert samples[-1][1] < 1e-3
    assert abs(convergence_order(samples) - 2.0) <= 0.1


def test_basic_matches_kcs_when_extras_vanish():
    t = np.linspace(0.0, 1.0, 21)
    x = np.linspace(-1.5, 1.5, 21)
    tt, xx = np.meshgrid(t, x, indexing="ij")
    v = xx / (1.0 + tt)
    n = np.exp(-((xx / (1.0 + tt)) ** 2)) / (1.0 + tt)
    a = pde_residual("kcs", t, x, {"v": v, "n": n}, {"alpha": 0.0})
    b = pde_residual(
        "basic", t, x, {"v": v, "n": n}, {"alpha": 0.0, "beta": 0.0, "nu_geom": 0}
    )
    assert a.max_residual == b.max_residual
    assert a.l2_residual == b.l2_residual


def test_basic_dispersive_stencil_against_closed_form():
    # for n = exp(-x^2) the nested pressure bracket collapses to
    # d_x(x^2 - 1) = 2x, so with v = 0 and alpha = 0 the momentum
    # residual is -beta * 2x plus O(dx^2)
    t = np.linspace(0.0, 0.1, 7)
    x = np.linspace(-0.9, 0.9, 201)
    n = np.exp(-(x**2))[None, :] * np.ones((7, 1))
    v = np.zeros_like(n)
    rep = pde_residual(
        "basic", t, x, {"v": v, "n": n}, {"alpha": 0.0, "beta": 1.0, "nu_geom": 0}
    )
    # interior reaches to |x| = 0.9 minus three columns
    edge = x[-4]
    assert rep.max_residual == pytest.approx(2.0 * edge, rel=1e-3)
    assert "dispersive" in rep.notes


def test_cylindrical_geometry_term_enters_continuity():
    t = np.linspace(0.0, 0.5, 9)
    x = np.linspace(1.0, 2.0, 9)
    v = np.ones((9, 9))
    n = np.ones((9, 9))
    flat = pde_residual("basic", t, x, {"v": v, "n": n}, {"alpha": 0.0, "beta": 0.0, "nu_geom": 0})
    cyl = pde_residual("basic", t, x, {"v": v, "n": n}, {"alpha": 0.0, "beta": 0.0, "nu_geom": 1})
    assert flat.max_residual == pytest.approx(0.0, abs=1e-14)
    # n*v/x on x in [1,2] peaks at 1 on the interior's left edge
    assert cyl.max_residual == pytest.approx(1.0 / x[2], rel=1e-12)


def test_residual_is_translation_invariant():
    t, x, u = shear_grid(25, 25)
    base = pde_residual("hopf", t, x, {"u": u}, {"eps": 0.5})
    # shifting both axes only perturbs the node coordinates in their
    # last bits; the residual must follow to rounding, not more
    shifted = pde_residual("hopf", t + 17.0, x - 4.0, {"u": u}, {"eps": 0.5})
    assert shifted.max_residual == pytest.approx(base.max_residual, rel=1e-12)
    assert shifted.l2_residual == pytest.approx(base.l2_residual, rel=1e-12)


def test_grid_too_small_raises():
    t = np.linspace(0.0, 1.0, 4)
    x = np.linspace(0.0, 1.0, 9)
    u = np.zeros((4, 9))
    with pytest.raises(GridTooSmallError):
        pde_residual("hopf", t, x, {"u": u}, {"eps": 1.0})
    # dispersive reach asks for more columns than plain advection
    t2 = np.linspace(0.0, 1.0, 7)
    x2 = np.linspace(0.5, 1.0, 5)
    f = np.ones((7, 5))
    with pytest.raises(GridTooSmallError):
        pde_residual(
            "basic", t2, x2, {"v": f, "n": f}, {"alpha": 0.0, "beta": 1.0, "nu_geom": 0}
        )
    # same grid is fine for the non-dispersive system
    rep = pde_residual(
        "basic", t2, x2, {"v": f, "n": f}, {"alpha": 0.0, "beta": 0.0, "nu_geom": 0}
    )
    assert rep.max_residual == 0.0


def test_input_validation():
    t = np.linspace(0.0, 1.0, 9)
    x = np.linspace(0.0, 1.0, 9)
    u = np.zeros((9, 9))
    with pytest.raises(ValueError):
        pde_residual("unknown", t, x, {"u": u}, {})
    with pytest.raises(ValueError):
        pde_residual("hopf", t, x, {"u": u[:5]}, {"eps": 1.0})
    with pytest.raises(ValueError):
        pde_residual("hopf", t[::-1], x, {"u": u}, {"eps": 1.0})
    with pytest.raises(ValueError):
        pde_residual("hopf", t, x, {"u": u}, {"eps": 1.0}, ghost_layers=1)
    nonuniform = np.array([0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.1, 2.8, 3.6])
    with pytest.raises(ValueError):
        pde_residual("hopf", nonuniform, x, {"u": u}, {"eps": 1.0})


def test_convergence_order_pure_power():
    hs = [0.4, 0.2, 0.1, 0.05]
    assert convergence_order([(h, h**2) for h in hs]) == pytest.approx(2.0, abs=1e-12)
    assert convergence_order([(h, 3.0 * h) for h in hs]) == pytest.approx(1.0, abs=1e-12)


def test_convergence_order_validation():
    with pytest.raises(ValueError):
        convergence_order([(0.1, 0.01)])
    with pytest.raises(ValueError):
        convergence_order([(0.1, 0.01), (0.1, 0.02)])
    with pytest.raises(ValueError):
        convergence_order([(0.1, -0.01), (0.2, 0.01)])


def test_report_with_order_round_trip():
    t, x, u = shear_grid(17, 17)
    rep = pde_residual("hopf", t, x, {"u": u}, {"eps": 0.5})
    rep2 = rep.with_order(2.0)
    assert rep2.convergence_order == 2.0
    assert rep2.max_residual == rep.max_residual

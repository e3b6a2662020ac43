import numpy as np
import pytest
from hypothesis import given, strategies as st

from swemac.fields import State, make_pressure
from swemac.mesh import build_uniform
from swemac.operators import (
    FluxSet,
    assemble_dual_fluxes,
    assemble_fluxes,
    assemble_mass_fluxes,
    bathy_gradient,
    centered_edge_height,
    div_cell,
    edge_derivative,
    momentum_divergence,
    stabilization_fluxes,
    total_momentum_flux,
)
from swemac.reconstruct import UPWIND, LimiterConfig

from strategies import mesh_and_state, meshes

MUSCL = LimiterConfig()


def test_div_single_cell():
    m = build_uniform(1, 1)
    assert div_cell(np.array([[0.0], [1.0]]), np.zeros((1, 2)), m)[0, 0] == 1.0


def test_div_constant_flux_vanishes_inside():
    m = build_uniform(6, 5, ((0.0, 3.0), (0.0, 1.0)))
    q1 = m.edge_len1 * 2.0
    q2 = m.edge_len2 * -1.0
    np.testing.assert_allclose(div_cell(q1, q2, m), 0.0, atol=1e-13)


@given(data=mesh_and_state())
def test_div_conservative(data):
    m, s = data
    for lim in (UPWIND, MUSCL):
        f = assemble_mass_fluxes(s.h, s.u1, s.u2, m, lim)
        tot = (m.cell_area * div_cell(f.q1, f.q2, m)).sum()
        scale = np.abs(f.q1).sum() + np.abs(f.q2).sum()
        assert abs(tot) <= 1e-13 * max(scale, 1.0)


@given(meshes(), st.floats(-1e3, 1e3))
def test_edge_derivative_of_constant(m, c):
    d1, d2 = edge_derivative(np.full(m.shape, c), m)
    assert not d1.any() and not d2.any()


def test_edge_derivative_two_cells():
    m = build_uniform(2, 1, ((0.0, 2.0), (0.0, 1.0)))
    d1, _ = edge_derivative(np.array([[1.0], [3.0]]), m)
    assert d1[1, 0] == 2.0
    b1, _ = bathy_gradient(np.array([[1.0], [3.0]]), m)
    assert b1[1, 0] == 2.0


@given(meshes(kinds=("uniform", "nonuniform")), st.floats(-5, 5), st.floats(-5, 5))
def test_edge_derivative_exact_for_affine(m, a1, a2):
    X, Y = m.cell_centers
    d1, d2 = edge_derivative(a1 * X + a2 * Y + 0.3, m)
    np.testing.assert_allclose(d1[m.interior1], a1, atol=1e-10)
    np.testing.assert_allclose(d2[m.interior2], a2, atol=1e-10)


def test_centered_edge_height():
    m = build_uniform(2, 1)
    assert centered_edge_height(np.array([[1.0], [3.0]]), m)[0][1, 0] == 2.0
    c1, c2 = centered_edge_height(np.full((4, 3), 0.7), build_uniform(4, 3))
    np.testing.assert_allclose(c1[1:-1], 0.7)
    np.testing.assert_allclose(c2[:, 1:-1], 0.7)


@given(data=mesh_and_state(), g=st.floats(0.1, 20))
def test_pressure_form_identity(data, g):
    m, s = data
    dp = edge_derivative(make_pressure(s.h, g), m)
    dz = edge_derivative(s.z, m)
    hc = centered_edge_height(s.h, m)
    dhz = edge_derivative(s.h + s.z, m)
    for i in range(2):
        lhs = dp[i] + g * hc[i] * dz[i]
        rhs = 0.5 * g * 2 * hc[i] * dhz[i]
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(lhs).max(initial=1.0))


def test_mass_fluxes_zero_velocity():
    m = build_uniform(4, 4)
    f = assemble_mass_fluxes(np.ones(m.shape), np.zeros((5, 4)), np.zeros((4, 5)), m, MUSCL)
    assert not f.q1.any() and not f.q2.any()


def test_mass_fluxes_1d_upwind():
    m = build_uniform(5, 1, ((0.0, 5.0), (0.0, 1.0)))
    f = assemble_mass_fluxes(np.ones((5, 1)), np.ones((6, 1)), np.zeros((5, 2)), m, UPWIND)
    np.testing.assert_allclose(f.F1[1:-1], 1.0)
    assert f.F1[0, 0] == 0 and f.F1[-1, 0] == 0


@given(data=mesh_and_state())
def test_upwind_heights(data):
    m, s = data
    f = assemble_mass_fluxes(s.h, s.u1, s.u2, m, UPWIND)
    up = np.where(s.u1[1:-1] >= 0, s.h[:-1], s.h[1:])
    inner = m.interior1[1:-1] & (s.u1[1:-1] != 0)
    np.testing.assert_array_equal(f.h1[1:-1][inner], up[inner])


def _flux_set(q1, q2):
    z1, z2 = np.zeros_like(q1), np.zeros_like(q2)
    return FluxSet(h1=z1, h2=z2, u1=z1, u2=z2, q1=q1, q2=q2)


def test_dual_flux_parallel_case():
    m = build_uniform(2, 2, ((0.0, 2.0), (0.0, 2.0)))
    q1 = np.zeros((3, 2))
    q1[0, 0], q1[1, 0] = 1.0, 3.0
    d = assemble_dual_fluxes(_flux_set(q1, np.zeros((2, 3))), m)
    assert d.par1[0, 0] == 2.0


def test_dual_flux_perpendicular_case():
    m = build_uniform(2, 2, ((0.0, 2.0), (0.0, 2.0)))
    q2 = np.zeros((2, 3))
    q2[0, 1], q2[1, 1] = 2.0, 4.0
    d = assemble_dual_fluxes(_flux_set(np.zeros((3, 2)), q2), m)
    assert m.perp_len1[1, 1] == 1.0
    assert d.perp1[1, 1] == 3.0


def test_dual_flux_uniform_field():
    m = build_uniform(6, 6, ((0.0, 3.0), (0.0, 3.0)))
    q1 = m.edge_len1 * 1.5
    q2 = m.edge_len2 * -0.5
    d = assemble_dual_fluxes(_flux_set(q1, q2), m)
    np.testing.assert_allclose(d.par1 / m.par_len1, 1.5)
    np.testing.assert_allclose(d.perp1[1:-1, 1:-1] / m.perp_len1[1:-1, 1:-1], -0.5)


def test_momentum_divergence_zero_velocity():
    m = build_uniform(4, 3)
    f = assemble_fluxes(np.ones(m.shape), np.zeros((5, 3)), np.zeros((4, 4)), m, MUSCL)
    for d in momentum_divergence(f, m):
        assert not d.any()


def test_momentum_divergence_uniform_flow():
    m = build_uniform(8, 8)
    u1, u2 = 0.7 * m.interior1, -0.3 * m.interior2
    f = assemble_fluxes(np.full(m.shape, 2.0), u1, u2, m, MUSCL)
    d1, d2 = momentum_divergence(f, m)
    np.testing.assert_allclose(d1[2:-2, 2:-2], 0.0, atol=1e-12)
    np.testing.assert_allclose(d2[2:-2, 2:-2], 0.0, atol=1e-12)


def test_momentum_divergence_1d_hand_case():
    # 5 unit cells, h = 1, u = 1..4 on the interior edges, upwind
    m = build_uniform(5, 1, ((0.0, 5.0), (0.0, 1.0)))
    u1 = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 0.0])[:, None]
    f = assemble_fluxes(np.ones((5, 1)), u1, np.zeros((5, 2)), m, UPWIND)
    d1, _ = momentum_divergence(f, m)
    # par fluxes 0.5, 1.5, 2.5, 3.5, 2 carrying upwind u 0, 1, 2, 3, 4
    G = np.array([0.0, 1.5, 5.0, 10.5, 8.0])
    np.testing.assert_allclose(d1[1:-1, 0], G[1:] - G[:-1])


def test_stabilization_flux_value():
    m = build_uniform(4, 1, ((0.0, 2.0), (0.0, 1.0)))
    u1 = np.array([0.0, 2.0, 0.0, 0.0, 0.0])[:, None]
    (par, _), _ = stabilization_fluxes(np.ones((4, 1)), u1, np.zeros((4, 2)), m, 0.1)
    assert par[1, 0] == pytest.approx(0.1)


@given(data=mesh_and_state())
def test_stabilization_trivial_cases(data):
    m, s = data
    (p, q), (r, t) = stabilization_fluxes(s.h, s.u1, s.u2, m, 0.0)
    assert not (p.any() or q.any() or r.any() or t.any())
    (p, q), _ = stabilization_fluxes(s.h, np.full_like(s.u1, 0.4), s.u2, m, 0.2)
    assert not p.any() and not q.any()


@given(meshes(), st.floats(0.5, 3.0), st.floats(0.1, 20))
def test_lake_at_rest_total_flux(m, level, g):
    rng = np.random.default_rng(7)
    z = np.where(m.active, rng.uniform(-0.4, 0.4, m.shape), 0.0)
    s = State.at_rest(m, level - z, z)
    for lim in (UPWIND, MUSCL):
        t1, t2 = total_momentum_flux(s.h, s.u1, s.u2, s.z, m, lim, g)
        # h + z = level holds up to one rounding of level - z
        tol = 1e-13 * g * level * max(1.0 / m.dx.min(), 1.0 / m.dy.min())
        assert np.abs(t1).max() <= tol and np.abs(t2).max() <= tol


def test_total_flux_1d_hand_case():
    m = build_uniform(5, 1, ((0.0, 5.0), (0.0, 1.0)))
    h = np.array([1.0, 1.2, 1.4, 1.6, 1.8])[:, None]
    u1 = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 0.0])[:, None]
    g = 2.0
    t1, _ = total_momentum_flux(h, u1, np.zeros((5, 2)), np.zeros((5, 1)), m, UPWIND, g)
    hu = np.r_[0.0, h[:-1, 0] * u1[1:-1, 0], 0.0]
    par = 0.5 * (hu[:-1] + hu[1:])
    G = par * u1[:-1, 0]
    conv = G[1:] - G[:-1]
    press = g * 0.5 * (h[1:, 0] + h[:-1, 0]) * (h[1:, 0] - h[:-1, 0])
    np.testing.assert_allclose(t1[1:-1, 0], conv + press)

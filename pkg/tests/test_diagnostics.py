import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swemac.cases import lake_at_rest_case
from swemac.diagnostics import (
    BVAccumulator,
    bv_time_norms,
    check_div_grad_duality,
    check_dual_mass_balance,
    convergence_order,
    energy_report,
    kinetic_balance_residual,
    l1_error,
    potential_balance_residual,
    quadrant_asymmetry,
    transition_cells,
    wet_centroid,
)
from swemac.fields import State
from swemac.mesh import build_uniform
from swemac.reconstruct import LimiterConfig
from swemac.schemes import SchemeConfig, cfl_dt, euler_step

from strategies import mesh_and_state

LIMS = [LimiterConfig(mode="upwind"), LimiterConfig(), LimiterConfig(variant="vanleer")]


def _euler(s, m, lim, zeta=0.0, g=9.81, frac=0.5):
    kind = "euler_upwind" if lim.mode == "upwind" else "euler_muscl"
    cfg = SchemeConfig(kind=kind, limiter=lim, g=g, zeta_stab=zeta, h_floor=0.0)
    dt = frac * cfl_dt(s, m)
    if not math.isfinite(dt):
        dt = 0.01
    s1 = euler_step(s, m, cfg, dt)
    return cfg, s1, s1.meta["fluxes"][0]


@settings(max_examples=50)
@given(data=mesh_and_state(), lim=st.sampled_from(LIMS), zeta=st.sampled_from([0.0, 0.3]), g=st.floats(0.5, 10))
def test_identities_on_random_states(data, lim, zeta, g):
    m, s = data
    xi = np.random.default_rng(0).normal(size=m.shape) * m.active
    assert check_div_grad_duality(s.h, s.u1, s.u2, xi, m, lim).holds(1e-12)
    cfg, s1, flux = _euler(s, m, lim, zeta, g)
    assert check_dual_mass_balance(s, s1, flux, m).holds(1e-12)
    k1, k2 = kinetic_balance_residual(s, s1, flux, m, cfg)
    assert k1.max_relative <= 1e-10 and k2.max_relative <= 1e-10
    assert potential_balance_residual(s, s1, flux, m, cfg).max_relative <= 1e-10


def test_duality_trivial_cases():
    m = build_uniform(6, 5)
    rng = np.random.default_rng(3)
    h = rng.uniform(0.5, 1.5, m.shape)
    xi = rng.normal(size=m.shape)
    zero1, zero2 = np.zeros((7, 5)), np.zeros((6, 6))
    assert check_div_grad_duality(h, zero1, zero2, xi, m, LIMS[1]).residual == 0.0
    u1 = rng.normal(size=(7, 5)) * m.interior1
    u2 = rng.normal(size=(6, 6)) * m.interior2
    res = check_div_grad_duality(h, u1, u2, np.full(m.shape, 2.0), m, LIMS[1])
    assert res.residual <= 1e-14 * max(res.scale, 1)


def test_duality_16x16():
    m = build_uniform(16, 16)
    rng = np.random.default_rng(4)
    h = rng.uniform(0.2, 2, m.shape)
    u1 = rng.normal(size=(17, 16)) * m.interior1
    u2 = rng.normal(size=(16, 17)) * m.interior2
    assert check_div_grad_duality(h, u1, u2, rng.normal(size=m.shape), m, LIMS[1]).relative <= 1e-12


@pytest.mark.parametrize("case", [lake_at_rest_case(8), None])
def test_balances_at_rest(case):
    if case is None:
        m = build_uniform(6, 6)
        s = State.at_rest(m, 1.3)
    else:
        m, s = case.mesh, case.initial_state()
    cfg, s1, flux = _euler(s, m, LIMS[1])
    assert check_dual_mass_balance(s, s1, flux, m).residual == 0.0
    k1, k2 = kinetic_balance_residual(s, s1, flux, m, cfg)
    assert k1.max_residual <= 1e-12 and k2.max_residual <= 1e-12
    assert np.abs(k1.remainder).max() <= 1e-12
    assert potential_balance_residual(s, s1, flux, m, cfg).max_relative <= 1e-12


def test_potential_balance_divergence_free_flow():
    # u = curl ψ with ψ vanishing on the boundary nodes
    n = 10
    m = build_uniform(n, n)
    d = 1.0 / n
    X, Y = np.meshgrid(m.x, m.y, indexing="ij")
    psi = np.sin(np.pi * X) * np.sin(np.pi * Y) * 0.1
    u1 = (psi[:, 1:] - psi[:, :-1]) / d
    u2 = -(psi[1:] - psi[:-1]) / d
    s = State(np.ones(m.shape), u1 * m.interior1, u2 * m.interior2)
    q_div = (u1[1:] - u1[:-1]) + (u2[:, 1:] - u2[:, :-1])
    assert np.abs(q_div).max() <= 1e-12
    cfg, s1, flux = _euler(s, m, LIMS[0])
    np.testing.assert_allclose(s1.h, 1.0, atol=1e-14)
    assert potential_balance_residual(s, s1, flux, m, cfg).max_relative <= 1e-10


def test_l1_error_linearity():
    case = lake_at_rest_case(8)
    s = case.initial_state()
    assert l1_error(s, case.exact, case.mesh) == (0.0, 0.0)
    s.h = s.h + 0.25
    err_h, err_u = l1_error(s, case.exact, case.mesh)
    assert err_h == pytest.approx(0.25 * case.mesh.total_area)
    assert err_u == 0.0


def test_convergence_order_examples():
    d = [0.1, 0.05, 0.025]
    np.testing.assert_allclose(convergence_order([(x, 3 * x * x) for x in d]), [2.0, 2.0])
    assert convergence_order([(0.1, 1e-3), (0.05, 1e-3)]) == [0.0]
    order = convergence_order([(3.2 / 64 * math.sqrt(2), 1.15e-3), (3.2 / 128 * math.sqrt(2), 2.58e-4)])[0]
    assert order == pytest.approx(2.16, abs=0.005)
    with pytest.raises(ValueError):
        convergence_order([(0.1, 1.0)])
    with pytest.raises(ValueError):
        convergence_order([(0.1, 1.0), (0.2, 0.5)])


def test_bv_norms():
    m = build_uniform(2, 2)
    s0 = State.at_rest(m, 1.0)
    assert bv_time_norms([s0, s0.copy(), s0.copy()], m) == (0.0, 0.0)
    s1 = s0.copy()
    s1.h[0, 0] += 0.4
    s1.u1[1, 1] = -2.0
    s1.u2[0, 1] = 0.5
    bh, bu = bv_time_norms([s0, s1], m)
    assert bh == pytest.approx(0.25 * 0.4)
    assert bu == pytest.approx(max(m.dual_area1[1, 1] * 2.0, m.dual_area2[0, 1] * 0.5))
    with pytest.raises(ValueError):
        bv_time_norms([s0], m)
    acc = BVAccumulator(m)
    acc(0, s0, m)
    assert acc(1, s1, m)["bv_time_h"] == pytest.approx(bh)


def test_energy_report():
    m = build_uniform(2, 2)
    s = State.at_rest(m, 2.0, np.full((2, 2), 0.5))
    rep = energy_report(s, m, 1.0)
    assert rep.kinetic_total == 0.0
    assert rep.potential_total == pytest.approx(0.5 * 4 + 2 * 0.5)


def test_case_monitors():
    h = np.outer(np.hanning(8), np.hanning(8))
    assert quadrant_asymmetry(h) <= 1e-16
    h2 = h.copy()
    h2[0, 3] += 1e-3
    assert quadrant_asymmetry(h2) == pytest.approx(1e-3)
    m = build_uniform(8, 8, ((-1.0, 1.0), (-1.0, 1.0)))
    cx, cy = wet_centroid(h + 0.1, m, 0.0)
    assert abs(cx) < 1e-14 and abs(cy) < 1e-14
    prof = np.array([1.0, 1.0, 0.7, 0.4, 0.2, 0.2])
    assert transition_cells(prof, 1.0, 0.2) == 2

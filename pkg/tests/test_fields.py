import numpy as np
import pytest
from hypothesis import given, strategies as st

from swemac.fields import State, dual_height, make_pressure, sample_cells, zero_walls
from swemac.mesh import build_masked, build_nonuniform, build_uniform

from strategies import meshes


@pytest.mark.parametrize("h, g, p", [(0.0, 9.81, 0.0), (2.0, 9.81, 19.62), (1.0, 1.0, 0.5)])
def test_make_pressure(h, g, p):
    assert make_pressure(np.array([h]), g)[0] == pytest.approx(p)


@given(meshes(), st.one_of(st.just(0.0), st.floats(1e-6, 100.0)))
def test_dual_height_of_constant(m, c):
    h = np.where(m.active, c, 0.0)
    hd1, hd2 = dual_height(h, m)
    np.testing.assert_allclose(hd1[m.interior1], c, rtol=1e-14)
    np.testing.assert_allclose(hd2[m.interior2], c, rtol=1e-14)


def test_dual_height_equal_halves():
    m = build_uniform(2, 1)
    hd1, _ = dual_height(np.array([[1.0], [2.0]]), m)
    assert hd1[1, 0] == pytest.approx(1.5)


def test_dual_height_weighted():
    # |D_K| = 1, |D_L| = 3
    m = build_nonuniform([0.0, 2.0, 8.0], [0.0, 1.0])
    hd1, _ = dual_height(np.array([[4.0], [0.0]]), m)
    assert hd1[1, 0] == pytest.approx(1.0)


def test_state_shapes_checked():
    with pytest.raises(ValueError):
        State(np.ones((3, 3)), np.zeros((3, 3)), np.zeros((3, 4)))


def test_at_rest_masks_inactive():
    m = build_masked(6, 6, ((0.0, 1.0), (0.0, 1.0)), [((0.3, 0.7), (0.3, 0.7))])
    s = State.at_rest(m, 1.0)
    assert (s.h[~m.active] == 0).all() and (s.h[m.active] == 1).all()
    assert not s.u1.any() and not s.u2.any() and s.all_finite()


def test_zero_walls():
    m = build_uniform(3, 2)
    u1, u2 = np.ones((4, 2)), np.ones((3, 3))
    zero_walls(m, u1, u2)
    assert (u1[[0, -1]] == 0).all() and (u1[1:-1] == 1).all()
    assert (u2[:, [0, -1]] == 0).all()


def test_copy_is_independent():
    m = build_uniform(2, 2)
    s = State.at_rest(m, 1.0)
    c = s.copy()
    c.h[0, 0] = 5.0
    assert s.h[0, 0] == 1.0


def test_sample_cells_uses_centers():
    m = build_uniform(4, 2, ((0.0, 4.0), (0.0, 2.0)))
    h = sample_cells(m, lambda X, Y: X + 10 * Y)
    np.testing.assert_allclose(h[:, 0], [5.5, 6.5, 7.5, 8.5])

import numpy as np
import pytest

from sigshape.core import curve as cv
from sigshape.core import reparam, srvt
from sigshape.core.errors import DimensionMismatch, GridTooCoarse, InvalidParameter

SMALL_STEPS = ((1, 1), (1, 2), (2, 1))


def _srv(c):
    return srvt.srv_transform(cv.normalize_to_identity(c))


def test_grid_validation():
    with pytest.raises(GridTooCoarse):
        reparam.DPGrid(1)
    with pytest.raises(InvalidParameter):
        reparam.DPGrid(4, ((1, 0),))
    with pytest.raises(InvalidParameter):
        reparam.default_steps(0)
    assert len(reparam.default_grid(8, 3).steps) == 9


def test_step_order_prefers_small_predecessors():
    steps = reparam.DPGrid(4, SMALL_STEPS).step_array()
    predecessors = [(10 - a, 10 - b) for a, b in steps]
    assert predecessors == sorted(predecessors)


def test_identical_diagonal_edge_costs_nothing(make_curve):
    q = _srv(make_curve())
    for k in range(8):
        assert reparam.edge_energy(q, q, k, k, k + 1, k + 1, 8) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize('m', [2, 3, 4, 5, 6])
def test_dp_matches_exhaustive_search(rng, m):
    grid = reparam.DPGrid(m, SMALL_STEPS)
    for _ in range(20):
        q0 = _srv(cv.random_curve(rng, 4, 2))
        q1 = _srv(cv.random_curve(rng, 5, 2))
        dp = reparam.optimal_reparam_dp(q0, q1, grid)
        brute = reparam.brute_force_reparam(q0, q1, grid)
        assert dp.cost == brute.cost
        assert dp.distance == pytest.approx(brute.distance, abs=1e-12)


def test_dp_path_endpoints(make_curve):
    result = reparam.optimal_reparam_dp(_srv(make_curve()), _srv(make_curve()), reparam.default_grid(16, 4))
    assert result.path[0] == (0, 0) and result.path[-1] == (16, 16)
    assert result.reparam(0.0) == 0.0 and result.reparam(1.0) == 1.0
    assert result.distance >= 0.0


def test_unreachable_corner():
    q = srvt.SRVRepresentation(np.array([0.0, 1.0]), np.ones((1, 3)))
    with pytest.raises(GridTooCoarse):
        reparam.optimal_reparam_dp(q, q, reparam.DPGrid(3, ((2, 2),)))


def test_brute_force_refuses_large_grids(make_curve):
    q = _srv(make_curve())
    with pytest.raises(InvalidParameter):
        reparam.brute_force_reparam(q, q, reparam.DPGrid(9, SMALL_STEPS))


def test_recovers_grid_representable_warp(make_curve):
    nodes = np.array([(0, 0), (4, 12), (16, 20), (32, 24), (48, 40), (56, 56), (64, 64)], dtype=float) / 64
    phi = cv.Reparameterization(nodes[:, 0], nodes[:, 1])
    for _ in range(3):
        c = make_curve(6, 2)
        assert reparam.shape_distance(c, cv.reparameterize(c, phi)) <= 1e-6


def test_shape_distance_never_exceeds_pstar(make_curve):
    grid = reparam.default_grid(16, 4)
    for _ in range(10):
        c0, c1 = make_curve(), make_curve()
        assert reparam.shape_distance(c0, c1, grid) <= srvt.pstar_distance(c0, c1) + 1e-12


def test_refinement_does_not_increase_distance(make_curve):
    c0, c1 = make_curve(), make_curve()
    coarse = reparam.shape_distance(c0, c1, reparam.default_grid(8, 2))
    more_steps = reparam.shape_distance(c0, c1, reparam.default_grid(8, 4))
    finer = reparam.shape_distance(c0, c1, reparam.default_grid(16, 2))
    assert more_steps <= coarse + 1e-12
    assert finer <= coarse + 1e-12


def test_symmetric_mode_is_symmetric(make_curve):
    c0, c1 = make_curve(), make_curve()
    grid = reparam.default_grid(12, 3)
    assert reparam.shape_distance(c0, c1, grid) == reparam.shape_distance(c1, c0, grid)
    one_sided = reparam.shape_distance(c0, c1, grid, symmetric=False)
    assert reparam.shape_distance(c0, c1, grid) <= one_sided


def test_penalty_only_raises_the_reported_distance(make_curve):
    q0, q1 = _srv(make_curve()), _srv(make_curve())
    grid = reparam.default_grid(16, 4)
    free = reparam.optimal_reparam_dp(q0, q1, grid)
    damped = reparam.optimal_reparam_dp(q0, q1, grid, penalty=5.0)
    assert damped.distance >= free.distance - 1e-12
    assert damped.cost >= damped.distance ** 2 - 1e-12
    with pytest.raises(InvalidParameter):
        reparam.optimal_reparam_dp(q0, q1, grid, penalty=-1.0)


def test_dimension_mismatch(make_curve):
    with pytest.raises(DimensionMismatch):
        reparam.optimal_reparam_dp(_srv(make_curve(3, 1)), _srv(make_curve(3, 2)), reparam.DPGrid(4))


def test_kernel_compiles_with_current_numba_options():
    # nopython is the njit default; passing it again only triggers a warning
    assert 'nopython' not in reparam.jitkw
    assert reparam.jitkw['nogil'] is True

import numpy as np
import pytest

from secomm import oracle, solver
from secomm.channel import ScaAnchor
from secomm.errors import GridGuardError
from secomm.oracle import GridSpec, finite_diff, grid_search
from secomm.scenario import Scenario
from secomm.solver import default_initial_allocation, fractional_programming
from conftest import make_user, two_user_scenario


def test_finite_diff_polynomial():
    grad, err = finite_diff(lambda x: x[0] ** 2, np.array([3.0]))
    assert grad == pytest.approx(6.0, rel=1e-8)
    assert err < 1e-6


def test_finite_diff_multidim():
    grad, err = finite_diff(lambda x: x[0] ** 2 + 3.0 * x[1], np.array([2.0, 5.0]))
    assert grad == pytest.approx([4.0, 3.0], rel=1e-7)


def test_finite_diff_rejects_non_finite():
    with pytest.raises(Exception):
        finite_diff(lambda x: float("nan"), np.array([1.0]))


def test_grid_guard_on_user_count():
    users = tuple(make_user() for _ in range(4))
    scn = Scenario(users=users, p_total=1.0, b_total=4e6, w1=0.5, w2=0.5)
    with pytest.raises(GridGuardError):
        grid_search(scn, [ScaAnchor(1e6)] * 4, GridSpec(points_per_axis=8))


def test_grid_guard_on_size():
    scn = two_user_scenario()
    with pytest.raises(GridGuardError):
        grid_search(scn, [ScaAnchor(1e6)] * 2, GridSpec(points_per_axis=4000))


def test_grid_single_user_converges_toward_solver(warm_kernels, config):
    scn = Scenario(users=(make_user(),), p_total=0.5, b_total=2e6, w1=0.5, w2=0.5)
    init = default_initial_allocation(scn)
    anchors = [ScaAnchor(float(b)) for b in init.b]
    fp = fractional_programming(anchors, init, scn, config)
    solver_val = solver.surrogate_objective(fp.allocation, scn, anchors)
    # nested grids (2^k + 1 points) without refinement: strictly monotone
    prev_gap = None
    for m in (17, 33, 65):
        _, grid_val = grid_search(scn, anchors, GridSpec(points_per_axis=m, refine=0))
        gap = grid_val - solver_val
        assert gap >= -1e-6 * abs(solver_val), "grid must stay an upper bound"
        if prev_gap is not None:
            assert gap <= prev_gap + 1e-12, "a nested finer grid never increases the best value"
        prev_gap = gap
    # one refinement pass never hurts and lands within 2% at 64 points/axis
    _, refined = grid_search(scn, anchors, GridSpec(points_per_axis=64, refine=1))
    _, unrefined = grid_search(scn, anchors, GridSpec(points_per_axis=64, refine=0))
    assert refined <= unrefined + 1e-12
    assert refined - solver_val <= 0.02 * abs(solver_val)


def test_grid_symmetric_two_user_best_is_symmetric(warm_kernels):
    # pin the size at its cap so the shared size grid cannot tip the balance
    scn = two_user_scenario(h0=1e-11, h1=1e-11, s_max=2e4)
    anchors = [ScaAnchor(scn.b_total / 2)] * 2
    best, _ = grid_search(scn, anchors, GridSpec(points_per_axis=33))
    step_p = (scn.p_total - 2e-3) / 32
    step_b = scn.b_total / 32
    assert abs(best.p[0] - best.p[1]) <= step_p + 1e-12
    assert abs(best.b[0] - best.b[1]) <= step_b + 1e-12


def test_grid_two_user_matches_fp_solution(warm_kernels, config):
    scn = two_user_scenario()
    init = default_initial_allocation(scn)
    anchors = [ScaAnchor(float(b)) for b in init.b]
    fp = fractional_programming(anchors, init, scn, config)
    solver_val = solver.surrogate_objective(fp.allocation, scn, anchors)
    _, grid_val = grid_search(scn, anchors, GridSpec(points_per_axis=64, refine=1))
    assert solver_val <= grid_val * (1 + 2e-2) + 2e-2 * abs(grid_val)
    assert abs(solver_val - grid_val) <= 0.02 * abs(grid_val)


def test_grid_three_user_upper_bound(warm_kernels, config):
    users = (make_user(1e-11), make_user(6e-12), make_user(3e-12))
    scn = Scenario(users=users, p_total=0.6, b_total=3e6, w1=0.5, w2=0.5)
    init = default_initial_allocation(scn)
    anchors = [ScaAnchor(float(b)) for b in init.b]
    fp = fractional_programming(anchors, init, scn, config)
    solver_val = solver.surrogate_objective(fp.allocation, scn, anchors)
    best, grid_val = grid_search(scn, anchors, GridSpec(points_per_axis=24))
    assert grid_val >= solver_val - 1e-6 * abs(solver_val)
    assert np.sum(best.p) <= scn.p_total * (1 + 1e-9)
    assert np.sum(best.b) <= scn.b_total * (1 + 1e-9)


def test_grid_uses_only_primitive_evaluations():
    # independence: the oracle module must not import the solver internals
    import secomm.oracle as module
    source = open(module.__file__).read()
    assert "from .solver" not in source and "import solver" not in source

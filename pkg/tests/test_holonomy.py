import numpy as np
import pytest

from conftest import rot
from symplab.cocycle import constant, evaluate, fiber_bunching_margin, from_matrices, holder_window, random_generator
from symplab.errors import NotConverged, NotOnLeafError
from symplab.holonomy import (
    ProjectivePoint,
    cauchy_ratio,
    holonomy,
    holonomy_properties_check,
    projective_act,
    projective_dist,
    stable_holonomy,
    unstable_holonomy,
)
from symplab.linalg import symplectic_inverse
from symplab.shift import ShiftSpace, SymbolicPoint, sample_point


def _variant(x, seed, lo, hi):
    """``x`` with fresh random symbols on ``[lo, hi)``; ``x``'s core must cover that range."""
    assert x.start <= lo and hi <= x.stop
    core = x.core.copy()
    core[lo - x.start:hi - x.start] = np.random.default_rng(seed).integers(0, 2, hi - lo)
    return SymbolicPoint(x.left, core, x.right, x.origin)


def future_variant(x, seed, width=6):
    return _variant(x, seed, 0, width)


def past_variant(x, seed, width=6):
    return _variant(x, seed, -width, 0)


def test_constant_generator_identity():
    A = constant(np.diag([2.0, 0.5]))
    x = SymbolicPoint("0", "1", "0")
    y = SymbolicPoint("1", "1", "0")
    assert np.array_equal(stable_holonomy(A, x, y).matrix, np.eye(2))


def test_depth0_stable_is_identity():
    A = from_matrices([np.diag([2.0, 0.5]), rot(0.4)])
    x = SymbolicPoint("0", "10", "1", origin=2)
    y = SymbolicPoint("1", "01", "1", origin=2)
    h = stable_holonomy(A, x, y)
    assert np.array_equal(h.matrix, np.eye(2)) and h.exact


def test_depth1_single_difference():
    A = random_generator(3, ell=1, depth=1)
    x = SymbolicPoint("0", "0", "1", origin=1)  # x_{-1} = 0
    y = SymbolicPoint("0", "1", "1", origin=1)  # y_{-1} = 1
    h = stable_holonomy(A, x, y)
    expected = symplectic_inverse(np.asarray(evaluate(A, y))) @ np.asarray(evaluate(A, x))
    assert h.depth_used == 1 and h.exact
    assert np.allclose(h.matrix, expected, atol=1e-14)


def test_depth0_unstable_identity():
    A = from_matrices([np.diag([2.0, 0.5]), rot(0.4)])
    x = SymbolicPoint("0", "011", "1")
    y = SymbolicPoint("0", "110", "0")
    h = unstable_holonomy(A, x, y)
    assert np.array_equal(h.matrix, np.eye(2)) and h.depth_used == 0


def test_unstable_self_identity():
    A = random_generator(4, ell=2, depth=2)
    x = sample_point(ShiftSpace(), 1, 10)
    assert np.array_equal(unstable_holonomy(A, x, x).matrix, np.eye(4))


def test_leaf_errors():
    A = random_generator(4, ell=1, depth=1)
    x = SymbolicPoint("0", "1", "0")
    with pytest.raises(NotOnLeafError):
        stable_holonomy(A, x, SymbolicPoint("0", "1", "1"))
    with pytest.raises(NotOnLeafError):
        unstable_holonomy(A, x, SymbolicPoint("1", "1", "0"))
    with pytest.raises(ValueError):
        holonomy(A, x, x, side="x")


def test_n_max_not_converged():
    A = holder_window(0, ell=1, depth=8, scale=0.4)
    x = SymbolicPoint("0", "1", "1")
    y = SymbolicPoint("1", "1", "1")
    with pytest.raises(NotConverged):
        stable_holonomy(A, x, y, tol=1e-30, n_max=3)


def test_properties_constant_exact():
    A = constant(np.diag([2.0, 3.0, 0.5, 1 / 3]))
    x = sample_point(ShiftSpace(), 0, 10)
    rep = holonomy_properties_check(A, x, future_variant(x, 1), future_variant(x, 2))
    assert rep.identity_residual == rep.composition_residual == rep.equivariance_residual == 0.0


def test_properties_fiber_bunched():
    A = random_generator(5, ell=2, depth=1, scale=0.05)
    assert fiber_bunching_margin(A) <= 0.9
    x = sample_point(ShiftSpace(), 5, 20)
    rep = holonomy_properties_check(A, x, future_variant(x, 1), future_variant(x, 2), tol=1e-10)
    assert rep.composition_residual <= 1e-9
    assert rep.passed(1e-8)
    rep_s = holonomy_properties_check(A, x, past_variant(x, 3), past_variant(x, 4), tol=1e-10, side="s")
    assert rep_s.passed(1e-8)


def test_lipschitz_constant_stable_across_samples():
    A = random_generator(6, ell=1, depth=1, scale=0.1)
    cs = []
    for s in range(20):
        x = sample_point(ShiftSpace(), s, 20)
        cs.append(holonomy_properties_check(A, x, future_variant(x, s + 100), future_variant(x, s + 200)).lipschitz_C1)
    assert np.all(np.isfinite(cs)) and max(cs) < 10 * (np.median(cs) + 1e-12) + 1.0


def test_cauchy_ratio_below_margin():
    A = holder_window(0, ell=1, depth=8, scale=0.1)
    margin = fiber_bunching_margin(A)
    x = SymbolicPoint("0", "1", "01")
    y = SymbolicPoint("1", "1", "01")
    h = stable_holonomy(A, x, y)
    assert 0 < cauchy_ratio(h) <= margin + 0.1


def test_projective_examples():
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    v = ProjectivePoint(e1)
    assert projective_dist(projective_act(np.eye(2), v), v) == 0.0
    assert projective_dist(projective_act(np.diag([2.0, 0.5]), v), v) == 0.0
    assert projective_dist(projective_act(rot(np.pi / 2), v), ProjectivePoint(e2)) <= 1e-15
    assert projective_dist(ProjectivePoint(e1), ProjectivePoint(-e1)) == 0.0


def test_report_json_shape():
    A = random_generator(3, ell=1, depth=1)
    x = sample_point(ShiftSpace(), 2, 10)
    d = unstable_holonomy(A, x, future_variant(x, 9)).to_json()
    assert {"side", "depth_used", "cauchy_gap", "matrix"} <= set(d)
    assert d["matrix"]["ell"] == 1

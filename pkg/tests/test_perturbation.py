import math

import numpy as np
import pytest

from symplab.cocycle import constant, diagonal_walk, evaluate, holder_distance, iterate, random_generator
from symplab.errors import ConstraintViolation, SeparationFailure
from symplab.linalg import symplectic_defect
from symplab.perturbation import (
    BumpProfile,
    breaking_avoid_set,
    breaking_check,
    bump,
    canonical_perturbation,
    compose,
    eta_budget,
    holder_bound,
    localized_rotation_cocycle,
    rotation_Rt,
)
from symplab.shift import ShiftSpace, SymbolicPoint, heteroclinic_point, periodic_point, sample_point, shift
from symplab.spectral import eigenvalues


def test_bump_examples():
    d = 0.3
    assert bump(0.0, d) == 1.0
    assert bump(2 * d, d) == 0.0
    ts = np.linspace(0.5 * d, d, 50)
    vals = [bump(t, d) for t in ts]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert 0.0 < bump(0.75 * d, d) < 1.0
    # symmetric gluing: the midpoint of the transition is 1/2
    assert bump(0.75 * d, d) == pytest.approx(0.5)
    assert BumpProfile(d)(0.1) == 1.0


def test_rotation_examples():
    assert np.array_equal(np.asarray(rotation_Rt("plane2", 0.0, 0.3)), np.eye(2))
    R = np.asarray(rotation_Rt("plane2", 1.0, math.pi / 2))
    assert np.allclose(np.abs(R @ np.array([1.0, 0.0])), [0.0, 1.0], atol=1e-15)
    R4 = rotation_Rt("complex_saddle4", 0.5, 0.8, planes=(0, 1))
    assert symplectic_defect(R4) <= 1e-12
    ev = eigenvalues(R4)
    assert np.allclose(sorted(ev.imag), [-math.sin(0.4)] * 2 + [math.sin(0.4)] * 2, atol=1e-7)
    assert np.allclose(ev.real, math.cos(0.4), atol=1e-7)
    with pytest.raises(ValueError):
        rotation_Rt("plane2", 0.5, 0.1, planes=(3,), ell=2)


def test_canonical_perturbations():
    eta = 0.2
    ev = sorted(eigenvalues(canonical_perturbation("saddle_center_i", eta)).real)
    assert ev == pytest.approx(sorted([1.0, 1 + eta, 1.0, 1 / (1 + eta)]))
    ev = eigenvalues(canonical_perturbation("hyperbolic_ii", eta))
    assert np.all(ev.imag == 0) and len(set(np.round(ev.real, 12))) == 4
    assert np.array_equal(np.asarray(canonical_perturbation("hyperbolic_ii", 0.0)), np.eye(4))
    assert np.array_equal(np.asarray(canonical_perturbation("hyperbolic_iv", 0.0)), np.eye(2))
    with pytest.raises(ConstraintViolation):
        canonical_perturbation("hyperbolic_iv", 1.0)


def test_localized_eta_zero_is_identity():
    A = random_generator(0, ell=2, depth=1)
    loc = localized_rotation_cocycle(A, sample_point(ShiftSpace(), 0, 5), 2, 0.0)
    assert np.array_equal(loc.S.table, np.broadcast_to(np.eye(4), loc.S.table.shape))


def test_localized_support_and_bound():
    A = random_generator(1, ell=1, depth=1, scale=0.4)
    site = sample_point(ShiftSpace(), 1, 6)
    loc = localized_rotation_cocycle(A, site, 2, 0.1)
    assert np.allclose(np.asarray(evaluate(loc.S, site)), loc.rotation)
    # any point leaving the depth-2 cylinder sees the identity
    off = SymbolicPoint(site.left, site.core.copy(), site.right, site.origin)
    core = off.core.copy()
    core[off.origin + 2] ^= 1
    off = SymbolicPoint(site.left, core, site.right, site.origin)
    assert np.array_equal(np.asarray(evaluate(loc.S, off)), np.eye(2))
    B = compose(A, loc)
    assert holder_distance(A, B) <= holder_bound(A, loc.rotation, 2) + 1e-12


def test_compose_identity_and_off_support():
    A = random_generator(2, ell=1, depth=1)
    site = sample_point(ShiftSpace(), 2, 6)
    loc = localized_rotation_cocycle(A, site, 2, 0.0)
    assert holder_distance(compose(A, loc), A) == 0.0
    loc = localized_rotation_cocycle(A, site, 2, 0.3)
    B = compose(A, loc)
    A2 = A.with_depth(B.depth)
    off = np.setdiff1d(np.arange(B.n_windows), loc.support)
    assert np.array_equal(B.table[off], A2.table[off])
    x = sample_point(ShiftSpace(), 3, 30)
    lhs = np.asarray(iterate(B, x, 12))
    rhs = np.asarray(iterate(B, shift(x, 5), 7)) @ np.asarray(iterate(B, x, 5))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_separation_failure():
    A = diagonal_walk()
    p, q = periodic_point("0"), periodic_point("1")
    z = heteroclinic_point(p, q)
    avoid = breaking_avoid_set(p, q, z, 2, 1)
    with pytest.raises(SeparationFailure):
        localized_rotation_cocycle(A, p, 2, 0.1, avoid=avoid)
    loc = localized_rotation_cocycle(A, shift(z, 1), 2, 0.1, avoid=avoid)
    assert loc.certificate.ok


def test_eta_budget_formula():
    A = constant(np.diag([2.0, 0.5]))
    assert eta_budget(A, 1.0, 2) == pytest.approx(0.25 / 4)


def test_breaking_check_identity_cases():
    A = diagonal_walk()
    p, q = periodic_point("0"), periodic_point("1")
    z = heteroclinic_point(p, q)
    rA = breaking_check(A, A, p, q, z)
    assert rA.hu_equal and rA.obstruction == pytest.approx(0.0, abs=1e-12)
    loc = localized_rotation_cocycle(A, shift(z, 1), 2, 0.0)
    r0 = breaking_check(A, compose(A, loc), p, q, z)
    assert r0.hu_equal and r0.obstruction == rA.obstruction


def test_breaking_demo():
    A = diagonal_walk()
    p, q = periodic_point("0"), periodic_point("1")
    z = heteroclinic_point(p, q)
    avoid = breaking_avoid_set(p, q, z, 2, 1)
    B = compose(A, localized_rotation_cocycle(A, shift(z, 1), 2, 0.1, avoid=avoid))
    r = breaking_check(A, B, p, q, z)
    assert r.hu_equal and r.obstruction > 0.01

import math

import numpy as np
import pytest

from conftest import rot
from symplab.cocycle import constant, from_matrices, identity, orthosymplectic, random_generator
from symplab.linalg import SubspaceClass, omega
from symplab.lyapunov import (
    LyapunovSpectrum,
    omega_decay_check,
    oseledets_pairing,
    pairing_defect,
    periodic_spectrum,
    qr_spectrum,
    qr_spectrum_matrices,
)
from symplab.shift import ShiftSpace, periodic_point, sample_point


def test_qr_constant_hyperbolic():
    s = qr_spectrum(constant(np.diag([2.0, 0.5])), periodic_point("0"), 1000)
    assert s.exponents == pytest.approx([math.log(2), -math.log(2)], abs=1e-12)


def test_qr_rotation_valued():
    n = 20_000
    A = orthosymplectic(3, ell=2, depth=1)
    s = qr_spectrum(A, sample_point(ShiftSpace(), 3, n), n)
    assert np.max(np.abs(s.exponents)) <= 10.0 / n


def test_qr_identity_exact():
    s = qr_spectrum(identity(2), periodic_point("01"), 500)
    assert np.array_equal(s.exponents, np.zeros(4))


def test_periodic_spectrum_examples():
    ps = periodic_spectrum(constant(np.diag([3.0, 1 / 3])), periodic_point("0"))
    assert ps.exponents == pytest.approx([math.log(3), -math.log(3)], abs=1e-14)
    ps = periodic_spectrum(from_matrices([rot(0.3), rot(1.1)]), periodic_point("01"))
    assert ps.exponents == pytest.approx([0.0, 0.0], abs=1e-14)
    ps = periodic_spectrum(from_matrices([np.diag([2.0, 0.5]), np.diag([3.0, 1 / 3])]), periodic_point("01"))
    assert ps.exponents == pytest.approx([0.5 * math.log(6), -0.5 * math.log(6)], abs=1e-14)


@pytest.mark.parametrize("ex, expected", [((1, -1), 0.0), ((1, 0, 0, -1), 0.0), ((1, 0.5, 0, -1), 0.5)])
def test_pairing_defect(ex, expected):
    assert pairing_defect(ex) == pytest.approx(expected)


def test_spectrum_ordering_and_csv():
    s = LyapunovSpectrum.from_exponents([-0.2, 0.5, 0.2, -0.5], 10)
    assert list(s.exponents) == [0.5, 0.2, -0.2, -0.5]
    lines = s.to_csv().splitlines()
    assert lines[0] == "index,exponent,n_used,pairing_defect,sum_defect"
    assert len(lines) == 5


def test_qr_matches_periodic_oracle():
    A = random_generator(2, ell=2, depth=1, scale=0.5)
    p = periodic_point("0111")
    n = 1000 * p.period
    s = qr_spectrum(A, p, n)
    assert np.max(np.abs(s.exponents - periodic_spectrum(A, p).exponents)) <= 1e-2


def test_qr_matrices_constant():
    mats = np.repeat(np.diag([2.0, 3.0, 0.5, 1 / 3])[None], 200, axis=0)
    s = qr_spectrum_matrices(mats)
    assert s.exponents == pytest.approx(np.log([3, 2, 0.5, 1 / 3]), abs=1e-12)


def test_oseledets_hyperbolic_2x2():
    o = oseledets_pairing(np.diag([2.0, 0.5]))
    assert np.allclose(o.vectors, np.eye(2))
    assert omega(o.vectors[:, 0], o.vectors[:, 1]) == pytest.approx(1.0)


def test_oseledets_block_diagonal():
    X = np.array([[2.0, 1.0], [1.0, 1.0]])  # det 1, hyperbolic
    Y = np.array([[3.0, 1.0], [2.0, 1.0]])
    M = np.zeros((4, 4))
    # X acts on (e1, e3), Y on (e2, e4)
    M[np.ix_([0, 2], [0, 2])] = X
    M[np.ix_([1, 3], [1, 3])] = Y
    o = oseledets_pairing(M)
    assert o.cross_omega <= 1e-10
    assert all(c is SubspaceClass.SYMPLECTIC for c in o.plane_classes)
    assert o.expanding_class is SubspaceClass.LAGRANGIAN


def test_oseledets_center_pair():
    o = oseledets_pairing(rot(0.9))
    assert omega(o.vectors[:, 0], o.vectors[:, 1]) == pytest.approx(1.0)


def test_omega_decay_eigenvectors():
    A = random_generator(12, ell=2, depth=1, scale=0.6)
    p = periodic_point("011")
    ps = periodic_spectrum(A, p)
    assert ps.simple_real
    base = oseledets_pairing(A, p)
    l = base.exponents
    # both contracting: the form vanishes identically
    assert l[2] + l[3] < 0
    rep = omega_decay_check(A, p, 2, 3)
    assert rep.passed and np.max(rep.omega_values) <= 1e-10
    # matched plane: omega constant 1
    rep = omega_decay_check(A, p, 0, 2)
    assert rep.omega_values == pytest.approx(np.ones_like(rep.omega_values), abs=1e-8)
    assert l[0] + l[2] == pytest.approx(0.0, abs=1e-10)


def test_omega_decay_perturbed_directions():
    A = constant(np.diag([3.0, 2.0, 1 / 3, 0.5]))
    p = periodic_point("0")
    base = oseledets_pairing(A, p)
    rng = np.random.default_rng(0)
    # the perturbation grows like 3^n, so stop before it dominates
    u = base.vectors[:, 2] + 1e-12 * rng.normal(size=4)
    v = base.vectors[:, 3] + 1e-12 * rng.normal(size=4)
    rep = omega_decay_check(A, p, 2, 3, n_max=10, directions=(u, v))
    assert abs(rep.fitted_rate - rep.target_rate) <= 0.1 * abs(rep.target_rate)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rot
from symplab.cocycle import (
    CocycleGenerator,
    code_window,
    constant,
    diagonal_walk,
    domination_check,
    evaluate,
    fiber_bunching_margin,
    from_matrices,
    holder_distance,
    holder_norm,
    identity,
    iterate,
    orbit_codes,
    orthosymplectic,
    random_generator,
    window_code,
)
from symplab.errors import ShapeMismatchError, SymplecticDriftError
from symplab.linalg import symplectic_defect
from symplab.shift import ShiftSpace, SymbolicPoint, periodic_point, sample_point, shift

M0 = np.diag([2.0, 0.5])
M1 = rot(0.3)


def test_window_code_roundtrip():
    for c in range(27):
        assert window_code(code_window(c, 3, 3), 3) == c
    # most significant digit is the leftmost symbol
    assert window_code((1, 0, 0), 2) == 4


def test_orbit_codes_match_windows():
    x = SymbolicPoint("01", "0011101", "1", origin=3)
    codes = orbit_codes(x, 1, 2, -5, 12)
    for j, c in enumerate(codes):
        assert code_window(c, 2, 3) == x.window(j - 5, 1)


def test_evaluate_depth0_fixed_point():
    A = from_matrices([M0, M1])
    assert np.array_equal(np.asarray(evaluate(A, periodic_point("0"))), M0)


def test_evaluate_constant_on_cylinders():
    A = random_generator(1, ell=1, depth=2)
    x = sample_point(ShiftSpace(), 4, 20)
    y = SymbolicPoint("1", x.symbols(-2, 3), "1", origin=2)  # agrees on |i| <= 2
    assert np.array_equal(np.asarray(evaluate(A, x)), np.asarray(evaluate(A, y)))


def test_iterate_examples():
    A = from_matrices([M0, M1])
    p = periodic_point("01")
    assert np.array_equal(np.asarray(iterate(A, p, 0)), np.eye(2))
    # A^3(p) = A(f^2 p) A(f p) A(p) with p_0 = 0, p_1 = 1, p_2 = 0
    assert np.allclose(np.asarray(iterate(A, p, 3)), M0 @ M1 @ M0, atol=1e-14)
    C = constant(M0)
    assert np.allclose(np.asarray(iterate(C, periodic_point("0"), 5)), np.linalg.matrix_power(M0, 5))


def test_iterate_negative_is_inverse():
    A = random_generator(3, ell=2, depth=1)
    x = sample_point(ShiftSpace(), 3, 30)
    F = np.asarray(iterate(A, x, 7))
    B = np.asarray(iterate(A, shift(x, 7), -7))
    assert np.allclose(B @ F, np.eye(4), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 15), st.integers(0, 15))
def test_cocycle_law(seed, m, n):
    A = random_generator(seed, ell=2, depth=1)
    x = sample_point(ShiftSpace(), seed, 40)
    lhs = np.asarray(iterate(A, x, m + n))
    rhs = np.asarray(iterate(A, shift(x, m), n)) @ np.asarray(iterate(A, x, m))
    assert np.allclose(lhs, rhs, atol=1e-9 * max(1, np.abs(lhs).max()))


def test_long_product_uses_kernel_and_stays_symplectic():
    A = orthosymplectic(2, ell=2, depth=1, noise=0.05)
    x = sample_point(ShiftSpace(), 2, 5000)
    assert symplectic_defect(np.asarray(iterate(A, x, 10_000))) <= 1e-6


def test_generator_validation():
    with pytest.raises(ShapeMismatchError):
        CocycleGenerator(2, 1, 0, 1.0, np.array([np.eye(2)]))
    with pytest.raises(SymplecticDriftError):
        CocycleGenerator(2, 1, 0, 1.0, np.array([np.eye(2), 2 * np.eye(2)]))
    with pytest.raises(ValueError):
        CocycleGenerator(2, 1, 0, 0.0, np.array([np.eye(2)] * 2))


def test_json_roundtrip():
    A = random_generator(7, ell=1, depth=1)
    B = CocycleGenerator.from_json(A.to_json())
    assert np.array_equal(A.table, B.table)


def test_with_depth_preserves_values():
    A = random_generator(8, ell=1, depth=1)
    A2 = A.with_depth(3)
    x = sample_point(ShiftSpace(), 1, 20)
    assert np.array_equal(np.asarray(iterate(A, x, 9)), np.asarray(iterate(A2, x, 9)))
    assert holder_distance(A, A2) == 0.0


def test_holder_distance_examples():
    A = random_generator(9, ell=1, depth=1)
    assert holder_distance(A, A) == 0.0
    E = np.asarray(rot(0.2)) - np.eye(2)
    B = from_matrices([np.eye(2), np.eye(2)])
    C = from_matrices([np.eye(2), rot(0.2)])
    # sup term |E| plus the quotient over the pair at distance 1
    assert holder_distance(B, C) == pytest.approx(2 * np.linalg.norm(E, 2), rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_holder_distance_triangle(seed):
    A, B, C = (random_generator(seed + i, ell=1, depth=1 + i % 2) for i in range(3))
    assert holder_distance(A, C) <= holder_distance(A, B) + holder_distance(B, C) + 1e-12


def test_holder_norm_orthogonal_constant():
    h = holder_norm(constant(rot(0.4)))
    assert h.sup_norm == pytest.approx(1.0)
    assert h.holder_quotient == 0.0


def test_fiber_bunching_examples():
    assert fiber_bunching_margin(orthosymplectic(0, ell=1, depth=1)) == pytest.approx(0.5)
    assert fiber_bunching_margin(constant(M0)) == pytest.approx(2.0)
    # nu = 1/2 scales the margin by lam**(1/2 - 1)
    A = random_generator(4, ell=1, depth=1, nu=0.5)
    A1 = CocycleGenerator(A.k, A.ell, A.depth, 1.0, A.table)
    assert fiber_bunching_margin(A) == pytest.approx(fiber_bunching_margin(A1) * 0.5 ** -0.5)


def test_domination_examples():
    R = orthosymplectic(1, ell=2, depth=1)
    x = sample_point(ShiftSpace(), 0, 50)
    assert domination_check(R, x, 3, 1e-6, 8).passed
    D = constant(M0)
    res = domination_check(D, periodic_point("0"), 1, 0.5, 4)
    assert not res.passed and res.first_failure == 1
    assert domination_check(D, periodic_point("0"), 1, 2 * np.log(2) + 1e-9, 4).passed


def test_domination_monotone_in_theta():
    A = random_generator(5, ell=2, depth=1, scale=0.6)
    x = sample_point(ShiftSpace(), 5, 60)
    thetas = np.linspace(0.01, 2.0, 25)
    passes = [domination_check(A, x, 2, t, 6).passed for t in thetas]
    assert passes == sorted(passes)


def test_diagonal_walk_is_diagonal():
    A = diagonal_walk(0.25, 0.05)
    assert A.depth == 1
    for M in A.table:
        assert np.count_nonzero(M - np.diag(np.diag(M))) == 0
        assert M[0, 0] * M[1, 1] == pytest.approx(1.0)


def test_identity_generator():
    I = identity(2)
    assert np.array_equal(np.asarray(iterate(I, periodic_point("01"), 4)), np.eye(4))

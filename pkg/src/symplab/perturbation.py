"""Cylinder-localised symplectic perturbations and the breaking check.

A smooth bump on the shift collapses to (almost) an indicator: with
``delta = lam**(2d)`` the profile evaluated at ``dist(y, site)**2`` equals 1
on the depth-``d`` cylinder around ``site`` whenever ``lam <= 1/sqrt(2)`` and
vanishes off it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import CocycleGenerator, code_window, compose_tables, holder_distance, sup_norm
from .errors import ConstraintViolation, NotSimpleReal, SeparationFailure, ShapeMismatchError
from .holonomy import projective_act, projective_dist, stable_holonomy, unstable_holonomy
from .linalg import SympMatrix, symplectic_defect, symplectic_inverse
from .lyapunov import periodic_spectrum
from .shift import PeriodicPoint, ShiftSpace, SymbolicPoint, shift, word_str


def _smooth(s):
    return math.exp(-1.0 / s) if s > 0 else 0.0


def bump(t: float, delta: float) -> float:
    """C-infinity step: 1 on ``[0, delta/2]``, 0 on ``[delta, inf)``, decreasing between."""
    if t < 0 or delta <= 0:
        raise ValueError("need t >= 0 and delta > 0")
    if t <= delta / 2:
        return 1.0
    if t >= delta:
        return 0.0
    s = (delta - t) / (delta / 2)
    a, b = _smooth(s), _smooth(1 - s)
    return a / (a + b)


@dataclass(frozen=True)
class BumpProfile:
    delta: float

    def __call__(self, t: float) -> float:
        return bump(t, self.delta)


def _plane_rotation(dim, i, theta):
    ell = dim // 2
    R = np.eye(dim)
    c, s = math.cos(theta), math.sin(theta)
    R[i, i], R[i, ell + i] = c, -s
    R[ell + i, i], R[ell + i, ell + i] = s, c
    return R


def rotation_Rt(kind: str, t: float, eps: float, planes=(0,), ell: int | None = None, basis=None) -> SympMatrix:
    """Rotation by ``t * eps``.

    ``plane2`` rotates each plane ``(e_i, e_i^)`` for ``i`` in ``planes``.
    ``complex_saddle4`` takes ``planes = (i, j)`` and rotates ``(e_i, e_j)``
    and ``(e_i^, e_j^)`` together, the block form ``diag(R, R)``.
    ``basis`` (columns ``e_1 .. e_l, e_1^ .. e_l^``) defaults to the standard one.
    """
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    if ell is None:
        ell = basis.shape[0] // 2 if basis is not None else (2 if kind == "complex_saddle4" else 1)
    dim = 2 * ell
    theta = t * eps
    if any(not 0 <= i < ell for i in planes):
        raise ValueError(f"plane index out of range for ell={ell}")
    if kind == "plane2":
        R = np.eye(dim)
        for i in planes:
            R = _plane_rotation(dim, i, theta) @ R
    elif kind == "complex_saddle4":
        if len(planes) != 2 or planes[0] == planes[1]:
            raise ValueError("complex_saddle4 needs two distinct plane indices")
        i, j = planes
        c, s = math.cos(theta), math.sin(theta)
        R = np.eye(dim)
        for a, b in ((i, j), (ell + i, ell + j)):
            R[a, a], R[a, b], R[b, a], R[b, b] = c, -s, s, c
    else:
        raise ValueError(f"unknown rotation kind {kind!r}")
    if basis is not None:
        R = basis @ R @ symplectic_inverse(basis)
    return SympMatrix(R)


def canonical_perturbation(case: str, eta: float, basis=None, planes=(0, 1)) -> SympMatrix:
    """Diagonal spectrum-splitting matrices.

    ``saddle_center_i``: ``diag(1, 1+eta, 1, 1/(1+eta))``;
    ``hyperbolic_ii``: ``diag(1-eta, 1+eta, 1/(1-eta), 1/(1+eta))``;
    ``hyperbolic_iv``: ``diag(1-eta, 1/(1-eta))``.
    With ``basis`` the matrix acts on the planes ``planes`` of that basis.
    """
    if case == "saddle_center_i":
        d = [1.0, 1.0 + eta]
    elif case == "hyperbolic_ii":
        d = [1.0 - eta, 1.0 + eta]
    elif case == "hyperbolic_iv":
        d = [1.0 - eta]
    else:
        raise ValueError(f"unknown perturbation case {case!r}")
    if any(x == 0 for x in d):
        raise ConstraintViolation(f"eta = {eta} makes the perturbation singular")
    D = np.diag(d + [1.0 / x for x in d])
    if basis is None:
        return SympMatrix(D)
    basis = np.asarray(basis, dtype=float)
    ell = basis.shape[0] // 2
    idx = list(planes[:len(d)])
    E = np.eye(2 * ell)
    for a, i in enumerate(idx):
        E[i, i] = d[a]
        E[ell + i, ell + i] = 1.0 / d[a]
    return SympMatrix(basis @ E @ symplectic_inverse(basis))


def in_basis(R_local, basis) -> np.ndarray:
    return basis @ R_local @ symplectic_inverse(basis)


def orbit_windows(points, depth: int):
    """Window codes (as tuples) of the given points, keyed by label."""
    return {label: pt.window(0, depth) for label, pt in points}


@dataclass
class SeparationCertificate:
    site_window: str
    checked: int
    hits: list

    @property
    def ok(self) -> bool:
        return not self.hits


@dataclass
class LocalizedCocycle:
    S: CocycleGenerator
    eta: float
    basis: np.ndarray
    site: SymbolicPoint
    cyl_depth: int
    certificate: SeparationCertificate | None
    support: list = field(default_factory=list)

    @property
    def rotation(self) -> np.ndarray:
        return self.S.table[self.support[0]] if self.support else np.eye(self.S.dim)


def check_separation(site: SymbolicPoint, cyl_depth: int, avoid, allow=()) -> SeparationCertificate:
    """Exhaustive check that no point in ``avoid`` (labelled points) lies in
    the depth-``cyl_depth`` cylinder around ``site``, except those in ``allow``."""
    w = site.window(0, cyl_depth)
    hits = []
    allowed = {a for a in allow}
    for label, pt in avoid:
        if label in allowed:
            continue
        if pt.window(0, cyl_depth) == w:
            hits.append(label)
    return SeparationCertificate(word_str(w), len(avoid), hits)


def breaking_avoid_set(p: PeriodicPoint, q: PeriodicPoint, z: SymbolicPoint, depth: int, site_step: int):
    """Orbit points that must stay off the support: the orbits of ``p`` and
    ``q`` and every iterate of ``z`` other than ``f^{site_step} z``.

    Iterates of ``z`` beyond the returned range share their window with a
    point of the ``p`` or ``q`` orbit, so the finite list is exhaustive.
    """
    pts = [(f"p{j}", shift(p, j)) for j in range(p.period)]
    pts += [(f"q{j}", shift(q, j)) for j in range(q.period)]
    lo = z.start - depth - q.period
    hi = max(z.stop, site_step) + depth + p.period
    pts += [(f"z{j}", shift(z, j)) for j in range(lo, hi + 1) if j != site_step]
    return pts


def localized_rotation_cocycle(A: CocycleGenerator, site: SymbolicPoint, cyl_depth: int, eta: float,
                               basis=None, avoid=(), space: ShiftSpace = ShiftSpace()) -> LocalizedCocycle:
    """``S(y)`` rotates by ``phi(dist(y, site)^2) * eta`` in every plane ``(e_i, e_i^)``.

    Parameters
    ----------
    A : CocycleGenerator
        Supplies alphabet, dimension and Hoelder exponent.
    site : SymbolicPoint
        Centre of the cylinder.
    cyl_depth : int
        The support is contained in ``{y : y_i = site_i for |i| <= cyl_depth}``.
    eta : float
        Rotation angle at the centre.
    basis : array_like, optional
        Symplectic base ``(e_1 .. e_l, e_1^ .. e_l^)`` as columns.
    avoid : sequence of (label, SymbolicPoint)
        Points that must lie off the cylinder.

    Raises
    ------
    SeparationFailure
        If a point of ``avoid`` falls inside the cylinder.
    """
    dim = A.dim
    P = np.eye(dim) if basis is None else np.asarray(basis, dtype=float)
    if P.shape != (dim, dim):
        raise ShapeMismatchError("basis has the wrong shape")
    if symplectic_defect(P) > 1e-8 * max(1.0, np.linalg.norm(P, 2) ** 2):
        raise ConstraintViolation("rotation basis is not symplectic")
    cert = None
    if avoid:
        cert = check_separation(site, cyl_depth, avoid)
        if not cert.ok:
            raise SeparationFailure(f"cylinder {cert.site_window} also contains {cert.hits}")
    lam = space.lam
    delta = lam ** (2 * cyl_depth)
    # smallest agreement radius at which the bump saturates
    n_sat = cyl_depth + 1
    while bump(lam ** (2 * n_sat), delta) < 1.0:
        n_sat += 1
    depth = max(cyl_depth, n_sat - 1)
    k = A.k
    n_win = k ** (2 * depth + 1)
    table = np.broadcast_to(np.eye(dim), (n_win, dim, dim)).copy()
    centre = np.array(site.window(0, depth))
    Pinv = symplectic_inverse(P)
    support = []
    if eta != 0:
        for code in range(n_win):
            w = np.array(code_window(code, k, 2 * depth + 1))
            diff = np.nonzero(w != centre)[0]
            N = depth + 1 if diff.size == 0 else int(np.min(np.abs(diff - depth)))
            phi = bump(lam ** (2 * N), delta)
            if phi == 0.0:
                continue
            R = np.eye(dim)
            for i in range(A.ell):
                R = _plane_rotation(dim, i, phi * eta) @ R
            table[code] = P @ R @ Pinv
            support.append(code)
    S = CocycleGenerator(k, A.ell, depth, A.nu, table, tol=1e-8)
    return LocalizedCocycle(S, eta, P, site, cyl_depth, cert, support)


def compose(A: CocycleGenerator, S) -> CocycleGenerator:
    """``B(y) = A(y) S(y)`` at the common depth."""
    S = S.S if isinstance(S, LocalizedCocycle) else S
    return compose_tables(A, S)


def eta_budget(A: CocycleGenerator, epsilon: float, cyl_depth: int, basis=None,
               space: ShiftSpace = ShiftSpace()) -> float:
    """Largest angle with ``|A - A S|_{0,nu} <= epsilon`` for a depth-``cyl_depth`` rotation.

    ``|S - I| <= cond(P) * eta`` and the Hoelder quotient of an indicator of a
    depth-``d`` cylinder is ``lam**(-d nu)``, whence
    ``eta <= epsilon lam**(d nu) / (2 |A| cond(P))``.
    """
    kappa = 1.0 if basis is None else float(np.linalg.cond(np.asarray(basis, dtype=float), 2))
    return epsilon * space.lam ** (cyl_depth * A.nu) / (2.0 * sup_norm(A) * kappa)


def holder_bound(A: CocycleGenerator, S_matrix, cyl_depth: int, space: ShiftSpace = ShiftSpace()) -> float:
    """``|A| (1 + lam**(-d nu)) |S - I|``."""
    gap = float(np.linalg.norm(np.asarray(S_matrix) - np.eye(A.dim), 2))
    return sup_norm(A) * (1 + space.lam ** (-cyl_depth * A.nu)) * gap


@dataclass
class BreakingReport:
    hu_equal: bool
    obstruction: float
    matching: np.ndarray
    eta: float | None = None
    cyl_depth: int | None = None
    holder_distance: float | None = None
    hs_exact: bool = True
    hu_depth: int = 0

    def to_json(self) -> dict:
        return {"hu_equal": self.hu_equal, "obstruction": self.obstruction, "eta": self.eta,
                "cyl_depth": self.cyl_depth, "holder_distance": self.holder_distance,
                "hs_exact": self.hs_exact, "matching": self.matching.tolist()}


def periodic_eigenbasis(A: CocycleGenerator, p: PeriodicPoint) -> np.ndarray:
    ps = periodic_spectrum(A, p)
    if not ps.simple_real:
        raise NotSimpleReal(f"A^pi at {word_str(p.word)} is not simple-real")
    return ps.eigenvectors


def obstruction_matrix(A: CocycleGenerator, p: PeriodicPoint, q: PeriodicPoint, z: SymbolicPoint,
                       tol: float = 1e-10):
    """``d_P(h^s_{p,z} v_i, h^u_{q,z} w_j)`` for eigenbases ``v`` at ``p`` and ``w`` at ``q``."""
    V = periodic_eigenbasis(A, p)
    W = periodic_eigenbasis(A, q)
    hs = stable_holonomy(A, p, z, tol=tol)
    hu = unstable_holonomy(A, q, z, tol=tol)
    D = np.array([[projective_dist(projective_act(hs, V[:, i]), projective_act(hu, W[:, j]))
                   for j in range(W.shape[1])] for i in range(V.shape[1])])
    return D, hs, hu


def breaking_check(A: CocycleGenerator, B: CocycleGenerator, p: PeriodicPoint, q: PeriodicPoint,
                   z: SymbolicPoint, tol: float = 1e-10, space: ShiftSpace = ShiftSpace()) -> BreakingReport:
    """Unstable holonomies at ``z`` agree for ``A`` and ``B`` while the
    stable transport of the atoms at ``p`` misses the atoms from ``q``."""
    hu_A = unstable_holonomy(A, q, z, tol=tol)
    hu_B = unstable_holonomy(B, q, z, tol=tol)
    n = max(hu_A.depth_used, hu_B.depth_used, max(A.depth, B.depth) + 1)
    fa = A.table[A.codes_along(z, n, start=-n)]
    fb = B.table[B.codes_along(z, n, start=-n)]
    qa = A.table[A.codes_along(q, n, start=-n)]
    qb = B.table[B.codes_along(q, n, start=-n)]
    equal = (np.array_equal(hu_A.matrix, hu_B.matrix) and np.array_equal(fa, fb) and np.array_equal(qa, qb))
    D, hs, _ = obstruction_matrix(B, p, q, z, tol)
    dist_ab = holder_distance(A, B, space) if (A.k, A.ell, A.nu) == (B.k, B.ell, B.nu) else None
    return BreakingReport(bool(equal), float(D.min()), D, None, None, dist_ab, hs.exact, hu_B.depth_used)

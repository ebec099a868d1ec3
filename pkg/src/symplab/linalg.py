"""Symplectic linear algebra on R^{2l}.

Conventions
-----------
The group test uses ``J = [[0, -I], [I, 0]]``: a matrix ``A`` is symplectic
when ``A.T @ J @ A == J``.  The bilinear form is ``omega(u, v) = u.T @ Omega @ v``
with ``Omega = -J``, so that ``omega(e_i, e_{l+i}) = +1``.  Both descriptions
define the same group.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateBasisError,
    NotSymplecticError,
    SeriesNotConverged,
    ShapeMismatchError,
    SymplecticDriftError,
)

EPS_SYMP = 1e-9
EPS_FORM = 1e-8
EPS_DRIFT = 1e-6


@dataclass(frozen=True, eq=False)
class StandardForm:
    ell: int
    J: np.ndarray
    Omega: np.ndarray

    @property
    def dim(self):
        return 2 * self.ell


@lru_cache(maxsize=None)
def standard_form(ell: int) -> StandardForm:
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    eye = np.eye(ell)
    zero = np.zeros((ell, ell))
    J = np.block([[zero, -eye], [eye, zero]])
    J.setflags(write=False)
    Omega = -J
    Omega.setflags(write=False)
    return StandardForm(ell, J, Omega)


def _form_for(dim, form=None):
    if dim % 2:
        raise ShapeMismatchError(f"odd dimension {dim}")
    if form is None:
        return standard_form(dim // 2)
    if form.dim != dim:
        raise ShapeMismatchError(f"form has dimension {form.dim}, data has {dim}")
    return form


def omega(u, v, form: StandardForm | None = None) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ShapeMismatchError(f"vectors of shapes {u.shape} and {v.shape}")
    form = _form_for(u.shape[0], form)
    return float(u @ form.Omega @ v)


def symplectic_defect(M, form: StandardForm | None = None) -> float:
    """Max-abs entry of ``M.T J M - J``; zero iff ``M`` is symplectic."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {M.shape}")
    form = _form_for(M.shape[0], form)
    return float(np.max(np.abs(M.T @ form.J @ M - form.J)))


def symplectic_inverse(M) -> np.ndarray:
    """Inverse of a symplectic matrix, ``J^{-1} M^T J``; exact up to rounding."""
    M = np.asarray(M, dtype=float)
    J = standard_form(M.shape[-1] // 2).J
    return -J @ np.swapaxes(M, -1, -2) @ J


class SympMatrix:
    """A 2l x 2l real matrix certified symplectic at construction.

    ``tol`` bounds the accepted defect; the default is the construction
    tolerance, products and long iterates are built with ``EPS_DRIFT``.
    """

    __slots__ = ("entries", "ell", "defect")

    def __init__(self, M, tol: float = EPS_SYMP):
        M = np.array(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ShapeMismatchError(f"not a 2l x 2l matrix: {M.shape}")
        defect = symplectic_defect(M)
        if not defect <= tol:
            err = SymplecticDriftError if tol >= EPS_DRIFT else NotSymplecticError
            raise err(f"symplectic defect {defect:.3e} exceeds {tol:.1e}")
        M.setflags(write=False)
        self.entries = M
        self.ell = M.shape[0] // 2
        self.defect = defect

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __matmul__(self, other):
        other = other.entries if isinstance(other, SympMatrix) else np.asarray(other)
        out = self.entries @ other
        if out.ndim == 2 and out.shape == self.entries.shape:
            return SympMatrix(out, tol=EPS_DRIFT)
        return out

    def __rmatmul__(self, other):
        return np.asarray(other) @ self.entries

    @property
    def shape(self):
        return self.entries.shape

    def inv(self) -> "SympMatrix":
        return SympMatrix(symplectic_inverse(self.entries), tol=EPS_DRIFT)

    def __repr__(self):
        return f"SympMatrix(ell={self.ell}, defect={self.defect:.2e},\n{self.entries!r})"


class SubspaceClass(enum.Enum):
    SYMPLECTIC = "Symplectic"
    ISOTROPIC = "Isotropic"
    LAGRANGIAN = "Lagrangian"
    MIXED = "Mixed"

    @property
    def is_isotropic(self):
        return self in (SubspaceClass.ISOTROPIC, SubspaceClass.LAGRANGIAN)


def _as_columns(basis, dim=None):
    vecs = [np.asarray(b, dtype=float) for b in basis]
    if not vecs:
        if dim is None:
            raise ShapeMismatchError("empty basis needs an explicit dimension")
        return np.zeros((dim, 0))
    B = np.column_stack(vecs)
    if dim is not None and B.shape[0] != dim:
        raise ShapeMismatchError(f"vectors of length {B.shape[0]}, expected {dim}")
    return B


def _check_independent(B, tol=1e-10):
    if B.shape[1] == 0:
        return
    norms = np.linalg.norm(B, axis=0)
    if np.any(norms == 0):
        raise DegenerateBasisError("zero vector in basis")
    sv = np.linalg.svd(B / norms, compute_uv=False)
    if B.shape[1] > B.shape[0] or sv[-1] < tol:
        raise DegenerateBasisError("basis vectors are linearly dependent")


def gram_omega(B, form: StandardForm | None = None) -> np.ndarray:
    """Gram matrix ``G[a, b] = omega(B[:, a], B[:, b])`` of the columns of ``B``."""
    B = np.asarray(B, dtype=float)
    form = _form_for(B.shape[0], form)
    return B.T @ form.Omega @ B


def classify_subspace(basis, form: StandardForm | None = None, tol: float = EPS_FORM) -> SubspaceClass:
    """Classify ``span(basis)`` as symplectic, isotropic, Lagrangian or mixed.

    Basis vectors are normalised to unit length before the zero tests so that
    ``tol`` is scale free.
    """
    dim = form.dim if form is not None else None
    B = _as_columns(basis, dim)
    form = _form_for(B.shape[0], form)
    _check_independent(B)
    if B.shape[1] == 0:
        return SubspaceClass.ISOTROPIC
    B = B / np.linalg.norm(B, axis=0)
    G = gram_omega(B, form)
    if np.max(np.abs(G)) <= tol:
        if B.shape[1] == form.ell:
            return SubspaceClass.LAGRANGIAN
        return SubspaceClass.ISOTROPIC
    if B.shape[1] % 2 == 0 and np.linalg.svd(G, compute_uv=False)[-1] > tol:
        return SubspaceClass.SYMPLECTIC
    return SubspaceClass.MIXED


def _omega_complement(C, form):
    """Orthonormal basis of ``{x : omega(c, x) = 0 for all columns c of C}``."""
    dim = form.dim
    if C.shape[1] == 0:
        return np.eye(dim)
    constraints = C.T @ form.Omega
    _, s, vt = np.linalg.svd(constraints)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


def _sgs_pairs(vectors, form, tol):
    """Symplectic Gram-Schmidt on the columns of ``vectors``.

    Returns (es, fs) with omega(e_i, f_j) = delta_ij and all other pairings 0,
    spanning the same space as ``vectors`` (which must span a symplectic space).
    """
    work = [vectors[:, i].copy() for i in range(vectors.shape[1])]
    es, fs = [], []
    while work:
        a = work.pop(0)
        if np.linalg.norm(a) <= tol:
            continue
        if not work:
            raise DegenerateBasisError("odd leftover vector: span is not symplectic")
        vals = [abs(omega(a, w, form)) for w in work]
        j = int(np.argmax(vals))
        if vals[j] <= tol * np.linalg.norm(a) * np.linalg.norm(work[j]):
            raise DegenerateBasisError("no symplectic partner found")
        b = work.pop(j)
        b = b / omega(a, b, form)
        es.append(a)
        fs.append(b)
        work = [x - omega(x, b, form) * a + omega(x, a, form) * b for x in work]
    return es, fs


def complete_symplectic_basis(partial, form: StandardForm | None = None, ell: int | None = None,
                              tol: float = EPS_FORM) -> np.ndarray:
    """Extend ``partial`` to a symplectic base of R^{2l}.

    If ``partial`` spans an isotropic subspace its vectors become the leading
    ``e_1 .. e_k`` unchanged.  If it spans a symplectic subspace, the first
    pairs span exactly that subspace.

    Returns
    -------
    P : ndarray (2l, 2l)
        Columns ``e_1 .. e_l, e_1^ .. e_l^`` with ``P.T @ Omega @ P == Omega``,
        i.e. ``P`` itself is a symplectic matrix.
    """
    if form is None and ell is not None:
        form = standard_form(ell)
    dim = form.dim if form is not None else None
    B = _as_columns(partial, dim)
    form = _form_for(B.shape[0], form)
    _check_independent(B)
    cls = classify_subspace(list(B.T), form, tol) if B.shape[1] else SubspaceClass.ISOTROPIC
    k = B.shape[1]
    if cls.is_isotropic:
        if k:
            V0 = form.Omega.T @ B @ np.linalg.inv(B.T @ B)
            G = V0.T @ form.Omega @ V0
            V = V0 + B @ (G / 2)
            es, fs = [B[:, i] for i in range(k)], [V[:, i] for i in range(k)]
        else:
            es, fs = [], []
    elif cls is SubspaceClass.SYMPLECTIC:
        es, fs = _sgs_pairs(B, form, tol)
    else:
        raise DegenerateBasisError("input spans neither an isotropic nor a symplectic subspace")

    used = np.column_stack(es + fs) if es else np.zeros((form.dim, 0))
    rest = _omega_complement(used, form)
    more_e, more_f = _sgs_pairs(rest, form, tol)
    es += more_e
    fs += more_f
    if len(es) != form.ell:
        raise DegenerateBasisError("could not complete the basis")
    P = np.column_stack(es + fs)
    err = np.max(np.abs(gram_omega(P, form) - form.Omega)) if P.size else 0.0
    scale = max(1.0, float(np.max(np.linalg.norm(P, axis=0))) ** 2)
    if err > tol * scale:
        raise DegenerateBasisError(f"symplectic Gram check failed ({err:.2e})")
    return P


def expm_series(X, max_terms: int = 64) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor series core.

    Accepts a single matrix or a stack of shape ``(..., d, d)``.
    """
    X = np.asarray(X, dtype=float)
    nrm = float(np.max(np.sum(np.abs(X), axis=-2))) if X.size else 0.0
    s = max(0, int(math.ceil(math.log2(nrm))) + 1) if nrm > 0.5 else 0
    Y = X / (2.0 ** s)
    eye = np.broadcast_to(np.eye(X.shape[-1]), X.shape)
    out = eye.copy()
    term = eye.copy()
    for n in range(1, max_terms + 1):
        term = term @ Y / n
        out = out + term
        if np.max(np.abs(term)) <= np.finfo(float).eps * np.min(np.max(np.abs(out), axis=(-2, -1))):
            break
    else:
        raise SeriesNotConverged(f"exponential series did not converge in {max_terms} terms")
    for _ in range(s):
        out = out @ out
    return out


def symplectic_exp(S) -> np.ndarray:
    """``exp(Omega @ S)`` for symmetric ``S``: a symplectic matrix."""
    S = np.asarray(S, dtype=float)
    S = (S + np.swapaxes(S, -1, -2)) / 2
    return expm_series(standard_form(S.shape[-1] // 2).Omega @ S)


def random_symmetric(rng, dim, scale):
    S = rng.uniform(-scale, scale, size=(dim, dim))
    return np.triu(S) + np.triu(S, 1).T


def random_symplectic(seed, ell: int, scale: float) -> SympMatrix:
    """Seeded ``exp(Omega S)`` with ``S`` symmetric, entries in [-scale, scale]."""
    if scale < 0:
        raise ValueError("scale must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    S = random_symmetric(rng, 2 * ell, scale)
    return SympMatrix(symplectic_exp(S))


def random_orthosymplectic(seed, ell: int) -> np.ndarray:
    """Seeded element of Sp(2l) ∩ O(2l), the realification of a unitary matrix."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Z = rng.normal(size=(ell, ell)) + 1j * rng.normal(size=(ell, ell))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    X, Y = Q.real, Q.imag
    return np.block([[X, -Y], [Y, X]])


def op_norm(M) -> float:
    return float(np.linalg.norm(np.asarray(M, dtype=float), 2))

"""Stable and unstable holonomies of locally constant symplectic cocycles.

For ``y`` on the stable leaf of ``x`` the truncations are
``H_n = A^n(y)^{-1} A^n(x)``.  Writing ``P_n = A^n(y)`` and
``M_n = A(f^n y)^{-1} A(f^n x)`` they satisfy

    H_{n+1} = (I + P_n^{-1} (M_n - I) P_n) H_n,

so steps whose windows agree leave ``H`` untouched bit for bit and the
increment is read off directly.  The unstable side is the same recursion
for the inverse cocycle along backward orbits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import CocycleGenerator, iterate
from .errors import NotConverged, NotOnLeafError
from .linalg import EPS_DRIFT, SympMatrix, op_norm, symplectic_inverse
from .shift import ShiftSpace, SymbolicPoint, dist, shift

TOL = 1e-10
N_MAX = 200


@dataclass
class Holonomy:
    map: SympMatrix
    from_point: SymbolicPoint
    to_point: SymbolicPoint
    side: str
    depth_used: int
    cauchy_gap: float
    exact: bool
    increments: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def matrix(self) -> np.ndarray:
        return self.map.entries

    def to_json(self) -> dict:
        return {"side": self.side, "depth_used": self.depth_used, "cauchy_gap": self.cauchy_gap,
                "exact": self.exact,
                "matrix": {"ell": self.map.ell, "rows": self.map.entries.tolist()}}


def _steps_needed(x, y, depth, side, local):
    """Number of steps after which every later factor agrees (0 if none differ)."""
    bounds = x.difference_bounds(y)
    if bounds is None:
        return 0
    i_min, i_max = bounds
    if side == "s":
        if i_max == math.inf or (local and i_max >= 0):
            raise NotOnLeafError("futures do not agree" + (" from index 0" if local else " eventually"))
        return max(0, int(i_max) + depth + 1)
    if i_min == -math.inf or (local and i_min < 0):
        raise NotOnLeafError("pasts do not agree" + (" below index 0" if local else " eventually"))
    return max(0, depth - int(i_min))


def _mismatch_limit(table, codes_x, codes_y, tol, n_exact, n_max):
    dim = table.shape[1]
    H = np.eye(dim)
    P = np.eye(dim)
    incs = []
    n_run = n_exact if n_exact <= n_max else n_max
    gap = 0.0
    for n in range(n_run):
        Fx, Fy = table[codes_x[n]], table[codes_y[n]]
        if codes_x[n] == codes_y[n] or np.array_equal(Fx, Fy):
            incs.append(0.0)
            P = Fy @ P
            continue
        M = symplectic_inverse(Fy) @ Fx
        D = symplectic_inverse(P) @ (M - np.eye(dim)) @ P
        step = D @ H
        H = H + step
        gap = op_norm(step)
        incs.append(gap)
        P = Fy @ P
        if n_exact > n_max and gap < tol:
            return H, n + 1, gap, False, np.array(incs)
    if n_exact <= n_max:
        # every later factor pair coincides: the limit is reached
        return H, n_exact, 0.0, True, np.array(incs)
    raise NotConverged(f"increment {gap:.2e} still above {tol:.1e} after {n_max} steps")


def stable_holonomy(A: CocycleGenerator, x: SymbolicPoint, y: SymbolicPoint, tol: float = TOL,
                    n_max: int = N_MAX, local: bool = True) -> Holonomy:
    """``H^s_{x,y} = lim A^n(y)^{-1} A^n(x)`` for ``y`` on the stable leaf of ``x``.

    With ``local=True`` the futures must agree from index 0; otherwise any
    eventual agreement is accepted.

    Raises
    ------
    NotOnLeafError
        If ``y`` is not on the required stable leaf.
    NotConverged
        If more than ``n_max`` steps are needed and the increments stay above ``tol``.
    """
    need = _steps_needed(x, y, A.depth, "s", local)
    L = min(need, n_max)
    cx, cy = A.codes_along(x, L), A.codes_along(y, L)
    H, used, gap, exact, incs = _mismatch_limit(A.table, cx, cy, tol, need, n_max)
    return Holonomy(SympMatrix(H, tol=EPS_DRIFT), x, y, "s", used, gap, exact, incs)


def inverse_table(A: CocycleGenerator) -> np.ndarray:
    inv = symplectic_inverse(A.table)
    inv.setflags(write=False)
    return inv


def unstable_holonomy(A: CocycleGenerator, x: SymbolicPoint, y: SymbolicPoint, tol: float = TOL,
                      n_max: int = N_MAX, local: bool = True) -> Holonomy:
    """``H^u_{x,y} = lim A^n(f^{-n} y) A^{-n}(x)`` for ``y`` on the unstable leaf of ``x``.

    ``A^{-n}(x) = G_{n-1} ... G_0`` with ``G_j = A(f^{-j-1} x)^{-1}``, so this
    is the stable recursion for the inverse cocycle along backward orbits.
    """
    need = _steps_needed(x, y, A.depth, "u", local)
    L = min(need, n_max)
    cx = A.codes_along(x, L, start=-L)[::-1] if L else np.zeros(0, dtype=np.int64)
    cy = A.codes_along(y, L, start=-L)[::-1] if L else np.zeros(0, dtype=np.int64)
    H, used, gap, exact, incs = _mismatch_limit(inverse_table(A), cx, cy, tol, need, n_max)
    return Holonomy(SympMatrix(H, tol=EPS_DRIFT), x, y, "u", used, gap, exact, incs)


def holonomy(A, x, y, side: str = "u", **kw) -> Holonomy:
    if side not in ("s", "u"):
        raise ValueError("side must be 's' or 'u'")
    return (stable_holonomy if side == "s" else unstable_holonomy)(A, x, y, **kw)


def unstable_truncation_factors(A: CocycleGenerator, x: SymbolicPoint, y: SymbolicPoint, n: int):
    """The factor matrices ``(A(f^{-j-1} x), A(f^{-j-1} y))`` entering the first ``n`` unstable steps."""
    cx = A.codes_along(x, n, start=-n)[::-1]
    cy = A.codes_along(y, n, start=-n)[::-1]
    return A.table[cx], A.table[cy]


# projective action

class ProjectivePoint:
    """A line in R^{2l}, stored as a unit vector with a fixed sign."""

    __slots__ = ("v",)

    def __init__(self, v):
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if not n > 0:
            raise ValueError("zero vector has no projective class")
        v = v / n
        k = int(np.argmax(np.abs(v)))
        self.v = v if v[k] > 0 else -v

    def __array__(self, dtype=None, copy=None):
        return self.v if dtype is None else self.v.astype(dtype)

    def __repr__(self):
        return f"ProjectivePoint({np.array2string(self.v, precision=6)})"


def projective_dist(u, v) -> float:
    """``min(|u - v|, |u + v|)`` on unit representatives."""
    u = np.asarray(u.v if isinstance(u, ProjectivePoint) else ProjectivePoint(u).v)
    v = np.asarray(v.v if isinstance(v, ProjectivePoint) else ProjectivePoint(v).v)
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def projective_act(H, v) -> ProjectivePoint:
    M = H.matrix if isinstance(H, Holonomy) else np.asarray(H, dtype=float)
    v = v.v if isinstance(v, ProjectivePoint) else np.asarray(v, dtype=float)
    return ProjectivePoint(M @ v)


@dataclass
class HolonomyReport:
    side: str
    identity_residual: float
    composition_residual: float
    equivariance_residual: float
    lipschitz_C1: float
    projective_residual: float

    def passed(self, tol: float = 1e-8) -> bool:
        return max(self.identity_residual, self.composition_residual,
                   self.equivariance_residual, self.projective_residual) <= tol


def holonomy_properties_check(A: CocycleGenerator, x: SymbolicPoint, y: SymbolicPoint, z: SymbolicPoint,
                              tol: float = TOL, side: str = "u", js=range(-3, 4),
                              space: ShiftSpace = ShiftSpace(), seed=0) -> HolonomyReport:
    """Identity, composition, equivariance and Lipschitz checks on one leaf.

    Residuals are relative: ``|X - Y| / max(1, |Y|)`` in operator norm.
    Equivariance is ``H_{f^j y, f^j z} = A^j(z) H_{y,z} A^j(y)^{-1}``.
    """
    def H(a, b, local=True):
        return holonomy(A, a, b, side, tol=tol, local=local).matrix

    def rel(X, Y):
        return op_norm(X - Y) / max(1.0, op_norm(Y))

    ident = rel(H(x, x), np.eye(A.dim))
    Hxy, Hyz, Hxz = H(x, y), H(y, z), H(x, z)
    comp = rel(Hyz @ Hxy, Hxz)
    equi = 0.0
    for j in js:
        lhs = H(shift(y, j), shift(z, j), local=False)
        rhs = np.asarray(iterate(A, z, j)) @ Hyz @ symplectic_inverse(np.asarray(iterate(A, y, j)))
        equi = max(equi, rel(lhs, rhs))
    c1 = 0.0
    for a, b, M in ((x, y, Hxy), (y, z, Hyz), (x, z, Hxz)):
        d = dist(a, b, space)
        if d > 0:
            c1 = max(c1, op_norm(M - np.eye(A.dim)) / d)
    rng = np.random.default_rng(seed)
    v = ProjectivePoint(rng.normal(size=A.dim))
    proj = projective_dist(projective_act(Hyz, projective_act(Hxy, v)), projective_act(Hxz, v))
    return HolonomyReport(side, ident, comp, equi, c1, proj)


def cauchy_ratio(h: Holonomy) -> float:
    """Geometric ratio fitted to the nonzero increments of a truncated holonomy."""
    inc = np.asarray(h.increments)
    n = np.nonzero(inc > 0)[0]
    if len(n) < 3:
        return 0.0
    slope = np.polyfit(n, np.log(inc[n]), 1)[0]
    return float(math.exp(slope))

"""Locally constant symplectic cocycles over the full shift.

A generator of depth ``m`` is a table indexed by windows
``(x_{-m}, ..., x_m)``; the window code is the base-``k`` integer with
``x_{-m}`` as the most significant digit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import chain_product
from .errors import ShapeMismatchError, SymplecticDriftError
from .linalg import (
    EPS_DRIFT,
    EPS_SYMP,
    SympMatrix,
    random_orthosymplectic,
    random_symmetric,
    standard_form,
    symplectic_defect,
    symplectic_exp,
    symplectic_inverse,
)
from .shift import SYMBOLS, ShiftSpace, SymbolicPoint, shift, word_str


def window_code(window, k: int) -> int:
    code = 0
    for s in window:
        code = code * k + int(s)
    return code


def code_window(code: int, k: int, length: int) -> tuple:
    digits = []
    for _ in range(length):
        code, r = divmod(code, k)
        digits.append(r)
    return tuple(reversed(digits))


def orbit_codes(x: SymbolicPoint, depth: int, k: int, start: int, n: int) -> np.ndarray:
    """Window codes of ``f^j x`` for ``j = start .. start + n - 1``."""
    syms = x.symbols(start - depth, start + n + depth)
    codes = np.zeros(n, dtype=np.int64)
    for t in range(2 * depth + 1):
        codes = codes * k + syms[t:t + n]
    return codes


class CocycleGenerator:
    """Symplectic-valued function of the window ``x_{-m} .. x_m``.

    Parameters
    ----------
    k : int
        Alphabet size.
    ell : int
        Half-dimension of the fibre.
    depth : int
        Window radius ``m``.
    nu : float
        Hoelder exponent in ``(0, 1]``.
    table : array_like, shape (k**(2m+1), 2l, 2l)
        Matrices indexed by window code.
    """

    def __init__(self, k: int, ell: int, depth: int, nu: float, table, tol: float = EPS_SYMP):
        table = np.array(table, dtype=float)
        dim = 2 * ell
        n_win = k ** (2 * depth + 1)
        if table.shape != (n_win, dim, dim):
            raise ShapeMismatchError(f"table of shape {table.shape}, expected {(n_win, dim, dim)}")
        if not 0 < nu <= 1:
            raise ValueError("nu must lie in (0, 1]")
        J = standard_form(ell).J
        defects = np.max(np.abs(np.einsum("wji,jk,wkl->wil", table, J, table) - J), axis=(1, 2))
        if np.max(defects) > tol:
            bad = int(np.argmax(defects))
            raise SymplecticDriftError(
                f"window {word_str(code_window(bad, k, 2 * depth + 1))} has defect {defects[bad]:.2e}")
        table.setflags(write=False)
        self.k, self.ell, self.depth, self.nu = int(k), int(ell), int(depth), float(nu)
        self.table = table
        self.max_defect = float(np.max(defects))

    @property
    def dim(self) -> int:
        return 2 * self.ell

    @property
    def n_windows(self) -> int:
        return self.table.shape[0]

    def __repr__(self):
        return f"CocycleGenerator(k={self.k}, ell={self.ell}, depth={self.depth}, nu={self.nu})"

    def windows(self):
        return itertools.product(range(self.k), repeat=2 * self.depth + 1)

    def matrix(self, window) -> np.ndarray:
        w = _window_tuple(window)
        if len(w) != 2 * self.depth + 1:
            raise ShapeMismatchError(f"window of length {len(w)} for depth {self.depth}")
        return self.table[window_code(w, self.k)]

    def with_depth(self, depth: int) -> "CocycleGenerator":
        """Same function of ``x`` tabulated over wider windows."""
        if depth < self.depth:
            raise ValueError("cannot shrink the window")
        if depth == self.depth:
            return self
        n = 2 * depth + 1
        pad = depth - self.depth
        codes = np.arange(self.k ** n, dtype=np.int64)
        inner = (codes // self.k ** pad) % (self.k ** (2 * self.depth + 1))
        return CocycleGenerator(self.k, self.ell, depth, self.nu, self.table[inner])

    def codes_along(self, x: SymbolicPoint, n: int, start: int = 0) -> np.ndarray:
        if x.max_symbol() >= self.k:
            raise ValueError(f"point uses symbols outside [0, {self.k})")
        return orbit_codes(x, self.depth, self.k, start, n)

    def to_json(self) -> dict:
        entries = [{"window": word_str(code_window(c, self.k, 2 * self.depth + 1)),
                    "matrix": {"ell": self.ell, "rows": self.table[c].tolist()}}
                   for c in range(self.n_windows)]
        return {"k": self.k, "ell": self.ell, "depth": self.depth, "nu": self.nu, "entries": entries}

    @classmethod
    def from_json(cls, d: dict) -> "CocycleGenerator":
        k, ell, depth = int(d["k"]), int(d["ell"]), int(d["depth"])
        table = np.full((k ** (2 * depth + 1), 2 * ell, 2 * ell), np.nan)
        for e in d["entries"]:
            w = _window_tuple(e["window"])
            if len(w) != 2 * depth + 1:
                raise ShapeMismatchError(f"window {e['window']!r} does not have length {2 * depth + 1}")
            table[window_code(w, k)] = np.asarray(e["matrix"]["rows"], dtype=float)
        if np.isnan(table).any():
            raise ValueError("generator table is not total over windows")
        return cls(k, ell, depth, float(d.get("nu", 1.0)), table)


def _window_tuple(window) -> tuple:
    if isinstance(window, str):
        return tuple(SYMBOLS.index(c) for c in window)
    return tuple(int(s) for s in window)


def evaluate(A: CocycleGenerator, x: SymbolicPoint) -> SympMatrix:
    return SympMatrix(A.table[A.codes_along(x, 1)[0]])


def _product(table, codes) -> np.ndarray:
    if len(codes) > 64:
        return chain_product(table, codes)
    P = np.eye(table.shape[1])
    for c in codes:
        P = table[c] @ P
    return P


def iterate(A: CocycleGenerator, x: SymbolicPoint, n: int) -> SympMatrix:
    """``A^n(x) = A(f^{n-1} x) ... A(x)``; for ``n < 0`` the inverse of ``A^{-n}(f^n x)``."""
    if n == 0:
        return SympMatrix(np.eye(A.dim))
    if n > 0:
        P = _product(A.table, A.codes_along(x, n))
    else:
        P = symplectic_inverse(_product(A.table, A.codes_along(x, -n, start=n)))
    defect = symplectic_defect(P)
    if not defect <= EPS_DRIFT:
        raise SymplecticDriftError(f"A^{n}(x) has symplectic defect {defect:.2e}")
    return SympMatrix(P, tol=EPS_DRIFT)


@dataclass(frozen=True)
class HolderNorm:
    sup_norm: float
    holder_quotient: float
    nu: float

    @property
    def total(self) -> float:
        return self.sup_norm + self.holder_quotient


def _spectral_norms(X) -> np.ndarray:
    return np.linalg.norm(X, ord=2, axis=(-2, -1))


def holder_norm_table(table, k: int, depth: int, nu: float, lam: float) -> HolderNorm:
    """Exact shift-space Hoelder norm of a locally constant matrix function.

    A pair of windows first differing at ``|i| = j`` is realised by points at
    distance ``lam**j``, so the quotient is a finite maximum.  Pairs sharing
    all coordinates with ``|i| < j`` are grouped and divided by ``lam**(j nu)``;
    pairs agreeing further out only get a smaller weight, so the maximum is
    unchanged.
    """
    table = np.asarray(table, dtype=float)
    norms = _spectral_norms(table)
    sup = float(norms.max())
    n = 2 * depth + 1
    digits = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(-1, n)
    quotient = 0.0
    for j in range(depth + 1):
        inner = digits[:, depth - j + 1:depth + j] if j > 0 else digits[:, :0]
        keys = inner @ (k ** np.arange(inner.shape[1], dtype=np.int64)) if inner.shape[1] else np.zeros(len(digits), dtype=np.int64)
        best = 0.0
        for key in np.unique(keys):
            group = table[keys == key]
            best = max(best, _max_pair_gap(group))
        quotient = max(quotient, best / lam ** (j * nu))
    return HolderNorm(sup, quotient, nu)


def _max_pair_gap(group) -> float:
    g = len(group)
    if g < 2:
        return 0.0
    chunk = max(1, (1 << 21) // (g * group[0].size))
    best = 0.0
    for a in range(0, g, chunk):
        D = group[a:a + chunk, None] - group[None, :]
        best = max(best, float(_spectral_norms(D).max()))
    return best


def holder_distance(A: CocycleGenerator, B: CocycleGenerator, space: ShiftSpace = ShiftSpace()) -> float:
    """``sup|A - B| + Hoelder quotient of A - B`` over the shift metric."""
    if (A.k, A.ell, A.nu) != (B.k, B.ell, B.nu):
        raise ShapeMismatchError("generators differ in alphabet, dimension or exponent")
    m = max(A.depth, B.depth)
    A, B = A.with_depth(m), B.with_depth(m)
    return holder_norm_table(A.table - B.table, A.k, m, A.nu, space.lam).total


def holder_norm(A: CocycleGenerator, space: ShiftSpace = ShiftSpace()) -> HolderNorm:
    return holder_norm_table(A.table, A.k, A.depth, A.nu, space.lam)


def sup_norm(A: CocycleGenerator) -> float:
    return float(_spectral_norms(A.table).max())


def fiber_bunching_margin(A: CocycleGenerator, space: ShiftSpace = ShiftSpace()) -> float:
    """``max_w |A(w)| |A(w)^{-1}| lam**nu``; below 1 means fibre-bunched."""
    inv = symplectic_inverse(A.table)
    return float(np.max(_spectral_norms(A.table) * _spectral_norms(inv)) * space.lam ** A.nu)


@dataclass(frozen=True)
class DominationResult:
    passed: bool
    first_failure: int | None
    log_products: np.ndarray

    def __bool__(self):
        return self.passed


def domination_check(A: CocycleGenerator, x: SymbolicPoint, N: int, theta: float, k_max: int) -> DominationResult:
    """Test ``prod_{j<k} |A^N(f^{jN}x)| |A^N(f^{jN}x)^{-1}| <= exp(k N theta)`` for ``k <= k_max``."""
    if N < 1 or k_max < 1 or not theta > 0:
        raise ValueError("need N >= 1, k_max >= 1 and theta > 0")
    logs = np.empty(k_max)
    acc = 0.0
    first = None
    for j in range(k_max):
        B = np.asarray(iterate(A, shift(x, j * N), N))
        acc += math.log(np.linalg.norm(B, 2)) + math.log(np.linalg.norm(symplectic_inverse(B), 2))
        logs[j] = acc
        if first is None and acc > (j + 1) * N * theta * (1 + 1e-12) + 1e-12:
            first = j + 1
    return DominationResult(first is None, first, logs)


# builders

def from_matrices(matrices, k: int = 2, depth: int = 0, nu: float = 1.0) -> CocycleGenerator:
    """Generator from a mapping ``window -> matrix`` or a sequence in code order."""
    if isinstance(matrices, dict):
        mats = [None] * (k ** (2 * depth + 1))
        for w, M in matrices.items():
            w = _window_tuple(w) if not isinstance(w, int) else (w,)
            mats[window_code(w, k)] = np.asarray(M, dtype=float)
        if any(M is None for M in mats):
            raise ValueError("generator table is not total over windows")
    else:
        mats = [np.asarray(M, dtype=float) for M in matrices]
    return CocycleGenerator(k, mats[0].shape[0] // 2, depth, nu, np.stack(mats))


def constant(M, k: int = 2, depth: int = 0, nu: float = 1.0) -> CocycleGenerator:
    M = np.asarray(M, dtype=float)
    return CocycleGenerator(k, M.shape[0] // 2, depth, nu, np.broadcast_to(M, (k ** (2 * depth + 1),) + M.shape))


def identity(ell: int, k: int = 2, depth: int = 0, nu: float = 1.0) -> CocycleGenerator:
    return constant(np.eye(2 * ell), k, depth, nu)


def orthosymplectic(seed, k: int = 2, ell: int = 1, depth: int = 1, nu: float = 1.0,
                    noise: float = 0.0) -> CocycleGenerator:
    """Rotation-valued generator (values in Sp ∩ O), optionally times ``exp(Omega S)``."""
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(k ** (2 * depth + 1)):
        M = random_orthosymplectic(rng, ell)
        if noise > 0:
            M = M @ symplectic_exp(random_symmetric(rng, 2 * ell, noise))
        mats.append(M)
    return CocycleGenerator(k, ell, depth, nu, np.stack(mats))


def random_generator(seed, k: int = 2, ell: int = 2, depth: int = 1, scale: float = 0.3,
                     nu: float = 1.0) -> CocycleGenerator:
    """Independent ``exp(Omega S_w)`` per window, ``S_w`` uniform symmetric in ``[-scale, scale]``."""
    rng = np.random.default_rng(seed)
    mats = [symplectic_exp(random_symmetric(rng, 2 * ell, scale)) for _ in range(k ** (2 * depth + 1))]
    return CocycleGenerator(k, ell, depth, nu, np.stack(mats))


def holder_window(seed, k: int = 2, ell: int = 1, depth: int = 6, scale: float = 0.3,
                  nu: float = 1.0, lam: float = 0.5) -> CocycleGenerator:
    """``A(w) = exp(Omega sum_i lam^{|i| nu} S_i[w_i])``: genuinely Hoelder in every coordinate."""
    rng = np.random.default_rng(seed)
    dim = 2 * ell
    S = np.array([[random_symmetric(rng, dim, scale) for _ in range(k)] for _ in range(2 * depth + 1)])
    weights = lam ** (np.abs(np.arange(-depth, depth + 1)) * nu)
    digits = np.array(list(itertools.product(range(k), repeat=2 * depth + 1)))
    X = np.zeros((len(digits), dim, dim))
    for t in range(2 * depth + 1):
        X += weights[t] * S[t, digits[:, t]]
    return CocycleGenerator(k, ell, depth, nu, symplectic_exp(X))


def diagonal_walk(c: float = 0.25, b: float = 0.05, nu: float = 1.0) -> CocycleGenerator:
    """Two-symbol, depth-1 generator ``diag(e^s, e^{-s})`` with
    ``s = c (1 - 2 x_0) + b (x_0 - x_{-1})``.

    Under the uniform Bernoulli measure ``s`` has mean zero, so the top
    exponent vanishes; the fixed points ``0`` and ``1`` are hyperbolic and
    every holonomy is diagonal.
    """
    mats = []
    for w in itertools.product(range(2), repeat=3):
        s = c * (1 - 2 * w[1]) + b * (w[1] - w[0])
        mats.append(np.diag([math.exp(s), math.exp(-s)]))
    return CocycleGenerator(2, 1, 1, nu, np.stack(mats))


def compose_tables(A: CocycleGenerator, S: CocycleGenerator) -> CocycleGenerator:
    """Pointwise product ``A(y) S(y)`` at the common depth."""
    if (A.k, A.ell) != (S.k, S.ell):
        raise ShapeMismatchError("generators differ in alphabet or dimension")
    m = max(A.depth, S.depth)
    A2, S2 = A.with_depth(m), S.with_depth(m)
    return CocycleGenerator(A.k, A.ell, m, A.nu, A2.table @ S2.table, tol=EPS_DRIFT)

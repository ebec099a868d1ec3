"""Full shift on k symbols: the uniformly hyperbolic base system.

Points are eventually periodic bi-infinite sequences stored as
``(left, core, right, origin)``: ``core[origin]`` is coordinate 0, the word
``left`` repeats towards -inf (its last symbol sits just before the core) and
``right`` repeats towards +inf starting right after the core.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PointsTooFar

SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _word(w) -> np.ndarray:
    if isinstance(w, np.ndarray):
        arr = w.astype(np.int64, copy=False)
    elif isinstance(w, str):
        arr = np.fromiter((SYMBOLS.index(c) for c in w), dtype=np.int64, count=len(w))
    else:
        arr = np.asarray(list(w), dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("words are one-dimensional")
    arr = arr.copy() if arr.flags.writeable else arr
    arr.setflags(write=False)
    return arr


def word_str(w) -> str:
    return "".join(SYMBOLS[int(s)] for s in w)


@dataclass(frozen=True)
class ShiftSpace:
    """Full shift on ``k`` symbols with metric ``lam**N`` and a Bernoulli measure."""

    k: int = 2
    lam: float = 0.5
    weights: tuple = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("alphabet needs at least two symbols")
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        w = (1.0 / self.k,) * self.k if self.weights is None else tuple(float(x) for x in self.weights)
        if len(w) != self.k or min(w) < 0 or not math.isclose(sum(w), 1.0, abs_tol=1e-12):
            raise ValueError(f"invalid Bernoulli weights {w}")
        object.__setattr__(self, "weights", w)

    @property
    def K(self):
        return 1.0

    @property
    def tau(self):
        return -math.log(self.lam)


@dataclass(frozen=True, eq=False)
class SymbolicPoint:
    left: np.ndarray
    core: np.ndarray
    right: np.ndarray
    origin: int = 0

    def __init__(self, left, core=(), right=None, origin=0):
        left = _word(left)
        right = left if right is None else _word(right)
        if len(left) == 0 or len(right) == 0:
            raise ValueError("tails must be non-empty words")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "core", _word(core))
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "origin", int(origin))

    # index bookkeeping: the core occupies [start, stop)
    @property
    def start(self):
        return -self.origin

    @property
    def stop(self):
        return -self.origin + len(self.core)

    def __getitem__(self, i: int) -> int:
        if self.start <= i < self.stop:
            return int(self.core[i - self.start])
        if i >= self.stop:
            return int(self.right[(i - self.stop) % len(self.right)])
        return int(self.left[(i - self.start) % len(self.left)])

    def symbols(self, lo: int, hi: int) -> np.ndarray:
        """Coordinates ``lo .. hi-1`` as an int array (vectorised accessor)."""
        idx = np.arange(lo, hi, dtype=np.int64)
        out = np.empty(idx.shape, dtype=np.int64)
        mid = (idx >= self.start) & (idx < self.stop)
        out[mid] = self.core[idx[mid] - self.start]
        hi_mask = idx >= self.stop
        out[hi_mask] = self.right[(idx[hi_mask] - self.stop) % len(self.right)]
        lo_mask = idx < self.start
        out[lo_mask] = self.left[(idx[lo_mask] - self.start) % len(self.left)]
        return out

    def window(self, i: int, m: int) -> tuple:
        return tuple(int(s) for s in self.symbols(i - m, i + m + 1))

    def max_symbol(self) -> int:
        return int(max(self.left.max(), self.right.max(), self.core.max() if len(self.core) else 0))

    def _span(self, other):
        lo = min(self.start, other.start)
        hi = max(self.stop, other.stop)
        lcm_l = math.lcm(len(self.left), len(other.left))
        lcm_r = math.lcm(len(self.right), len(other.right))
        return lo - lcm_l, hi + lcm_r

    def __eq__(self, other):
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        lo, hi = self._span(other)
        return bool(np.array_equal(self.symbols(lo, hi), other.symbols(lo, hi)))

    def __hash__(self):
        return hash(self.symbols(-16, 17).tobytes())

    def difference_bounds(self, other):
        """``(i_min, i_max)`` over positions where the points differ.

        ``i_min`` is ``-inf`` when the left tails never synchronise and
        ``i_max`` is ``+inf`` when the right tails never do; returns None
        for equal points.
        """
        lo, hi = self._span(other)
        tail_l = math.lcm(len(self.left), len(other.left))
        tail_r = math.lcm(len(self.right), len(other.right))
        diff = np.nonzero(self.symbols(lo, hi) != other.symbols(lo, hi))[0]
        left_bad = not np.array_equal(self.symbols(lo - tail_l, lo), other.symbols(lo - tail_l, lo))
        right_bad = not np.array_equal(self.symbols(hi, hi + tail_r), other.symbols(hi, hi + tail_r))
        if diff.size == 0 and not (left_bad or right_bad):
            return None
        i_min = -math.inf if left_bad else lo + int(diff[0])
        i_max = math.inf if right_bad else lo + int(diff[-1])
        return i_min, i_max

    def __repr__(self):
        return (f"SymbolicPoint(left={word_str(self.left)!r}, core={word_str(self.core)!r}, "
                f"right={word_str(self.right)!r}, origin={self.origin})")

    def to_json(self) -> dict:
        return {"left": word_str(self.left), "core": word_str(self.core),
                "right": word_str(self.right), "origin": self.origin}

    @classmethod
    def from_json(cls, d) -> "SymbolicPoint":
        return cls(d["left"], d.get("core", ""), d.get("right", d["left"]), d.get("origin", 0))


@dataclass(frozen=True, eq=False)
class PeriodicPoint(SymbolicPoint):
    word: np.ndarray = field(default=None)

    def __init__(self, word):
        w = _word(word)
        if len(w) == 0:
            raise ValueError("periodic word must be non-empty")
        super().__init__(w, (), w, 0)
        object.__setattr__(self, "word", w)

    @property
    def period(self) -> int:
        return len(self.word)

    def __repr__(self):
        return f"PeriodicPoint({word_str(self.word)!r})"

    __eq__ = SymbolicPoint.__eq__
    __hash__ = SymbolicPoint.__hash__


def shift(x: SymbolicPoint, n: int = 1) -> SymbolicPoint:
    """Apply the shift ``n`` times: coordinate ``i`` of the result is ``x[i + n]``."""
    if isinstance(x, PeriodicPoint):
        r = n % x.period
        return PeriodicPoint(np.roll(x.word, -r))
    return SymbolicPoint(x.left, x.core, x.right, x.origin + n)


def inverse_shift(x: SymbolicPoint) -> SymbolicPoint:
    return shift(x, -1)


def agreement_radius(x: SymbolicPoint, y: SymbolicPoint) -> float:
    """Largest ``N`` with ``x_i == y_i`` for all ``|i| < N`` (``inf`` if equal)."""
    lo, hi = x._span(y)
    R = max(abs(lo), abs(hi)) + 1
    idx = np.arange(-R, R + 1)
    diff = idx[x.symbols(-R, R + 1) != y.symbols(-R, R + 1)]
    if diff.size == 0:
        return math.inf
    return int(np.min(np.abs(diff)))


def dist(x: SymbolicPoint, y: SymbolicPoint, space: ShiftSpace = ShiftSpace()) -> float:
    N = agreement_radius(x, y)
    return 0.0 if N == math.inf else space.lam ** N


def bracket(x: SymbolicPoint, y: SymbolicPoint, space: ShiftSpace = ShiftSpace(),
            delta: float | None = None) -> SymbolicPoint:
    """``[x, y]``: past of ``x`` (``i < 0``) spliced to the future of ``y`` (``i >= 0``)."""
    delta = space.lam if delta is None else delta
    if dist(x, y, space) >= delta:
        raise PointsTooFar(f"dist(x, y) = {dist(x, y, space):.3g} >= delta = {delta:.3g}")
    return splice(x, y)


def splice(past: SymbolicPoint, future: SymbolicPoint) -> SymbolicPoint:
    """Point agreeing with ``past`` on ``i < 0`` and with ``future`` on ``i >= 0``."""
    lo = min(past.start, 0)
    hi = max(future.stop, 0)
    core = np.concatenate([past.symbols(lo, 0), future.symbols(0, hi)])
    left = past.symbols(lo - len(past.left), lo)
    right = future.symbols(hi, hi + len(future.right))
    return SymbolicPoint(left, core, right, origin=-lo)


def periodic_point(word) -> PeriodicPoint:
    return PeriodicPoint(word)


def heteroclinic_point(p: PeriodicPoint, q: PeriodicPoint) -> SymbolicPoint:
    """The point of ``W^u_loc(q) ∩ W^s_loc(p)``: past of ``q``, future of ``p``."""
    if p == q:
        raise ValueError("heteroclinic point needs distinct periodic points")
    return SymbolicPoint(q.symbols(-q.period, 0), (), p.word, 0)


def sample_point(space: ShiftSpace, seed, depth: int) -> SymbolicPoint:
    """Bernoulli sample: core of ``2 depth + 1`` i.i.d. symbols, tails fixed to 0."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    core = rng.choice(space.k, size=2 * depth + 1, p=space.weights)
    return SymbolicPoint([0], core, [0], origin=depth)


def periodic_words(k: int, max_period: int, min_period: int = 1):
    """Primitive words up to rotation (one representative per periodic orbit)."""
    for n in range(min_period, max_period + 1):
        for w in itertools.product(range(k), repeat=n):
            if _is_lyndon(w):
                yield w


def _is_lyndon(w) -> bool:
    n = len(w)
    return all(w < w[i:] + w[:i] for i in range(1, n))


def orbit(x: SymbolicPoint, lo: int, hi: int):
    return [shift(x, j) for j in range(lo, hi)]

"""Eigenvalue structure of symplectic matrices and the sp(4) normal-form table."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintViolation, DefectiveEigenproblem
from .linalg import SympMatrix, symplectic_defect

EPS_UNIT = 1e-8
EPS_EIG = 1e-8


class SpectralType(enum.Enum):
    REAL_SIMPLE = "RealSimple"
    COMPLEX_SADDLE = "ComplexSaddle"
    SADDLE_CENTER = "SaddleCenter"
    GENERIC_CENTER = "GenericCenter"
    DEGENERATED_CENTER = "DegeneratedCenter"
    PARABOLIC = "Parabolic"
    OTHER = "Other"

    @property
    def generic(self) -> bool:
        return self is not SpectralType.DEGENERATED_CENTER


@dataclass
class Quadruple:
    """Eigenvalues closed under ``s -> 1/s`` and ``s -> conj(s)``."""

    sigma: complex
    members: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def to_json(self) -> dict:
        return {"sigma": [self.sigma.real, self.sigma.imag],
                "members": [[m.real, m.imag] for m in self.members]}


def _matrix(M) -> np.ndarray:
    return np.asarray(M.entries if isinstance(M, SympMatrix) else M, dtype=float)


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues validated against the characteristic polynomial.

    Sorted by decreasing modulus, then by decreasing imaginary part.
    """
    M = _matrix(M)
    ev = np.linalg.eigvals(M)
    coeffs = np.poly(M)
    scale = np.polyval(np.abs(coeffs), np.abs(ev)) + 1.0
    resid = np.abs(np.polyval(coeffs, ev)) / scale
    if np.max(resid) > 1e-8:
        raise DefectiveEigenproblem(f"characteristic polynomial residual {np.max(resid):.2e}")
    order = np.lexsort((-ev.imag, -np.abs(ev)))
    return ev[order]


def _close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def quadruple_structure(M, tol: float = EPS_EIG) -> list:
    """Group the spectrum into orbits of ``{s, 1/s, conj(s), 1/conj(s)}``.

    Multiple eigenvalues appear with their multiplicity inside one orbit.
    The tolerance is relative and loosened by the conditioning of clustered
    eigenvalues (a double eigenvalue is only resolved to ``sqrt(eps)``).
    """
    ev = list(eigenvalues(M))
    loose = max(tol, 1e-6) if len(ev) > 2 else tol
    out = []
    used = [False] * len(ev)
    for a, s in enumerate(ev):
        if used[a]:
            continue
        targets = {complex(s), complex(s.conjugate()), 1 / complex(s), 1 / complex(s.conjugate())}
        members = []
        for b, t in enumerate(ev):
            if not used[b] and any(_close(t, u, loose) for u in targets):
                used[b] = True
                members.append(complex(t))
        out.append(Quadruple(complex(s), members))
    for q in out:
        for m in q.members:
            for t in (1 / m, m.conjugate()):
                if not any(_close(t, u, loose) for u in q.members):
                    raise DefectiveEigenproblem(f"eigenvalue {m} lacks partner {t}; defect too large")
    return out


def _is_unit(s, tol=EPS_UNIT) -> bool:
    return abs(abs(s) - 1.0) <= tol


def _is_real(s, tol=EPS_EIG) -> bool:
    return abs(s.imag) <= tol * max(1.0, abs(s))


def is_simple_real(M, tol: float = EPS_EIG) -> bool:
    """All eigenvalues real with pairwise distinct absolute values."""
    ev = eigenvalues(M)
    if not all(_is_real(s, tol) for s in ev):
        return False
    mods = np.sort(np.abs(ev))
    return bool(np.all(np.diff(mods) > tol * np.maximum(1.0, mods[1:])))


def classify_sp2(M) -> SpectralType:
    M = _matrix(M)
    if M.shape != (2, 2):
        raise ValueError("classify_sp2 needs a 2 x 2 matrix")
    tr = float(np.trace(M))
    if abs(abs(tr) - 2.0) <= EPS_UNIT:
        return SpectralType.PARABOLIC
    return SpectralType.REAL_SIMPLE if abs(tr) > 2.0 else SpectralType.GENERIC_CENTER


def classify_sp4(M) -> SpectralType:
    """Spectral type of a 4 x 4 symplectic matrix.

    Complex saddle: a non-real eigenvalue off the unit circle.  Saddle
    center: one non-real unit pair and one real pair off the circle.  Generic
    center: two distinct non-real unit pairs.  Degenerated center: one
    non-real unit pair of multiplicity two.
    """
    M = _matrix(M)
    if M.shape != (4, 4):
        raise ValueError("classify_sp4 needs a 4 x 4 matrix")
    ev = eigenvalues(M)
    # a double unit pair splits at sqrt(eps); judge multiplicity loosely
    loose = 1e-6
    nonreal = [s for s in ev if not _is_real(s, loose)]
    real = [s for s in ev if _is_real(s, loose)]
    upper = [s for s in nonreal if s.imag > 0]
    if any(not _is_unit(s, loose) for s in nonreal):
        return SpectralType.COMPLEX_SADDLE
    if len(upper) == 1 and len(real) == 2:
        r = [abs(s) for s in real]
        if all(not _is_unit(x) for x in r):
            return SpectralType.SADDLE_CENTER
        return SpectralType.PARABOLIC
    if len(upper) == 2:
        if _close(upper[0], upper[1], loose):
            return SpectralType.DEGENERATED_CENTER
        return SpectralType.GENERIC_CENTER
    if not nonreal:
        if is_simple_real(M):
            return SpectralType.REAL_SIMPLE
        if any(_is_unit(s, loose) for s in ev):
            return SpectralType.PARABOLIC
    return SpectralType.OTHER


def classify(M) -> SpectralType:
    M = _matrix(M)
    if M.shape == (2, 2):
        return classify_sp2(M)
    if M.shape == (4, 4):
        return classify_sp4(M)
    return SpectralType.REAL_SIMPLE if is_simple_real(M) else SpectralType.OTHER


def _rot(a, b):
    return np.array([[a, -b], [b, a]], dtype=float)


def _embed(X, Y):
    """Block matrix ``diag(X, Y)`` on the ordered base ``(e1, e2, e1^, e2^)``."""
    return np.block([[X, np.zeros((2, 2))], [np.zeros((2, 2)), Y]])


def canonical_matrix(kind, **params) -> SympMatrix:
    """Normal forms for the four complex sp(4) types in the base ``(e1, e2, e1^, e2^)``.

    ``ComplexSaddle(a, b)``: eigenvalues ``a +- bi`` and ``(a +- bi)/(a^2+b^2)``,
    needs ``b != 0`` and ``a^2 + b^2 != 1``.
    ``SaddleCenter(a, b, c)``: ``a +- bi`` on the unit circle and real ``c, 1/c``,
    needs ``a^2 + b^2 = 1``, ``b != 0`` and ``|c| != 0, 1``.
    ``GenericCenter(a, b, c, d)``: ``a +- bi`` and ``c +- di`` on the unit circle, distinct.
    ``DegeneratedCenter(a, b)``: ``a +- bi`` on the unit circle, each twice.
    """
    kind = SpectralType(kind) if not isinstance(kind, SpectralType) else kind
    p = {k: float(v) for k, v in params.items()}
    if kind is SpectralType.COMPLEX_SADDLE:
        a, b = p["a"], p["b"]
        r2 = a * a + b * b
        if b == 0 or math.isclose(r2, 1.0, abs_tol=1e-12):
            raise ConstraintViolation("complex saddle needs b != 0 and a^2 + b^2 != 1")
        # rotation-scaling on span(e1, e2), the inverse transpose on its dual
        X = _rot(a, b)
        M = _embed(X, X / r2)
    elif kind is SpectralType.SADDLE_CENTER:
        a, b, c = p["a"], p["b"], p["c"]
        if b == 0 or not math.isclose(a * a + b * b, 1.0, abs_tol=1e-12) or c == 0 or abs(abs(c) - 1) < 1e-12:
            raise ConstraintViolation("saddle center needs a^2 + b^2 = 1, b != 0 and |c| not in {0, 1}")
        M = np.zeros((4, 4))
        M[np.ix_([0, 2], [0, 2])] = _rot(a, b)
        M[1, 1], M[3, 3] = c, 1.0 / c
    elif kind is SpectralType.GENERIC_CENTER:
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        if not (math.isclose(a * a + b * b, 1.0, abs_tol=1e-12) and math.isclose(c * c + d * d, 1.0, abs_tol=1e-12)):
            raise ConstraintViolation("generic center needs a^2 + b^2 = c^2 + d^2 = 1")
        if b == 0 or d == 0 or (math.isclose(a, c, abs_tol=1e-12) and math.isclose(abs(b), abs(d), abs_tol=1e-12)):
            raise ConstraintViolation("generic center needs two distinct non-real pairs")
        M = np.zeros((4, 4))
        M[np.ix_([0, 2], [0, 2])] = _rot(a, b)
        M[np.ix_([1, 3], [1, 3])] = _rot(c, d)
    elif kind is SpectralType.DEGENERATED_CENTER:
        a, b = p["a"], p["b"]
        if b == 0 or not math.isclose(a * a + b * b, 1.0, abs_tol=1e-12):
            raise ConstraintViolation("degenerated center needs a^2 + b^2 = 1 and b != 0")
        M = np.zeros((4, 4))
        M[np.ix_([0, 2], [0, 2])] = _rot(a, b)
        M[np.ix_([1, 3], [1, 3])] = _rot(a, b)
    else:
        raise ConstraintViolation(f"no canonical matrix for {kind.value}")
    return SympMatrix(M)


def table_eigenvalues(kind, **params) -> np.ndarray:
    """Closed-form eigenvalues of ``canonical_matrix(kind, **params)``."""
    kind = SpectralType(kind) if not isinstance(kind, SpectralType) else kind
    if kind is SpectralType.COMPLEX_SADDLE:
        z = complex(params["a"], params["b"])
        vals = [z, z.conjugate(), z / abs(z) ** 2, z.conjugate() / abs(z) ** 2]
    elif kind is SpectralType.SADDLE_CENTER:
        z = complex(params["a"], params["b"])
        vals = [z, z.conjugate(), params["c"], 1 / params["c"]]
    elif kind is SpectralType.GENERIC_CENTER:
        z, w = complex(params["a"], params["b"]), complex(params["c"], params["d"])
        vals = [z, z.conjugate(), w, w.conjugate()]
    elif kind is SpectralType.DEGENERATED_CENTER:
        z = complex(params["a"], params["b"])
        vals = [z, z.conjugate(), z, z.conjugate()]
    else:
        raise ConstraintViolation(f"no table entry for {kind.value}")
    return np.array(vals, dtype=complex)


def random_params(kind, rng) -> dict:
    """Seeded parameters satisfying the constraints of ``kind``."""
    kind = SpectralType(kind) if not isinstance(kind, SpectralType) else kind
    ang = lambda: rng.uniform(0.1, math.pi - 0.1) * rng.choice([-1, 1])
    if kind is SpectralType.COMPLEX_SADDLE:
        r, t = rng.uniform(1.1, 3.0) ** rng.choice([-1, 1]), ang()
        return {"a": r * math.cos(t), "b": r * math.sin(t)}
    if kind is SpectralType.SADDLE_CENTER:
        t = ang()
        return {"a": math.cos(t), "b": math.sin(t), "c": rng.uniform(1.1, 4.0) * rng.choice([-1, 1])}
    if kind is SpectralType.GENERIC_CENTER:
        t = ang()
        s = t + rng.uniform(0.1, 1.0) * rng.choice([-1, 1])
        if abs(math.sin(s)) < 0.05 or abs(abs(s) - abs(t)) < 0.05:
            s = t + 0.5 if abs(t) < 2.5 else t - 0.5
        return {"a": math.cos(t), "b": math.sin(t), "c": math.cos(s), "d": math.sin(s)}
    if kind is SpectralType.DEGENERATED_CENTER:
        t = ang()
        return {"a": math.cos(t), "b": math.sin(t)}
    raise ConstraintViolation(f"no parameters for {kind.value}")


def classification_report(M) -> dict:
    M = _matrix(M)
    kind = classify(M)
    ev = eigenvalues(M)
    return {"type": kind.value, "generic": kind.generic,
            "eigenvalues": [[float(s.real), float(s.imag)] for s in ev],
            "quadruples": [q.to_json() for q in quadruple_structure(M)],
            "symplectic_defect": symplectic_defect(M)}

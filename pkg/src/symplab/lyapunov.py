"""Lyapunov spectra: QR estimation along orbits, exact periodic spectra,
and the symplectic pairing of Oseledets directions at periodic points."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import qr_chain
from .cocycle import CocycleGenerator, iterate, sup_norm
from .errors import DefectiveEigenproblem, DegenerateBasisError, EstimatorOverflow
from .linalg import EPS_FORM, SubspaceClass, classify_subspace, gram_omega, standard_form, symplectic_inverse
from .shift import PeriodicPoint, SymbolicPoint
from .spectral import EPS_EIG, eigenvalues, is_simple_real

CHUNK = 1 << 18


def pairing_defect(exponents) -> float:
    """``max_i |l_i + l_{2l+1-i}|`` for a descending spectrum."""
    ex = np.sort(np.asarray(getattr(exponents, "exponents", exponents), dtype=float))[::-1]
    return float(np.max(np.abs(ex + ex[::-1])))


@dataclass(frozen=True)
class LyapunovSpectrum:
    exponents: np.ndarray
    n_used: int
    pairing_defect: float
    sum_defect: float

    @classmethod
    def from_exponents(cls, exponents, n_used: int) -> "LyapunovSpectrum":
        ex = np.asarray(exponents, dtype=float)
        # descending value, ties by original column
        order = np.lexsort((np.arange(len(ex)), -ex))
        ex = ex[order]
        ex.setflags(write=False)
        return cls(ex, int(n_used), pairing_defect(ex), float(abs(ex.sum())))

    @property
    def top(self) -> float:
        return float(self.exponents[0])

    def to_csv(self, fh=None) -> str | None:
        """Write ``index, exponent, n_used, pairing_defect, sum_defect`` rows."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "exponent", "n_used", "pairing_defect", "sum_defect"])
        for i, e in enumerate(self.exponents, start=1):
            w.writerow([i, repr(float(e)), self.n_used, repr(self.pairing_defect), repr(self.sum_defect)])
        return buf.getvalue() if fh is None else None


def default_renorm(A: CocycleGenerator) -> int:
    return 1 if sup_norm(A) >= 4.0 else 8


def qr_spectrum(A: CocycleGenerator, x: SymbolicPoint, n: int, renorm_every: int | None = None,
                start: int = 0) -> LyapunovSpectrum:
    """Benettin-style estimate from ``Q_0 = I`` along ``f^start x, ..., f^{start+n-1} x``.

    Parameters
    ----------
    A : CocycleGenerator
    x : SymbolicPoint
        Base point; its core should cover the orbit segment when it is
        meant to be typical.
    n : int
        Number of iterates.
    renorm_every : int, optional
        QR cadence; default every step when ``sup |A| >= 4`` and every 8
        steps otherwise.

    Raises
    ------
    EstimatorOverflow
        If the frame overflows between re-orthonormalisations.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    every = default_renorm(A) if renorm_every is None else int(renorm_every)
    if every < 1:
        raise ValueError("renorm_every must be >= 1")
    Q = np.eye(A.dim)
    logs = np.zeros(A.dim)
    done = 0
    while done < n:
        m = min(CHUNK - CHUNK % every, n - done) if CHUNK >= every else n - done
        codes = A.codes_along(x, m, start=start + done)
        steps = qr_chain(A.table, codes, Q, logs, every)
        if steps < m or not np.all(np.isfinite(logs)):
            raise EstimatorOverflow(f"frame overflow after {done + steps} steps; lower renorm_every")
        done += m
    return LyapunovSpectrum.from_exponents(logs / n, n)


def qr_spectrum_matrices(mats, renorm_every: int = 1) -> LyapunovSpectrum:
    """QR estimate for an explicit sequence of matrices ``M_0, M_1, ...``."""
    mats = np.ascontiguousarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected an array of shape (n, d, d)")
    Q = np.eye(mats.shape[1])
    logs = np.zeros(mats.shape[1])
    codes = np.arange(len(mats), dtype=np.int64)
    if qr_chain(mats, codes, Q, logs, renorm_every) < len(mats):
        raise EstimatorOverflow("frame overflow; lower renorm_every")
    return LyapunovSpectrum.from_exponents(logs / len(mats), len(mats))


@dataclass(frozen=True)
class PeriodicSpectrum:
    """Exact spectrum of ``A^pi(p)`` with eigen-data."""

    spectrum: LyapunovSpectrum
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    simple_real: bool
    period: int

    @property
    def exponents(self):
        return self.spectrum.exponents


def _unit_sign(v):
    v = v / np.linalg.norm(v)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def real_eigenbasis(M, tol: float = EPS_EIG):
    """Eigenvalues (by decreasing modulus) and unit real eigenvectors of a
    simple-real symplectic matrix.

    Contracting directions are read off the symplectic inverse, where they
    expand, which keeps them accurate when the spectrum is wide.
    """
    M = np.asarray(M, dtype=float)
    if not is_simple_real(M, tol):
        raise DefectiveEigenproblem("spectrum is not simple and real")
    ev = eigenvalues(M).real
    Minv = symplectic_inverse(M)
    vals_f, vecs_f = np.linalg.eig(M)
    vals_b, vecs_b = np.linalg.eig(Minv)
    V = np.empty((len(ev), len(ev)))
    for a, s in enumerate(ev):
        if abs(s) >= 1:
            b = int(np.argmin(np.abs(vals_f - s)))
            v = vecs_f[:, b]
        else:
            b = int(np.argmin(np.abs(vals_b - 1 / s)))
            v = vecs_b[:, b]
        V[:, a] = _unit_sign(v.real)
    return ev, V


def periodic_spectrum(A: CocycleGenerator, p: PeriodicPoint) -> PeriodicSpectrum:
    """Exponents ``log|s| / pi`` over the eigenvalues ``s`` of ``A^pi(p)``."""
    M = np.asarray(iterate(A, p, p.period))
    ev = eigenvalues(M)
    ex = np.log(np.abs(ev)) / p.period
    simple = is_simple_real(M)
    vecs = real_eigenbasis(M)[1] if simple else None
    spec = LyapunovSpectrum.from_exponents(ex, p.period)
    return PeriodicSpectrum(spec, M, ev, vecs, simple, p.period)


@dataclass
class OseledetsApprox:
    """Eigen-directions at a periodic point arranged as a symplectic base.

    ``vectors`` has columns ``e_1 .. e_l, e_1^ .. e_l^`` with
    ``omega(e_i, e_i^) = 1``; ``pairing[i]`` is the index of the eigenvalue
    matched with expanding eigenvalue ``i``.
    """

    vectors: np.ndarray
    unit_vectors: np.ndarray
    exponents: np.ndarray
    pairing: list
    omega_table: np.ndarray
    cross_omega: float
    plane_classes: list
    expanding_class: SubspaceClass
    eigenvalues: np.ndarray = field(default=None)

    @property
    def ell(self):
        return self.vectors.shape[0] // 2


def oseledets_pairing(A_or_matrix, p: PeriodicPoint | None = None, tol: float = EPS_FORM) -> OseledetsApprox:
    """Match eigen-directions of ``A^pi(p)`` into symplectic planes ``E^i + E^i^``.

    Real eigenvalues off the unit circle pair ``s`` with ``1/s``; a non-real
    unit pair contributes the real and imaginary parts of its eigenvector.
    Complex quadruples off the circle have no eigen-line matching and raise.
    """
    if isinstance(A_or_matrix, CocycleGenerator):
        M = np.asarray(iterate(A_or_matrix, p, p.period))
        period = p.period
    else:
        M = np.asarray(A_or_matrix, dtype=float)
        period = 1
    dim = M.shape[0]
    ell = dim // 2
    form = standard_form(ell)
    ev = eigenvalues(M)
    vals, vecs = np.linalg.eig(M)
    U, W, rates_u, rates_w, idx_u, idx_w = [], [], [], [], [], []
    if is_simple_real(M):
        ev_r, V = real_eigenbasis(M)
        for a, s in enumerate(ev_r):
            (U if abs(s) > 1 else W).append(V[:, a])
            (rates_u if abs(s) > 1 else rates_w).append(math.log(abs(s)) / period)
            (idx_u if abs(s) > 1 else idx_w).append(a)
    else:
        for a, s in enumerate(ev):
            real = abs(s.imag) <= EPS_EIG * max(1.0, abs(s))
            if real:
                if abs(abs(s) - 1) <= 1e-8:
                    raise DegenerateBasisError(f"real eigenvalue {s.real:+.3g} on the unit circle")
                b = int(np.argmin(np.abs(vals - s)))
                v = _unit_sign(vecs[:, b].real)
                (U if abs(s) > 1 else W).append(v)
                (rates_u if abs(s) > 1 else rates_w).append(math.log(abs(s)) / period)
                (idx_u if abs(s) > 1 else idx_w).append(a)
            elif abs(abs(s) - 1) <= 1e-8:
                if s.imag < 0:
                    continue
                b = int(np.argmin(np.abs(vals - s)))
                v = vecs[:, b]
                U.append(v.real / np.linalg.norm(v.real))
                W.append(v.imag / np.linalg.norm(v.imag))
                rates_u.append(0.0)
                rates_w.append(0.0)
                idx_u.append(a)
                idx_w.append(a)
            else:
                raise DegenerateBasisError("complex quadruple off the unit circle has no eigen-line matching")
    if len(U) != ell or len(W) != ell:
        raise DegenerateBasisError("eigen-directions do not split into l + l")
    order = np.argsort(-np.asarray(rates_u), kind="stable")
    U = np.array(U)[order].T
    rates_u = np.asarray(rates_u)[order]
    idx_u = [idx_u[i] for i in order]
    W = np.array(W).T
    G = U.T @ form.Omega @ W
    perm = [int(np.argmax(np.abs(G[a]))) for a in range(ell)]
    if sorted(perm) != list(range(ell)):
        raise DegenerateBasisError("no admissible matching of eigen-directions")
    Wp = W[:, perm]
    unit = np.hstack([U, Wp])
    table = gram_omega(unit, form)
    mask = np.ones_like(table, dtype=bool)
    for a in range(ell):
        mask[a, ell + a] = mask[ell + a, a] = False
    cross = float(np.max(np.abs(table[mask])))
    scales = np.array([table[a, ell + a] for a in range(ell)])
    if np.any(np.abs(scales) <= tol):
        raise DegenerateBasisError("matched eigen-directions are omega-orthogonal")
    E = np.hstack([U, Wp / scales])
    planes = [classify_subspace([E[:, a], E[:, ell + a]], form, tol) for a in range(ell)]
    expanding = classify_subspace(list(U.T), form, tol)
    exps = np.concatenate([rates_u, np.asarray(rates_w)[perm]])
    pairing = [(idx_u[a], idx_w[perm[a]]) for a in range(ell)]
    return OseledetsApprox(E, unit, exps, pairing, table, cross, planes, expanding, ev)


@dataclass
class OmegaDecayReport:
    i: int
    j: int
    target_rate: float
    fitted_rate: float
    C: float
    eps: float
    omega_values: np.ndarray
    log_norm_products: np.ndarray
    passed: bool


def omega_decay_check(A: CocycleGenerator, p: PeriodicPoint, i: int, j: int, n_max: int = 60,
                      eps: float | None = None, directions=None) -> OmegaDecayReport:
    """Track ``|omega(A^n u_i, A^n u_j)|`` against ``|A^n u_i| |A^n u_j|``.

    ``u_i, u_j`` are the columns of the Oseledets base at ``p`` (or the
    supplied ``directions``).  ``C`` is fitted as the smallest constant with
    ``|A^n u_i| |A^n u_j| <= C exp((l_i + l_j + 2 eps) n)`` for ``n <= n_max``;
    the check passes when every ``|omega|`` obeys the same bound.
    """
    base = oseledets_pairing(A, p)
    target = float(base.exponents[i] + base.exponents[j])
    if eps is None:
        eps = max(0.05 * abs(target), 1e-3)
    if directions is None:
        u, v = base.vectors[:, i].copy(), base.vectors[:, j].copy()
    else:
        u, v = (np.asarray(d, dtype=float).copy() for d in directions)
    Omega = standard_form(A.ell).Omega
    om = np.empty(n_max + 1)
    lp = np.empty(n_max + 1)
    if directions is None:
        # eigen-directions: A^{q pi + r}(p) u = s^q A^r(p) u, no forward contamination
        pi = p.period
        steps = [np.eye(A.dim)] + [np.asarray(iterate(A, p, r)) for r in range(1, pi)]
        w0 = abs(u @ Omega @ v)
        for n in range(n_max + 1):
            q, r = divmod(n, pi)
            Ar = steps[r]
            lp[n] = q * pi * target + math.log(np.linalg.norm(Ar @ u) * np.linalg.norm(Ar @ v))
            om[n] = w0 * math.exp(q * pi * target)
    else:
        codes = A.codes_along(p, n_max)
        lu = lv = 0.0
        om[0] = abs(u @ Omega @ v)
        lp[0] = math.log(np.linalg.norm(u) * np.linalg.norm(v))
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        for n in range(1, n_max + 1):
            M = A.table[codes[n - 1]]
            u, v = M @ u, M @ v
            nu_, nv_ = np.linalg.norm(u), np.linalg.norm(v)
            lu, lv = lu + math.log(nu_), lv + math.log(nv_)
            u, v = u / nu_, v / nv_
            lp[n] = lu + lv + lp[0]
            om[n] = abs(u @ Omega @ v) * math.exp(lp[n])
    ns = np.arange(n_max + 1)
    slope = float(np.polyfit(ns[n_max // 4:], lp[n_max // 4:], 1)[0])
    logC = float(np.max(lp - (target + 2 * eps) * ns))
    bound = logC + (target + 2 * eps) * ns
    with np.errstate(divide="ignore"):
        passed = bool(np.all(np.log(np.maximum(om, 1e-300)) <= bound + 1e-9))
    return OmegaDecayReport(i, j, target, slope, math.exp(logC), eps, om, lp, passed)

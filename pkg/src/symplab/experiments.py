"""End-to-end pipelines: heteroclinic obstruction, breaking zero exponents,
dominated periodic scans and the openness probe."""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cocycle import (
    CocycleGenerator,
    constant,
    diagonal_walk,
    domination_check,
    holder_distance,
    holder_window,
    orthosymplectic,
    random_generator,
)
from .errors import NotSimpleReal, StageFailure, SymplabError
from .holonomy import ProjectivePoint, projective_act, projective_dist, stable_holonomy
from .linalg import random_orthosymplectic, random_symmetric, symplectic_exp, symplectic_inverse
from .lyapunov import oseledets_pairing, periodic_spectrum, qr_spectrum
from .perturbation import (
    breaking_avoid_set,
    breaking_check,
    canonical_perturbation,
    compose,
    eta_budget,
    localized_rotation_cocycle,
    obstruction_matrix,
)
from .shift import PeriodicPoint, ShiftSpace, heteroclinic_point, periodic_point, periodic_words, sample_point, shift, word_str
from .spectral import is_simple_real

log = logging.getLogger(__name__)

OBSTRUCTION_MIN = 0.01
NOISE_FACTOR = 5.0


@dataclass
class AtomicMeasure:
    """Finite convex combination of Dirac masses on projective space."""

    atoms: list
    weights: np.ndarray

    def __post_init__(self):
        self.atoms = [a if isinstance(a, ProjectivePoint) else ProjectivePoint(a) for a in self.atoms]
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.atoms) or np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
            raise ValueError("weights must be non-negative, one per atom, summing to 1")
        for i in range(len(self.atoms)):
            for j in range(i):
                if projective_dist(self.atoms[i], self.atoms[j]) < 1e-12:
                    raise ValueError("atoms must be distinct")
        self.weights = w

    @classmethod
    def uniform(cls, vectors) -> "AtomicMeasure":
        vectors = list(np.asarray(vectors, dtype=float).T)
        return cls(vectors, np.full(len(vectors), 1.0 / len(vectors)))

    def push(self, H) -> "AtomicMeasure":
        return AtomicMeasure([projective_act(H, a) for a in self.atoms], self.weights.copy())

    def mismatch(self, other: "AtomicMeasure") -> float:
        """Smallest projective distance between an atom of ``self`` and one of ``other``."""
        return min(projective_dist(a, b) for a in self.atoms for b in other.atoms)


@dataclass
class ObstructionReport:
    z: dict
    matching: np.ndarray
    obstruction: float
    hs_exact: bool
    hu_exact: bool

    def to_json(self) -> dict:
        return {"z": self.z, "matching": self.matching.tolist(), "obstruction": self.obstruction,
                "hs_exact": self.hs_exact, "hu_exact": self.hu_exact}


def obstruction_experiment(A: CocycleGenerator, p: PeriodicPoint, q: PeriodicPoint, tol: float = 1e-10) -> ObstructionReport:
    """Atoms at ``p`` carried along the stable leaf against atoms at ``q``
    carried along the unstable leaf, compared at ``z = W^u(q) ∩ W^s(p)``."""
    for pt in (p, q):
        if not is_simple_real(np.asarray(periodic_spectrum(A, pt).matrix)):
            raise NotSimpleReal(f"A^pi at {word_str(pt.word)} is not simple-real")
    z = heteroclinic_point(p, q)
    D, hs, hu = obstruction_matrix(A, p, q, z, tol)
    return ObstructionReport(z.to_json(), D, float(D.min()), hs.exact, hu.exact)


@dataclass
class ScanEntry:
    word: str
    period: int
    exponents: list
    simple_real: bool
    dominated: bool


def dominated_periodic_scan(A: CocycleGenerator, max_period: int, N: int | None = None, theta: float = 0.1,
                            k_max: int = 4, min_period: int = 1, only_dominated: bool = True) -> list:
    """Periodic orbits (one word per orbit) passing the domination test with block ``N``.

    ``N`` defaults to the period of each orbit.  On the full shift any two
    returned points are heteroclinically related.
    """
    if max_period > 12:
        raise ValueError("max_period is limited to 12")
    out = []
    for w in periodic_words(A.k, max_period, min_period):
        p = periodic_point(w)
        n = p.period if N is None else N
        dom = domination_check(A, p, n, theta, k_max).passed
        if only_dominated and not dom:
            continue
        ps = periodic_spectrum(A, p)
        out.append(ScanEntry(word_str(w), p.period, [float(e) for e in ps.exponents], ps.simple_real, dom))
    return out


# configuration

def build_space(cfg: dict) -> ShiftSpace:
    sp = cfg.get("space", {})
    return ShiftSpace(int(sp.get("k", 2)), float(sp.get("lam", 0.5)), sp.get("weights"))


def build_generator(cfg: dict, base_dir: Path | None = None) -> CocycleGenerator:
    g = dict(cfg["generator"])
    if "file" in g:
        path = Path(g["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return CocycleGenerator.from_json(json.loads(path.read_text()))
    kind = g.pop("kind")
    nu = float(g.pop("nu", 1.0))
    if kind == "diagonal_walk":
        return diagonal_walk(g.get("c", 0.25), g.get("b", 0.05), nu)
    if kind == "orthosymplectic":
        return orthosymplectic(g.get("seed", 0), g.get("k", 2), g.get("ell", 1), g.get("depth", 1), nu, g.get("noise", 0.0))
    if kind == "random":
        return random_generator(g.get("seed", 0), g.get("k", 2), g.get("ell", 2), g.get("depth", 1), g.get("scale", 0.3), nu)
    if kind == "holder_window":
        return holder_window(g.get("seed", 0), g.get("k", 2), g.get("ell", 1), g.get("depth", 6), g.get("scale", 0.3),
                             nu, g.get("lam", 0.5))
    if kind == "constant":
        return constant(np.asarray(g["matrix"]["rows"], dtype=float), g.get("k", 2), g.get("depth", 0), nu)
    if kind == "table":
        return CocycleGenerator.from_json({**g, "nu": nu})
    raise ValueError(f"unknown generator kind {kind!r}")


# breaking zero exponents

@dataclass
class ExperimentReport:
    config: dict
    lambda1_A: float
    noise_floor: float
    segment_estimates: list
    lambda1_B: list
    oracle: dict
    obstruction: float
    obstruction_A: float
    hu_equal: bool
    holder_distance: float
    epsilon: float
    eta: float
    eta_budget: float
    transversal: dict | None
    flags: dict
    wall_clock: float
    stages: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def recompute_flags(self) -> dict:
        return _flags(self.lambda1_A, self.noise_floor, self.lambda1_B, self.oracle, self.obstruction,
                      self.hu_equal, self.holder_distance, self.epsilon)

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _flags(l1A, floor, l1B, oracle, obstruction, hu_equal, hdist, epsilon) -> dict:
    return {
        "zero_start": abs(l1A) <= floor,
        "hu_equal": bool(hu_equal),
        "obstruction_positive": obstruction > OBSTRUCTION_MIN,
        "within_budget": hdist <= epsilon,
        "oracle_positive": oracle.get("lambda1_B", 0.0) > 0.0,
        "qr_positive": min(l1B) > NOISE_FACTOR * floor if l1B else False,
    }


def _seeds(seed, n):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def noise_floor(A: CocycleGenerator, space: ShiftSpace, seed, segments: int = 10, length: int = 10**6):
    """``3 max |lambda_1|`` over disjoint segments of one sampled orbit."""
    x = sample_point(space, seed, segments * length)
    est = [qr_spectrum(A, x, length, start=j * length).top for j in range(segments)]
    return 3.0 * max(abs(e) for e in est), est


def _transversal(A: CocycleGenerator, p: PeriodicPoint, q: PeriodicPoint, spec: dict, seed) -> tuple:
    """Make the periodic data at ``p`` and ``q`` simple-real.

    The generator value on the window of each fixed orbit point is replaced by
    a canonical hyperbolic matrix, conjugated at ``q`` by a seeded
    orthosymplectic change of basis so the two eigenbases are in general
    position.  Only fixed points (period 1) are supported.
    """
    if p.period != 1 or q.period != 1:
        raise ValueError("the transversal stage handles fixed points only")
    case = spec.get("case", "hyperbolic_iv" if A.ell == 1 else "hyperbolic_ii")
    eta_t = float(spec.get("eta", 0.3))
    T = np.asarray(canonical_perturbation(case, eta_t))
    C = random_orthosymplectic(np.random.default_rng(seed), A.ell)
    table = A.table.copy()
    m = A.depth
    for pt, M in ((p, T), (q, C @ T @ symplectic_inverse(C))):
        code = A.codes_along(pt, 1)[0]
        table[code] = M
    At = CocycleGenerator(A.k, A.ell, A.depth, A.nu, table)
    return At, {"case": case, "eta": eta_t, "windows": [word_str(pt.window(0, m)) for pt in (p, q)]}


def periodic_oracle(A: CocycleGenerator, B: CocycleGenerator, site_window: tuple, max_period: int):
    """Exact top exponent of ``B`` on periodic orbits whose cycle passes the cylinder."""
    best = None
    d = len(site_window) // 2
    target = word_str(site_window)
    for w in periodic_words(B.k, max_period):
        s = word_str(w)
        ext = s * (1 + (2 * d + 1) // len(s) + 1)
        if target not in ext[:len(s) + 2 * d]:
            continue
        p = periodic_point(w)
        lb = periodic_spectrum(B, p).exponents[0]
        if best is None or lb > best["lambda1_B"]:
            best = {"word": s, "lambda1_B": float(lb), "lambda1_A": float(periodic_spectrum(A, p).exponents[0])}
    return best or {"word": None, "lambda1_B": 0.0, "lambda1_A": 0.0}


def prepare_breaking(A: CocycleGenerator, p: PeriodicPoint, q: PeriodicPoint, cyl_depth: int, eta: float,
                     space: ShiftSpace):
    """Rotation at ``f^{pi_p}(z)`` in the stable transport of the Oseledets base at ``p``."""
    z = heteroclinic_point(p, q)
    step = p.period
    site = shift(z, step)
    base = oseledets_pairing(A, p)
    P = stable_holonomy(A, p, site).matrix @ base.vectors
    avoid = breaking_avoid_set(p, q, z, cyl_depth, step)
    loc = localized_rotation_cocycle(A, site, cyl_depth, eta, P, avoid=avoid, space=space)
    return z, site, P, loc


def break_zero_experiment(config: dict, seed: int | None = None, base_dir: Path | None = None) -> ExperimentReport:
    """Run the breaking pipeline described by ``config``.

    Stages: ``generator``, ``zero_check``, ``transversal`` (optional),
    ``breaking``, ``breaking_check``, ``spectrum_B``, ``periodic_oracle``.
    Any failure is re-raised as ``StageFailure`` naming the stage.
    """
    t0 = time.perf_counter()
    seed = config.get("seed", 0) if seed is None else seed
    stages = {}
    stage = "generator"

    def mark(name):
        stages[name] = round(time.perf_counter() - t0, 3)

    try:
        space = build_space(config)
        A0 = build_generator(config, base_dir)
        p, q = periodic_point(config.get("p", "0")), periodic_point(config.get("q", "1"))
        seg_len = int(config.get("segment_length", 10**6))
        n_seg = int(config.get("noise_segments", 10))
        n_orbit = int(config.get("n_orbit", seg_len))
        n_orbits = int(config.get("n_orbits", 4))
        eta = float(config.get("eta", 0.1))
        cyl_depth = int(config.get("cyl_depth", 2))
        epsilon = float(config.get("epsilon", 1.0))
        seeds = _seeds(seed, n_orbits + 2)
        mark(stage)

        stage = "zero_check"
        floor, seg_est = noise_floor(A0, space, seeds[0], n_seg, seg_len)
        l1A = qr_spectrum(A0, sample_point(space, seeds[1], n_orbit), n_orbit).top
        log.info("lambda1(A) = %.3e, noise floor %.3e", l1A, floor)
        mark(stage)

        A, trans = A0, None
        if config.get("transversal"):
            stage = "transversal"
            A, trans = _transversal(A0, p, q, config["transversal"], seed)
            mark(stage)

        stage = "breaking"
        z, site, P, loc = prepare_breaking(A, p, q, cyl_depth, eta, space)
        B = compose(A, loc)
        budget = eta_budget(A, epsilon, cyl_depth, P, space)
        mark(stage)

        stage = "breaking_check"
        rep = breaking_check(A, B, p, q, z, space=space)
        obs_A = obstruction_matrix(A, p, q, z)[0].min()
        hdist = holder_distance(A0, B, space) if trans is None else holder_distance(A, B, space)
        mark(stage)

        stage = "spectrum_B"
        l1B = [qr_spectrum(B, sample_point(space, s, n_orbit), n_orbit).top for s in seeds[2:]]
        mark(stage)

        stage = "periodic_oracle"
        oracle = periodic_oracle(A, B, site.window(0, loc.S.depth), int(config.get("oracle_max_period", 10)))
        oracle["discriminating"] = abs(oracle["lambda1_A"]) <= floor
        mark(stage)
    except SymplabError as exc:
        raise StageFailure(stage, exc) from exc
    except (ValueError, ArithmeticError) as exc:
        raise StageFailure(stage, exc) from exc

    flags = _flags(l1A, floor, l1B, oracle, rep.obstruction, rep.hu_equal, hdist, epsilon)
    return ExperimentReport(config, float(l1A), float(floor), [float(e) for e in seg_est], [float(e) for e in l1B],
                            oracle, rep.obstruction, float(obs_A), rep.hu_equal, float(hdist), epsilon, eta,
                            float(budget), trans, flags, time.perf_counter() - t0, stages)


def _perturb(B: CocycleGenerator, rng, target: float, space: ShiftSpace) -> tuple:
    S = np.array([random_symmetric(rng, B.dim, 1.0) for _ in range(B.n_windows)])
    scale = 0.5
    while True:
        Bp = CocycleGenerator(B.k, B.ell, B.depth, B.nu, B.table @ symplectic_exp(scale * S), tol=1e-8)
        d = holder_distance(B, Bp, space)
        if d <= target:
            return Bp, d
        scale *= 0.5 * target / d if d > 2 * target else 0.7


def openness_probe(config: dict, n: int = 10, seed: int | None = None, base_dir: Path | None = None,
                   report: ExperimentReport | None = None) -> list:
    """Re-test positivity for ``n`` seeded generators within ``eta/10`` of ``B``."""
    seed = config.get("seed", 0) if seed is None else seed
    report = break_zero_experiment(config, seed, base_dir) if report is None else report
    space = build_space(config)
    A0 = build_generator(config, base_dir)
    p, q = periodic_point(config.get("p", "0")), periodic_point(config.get("q", "1"))
    A = _transversal(A0, p, q, config["transversal"], seed)[0] if config.get("transversal") else A0
    _, site, _, loc = prepare_breaking(A, p, q, int(config.get("cyl_depth", 2)), float(config.get("eta", 0.1)), space)
    B = compose(A, loc)
    n_orbit = int(config.get("n_orbit", config.get("segment_length", 10**6)))
    out = []
    for j, s in enumerate(_seeds([seed, 1], n)):
        rng = np.random.default_rng(s)
        Bp, d = _perturb(B, rng, report.eta / 10, space)
        l1 = qr_spectrum(Bp, sample_point(space, s, n_orbit), n_orbit).top
        oracle = periodic_spectrum(Bp, periodic_point(report.oracle["word"])).exponents[0] if report.oracle["word"] else 0.0
        ok = report.flags["zero_start"] and l1 > NOISE_FACTOR * report.noise_floor and oracle > 0
        out.append({"index": j, "holder_distance": float(d), "lambda1_B": float(l1), "oracle": float(oracle),
                    "passed": bool(ok)})
    return out

"""Command line entry point: ``symplab <subcommand> ...``.

Exit codes: 0 when the computed property holds, 2 when it fails, 1 on error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .errors import NotSymplecticError, SymplabError
from .experiments import break_zero_experiment, build_generator, build_space, dominated_periodic_scan
from .holonomy import holonomy
from .linalg import EPS_SYMP, symplectic_defect
from .lyapunov import qr_spectrum
from .shift import SymbolicPoint, periodic_point, sample_point
from .spectral import classification_report

PASS, ERROR, FAIL = 0, 1, 2
PAIRING_TOL = 5e-3

log = logging.getLogger("symplab")


def _config(path):
    return io.read_json(path), Path(path).resolve().parent


def cmd_spectrum(args) -> int:
    cfg, base = _config(args.config)
    A = build_generator(cfg, base)
    n = args.n or int(cfg.get("n", 10**5))
    if "point" in cfg:
        x = SymbolicPoint.from_json(cfg["point"])
    elif "periodic" in cfg:
        x = periodic_point(cfg["periodic"])
    else:
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        x = sample_point(build_space(cfg), seed, n)
    spec = qr_spectrum(A, x, n)
    with open(args.out, "w", newline="") as fh:
        spec.to_csv(fh)
    print(json.dumps({"exponents": spec.exponents.tolist(), "pairing_defect": spec.pairing_defect,
                      "sum_defect": spec.sum_defect}))
    return PASS if max(spec.pairing_defect, spec.sum_defect) <= PAIRING_TOL else FAIL


def cmd_classify(args) -> int:
    M = io.load_matrix(args.matrix)
    if symplectic_defect(M) > EPS_SYMP:
        raise NotSymplecticError(f"symplectic defect {symplectic_defect(M):.2e}")
    rep = classification_report(M)
    print(io.write_json({k: rep[k] for k in ("type", "eigenvalues", "quadruples")}))
    return PASS


def cmd_holonomy(args) -> int:
    cfg, base = _config(args.config)
    A = build_generator(cfg, base)
    x, y = io.load_point(getattr(args, "from")), io.load_point(args.to)
    h = holonomy(A, x, y, args.side, tol=args.tol)
    rep = {k: v for k, v in h.to_json().items() if k in ("side", "depth_used", "cauchy_gap", "matrix")}
    text = io.write_json(rep, args.out)
    if args.out is None:
        print(text)
    return PASS if h.cauchy_gap <= args.tol else FAIL


def cmd_break_zero(args) -> int:
    cfg, base = _config(args.config)
    rep = break_zero_experiment(cfg, args.seed, base)
    out = {"hu_equal": rep.hu_equal, "obstruction": rep.obstruction, "eta": rep.eta,
           "cyl_depth": int(cfg.get("cyl_depth", 2)), "holder_distance": rep.holder_distance}
    full = rep.to_json()
    full.pop("config")
    out["experiment"] = full
    io.write_json(out, args.out)
    log.info("flags: %s", rep.flags)
    return PASS if rep.passed else FAIL


def cmd_scan_periodic(args) -> int:
    cfg, base = _config(args.config)
    A = build_generator(cfg, base)
    theta = args.theta if args.theta is not None else float(cfg.get("theta", 0.1))
    rows = dominated_periodic_scan(A, args.max_period, args.block, theta)
    print(io.write_json([r.__dict__ for r in rows]))
    return PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random draw")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="symplab", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="QR estimate of the Lyapunov spectrum")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=None, help="orbit length (config key 'n', default 1e5)")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("classify", parents=[common], help="spectral type of a symplectic matrix")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("holonomy", parents=[common], help="stable or unstable holonomy between two points")
    s.add_argument("--config", required=True)
    s.add_argument("--from", required=True)
    s.add_argument("--to", required=True)
    s.add_argument("--side", choices=("s", "u"), required=True)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_holonomy)

    s = sub.add_parser("break-zero", parents=[common], help="run the zero-exponent breaking pipeline")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_break_zero)

    s = sub.add_parser("scan-periodic", parents=[common], help="dominated periodic orbits with exact spectra")
    s.add_argument("--config", required=True)
    s.add_argument("--max-period", type=int, default=8)
    s.add_argument("--block", type=int, default=None, help="domination block length (default: the period)")
    s.add_argument("--theta", type=float, default=None)
    s.set_defaults(func=cmd_scan_periodic)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # usage errors are errors, not property failures
        return PASS if exc.code == 0 else ERROR
    args.seed = getattr(args, "seed", None)
    args.verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SymplabError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())

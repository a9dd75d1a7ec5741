"""Command-line front end: construct, verify, estimate, drc, audit.

Every subcommand prints one JSON report (or writes it to ``--out``) and
exits 0 iff the report passes.  Invalid parameter combinations exit 2 with
the violated constraint named.  ``SPHERE_DRC_DIR`` moves the default
artifact directory; numeric parameters never come from the environment.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .analysis import (cross_pair_density, isomorphism_check, j_complement_audit,
                       min_cross_degree)
from .coloring import build_construction1, build_construction2
from .config import MAX_K, MAX_N, MAX_T
from .drc import DrcParams, drc_rich_subset, rich_subgraph_audit, verify_proposition
from .errors import ArtifactError, PreconditionError, ResourceError
from .geometry import sample_uniform
from .graphs import build_hypercube, build_random_graph
from .measure import (cap_lower_bound, cap_oracle, estimate_cap_measure, estimate_strip_measure,
                      strip_cap_radius, strip_oracle)
from .report import Report

ENV_DIR = "SPHERE_DRC_DIR"
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_REFUSED = 3


class UsageError(Exception):
    pass


def default_dir() -> Path:
    return Path(os.environ.get(ENV_DIR, "."))


def default_path(name: str) -> Path:
    return default_dir() / name


def eps_defaults(q: int, eps: float) -> dict:
    """Uncapped parameter values derived from eps."""
    return {"eta": eps / (132 * q), "t": math.ceil(5 * q / eps), "k": math.ceil(1e7 * (q / eps) ** 3)}


def _open_unit(name: str, x: float):
    if not 0.0 < x < 1.0:
        raise UsageError(f"{name} must lie in (0, 1), got {x}")


def _emit(report: Report, args) -> int:
    text = report.to_json(include_meta=args.timing)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if report.passed else EXIT_FAIL


def _config(args) -> dict:
    skip = {"func", "out", "timing", "threads"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


# construct ------------------------------------------------------------------

def _resolve_sphere_params(args) -> tuple[dict, dict]:
    """Fill k, t, eta from eps where unset; returns (resolved, caps applied)."""
    derived = eps_defaults(args.q, args.eps)
    caps = {}
    resolved = {}
    for name, cap in (("k", MAX_K), ("t", MAX_T)):
        given = getattr(args, name)
        if given is None:
            resolved[name] = min(derived[name], cap)
            if derived[name] > cap:
                caps[name] = {"derived": derived[name], "cap": cap}
        elif given > cap:
            raise UsageError(f"{name}={given} exceeds the desk-scale cap {cap}")
        else:
            resolved[name] = given
    resolved["eta"] = derived["eta"] if args.eta is None else args.eta
    if args.n > MAX_N:
        raise UsageError(f"n={args.n} exceeds the desk-scale cap {MAX_N}")
    return resolved, caps


def cmd_construct(args) -> int:
    start = time.time()
    out = Path(args.artifact) if args.artifact else None
    config = _config(args)
    if args.kind in ("random", "hypercube"):
        if args.kind == "random":
            if not 0.0 <= args.density <= 1.0:
                raise UsageError(f"density must lie in [0, 1], got {args.density}")
            g = build_random_graph(args.n, args.density, args.seed)
        else:
            g = build_hypercube(args.m)
        out = out or default_path("graph.bin")
        io.save_graph(out, g, {"kind": args.kind, "seed": args.seed})
        metrics = {"N": g.n, "edges": g.edge_count(), "density": g.density(), "graph": str(out)}
        report = Report("construct", config, True, metrics, seed=args.seed)
    else:
        _check_pq(args)
        _open_unit("eps", args.eps)
        if args.strict_paper_params:
            return _refuse(args)
        resolved, caps = _resolve_sphere_params(args)
        _open_unit("eta", resolved["eta"])
        kind = args.kind
        if kind == "auto":
            kind = "c1" if 2 * args.p <= args.q else "c2"
        if kind == "c1" and 2 * args.p > args.q:
            raise UsageError(f"construction 1 needs p/q <= 1/2, got {args.p}/{args.q}")
        if kind == "c2" and 2 * args.p <= args.q:
            raise UsageError(f"construction 2 needs p/q > 1/2, got {args.p}/{args.q}")
        build = build_construction1 if kind == "c1" else build_construction2
        family, coloring = build(args.p, args.q, resolved["k"], resolved["t"], args.n, resolved["eta"],
                                 args.seed, mode=args.mode, threads=args.threads)
        out = out or default_path("coloring.bin")
        fam_out = Path(args.family) if args.family else out.with_name(out.stem + ".family.bin")
        io.save_coloring(out, coloring)
        io.save_family(fam_out, family)
        config.update(resolved=resolved, caps_applied=caps)
        metrics = {"N": coloring.n, "construction": kind,
                   "edges": [coloring.color_class(f).edge_count() for f in range(coloring.q)],
                   "coloring": str(out), "family": str(fam_out)}
        report = Report("construct", config, True, metrics, seed=args.seed)
    report.meta = {"elapsed_s": time.time() - start}
    return _emit(report, args)


def _check_pq(args):
    if not 1 <= args.p < args.q:
        raise UsageError(f"need 1 <= p < q, got p={args.p}, q={args.q}")


def _refuse(args) -> int:
    derived = eps_defaults(args.q, args.eps)
    payload = {"refused": True, "reason": "uncapped parameters are infeasible at desk scale",
               "p": args.p, "q": args.q, "eps": args.eps, "uncapped": derived,
               "caps": {"k": MAX_K, "t": MAX_T, "n": MAX_N}}
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_REFUSED


# verify ---------------------------------------------------------------------

def _family_path(coloring_path: Path, given) -> Path:
    return Path(given) if given else coloring_path.with_name(coloring_path.stem + ".family.bin")


def _check_exactly_p(coloring, family, args) -> dict:
    v = coloring.exactly_p_violations()
    return {"pass": v == 0, "violations": v}


def _check_density(coloring, family, args) -> dict:
    target = coloring.p / coloring.q
    cross = [cross_pair_density(coloring, f) for f in range(coloring.q)]
    full = [coloring.color_class(f).density() for f in range(coloring.q)]
    ok = (all(abs(d - target) <= args.tol for d in cross)
          and all(abs(d - target) <= args.full_tol for d in full))
    return {"pass": ok, "target": target, "cross_density": cross, "full_density": full,
            "tol": args.tol, "full_tol": args.full_tol}


def _check_isomorphism(coloring, family, args) -> dict:
    if family is None:
        raise UsageError("isomorphism check needs the family points file (--family)")
    failures = [[f, j] for f in range(coloring.q) for j in range(family.t)
                if not isomorphism_check(family, coloring, f, j)]
    return {"pass": not failures, "failures": failures, "checked": coloring.q * family.t}


def _check_min_degree(coloring, family, args) -> dict:
    # the bound concerns the uncomplemented stage
    stage = coloring.complement() if coloring.params.get("complemented") else coloring
    origin = stage.vertex_origin
    if origin is None:
        raise UsageError("min-degree check needs a sphere-structured coloring")
    t = int(origin[:, 0].max()) + 1
    sizes = np.bincount(origin[:, 0], minlength=t)
    ratio = stage.p / stage.q
    worst = math.inf
    failures = []
    for f in range(stage.q):
        for j in range(t):
            for h in range(t):
                if h == j:
                    continue
                d = min_cross_degree(stage, f, j, h)
                need = (ratio - args.slack) * sizes[h]
                worst = min(worst, d / sizes[h])
                if d < need:
                    failures.append({"f": f, "j": j, "h": h, "min_degree": d, "required": need})
    return {"pass": not failures, "ratio": ratio, "slack": args.slack,
            "min_normalized_degree": worst, "failures": failures[:20]}


CHECKS = {"exactly-p": _check_exactly_p, "density": _check_density,
          "isomorphism": _check_isomorphism, "min-degree": _check_min_degree}


def cmd_verify(args) -> int:
    start = time.time()
    path = Path(args.input) if args.input else default_path("coloring.bin")
    coloring = io.load_coloring(path)
    fam_path = _family_path(path, args.family)
    family = io.load_family(fam_path) if fam_path.exists() else None
    checks = args.check or ["exactly-p"]
    if "all" in checks:
        checks = list(CHECKS)
    results = {name: CHECKS[name](coloring, family, args) for name in checks}
    report = Report("verify", _config(args), all(r["pass"] for r in results.values()),
                    {"N": coloring.n, "p": coloring.p, "q": coloring.q, "checks": results},
                    seed=coloring.params.get("seed"))
    report.meta = {"elapsed_s": time.time() - start}
    return _emit(report, args)


# estimate -------------------------------------------------------------------

def cmd_estimate(args) -> int:
    start = time.time()
    if args.k < 1 or args.samples < 1:
        raise UsageError("need k >= 1 and samples >= 1")
    if args.nu <= 0:
        raise UsageError(f"nu must be positive, got {args.nu}")
    if args.what == "strip":
        est = estimate_strip_measure(args.k, args.nu, args.samples, args.seed, args.threads)
        oracle = strip_oracle(args.k, args.nu)
        bound_ok = est.value <= est.bound
        metrics = {"bound": est.bound, "bound_ok": bound_ok}
    else:
        radius = strip_cap_radius(args.k, args.nu) if args.radius is None else args.radius
        if not 0.0 < radius <= 2.0:
            raise UsageError(f"radius must lie in (0, 2], got {radius}")
        lower = cap_lower_bound(args.nu)
        est = estimate_cap_measure(args.k, radius, args.samples, args.seed, args.threads, lower)
        oracle = cap_oracle(args.k, radius)
        bound_ok = est.value + args.sigmas * est.stderr >= lower
        metrics = {"radius": radius, "lower_bound": lower, "bound_ok": bound_ok}
    oracle_ok = est.within(oracle, args.oracle_sigmas)
    metrics.update(value=est.value, stderr=est.stderr, samples=est.samples, oracle=oracle,
                   oracle_sigmas=args.oracle_sigmas, oracle_ok=oracle_ok)
    report = Report(f"estimate_{args.what}", _config(args), bool(bound_ok and oracle_ok), metrics,
                    seed=args.seed, mode="sampled")
    report.meta = {"elapsed_s": time.time() - start}
    return _emit(report, args)


# drc / audit ----------------------------------------------------------------

def _load_graph_any(path: Path, color: int):
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == b"QPCO":
        return io.load_coloring(path).color_class(color)
    return io.load_graph(path)


def cmd_drc(args) -> int:
    start = time.time()
    path = Path(args.input) if args.input else default_path("graph.bin")
    g = _load_graph_any(path, args.color)
    if min(args.t, args.r) < 1:
        raise UsageError("need t >= 1 and r >= 1")
    report = drc_rich_subset(g, DrcParams(args.t, args.r, args.m, args.a), args.seed,
                             args.max_retries, args.require_guarantee)
    report.parameters.update(_config(args))
    report.meta = {"elapsed_s": time.time() - start}
    return _emit(report, args)


def cmd_audit(args) -> int:
    start = time.time()
    if args.what == "j-complement":
        path = Path(args.input) if args.input else default_path("coloring.family.bin")
        family = io.load_family(path)
        x = sample_uniform(family.k, 1, args.seed)[0]
        report = j_complement_audit(family, x)
    else:
        path = Path(args.input) if args.input else default_path("graph.bin")
        g = _load_graph_any(path, args.color)
        _open_unit("eps", args.eps)
        if args.what == "proposition":
            _check_pq(args)
            report = verify_proposition(g, args.p, args.q, args.eps, args.samples, args.seed)
        else:
            report = rich_subgraph_audit(g, args.s, args.eps, args.samples, args.seed)
    report.parameters.update(_config(args))
    report.seed = args.seed
    report.meta = {"elapsed_s": time.time() - start}
    return _emit(report, args)


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphere-drc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker bound; results do not depend on it")
        sp.add_argument("--timing", action="store_true", help="include wall-clock meta in the report")

    sp = sub.add_parser("construct", help="build a coloring or a test graph")
    common(sp)
    sp.add_argument("--kind", choices=["auto", "c1", "c2", "random", "hypercube"], default="auto")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--k", type=int, help=f"default derived from eps, capped at {MAX_K}")
    sp.add_argument("--t", type=int, help=f"sphere count; default derived from eps, capped at {MAX_T}")
    sp.add_argument("--n", type=int, default=500, help="points per sphere / random graph order")
    sp.add_argument("--eta", type=float, help="default eps / (132 q)")
    sp.add_argument("--mode", choices=["sampled", "partitioned"], default="sampled")
    sp.add_argument("--density", type=float, default=0.5)
    sp.add_argument("--m", type=int, default=4, help="hypercube dimension")
    sp.add_argument("--artifact", help="binary output path")
    sp.add_argument("--family", help="points output path")
    sp.add_argument("--strict-paper-params", action="store_true",
                    help="print the uncapped derived parameters and refuse to run")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="audit a saved coloring")
    common(sp)
    sp.add_argument("--input")
    sp.add_argument("--family")
    sp.add_argument("--check", action="append", choices=[*CHECKS, "all"])
    sp.add_argument("--tol", type=float, default=0.02)
    sp.add_argument("--full-tol", type=float, default=0.03)
    sp.add_argument("--slack", type=float, default=0.05)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("estimate", help="Monte Carlo strip or cap measure")
    common(sp)
    sp.add_argument("--what", choices=["strip", "cap"], default="strip")
    sp.add_argument("--k", type=int, default=8)
    sp.add_argument("--nu", type=float, default=0.1)
    sp.add_argument("--radius", type=float)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--sigmas", type=float, default=4.0)
    sp.add_argument("--oracle-sigmas", type=float, default=5.0)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("drc", help="dependent random choice on a saved graph")
    common(sp)
    sp.add_argument("--input")
    sp.add_argument("--color", type=int, default=0, help="color class when the input is a coloring")
    sp.add_argument("--t", type=int, default=2, help="number of random vertices drawn")
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--a", type=int, default=12)
    sp.add_argument("--max-retries", type=int, default=50)
    sp.add_argument("--require-guarantee", action="store_true")
    sp.set_defaults(func=cmd_drc)

    sp = sub.add_parser("audit", help="counting and richness audits")
    common(sp)
    sp.add_argument("--what", choices=["proposition", "rich", "j-complement"], default="proposition")
    sp.add_argument("--input")
    sp.add_argument("--color", type=int, default=0)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--samples", type=int, default=10**4)
    sp.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (UsageError, PreconditionError, ResourceError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (ArtifactError, FileNotFoundError) as exc:
        sys.stderr.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

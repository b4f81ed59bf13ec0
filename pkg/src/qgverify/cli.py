"""Command-line front end: every command prints one JSON report."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Optional, Sequence

from . import __version__
from .cache import load_or_enumerate
from .config import load_config, parse_k_range
from .dynamics import alternating_projection_run, iterations_csv
from .errors import ParameterError, QGVError
from .fixspaces import generator_family, parse_descriptor
from .generation import (
    check_generation,
    one_singleton_rank,
    prop_diff_condition3,
    prop_diff_conditions,
    ygram_check,
)
from .linalg import dump_matrix, gram, rank
from .primes import random_primes
from .suite import PROFILES, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _ks(text: str) -> list[int]:
    lo, hi = parse_k_range(text)
    return list(range(lo, hi + 1))


def _map(fn, items: Sequence, workers: int) -> list:
    """Order-preserving map, over a process pool when more than one worker is allowed."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# worker entry points live at module level so the pool can pickle them

def _gen_job(k, a, b, cfg, route):
    return check_generation(a, b, None, k, cfg, route).to_dict()


def _prop_job(k, N, cfg, all_conditions):
    if all_conditions:
        return prop_diff_conditions(N, k, cfg)
    return prop_diff_condition3(N, k, cfg).to_dict()


def _roland_job(k, N, cfg):
    return one_singleton_rank(N, k, cfg).to_dict()


def _ygram_job(k, N, cfg):
    return ygram_check(N, k, cfg).to_dict()


# ------------------------------------------------------------------ commands

def cmd_enumerate(args, cfg):
    parts, info = load_or_enumerate(args.kind, args.k, cfg.cache_dir)
    return {
        "kind": args.kind,
        "k": args.k,
        "count": len(parts),
        "items": [p.encode() for p in parts],
        "cache_warning": info.warning,
    }


def cmd_gram(args, cfg):
    d = parse_descriptor(args.family)
    fam = generator_family(d, d.N, args.k)
    out = {"family": str(d), "N": d.N, "k": args.k, "size": len(fam), "labels": fam.labels}
    if len(fam) == 0:
        out["gram"] = []
        if args.rank:
            out["rank"] = {"rank": 0, "certified": True}
        return out
    G = gram(fam)
    out["gram"] = [[x if isinstance(x, int) else str(x) for x in row] for row in G.entries]
    if args.rank:
        out["rank"] = rank(G, **cfg.rank_opts).to_dict()
    if args.dump:
        with open(args.dump, "w") as fh:
            dump_matrix(G, fh, f"{d}:k={args.k}")
        out["dump"] = args.dump
    return out


def cmd_check_generation(args, cfg):
    ks = _ks(args.k)
    reports = _map(partial(_gen_job, a=args.a, b=args.b, cfg=cfg, route=args.route), ks, cfg.parallelism)
    ok = [r["k"] for r in reports if r["verdict"] == "generated_at_k"]
    generated_up_to = None
    for k in ks:
        if k not in ok:
            break
        generated_up_to = k
    return {"reports": reports, "generated_up_to": generated_up_to}


def cmd_prop_diff(args, cfg):
    ks = _ks(args.k)
    reports = _map(partial(_prop_job, N=args.N, cfg=cfg, all_conditions=args.all_conditions),
                   ks, cfg.parallelism)
    return {"reports": reports}


def cmd_roland(args, cfg):
    ks = _ks(args.k)
    if len(ks) > 1:
        ks = [k for k in ks if k % 2 == 1]
        if not ks:
            raise ParameterError(f"range {args.k} contains no odd degree")
    reports = _map(partial(_roland_job, N=args.N, cfg=cfg), ks, cfg.parallelism)
    return {"reports": reports, "exploratory": True}


def cmd_ygram(args, cfg):
    reports = _map(partial(_ygram_job, N=args.N, cfg=cfg), _ks(args.k), cfg.parallelism)
    return {"reports": reports}


def cmd_dynamics(args, cfg):
    rep = alternating_projection_run(args.a, args.b, None, args.k, args.max_iter, args.tol, cfg)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(iterations_csv(rep))
    out = rep.to_dict()
    out["monotone"] = rep.is_monotone()
    out["within_bound"] = rep.within_bound()
    return out


def cmd_suite(args, cfg):
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise ParameterError(f"bad criterion list {args.only!r}") from None
    progress = (lambda r: print(r.line, file=sys.stderr, flush=True)) if args.verbose else None
    results = run_suite(args.profile, only, cfg, progress)
    return {
        "profile": args.profile,
        "passed": all(r.passed for r in results),
        "criteria": [r.to_dict() for r in results],
    }


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qgverify", description=__doc__)
    p.add_argument("--version", action="version", version=f"qgverify {__version__}")
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="seed for the modular prime selection")
    p.add_argument("--primes", type=int, dest="prime_count", help="number of moduli (>= 2)")
    p.add_argument("--no-escalation", action="store_true", help="skip exact certification of deficient ranks")
    p.add_argument("--dense-limit", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--workers", type=int, dest="parallelism")
    p.add_argument("--float-tol", type=float)
    p.add_argument("--no-timing", action="store_true", help="zero all timings (byte-stable reports)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enumerate", help="list a partition family")
    s.add_argument("--kind", required=True)
    s.add_argument("--k", type=int, required=True)

    s = sub.add_parser("gram", help="Gram matrix of a generator family")
    s.add_argument("--family", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--rank", action="store_true")
    s.add_argument("--dump", help="also write the matrix in qgv-matrix format")

    s = sub.add_parser("check-generation", help="compare Fix(A) ∩ Fix(B) with Fix")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--k", required=True, help="degree or range lo..hi")
    s.add_argument("--route", choices=("auto", "gram", "invariant"), default="auto")

    s = sub.add_parser("prop-diff", help="rank of the x_p family")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--all-conditions", action="store_true", help="also decide the two generation conditions")

    s = sub.add_parser("roland", help="rank of the one-singleton family (odd k)")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--k", required=True)

    s = sub.add_parser("ygram", help="rank of the y-family")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--k", required=True)

    s = sub.add_parser("dynamics", help="alternating projections in float64")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--csv", help="also write the m,distance table here")

    s = sub.add_parser("suite", help="run the acceptance battery")
    s.add_argument("--profile", choices=PROFILES, default="ci")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--verbose", action="store_true", help="progress lines on stderr")
    return p


COMMANDS = {
    "enumerate": cmd_enumerate,
    "gram": cmd_gram,
    "check-generation": cmd_check_generation,
    "prop-diff": cmd_prop_diff,
    "roland": cmd_roland,
    "ygram": cmd_ygram,
    "dynamics": cmd_dynamics,
    "suite": cmd_suite,
}


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    out = None
    try:
        args = build_parser().parse_args(argv)
        out = args.out
        cfg = load_config(args.config).updated(
            seed=args.seed,
            prime_count=args.prime_count,
            dense_limit=args.dense_limit,
            cache_dir=args.cache_dir,
            parallelism=args.parallelism,
            float_tol=args.float_tol,
        )
        if args.no_escalation:
            cfg = cfg.updated(bareiss_escalation=False)
        if args.no_timing:
            cfg = cfg.updated(record_timing=False)
        t0 = time.perf_counter()
        results = COMMANDS[args.command](args, cfg)
        timing = round((time.perf_counter() - t0) * 1000, 3) if cfg.record_timing else 0
        params = {k: v for k, v in vars(args).items() if k not in ("command",)}
        report = {
            "tool": "qgverify",
            "version": __version__,
            "command": args.command,
            "params": params,
            "config_digest": cfg.digest(),
            "results": results,
            "timing_ms": timing,
            "arithmetic": {
                "mode": "modular+exact-certificate" if cfg.bareiss_escalation else "modular",
                "primes": random_primes(cfg.prime_count, cfg.seed),
                "seed": cfg.seed,
            },
        }
        _emit(_dumps(report), out)
        return 0
    except QGVError as exc:
        _emit(_dumps({"error": exc.kind, "detail": str(exc)}), out)
        return 2
    except OSError as exc:
        sys.stdout.write(_dumps({"error": "io_error", "detail": str(exc)}))
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

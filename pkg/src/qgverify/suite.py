"""The acceptance battery: fourteen exact checks with runtime budgets."""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .config import RunConfig
from .counting import bell, catalan, double_factorial, motzkin
from .dynamics import alternating_projection_run, synthetic_lines_run
from .fixspaces import fix_family, generator_family, parse_descriptor, sn_average_oracle
from .generation import (
    check_generation,
    one_singleton_rank,
    prop_diff_conditions,
    stabilizer_triangularity_check,
    ygram_check,
)
from .linalg import gram, rank
from .partitions import EVENODD_ALL, NC2, NC21, P2, SET_PARTITIONS, enumerate_family
from .tensors import inner_product

PROFILES = ("ci", "extended")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    budget_s: float
    elapsed_s: float = 0.0
    detail: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.elapsed_s:.2f}s / {self.budget_s:.0f}s)"

    def to_dict(self) -> dict:
        return asdict(self)


# each check returns (ok, detail)

def _counting(cfg, profile):
    rows = []
    table = [
        (NC2, range(0, 17, 2), lambda k: catalan(k // 2)),
        (NC21, range(0, 15), motzkin),
        (P2, range(0, 13, 2), lambda k: double_factorial(k - 1)),
        (SET_PARTITIONS, range(0, 11), bell),
        (EVENODD_ALL, range(0, 13, 2), lambda k: math.factorial(k // 2)),
    ]
    ok = True
    for kind, ks, formula in table:
        for k in ks:
            got, want = len(enumerate_family(kind, k)), formula(k)
            ok &= got == want
            rows.append([str(kind), k, got, want])
    return ok, {"rows": rows}


def _temperley_lieb(cfg, profile):
    rows, ok = [], True
    for N in (2, 3, 4):
        for k in (2, 4, 6, 8, 10):
            r = rank(gram(fix_family(N, k)), **cfg.rank_opts)
            ok &= r.rank == catalan(k // 2) and r.certified
            rows.append([N, k, r.rank, catalan(k // 2)])
    return ok, {"rows": rows}


def _gram_cross(cfg, profile):
    rows, ok = [], True
    for N in (1, 2, 3, 4):
        for k in range(0, 9, 2):
            fam = generator_family(parse_descriptor(f"on:N={N}"), N, k)
            fast = gram(fam).entries
            mem = fam.members
            n = len(mem)
            agree = all(fast[i][j] == inner_product(mem[i], mem[j]) for i in range(n) for j in range(n))
            ok &= agree
            rows.append([N, k, n, agree])
    return ok, {"rows": rows}


def _stabilizer(cfg, profile):
    rows, ok = [], True
    for N in (3, 4):
        for k in range(0, 9):
            fam = generator_family(parse_descriptor(f"stab:N={N},xi=e1"), N, k)
            r = rank(gram(fam), **cfg.rank_opts)
            tri = stabilizer_triangularity_check(N, k, cfg)
            ok &= r.rank == motzkin(k) and tri
            rows.append([N, k, r.rank, motzkin(k), tri])
    return ok, {"rows": rows}


def _generation_rows(pairs, cfg, expect=None):
    rows, ok = [], True
    for a, b, N, k in pairs:
        rep = check_generation(a, b, N, k, cfg)
        good = rep.generated and rep.containment_ok
        if expect is not None:
            good &= rep.dimIntersection == expect(k)
        ok &= good
        rows.append([a, b, k, rep.dimA, rep.dimB, rep.dimIntersection, rep.dimFix, rep.verdict])
    return ok, rows


def _even_catalan(k):
    return catalan(k // 2) if k % 2 == 0 else 0


def _theorem_n_gt_3_first(cfg, profile):
    pairs = [("on:N=4", "stab:N=4,xi=e1", 4, k) for k in range(0, 9)]
    pairs += [("on:N=5", "stab:N=5,xi=e1", 5, k) for k in range(0, 7)]
    ok, rows = _generation_rows(pairs, cfg, _even_catalan)
    return ok, {"rows": rows}


def _theorem_n_gt_3_second(cfg, profile):
    pairs = [("stab:N=4,xi=e1", "stab:N=4,xi=3/5,4/5,0,0", 4, k) for k in range(0, 7)]
    ok, rows = _generation_rows(pairs, cfg)
    return ok, {"rows": rows}


def _prop_diff(cfg, profile):
    rows, ok = [], True
    for k in range(1, 9):
        res = prop_diff_conditions(4, k, cfg)
        c3 = res["reports"][2]
        expected = motzkin(k) - _even_catalan(k)
        good = res["agree"] and res["condition3"] and c3["expected_count"] == expected
        ok &= good
        rows.append([k, res["condition1"], res["condition2"], res["condition3"], c3["computed_rank"], expected])
    return ok, {"rows": rows}


def _theorem_n_eq_4(cfg, profile):
    kmax = 8 if profile == "extended" else 6
    pairs = [("sn:N=4", "fp:N=4,a=2,b=2", 4, k) for k in range(0, kmax + 1)]
    ok, rows = _generation_rows(pairs, cfg)
    return ok, {"k_max": kmax, "rows": rows}


def _unitary_lemma(cfg, profile):
    rows, ok = [], True
    for k in range(0, 5):
        rep = check_generation("ufp:N=4,a=2,b=2", "un:N=4", 4, 2 * k, cfg)
        good = rep.dimIntersection == catalan(k) and rep.generated
        ok &= good
        rows.append([2 * k, rep.dimIntersection, catalan(k)])
    return ok, {"rows": rows}


def _ygram(cfg, profile):
    rows, ok = [], True
    for k in range(0, 7):
        r = ygram_check(4, k, cfg)
        ok &= r.full_rank
        rows.append([k, r.computed_rank, r.expected_count])
    return ok, {"rows": rows}


def _one_singleton(cfg, profile):
    # exploratory: recorded, not asserted
    rows = []
    for N in (2, 3):
        for k in (1, 3, 5, 7, 9):
            r = one_singleton_rank(N, k, cfg)
            rows.append([N, k, r.computed_rank, r.expected_count, r.full_rank])
    return True, {"rows": rows, "all_full_rank": all(r[-1] for r in rows)}


def _coordstab(cfg, profile):
    pairs = [("on:N=5", "coordstab:N=5,B=1-3", 5, k) for k in range(0, 5)]
    ok, rows = _generation_rows(pairs, cfg)
    return ok, {"rows": rows}


def _dynamics(cfg, profile):
    rep = alternating_projection_run("on:N=4", "stab:N=4,xi=e1", 4, 4, max_iter=200,
                                     tol=cfg.float_tol, config=cfg)
    theta = math.pi / 4
    lines = synthetic_lines_run(theta)
    want = math.cos(theta) ** 2
    rate_ok = abs(lines.estimated_rate - want) <= 0.05 * want
    ok = (rep.limit_rank == rep.exact_intersection_dim == 2 and rep.converged
          and abs(rep.limit_trace - 2) < 1e-8 and rep.is_monotone() and rep.within_bound()
          and lines.is_monotone() and lines.within_bound() and rate_ok)
    return ok, {
        "limit_rank": rep.limit_rank,
        "limit_trace": rep.limit_trace,
        "exact_intersection_dim": rep.exact_intersection_dim,
        "friedrichs_cos": rep.friedrichs_cos,
        "estimated_rate": rep.estimated_rate,
        "iterations": len(rep.iterations),
        "monotone": rep.is_monotone(),
        "within_bound": rep.within_bound(),
        "lines_rate": lines.estimated_rate,
        "lines_expected": want,
    }


def _sn_span(cfg, profile):
    rows, ok = [], True
    for N in (2, 3, 4):
        for k in range(0, 5):
            fam = generator_family(parse_descriptor(f"sn:N={N}"), N, k)
            R = sn_average_oracle(N, k)
            r_fam = rank(gram(fam), **cfg.rank_opts).rank
            r_R = rank(R.num.tolist(), **cfg.rank_opts).rank
            fixed = all(R.fixes(v) for v in fam.members)
            good = fixed and r_fam == r_R
            ok &= good
            rows.append([N, k, r_fam, r_R, fixed])
    return ok, {"rows": rows}


CRITERIA: list[tuple[int, str, Callable, float]] = [
    (1, "enumeration counts match recursions", _counting, 10),
    (2, "NC2 Gram has full rank Catalan(k/2)", _temperley_lieb, 30),
    (3, "join-count Gram equals sparse dot products", _gram_cross, 60),
    (4, "stabilizer family rank Motzkin(k) and triangularity", _stabilizer, 120),
    (5, "O_N and Stab(e1) generate at every degree", _theorem_n_gt_3_first, 600),
    (6, "two stabilizers generate at every degree", _theorem_n_gt_3_second, 300),
    (7, "three equivalent conditions agree", _prop_diff, 300),
    (8, "S_4 and the block free product generate", _theorem_n_eq_4, 300),
    (9, "unitary free product meets U_4 in Catalan(k)", _unitary_lemma, 120),
    (10, "y-family has full rank", _ygram, 120),
    (11, "one-singleton ranks (exploratory)", _one_singleton, 600),
    (12, "O_5 and a coordinate stabilizer generate", _coordstab, 180),
    (13, "alternating projection dynamics", _dynamics, 60),
    (14, "set-partition span equals S_N averaging range", _sn_span, 120),
]

EXTENDED_BUDGETS = {8: 1800}


def run_criterion(number: int, profile: str = "ci", config: Optional[RunConfig] = None) -> CriterionResult:
    cfg = config if config is not None else RunConfig()
    num, title, fn, budget = next(c for c in CRITERIA if c[0] == number)
    if profile == "extended":
        budget = EXTENDED_BUDGETS.get(num, budget)
    t0 = time.perf_counter()
    try:
        ok, detail = fn(cfg, profile)
        err = None
    except Exception as exc:  # a crash is a failed criterion, reported with the reason
        ok, detail = False, {"traceback": traceback.format_exc()}
        err = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed <= budget
    if not cfg.record_timing:
        elapsed = 0.0
    return CriterionResult(num, title, passed, budget, round(elapsed, 3), detail, err)


def run_suite(profile: str = "ci", only=None, config: Optional[RunConfig] = None,
              progress: Optional[Callable[[CriterionResult], None]] = None) -> list[CriterionResult]:
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    out = []
    for num, *_ in CRITERIA:
        if only and num not in only:
            continue
        res = run_criterion(num, profile, config)
        if progress:
            progress(res)
        out.append(res)
    return out

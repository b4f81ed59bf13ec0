"""Alternating projections (P1 P2)^m -> P in float64, with rate estimates.

Projections are built exactly and only then converted to float64, so the
iteration runs on matrices that are idempotent to machine precision.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig
from .errors import ParameterError, ResourceError
from .family import GeneratorFamily
from .fixspaces import generator_family, parse_descriptor
from .linalg import intersection_basis, projection_matrix, projection_onto

__all__ = [
    "DynamicsReport",
    "alternating_projection_run",
    "run_projections",
    "friedrichs_cos",
    "friedrichs_cos_from_projections",
    "line_projector",
    "synthetic_lines_run",
    "estimate_rate",
    "iterations_csv",
]

EPS = float(np.finfo(np.float64).eps)
# distances below this are rounding noise and are left out of the rate fit
RATE_FLOOR = 1e-13


@dataclass
class DynamicsReport:
    N: int
    k: int
    a: str
    b: str
    iterations: list = field(default_factory=list)
    estimated_rate: float = 0.0
    friedrichs_cos: float = 0.0
    converged: bool = False
    limit_rank: int = 0
    limit_trace: float = 0.0
    exact_intersection_dim: Optional[int] = None
    tol: float = 1e-10
    elapsed: float = 0.0

    @property
    def distances(self) -> list[float]:
        return [d for _, d in self.iterations]

    def is_monotone(self, slack: float = 10 * EPS) -> bool:
        ds = self.distances
        return all(b <= a + slack for a, b in zip(ds, ds[1:]))

    def within_bound(self, slack: float = 1e-10) -> bool:
        """‖(P1P2)^m - P‖ <= c^(2m-1) for every recorded m."""
        c = self.friedrichs_cos
        return all(d <= c ** (2 * m - 1) + slack for m, d in self.iterations)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["iterations"] = [[m, x] for m, x in self.iterations]
        return d


def _opnorm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def friedrichs_cos_from_projections(P1: np.ndarray, P2: np.ndarray, P: np.ndarray,
                                    zero_tol: float = 1e-12) -> float:
    """Largest singular value of P1 P2 - P; 0 when one span contains the other."""
    c = _opnorm(P1 @ P2 - P)
    if c < zero_tol:
        return 0.0
    return min(c, 1.0 - EPS)


def _exact_projections(famA: GeneratorFamily, famB: GeneratorFamily, dense_limit: int):
    D = famA.N ** famA.k
    if D > dense_limit:
        raise ResourceError(f"dense projection of size {D} exceeds limit {dense_limit}")
    zero = np.zeros((D, D))
    P1 = projection_matrix(famA, dense_limit).to_float() if len(famA) else zero
    P2 = projection_matrix(famB, dense_limit).to_float() if len(famB) else zero
    basis = intersection_basis(famA, famB) if len(famA) and len(famB) else []
    P = projection_onto(basis, dense_limit).to_float() if basis else zero
    return P1, P2, P, len(basis)


def friedrichs_cos(famA: GeneratorFamily, famB: GeneratorFamily, dense_limit: int = 4096) -> float:
    P1, P2, P, _ = _exact_projections(famA, famB, dense_limit)
    return friedrichs_cos_from_projections(P1, P2, P)


def estimate_rate(distances: Sequence[float], floor: float = RATE_FLOOR) -> float:
    """Per-step contraction factor from a log-linear fit over the tail."""
    pts = [(m, d) for m, d in enumerate(distances, 1) if d > floor]
    if len(pts) < 2:
        return 0.0
    tail = pts[len(pts) // 2:] if len(pts) >= 4 else pts
    ms = np.array([m for m, _ in tail], dtype=float)
    logs = np.log([d for _, d in tail])
    slope = np.polyfit(ms, logs, 1)[0]
    return float(min(1.0, max(0.0, math.exp(slope))))


def run_projections(P1: np.ndarray, P2: np.ndarray, P: np.ndarray, max_iter: int = 100,
                    tol: float = 1e-10):
    """Iterate Q_m = (P1 P2)^m; returns (iterations, Q_last, converged)."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")
    step = P1 @ P2
    Q = np.eye(step.shape[0])
    iterations = []
    converged = False
    for m in range(1, max_iter + 1):
        Q = Q @ step
        d = _opnorm(Q - P)
        iterations.append((m, d))
        if d < tol:
            converged = True
            break
    return iterations, Q, converged


def _limit_stats(Q: np.ndarray) -> tuple[int, float]:
    if Q.size == 0:
        return 0, 0.0
    sv = np.linalg.svd(Q, compute_uv=False)
    return int(np.sum(sv > 0.5)), float(np.trace(Q))


def alternating_projection_run(dA, dB, N: Optional[int] = None, k: int = 0, max_iter: int = 100,
                               tol: float = 1e-10, config: Optional[RunConfig] = None) -> DynamicsReport:
    cfg = config if config is not None else RunConfig()
    A = parse_descriptor(dA) if isinstance(dA, str) else dA
    B = parse_descriptor(dB) if isinstance(dB, str) else dB
    N = A.N if N is None else N
    if A.N != N or B.N != N:
        raise ParameterError(f"descriptors {A} and {B} are not both for N={N}")
    t0 = time.perf_counter()
    if N ** k > cfg.dense_limit:
        raise ResourceError(f"dense projection of size {N ** k} exceeds limit {cfg.dense_limit}")
    famA, famB = generator_family(A, N, k), generator_family(B, N, k)
    P1, P2, P, dim = _exact_projections(famA, famB, cfg.dense_limit)
    iterations, Q, converged = run_projections(P1, P2, P, max_iter, tol)
    lrank, ltrace = _limit_stats(Q)
    elapsed = round(time.perf_counter() - t0, 6) if cfg.record_timing else 0.0
    return DynamicsReport(
        N, k, str(A), str(B), iterations,
        estimate_rate([d for _, d in iterations]),
        friedrichs_cos_from_projections(P1, P2, P),
        converged, lrank, ltrace, dim, tol, elapsed,
    )


def line_projector(theta: float) -> np.ndarray:
    u = np.array([math.cos(theta), math.sin(theta)])
    return np.outer(u, u)


def synthetic_lines_run(theta: float, max_iter: int = 200, tol: float = 1e-10) -> DynamicsReport:
    """Two lines in R^2 at angle theta (intersection {0} unless theta is a multiple of pi)."""
    P1, P2 = line_projector(0.0), line_projector(theta)
    same = abs(math.sin(theta)) < 1e-15
    P = P1 if same else np.zeros((2, 2))
    iterations, Q, converged = run_projections(P1, P2, P, max_iter, tol)
    lrank, ltrace = _limit_stats(Q)
    return DynamicsReport(
        2, 1, "line(0)", f"line({theta:.12g})", iterations,
        estimate_rate([d for _, d in iterations]),
        friedrichs_cos_from_projections(P1, P2, P),
        converged, lrank, ltrace, 1 if same else 0, tol,
    )


def iterations_csv(report: DynamicsReport) -> str:
    buf = io.StringIO()
    buf.write("m,distance\n")
    for m, d in report.iterations:
        buf.write(f"{m},{d!r}\n")
    return buf.getvalue()

"""Submajorization and log-submajorization comparators and inequality checks.

Comparisons run in the log domain with a small additive slack absorbing SVD
rounding; zero singular values contribute -inf, and a partial sum containing
-inf passes every <= comparison on the dominated side.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from .curve import HilbertCurveMap
from .decompose import decompose
from .detbrown import fk_determinant
from .matrices import as_operator, operator_norm, singular_values

LOG_SLACK = 1e-10


@dataclasses.dataclass(frozen=True)
class Power:
    """Gauge t -> t^p; composed with exp it is convex for every p > 0."""

    p: float

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.p

    def label(self) -> str:
        return f"pow:{self.p:g}"


@dataclasses.dataclass(frozen=True)
class LogShift:
    """Gauge t -> log(1 + s t); composed with exp it is convex for s > 0."""

    s: float

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("s must be positive")

    def __call__(self, t):
        return np.log1p(self.s * np.asarray(t, dtype=float))

    def label(self) -> str:
        return f"logshift:{self.s:g}"


@dataclasses.dataclass(frozen=True)
class CustomGauge:
    """User gauge certified increasing with convex composition with exp.

    The certificate checks nonnegative second differences of phi(exp(x)) on a
    log grid covering [exp(lo), exp(hi)].
    """

    fn: Callable
    lo: float = -12.0
    hi: float = 6.0
    grid_points: int = 1024

    def __post_init__(self):
        xs = np.linspace(self.lo, self.hi, self.grid_points)
        vals = np.asarray(self.fn(np.exp(xs)), dtype=float)
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError("gauge is not increasing on the certificate grid")
        second = np.diff(vals, 2)
        if np.any(second < -1e-12 * max(1.0, np.max(np.abs(vals)))):
            raise ValueError("gauge composed with exp is not convex on the grid")

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def label(self) -> str:
        return "custom"


DEFAULT_GAUGES = (Power(0.5), Power(1.0), Power(2.0), Power(4.0),
                  LogShift(1.0), LogShift(10.0))


def gauge_trace(A, gauge) -> float:
    """Normalized trace of gauge(|A|), via singular values."""
    return float(np.mean(gauge(singular_values(A))))


@dataclasses.dataclass(frozen=True)
class MajorizationVerdict:
    ok: bool
    worst_margin: float
    worst_k: int

    def __bool__(self) -> bool:
        return self.ok


def submajorizes(A, B) -> MajorizationVerdict:
    """True iff every partial sum of B's singular values is below A's."""
    svA = singular_values(A)
    svB = singular_values(B)
    if len(svA) != len(svB):
        raise ValueError("dimension mismatch")
    slack = 1e-10 * max(float(svA[0]) if len(svA) else 0.0, 1e-300)
    margins = np.cumsum(svA) - np.cumsum(svB)
    k = int(np.argmin(margins))
    return MajorizationVerdict(bool(np.all(margins >= -slack)),
                               float(margins[k]), k + 1)


def _log_partials(sv: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.cumsum(np.log(sv))


def log_submajorizes(A, B) -> MajorizationVerdict:
    """True iff every partial product of B's singular values is below A's.

    Compared in the log domain; a -inf on the dominated side passes.
    """
    svA = singular_values(A)
    svB = singular_values(B)
    if len(svA) != len(svB):
        raise ValueError("dimension mismatch")
    cumA = _log_partials(svA)
    cumB = _log_partials(svB)
    ok = True
    worst = math.inf
    worst_k = 0
    for k in range(len(svA)):
        if cumB[k] == -math.inf:
            continue  # zero product on the dominated side: trivially below
        margin = cumA[k] - cumB[k]
        if margin < worst:
            worst, worst_k = margin, k + 1
        if margin < -LOG_SLACK:
            ok = False
    if worst == math.inf:
        worst = 0.0
    return MajorizationVerdict(ok, float(worst), worst_k)


@dataclasses.dataclass(frozen=True)
class CheckRow:
    check: str
    params: str
    lhs: float
    rhs: float
    margin: float
    ok: bool


@dataclasses.dataclass(frozen=True)
class CheckReport:
    rows: tuple
    skipped: tuple = ()

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]


def hlp_transfer(A, B, gauges: Sequence) -> CheckReport:
    """Submajorization transfers to trace inequalities for convex gauges.

    Requires submajorizes(A, B); when the hypothesis fails the gauges are
    reported as skipped rather than failed. Gauges here must themselves be
    increasing and convex (Power with p >= 1, for instance).
    """
    if not submajorizes(A, B).ok:
        return CheckReport((), skipped=tuple(g.label() for g in gauges))
    rows = []
    for gauge in gauges:
        lhs = gauge_trace(B, gauge)
        rhs = gauge_trace(A, gauge)
        slack = 1e-10 * max(1.0, rhs)
        rows.append(CheckRow("hlp", gauge.label(), lhs, rhs, rhs - lhs,
                             lhs <= rhs + slack))
    return CheckReport(tuple(rows))


def tau_log_plus(A, t: float) -> float:
    """Normalized trace of max(log(|A| / t), 0)."""
    if t <= 0:
        raise ValueError("t must be positive")
    sv = singular_values(A)
    with np.errstate(divide="ignore"):
        vals = np.log(sv / t)
    return float(np.mean(np.maximum(vals, 0.0)))


def log_plus_equivalence_check(A, B, t_grid=None) -> CheckReport:
    """Biconditional: log-submajorization iff log-plus traces dominate on a grid.

    The grid always includes the singular values of A (the proof's choice of
    thresholds) and log-spaced fill covering (0, max norm].
    """
    A = as_operator(A)
    B = as_operator(B)
    svA = singular_values(A)
    top = max(float(svA[0]), operator_norm(B), 1e-12)
    if t_grid is None:
        fill = np.geomspace(top * 1e-8, top, 64)
        t_grid = np.concatenate([svA[svA > 0], fill])
    t_grid = np.unique(np.asarray(t_grid, dtype=float))
    t_grid = t_grid[t_grid > 0]
    lhs_verdict = log_submajorizes(A, B).ok
    failing = [float(t) for t in t_grid
               if tau_log_plus(B, t) > tau_log_plus(A, t) + 1e-10]
    rhs_verdict = not failing
    row = CheckRow(
        "log_plus_equivalence",
        f"grid:{len(t_grid)};failing:{len(failing)}",
        float(lhs_verdict), float(rhs_verdict), 0.0,
        lhs_verdict == rhs_verdict,
    )
    return CheckReport((row,))


def shift_lemma_check(A, B, scales=(1, 2, 4, 8)) -> CheckReport:
    """B log-submajorized by A (both PSD) implies nB + 1 log-submajorized by nA + 1."""
    A = as_operator(A)
    B = as_operator(B)
    herm_gap = max(np.linalg.norm(A - A.conj().T, 2), np.linalg.norm(B - B.conj().T, 2))
    if herm_gap > 1e-10 * max(1.0, operator_norm(A), operator_norm(B)):
        return CheckReport((), skipped=("non-hermitian input",))
    if np.min(np.linalg.eigvalsh(A)) < -1e-10 or np.min(np.linalg.eigvalsh(B)) < -1e-10:
        return CheckReport((), skipped=("non-psd input",))
    if not log_submajorizes(A, B).ok:
        return CheckReport((), skipped=("hypothesis B <<_log A fails",))
    eye = np.eye(A.shape[0])
    rows = []
    for c in scales:
        verdict = log_submajorizes(c * A + eye, c * B + eye)
        rows.append(CheckRow("shift", f"n:{c}", 0.0, 0.0,
                             verdict.worst_margin, verdict.ok))
    return CheckReport(tuple(rows))


def pinch_log_check(T, p) -> CheckReport:
    """For T-invariant p: the two-block pinching is log-submajorized by T,
    and the shifted determinants satisfy the matching inequality."""
    T = as_operator(T)
    p = as_operator(p)
    normT = max(operator_norm(T), 1e-300)
    if np.linalg.norm(T @ p - p @ T @ p, 2) > 1e-8 * normT:
        raise ValueError("range of p is not T-invariant")
    n = T.shape[0]
    S = T @ p + (np.eye(n) - p) @ T
    verdict = log_submajorizes(T, S)
    eye = np.eye(n)
    lhs = fk_determinant(eye + S.conj().T @ S)
    rhs = fk_determinant(eye + T.conj().T @ T)
    det_ok = lhs <= rhs * (1 + 1e-10)
    rows = (
        CheckRow("pinch_logmaj", "", 0.0, 0.0, verdict.worst_margin, verdict.ok),
        CheckRow("pinch_det", "", lhs, rhs, rhs - lhs, det_ok),
    )
    return CheckReport(rows)


def weyl_check(T, gauges: Sequence = DEFAULT_GAUGES,
               curve: HilbertCurveMap | None = None) -> CheckReport:
    """Weyl inequality for the decomposition: N log-submajorized by T, and the
    gauge traces of |N| equal the eigenvalue-modulus averages and stay below
    those of |T|."""
    T = as_operator(T)
    result = decompose(T, curve)
    N = result.N
    verdict = log_submajorizes(T, N)
    rows = [CheckRow("weyl_logmaj", "", 0.0, 0.0, verdict.worst_margin, verdict.ok)]
    moduli = np.abs(np.linalg.eigvals(T))
    for gauge in gauges:
        lhs = gauge_trace(N, gauge)
        from_eigs = float(np.mean(gauge(moduli)))
        rhs = gauge_trace(T, gauge)
        eq_ok = abs(lhs - from_eigs) <= 1e-9 * max(1.0, abs(from_eigs))
        ineq_ok = lhs <= rhs + 1e-10 * max(1.0, rhs)
        rows.append(CheckRow("weyl_equality", gauge.label(), lhs, from_eigs,
                             lhs - from_eigs, eq_ok))
        rows.append(CheckRow("weyl_inequality", gauge.label(), lhs, rhs,
                             rhs - lhs, ineq_ok))
    return CheckReport(tuple(rows))

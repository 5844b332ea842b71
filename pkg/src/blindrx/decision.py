"""Multistage hypothesis decision: per-hypothesis log-likelihood,
modulation majority vote across coding candidates, and the parity-check
consistency decision (with its tie path over the full grid).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detector import DetectionResult
from .estimator import single_log_likelihood

__all__ = [
    "HypothesisRecord",
    "FinalDecision",
    "log_likelihood",
    "modulation_vote",
    "decide",
    "emit_decision_metrics",
]


@dataclass
class HypothesisRecord:
    """Everything the decision stage needs about one (modulation, code)
    hypothesis.  Infeasible hypotheses carry loglik = -inf and no
    detection payload."""

    theta: tuple                     # (modulation id, code id)
    beta_hat: Optional[list]         # ChannelParams per receiver
    loglik: float
    gamma_prefix: Optional[np.ndarray]  # running-average syndrome LLRs
    detection: Optional[DetectionResult]
    feasible: bool
    iterations: float = 0.0

    @property
    def theta_id(self) -> str:
        return f"{self.theta[0]}:{self.theta[1]}"


@dataclass
class FinalDecision:
    """The decided hypothesis with its bits and channel estimates."""

    theta_hat: tuple
    bits_hat: np.ndarray
    beta_hat: list
    loglik: float = field(default=np.nan)
    outer_iterations: float = field(default=np.nan)


def log_likelihood(received, params, regenerated_symbols) -> float:
    """Fused metric F summed over receiver rows (reduces to the single
    row form at K=1)."""
    rows = np.atleast_2d(np.asarray(received, dtype=np.complex128))
    if not isinstance(params, (list, tuple)):
        params = [params]
    return float(sum(
        single_log_likelihood(rows[k], params[k], regenerated_symbols)
        for k in range(rows.shape[0])))


def modulation_vote(records) -> Optional[str]:
    """One vote per coding candidate: its best-likelihood modulation.

    Returns the modulation with strictly the most votes, or None on a
    tie.  Raises if every record is infeasible.
    """
    by_code = {}
    for rec in records:
        if rec.feasible:
            by_code.setdefault(rec.theta[1], []).append(rec)
    if not by_code:
        raise ValueError("no feasible hypothesis to vote on")
    counts = {}
    for code_id, group in sorted(by_code.items()):
        best = max(sorted(group, key=lambda r: r.theta),
                   key=lambda r: r.loglik)
        counts[best.theta[0]] = counts.get(best.theta[0], 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return None
    return ranked[0][0]


def _gamma_at(record: HypothesisRecord, iota: Optional[int]) -> float:
    prefix = record.gamma_prefix
    if iota is None:
        return float(prefix[-1])
    return float(prefix[min(iota, len(prefix)) - 1])


def decide(records, iota: Optional[int] = None) -> FinalDecision:
    """Pick the final hypothesis.

    With a unique modulation vote, the coding decision maximizes the
    average syndrome LLR among that modulation's candidates; a vote tie
    falls back to the same maximization over the full feasible grid.
    ``iota`` truncates the syndrome average to a prefix of the checks
    (default: all of them; clamped per code).  Exact metric ties break
    by larger log-likelihood, then lexicographic hypothesis id.
    """
    feasible = [r for r in records if r.feasible]
    if not feasible:
        raise ValueError("no feasible hypothesis to decide among")
    winner_mod = modulation_vote(records)
    pool = feasible if winner_mod is None else [
        r for r in feasible if r.theta[0] == winner_mod]
    best = max(sorted(pool, key=lambda r: r.theta),
               key=lambda r: (_gamma_at(r, iota), r.loglik))
    return FinalDecision(
        theta_hat=best.theta,
        bits_hat=best.detection.bits_hat,
        beta_hat=best.beta_hat,
        loglik=best.loglik,
        outer_iterations=best.iterations)


def emit_decision_metrics(records, path) -> None:
    """Dump per-hypothesis metrics as CSV (theta_id, loglik, iota, gamma),
    one row per prefix length, for decision-trace plots."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_id", "loglik", "iota", "gamma"])
        for rec in records:
            if not rec.feasible:
                writer.writerow([rec.theta_id, "-inf", 0, ""])
                continue
            for i, gamma in enumerate(rec.gamma_prefix, start=1):
                writer.writerow([rec.theta_id, repr(float(rec.loglik)),
                                 i, repr(float(gamma))])

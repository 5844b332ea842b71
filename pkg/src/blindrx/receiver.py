"""The blind iterative receiver.

For every candidate (modulation, code) hypothesis the receiver loops
{equalize -> demodulate/decode -> re-encode/re-modulate -> re-estimate}
until the channel estimate stabilizes, then fuses the per-hypothesis
metrics into a final decision.  Three orchestration modes share the same
inner engine:

* single: one receiver row (the cooperative engine at K = 1);
* cooperative: per-row estimation each iteration, one fused equalizer
  over all rows;
* distributed: each row iterates independently, then one fused
  detection with all collected estimates before the decision.

Every mode finishes a hypothesis with a final detection pass using the
converged estimates, so the reported bits/metrics are always consistent
with the estimates that produced them (and the three modes coincide
bitwise at K = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import decision as decision_mod
from . import ldpc
from .channel import ChannelParams, ReceivedFrame
from .decision import FinalDecision, HypothesisRecord
from .detector import HypothesisShapeError, detect_and_regenerate
from .estimator import (EstimatorConfig, beta_delta, init_biased_truth,
                        init_moment_based, run_em)
from .modem import get_constellation

__all__ = [
    "ReceiverConfig",
    "draw_initial_params",
    "run_hypothesis",
    "run_single",
    "run_cooperative",
    "run_distributed",
    "run_receiver",
]


@dataclass
class ReceiverConfig:
    """Outer-loop knobs plus the candidate hypothesis grid."""

    candidates: list                       # (modulation id, code id) pairs
    i_max: int = 30
    eps: float = 1e-3
    mode: str = "single"                   # single | cooperative | distributed
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    iota: Optional[int] = None             # syndrome-average prefix
    bp_max_iters: int = 50
    n_paths: int = 6                       # used by the blind initializer
    freeze_estimates: bool = False         # perfect-CSI benchmark switch
    asset_dir: Optional[str] = None

    def __post_init__(self):
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.candidates:
            raise ValueError("candidate grid must be non-empty")
        if self.mode not in ("single", "cooperative", "distributed"):
            raise ValueError(f"unknown mode {self.mode!r}")


def draw_initial_params(frame: ReceivedFrame, config: ReceiverConfig,
                        rng: np.random.Generator) -> list:
    """One initial estimate per receiver row, shared by all hypotheses.

    Biased-truth initialization requires frame.truth; the moment-based
    initializer works from the received rows alone.
    """
    est = config.estimator
    inits = []
    for k in range(frame.n_receivers):
        if config.freeze_estimates or est.init_mode == "truth":
            if frame.truth is None:
                raise ValueError("truth initialization requires frame.truth")
            inits.append(frame.truth.params[k].copy())
        elif est.init_mode == "biased-truth":
            if frame.truth is None:
                raise ValueError("biased-truth init requires frame.truth")
            inits.append(init_biased_truth(frame.truth.params[k], rng,
                                           est.bias_deltas))
        elif est.init_mode == "moment-based":
            inits.append(init_moment_based(frame.samples[k], config.n_paths,
                                           est.moment_grid_step))
        else:
            raise ValueError(f"unknown init mode {est.init_mode!r}")
    return inits


def _clamped(params: ChannelParams) -> ChannelParams:
    """Estimates with the noise power floored away from zero, so the
    equalizer and metrics stay finite at vanishing residuals."""
    if params.noise_power >= 1e-12:
        return params
    safe = params.copy()
    safe.noise_power = 1e-12
    return safe


def _iterate_joint(rows: np.ndarray, inits: list, constellation, code,
                   config: ReceiverConfig):
    """Shared engine: fused detection over all rows, per-row estimation.

    Returns (betas, iterations_used).  With freeze_estimates the loop
    exits after one pass (the estimates cannot move).
    """
    betas = [b.copy() for b in inits]
    iterations = 0
    for outer in range(1, config.i_max + 1):
        det = detect_and_regenerate(
            rows, [_clamped(b) for b in betas], constellation, code,
            max_bp_iters=config.bp_max_iters)
        iterations = outer
        if config.freeze_estimates:
            break
        delta = 0.0
        new_betas = []
        for k in range(rows.shape[0]):
            beta_k, _, _ = run_em(rows[k], det.symbols_hat.symbols,
                                  betas[k], config.estimator)
            delta += beta_delta(beta_k, betas[k])
            new_betas.append(beta_k)
        betas = new_betas
        if delta < config.eps:
            break
    return betas, iterations


def _finalize(rows: np.ndarray, betas: list, theta, constellation, code,
              config: ReceiverConfig, iterations: float) -> HypothesisRecord:
    """Final detection pass with the converged estimates, then metrics."""
    safe = [_clamped(b) for b in betas]
    det = detect_and_regenerate(rows, safe, constellation, code,
                                max_bp_iters=config.bp_max_iters)
    loglik = decision_mod.log_likelihood(rows, safe,
                                         det.symbols_hat.symbols)
    gammas = ldpc.syndrome_llr_profile(code, det.codeword_llrs)
    prefix = np.cumsum(gammas) / np.arange(1, len(gammas) + 1)
    return HypothesisRecord(
        theta=theta, beta_hat=betas, loglik=loglik, gamma_prefix=prefix,
        detection=det, feasible=True, iterations=float(iterations))


def _infeasible(theta) -> HypothesisRecord:
    return HypothesisRecord(theta=theta, beta_hat=None, loglik=-np.inf,
                            gamma_prefix=None, detection=None,
                            feasible=False)


def _resolve(theta, config):
    constellation = get_constellation(theta[0])
    code = ldpc.load_code(theta[1], asset_dir=config.asset_dir)
    return constellation, code


def _is_feasible(frame_len: int, constellation, code) -> bool:
    return frame_len * constellation.bits_per_symbol == code.n


def run_hypothesis(frame: ReceivedFrame, theta, config: ReceiverConfig,
                   rng: Optional[np.random.Generator] = None,
                   inits: Optional[list] = None) -> HypothesisRecord:
    """Run the full iterative loop for one hypothesis (rows fused).

    ``inits`` are per-row initial estimates; when omitted they are drawn
    here (``rng`` required for the biased-truth initializer).
    """
    constellation, code = _resolve(theta, config)
    if not _is_feasible(frame.n_symbols, constellation, code):
        return _infeasible(theta)
    if inits is None:
        inits = draw_initial_params(frame, config, rng)
    betas, iterations = _iterate_joint(frame.samples, inits, constellation,
                                       code, config)
    return _finalize(frame.samples, betas, theta, constellation, code,
                     config, iterations)


def _run_fused(frame: ReceivedFrame, config: ReceiverConfig,
               rng: np.random.Generator) -> FinalDecision:
    inits = draw_initial_params(frame, config, rng)
    records = [run_hypothesis(frame, theta, config,
                              inits=[b.copy() for b in inits])
               for theta in config.candidates]
    return decision_mod.decide(records, config.iota)


def run_single(frame: ReceivedFrame, config: ReceiverConfig,
               rng: np.random.Generator) -> FinalDecision:
    """Single-receiver operation (requires a 1-row frame)."""
    if frame.n_receivers != 1:
        raise ValueError("single mode expects exactly one receiver row")
    return _run_fused(frame, config, rng)


def run_cooperative(frame: ReceivedFrame, config: ReceiverConfig,
                    rng: np.random.Generator) -> FinalDecision:
    """All rows share every detection; estimation stays per-row."""
    return _run_fused(frame, config, rng)


def run_distributed(frame: ReceivedFrame, config: ReceiverConfig,
                    rng: np.random.Generator) -> FinalDecision:
    """Rows iterate independently; estimates fuse only at the end."""
    inits = draw_initial_params(frame, config, rng)
    records = []
    for theta in config.candidates:
        constellation, code = _resolve(theta, config)
        if not _is_feasible(frame.n_symbols, constellation, code):
            records.append(_infeasible(theta))
            continue
        betas = []
        iteration_counts = []
        for k in range(frame.n_receivers):
            row = frame.samples[k:k + 1]
            beta_list, iters = _iterate_joint(row, [inits[k].copy()],
                                              constellation, code, config)
            betas.append(beta_list[0])
            iteration_counts.append(iters)
        records.append(_finalize(
            frame.samples, betas, theta, constellation, code, config,
            float(np.mean(iteration_counts))))
    return decision_mod.decide(records, config.iota)


_MODES = {
    "single": run_single,
    "cooperative": run_cooperative,
    "distributed": run_distributed,
}


def run_receiver(frame: ReceivedFrame, config: ReceiverConfig,
                 rng: np.random.Generator) -> FinalDecision:
    """Dispatch on config.mode."""
    return _MODES[config.mode](frame, config, rng)

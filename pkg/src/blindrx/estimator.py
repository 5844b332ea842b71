"""Blind channel and noise-power estimation.

The estimator alternates an expectation step over per-path complete data
with closed-form per-path gain/phase updates and a residual-power noise
update, for fixed feedback symbols.  Also provides the two initializers
(biased truth for simulation studies, fourth-moment ratios for fully
blind starts) and the linear-convergence diagnostic matrix.

Log-likelihood convention used throughout for a single receiver row:

    F(beta) = -(1/sigma^2) * sum_j |r_j - sum_l h_l s_{j-l}|^2
              - N * ln sigma^2

which makes the noise update the exact coordinate maximizer given the
taps (see notes in the repository docs for why the per-sample Gaussian
normalization uses ln sigma^2).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelParams

__all__ = [
    "EmState",
    "EstimatorConfig",
    "shift_matrix",
    "e_step",
    "m_step",
    "update_noise_power",
    "single_log_likelihood",
    "beta_delta",
    "run_em",
    "init_biased_truth",
    "init_moment_based",
    "convergence_matrix",
    "emit_delta_trace",
]

NOISE_FLOOR = 1e-12
DEFAULT_BIAS_DELTAS = (0.1, np.pi / 20.0, 0.1)


@dataclass
class EmState:
    """Mutable per-run EM state (one receiver row)."""

    beta_hat: ChannelParams
    complete_data: Optional[np.ndarray] = None  # L x N
    noise_split: Optional[np.ndarray] = None    # length L, sums to 1
    iter: int = 0
    last_delta: float = np.inf


@dataclass
class EstimatorConfig:
    """Knobs for the EM loop and its initializers."""

    t_max: int = 30
    eps: float = 1e-3
    noise_split_mode: str = "uniform"          # "uniform" | "custom"
    noise_split: Optional[np.ndarray] = None   # used when mode == "custom"
    init_mode: str = "biased-truth"            # "biased-truth" | "moment-based"
    bias_deltas: tuple = DEFAULT_BIAS_DELTAS
    moment_grid_step: float = 0.1

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.noise_split_mode not in ("uniform", "custom"):
            raise ValueError(f"unknown noise_split_mode "
                             f"{self.noise_split_mode!r}")

    def resolve_noise_split(self, n_paths: int) -> np.ndarray:
        if self.noise_split_mode == "uniform":
            return np.full(n_paths, 1.0 / n_paths)
        w = np.asarray(self.noise_split, dtype=np.float64)
        if w.shape != (n_paths,) or (w < 0).any():
            raise ValueError("custom noise split must be length-L, >= 0")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("noise split must sum to 1")
        return w


def shift_matrix(symbols: np.ndarray, n_paths: int) -> np.ndarray:
    """L x N matrix whose row l is the symbol vector delayed by l
    (zeros shifted in at the frame start)."""
    s = np.asarray(symbols, dtype=np.complex128)
    n = len(s)
    out = np.zeros((n_paths, n), dtype=np.complex128)
    for ell in range(n_paths):
        if ell == 0:
            out[0] = s
        elif ell < n:
            out[ell, ell:] = s[:-ell]
    return out


def e_step(received: np.ndarray, soft_symbols: np.ndarray,
           beta_hat: ChannelParams, noise_split: np.ndarray) -> np.ndarray:
    """Split the residual over the paths: the complete-data estimate.

    zhat[l, j] = h_l * s_{j-l} + w_l * (r_j - sum_l' h_l' * s_{j-l'})
    so that sum_l zhat[l, j] = r_j exactly for every j.
    """
    w = np.asarray(noise_split, dtype=np.float64)
    r = np.asarray(received, dtype=np.complex128)
    shifted = shift_matrix(soft_symbols, beta_hat.n_paths)
    zbar = beta_hat.taps[:, None] * shifted
    residual = r - zbar.sum(axis=0)
    return zbar + w[:, None] * residual[None, :]


def m_step(complete_data: np.ndarray, soft_symbols: np.ndarray):
    """Closed-form per-path gain/phase update from the complete data.

    Returns (gains, phases).  The per-path correlation is normalized by
    the total feedback energy P = sum_j |s_j|^2; with the four-quadrant
    phase the gain reduces to |c_l| / P and is never negative.
    """
    s = np.asarray(soft_symbols, dtype=np.complex128)
    power = float(np.sum(np.abs(s) ** 2))
    if not power > 0:
        raise ValueError("feedback symbol energy must be positive")
    n_paths = complete_data.shape[0]
    shifted = shift_matrix(s, n_paths)
    corr = np.sum(np.conj(shifted) * complete_data, axis=1)
    phases = np.arctan2(corr.imag, corr.real)
    gains = np.maximum(np.real(corr * np.exp(-1j * phases)) / power, 0.0)
    return gains, phases % (2 * np.pi)


def update_noise_power(received: np.ndarray, beta_hat: ChannelParams,
                       soft_symbols: np.ndarray) -> float:
    """Mean squared reconstruction residual (exact maximizer over the
    noise power given the taps)."""
    r = np.asarray(received, dtype=np.complex128)
    recon = beta_hat.taps @ shift_matrix(soft_symbols, beta_hat.n_paths)
    return float(np.mean(np.abs(r - recon) ** 2))


def single_log_likelihood(received: np.ndarray, beta: ChannelParams,
                          soft_symbols: np.ndarray) -> float:
    """F(beta) for one receiver row (see module docstring)."""
    r = np.asarray(received, dtype=np.complex128)
    recon = beta.taps @ shift_matrix(soft_symbols, beta.n_paths)
    sse = float(np.sum(np.abs(r - recon) ** 2))
    sigma2 = max(beta.noise_power, NOISE_FLOOR)
    return -sse / sigma2 - len(r) * float(np.log(sigma2))


def _wrap_phase(x: np.ndarray) -> np.ndarray:
    return (x + np.pi) % (2 * np.pi) - np.pi


def beta_delta(a: ChannelParams, b: ChannelParams) -> float:
    """Squared parameter distance with phase differences wrapped to
    (-pi, pi]."""
    return float(np.sum((a.gains - b.gains) ** 2)
                 + np.sum(_wrap_phase(a.phases - b.phases) ** 2)
                 + (a.noise_power - b.noise_power) ** 2)


def run_em(received: np.ndarray, soft_symbols: np.ndarray,
           init: ChannelParams, config: EstimatorConfig):
    """Iterate E-step / path update / noise update until the parameter
    change drops below eps or t_max is reached.

    Returns (beta_hat, iterations_used, delta_trace) where the trace
    holds one (iteration, delta, log_likelihood) triple per iteration.
    """
    state = EmState(beta_hat=init.copy(),
                    noise_split=config.resolve_noise_split(init.n_paths))
    trace = []
    for t in range(1, config.t_max + 1):
        state.complete_data = e_step(received, soft_symbols,
                                     state.beta_hat, state.noise_split)
        gains, phases = m_step(state.complete_data, soft_symbols)
        candidate = ChannelParams(gains, phases, state.beta_hat.noise_power)
        sigma2 = update_noise_power(received, candidate, soft_symbols)
        candidate.noise_power = max(sigma2, NOISE_FLOOR)
        delta = beta_delta(candidate, state.beta_hat)
        state.beta_hat = candidate
        state.iter = t
        state.last_delta = delta
        trace.append((t, delta,
                      single_log_likelihood(received, candidate,
                                            soft_symbols)))
        if delta < config.eps:
            break
    return state.beta_hat, state.iter, trace


def init_biased_truth(truth: ChannelParams, rng: np.random.Generator,
                      deltas=DEFAULT_BIAS_DELTAS) -> ChannelParams:
    """Initializer for simulation studies: truth plus a bounded bias.

    Each parameter is drawn uniformly from a window of half-width delta
    around its true value, clipped from below at zero for the gains and
    the noise power:

        gains  ~ U( max(0, a_l - d_a),        a_l + d_a ]
        phases ~ U[ phi_l - d_phi,            phi_l + d_phi ]
        noise  ~ U( max(0, sigma^2 - d_sig),  sigma^2 + d_sig ]

    so each delta is the maximum bias of its parameter.  Drawing the
    gains or the noise power from (0, value + delta] instead lets the
    initial leading gain or noise power land arbitrarily close to zero;
    a near-zero leading gain makes the first equalizer pass garbage and
    a near-zero noise power saturates the soft feedback, and either one
    strands the outer loop in a garbage fixed point (measured BER floor
    of roughly 2e-2 at high SNR, versus a clean waterfall with the
    bounded-bias window).
    """
    if truth is None:
        raise ValueError("biased-truth initialization requires the truth")
    d_gain, d_phase, d_noise = deltas
    # 1 - U[0,1) lies in (0, 1], making the draws half-open
    lo_gain = np.maximum(0.0, truth.gains - d_gain)
    gains = lo_gain + (truth.gains + d_gain - lo_gain) * (
        1.0 - rng.random(truth.n_paths))
    phases = rng.uniform(truth.phases - d_phase, truth.phases + d_phase)
    lo_noise = max(0.0, truth.noise_power - d_noise)
    noise = lo_noise + (truth.noise_power + d_noise - lo_noise) * (
        1.0 - rng.random())
    return ChannelParams(gains, phases % (2 * np.pi), noise)


def init_moment_based(received: np.ndarray, n_paths: int,
                      grid_step: float = 0.1) -> ChannelParams:
    """Blind initializer from ratios of fourth-order sample moments.

    h_l is estimated by m4(0,0,0,l) / m4(0,0,0,0) with
    m4(0,0,0,l) = (1/N) sum_j r_j^3 r_{j+l} (terms past the frame end
    dropped), which targets the channel coefficient normalized by the
    leading tap.  The noise power is then picked from a grid over
    (0, mean |r|^2] maximizing the likelihood with the residual-power
    proxy max(mean|r|^2 - sum_l |h_l|^2, floor).
    """
    r = np.asarray(received, dtype=np.complex128)
    n = len(r)
    if n < n_paths:
        raise ValueError("need at least n_paths samples")
    cubes = r ** 3
    denom = np.mean(cubes * r)
    taps = np.zeros(n_paths, dtype=np.complex128)
    if abs(denom) < 1e-12:
        warnings.warn("degenerate fourth moment; taps initialized to zero")
    else:
        for ell in range(n_paths):
            num = np.sum(cubes[:n - ell] * r[ell:]) / n
            taps[ell] = num / denom
    mean_power = float(np.mean(np.abs(r) ** 2))
    sse_proxy = n * max(mean_power - float(np.sum(np.abs(taps) ** 2)),
                        NOISE_FLOOR)
    candidates = np.arange(grid_step, mean_power + 1e-12, grid_step)
    if len(candidates) == 0:
        candidates = np.array([mean_power])
    scores = -sse_proxy / candidates - n * np.log(candidates)
    noise = float(candidates[np.argmax(scores)])
    return ChannelParams(np.abs(taps), np.angle(taps) % (2 * np.pi), noise)


def convergence_matrix(shifted_symbols: np.ndarray,
                       noise_split: np.ndarray, power: float):
    """Linear-convergence diagnostic of the path-update iteration.

    U = I_L - (1/P) diag(w) S S^H for the L x N shifted symbol matrix S;
    the spectral radius u_c = max |eig(U)| approximates the parameter
    error contraction rate near the fixed point.
    """
    if not power > 0:
        raise ValueError("symbol energy must be positive")
    s = np.asarray(shifted_symbols, dtype=np.complex128)
    w = np.asarray(noise_split, dtype=np.float64)
    gram = s @ s.conj().T
    u = np.eye(s.shape[0]) - (w[:, None] / power) * gram
    u_c = float(np.max(np.abs(np.linalg.eigvals(u))))
    return u, u_c


def emit_delta_trace(trace, path) -> None:
    """Write a run_em delta trace as CSV (iter, delta, loglik)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "delta", "loglik"])
        for row in trace:
            writer.writerow([row[0], repr(float(row[1])),
                             repr(float(row[2]))])

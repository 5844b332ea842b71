"""Soft-information detection: sequential Bayes equalization over the
constellation, LLR demodulation, soft decoding, hard decision, and
codeword regeneration for the next estimation round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, ldpc
from .modem import Constellation, SymbolFrame, bit_zero_set, modulate

__all__ = [
    "PosteriorGrid",
    "DetectionResult",
    "HypothesisShapeError",
    "bayes_equalize",
    "soft_demodulate",
    "detect_and_regenerate",
]

LLR_CLAMP = _kernels.LLR_CLAMP


class HypothesisShapeError(ValueError):
    """Raised when a (modulation, code) pair cannot fit the frame length:
    the decision layer treats such hypotheses as minus-infinity metric."""


@dataclass
class PosteriorGrid:
    """|S| x N per-symbol posterior probabilities over the constellation."""

    probs: np.ndarray
    constellation: Constellation

    @property
    def n_symbols(self) -> int:
        return self.probs.shape[1]

    def soft_symbols(self) -> np.ndarray:
        """Posterior-mean symbol per column."""
        return self.constellation.points @ self.probs


@dataclass
class DetectionResult:
    """Outputs of one detection pass.

    ``codeword_llrs`` are the demodulator outputs (pre-decoder), which
    are exactly the soft bits the syndrome metrics consume;
    ``message_llrs`` are the extrinsic message-bit LLRs after decoding;
    ``symbols_hat`` is the re-encoded, re-modulated hard decision.
    """

    bits_hat: np.ndarray
    codeword_llrs: np.ndarray
    message_llrs: np.ndarray
    symbols_hat: SymbolFrame
    decoder_converged: bool = True


def _stack_params(received, params):
    rows = np.atleast_2d(np.asarray(received, dtype=np.complex128))
    if not isinstance(params, (list, tuple)):
        params = [params]
    if len(params) != rows.shape[0]:
        raise ValueError(f"{rows.shape[0]} receiver rows but "
                         f"{len(params)} parameter sets")
    taps = np.ascontiguousarray(np.stack([p.taps for p in params]))
    noise = np.array([p.noise_power for p in params], dtype=np.float64)
    if (noise <= 0).any():
        raise ValueError("noise powers must be positive")
    return rows, taps, 1.0 / noise


def bayes_equalize(received, params,
                   constellation: Constellation) -> PosteriorGrid:
    """Per-symbol posteriors over the constellation, fused across rows.

    Columns are processed in order; the inter-symbol interference of
    each symbol is cancelled with the posterior-mean estimates of the
    already-processed symbols (symbols before the frame start are zero).
    """
    rows, taps, inv_noise = _stack_params(received, params)
    probs, _ = _kernels.equalize(
        np.ascontiguousarray(rows), taps, inv_noise,
        np.ascontiguousarray(constellation.points, dtype=np.complex128))
    return PosteriorGrid(probs, constellation)


def soft_demodulate(grid: PosteriorGrid) -> np.ndarray:
    """Per-bit LLRs from the posterior grid, clamped to +/-30.

    Bit g (1-based) of symbol j lands at index j*bits_per_symbol+(g-1);
    its LLR is ln(mass on the bit-zero point subset / complementary mass).
    """
    bits = grid.constellation.bits_per_symbol
    n_sym = grid.n_symbols
    llrs = np.empty((n_sym, bits), dtype=np.float64)
    for g in range(1, bits + 1):
        mass = grid.probs[bit_zero_set(grid.constellation, g)].sum(axis=0)
        mass = np.clip(mass, 1e-300, 1.0 - 1e-16)
        llrs[:, g - 1] = np.log(mass) - np.log1p(-mass)
    return np.clip(llrs.reshape(-1), -LLR_CLAMP, LLR_CLAMP)


def detect_and_regenerate(received, params, constellation: Constellation,
                          code: ldpc.LinearBlockCode,
                          max_bp_iters: int = 50) -> DetectionResult:
    """Equalize, demodulate, decode, decide, and regenerate symbols.

    The hard decision takes bit 0 exactly when the extrinsic message LLR
    is strictly positive.  Raises HypothesisShapeError when the codeword
    length does not match the frame's bit capacity.
    """
    rows = np.atleast_2d(np.asarray(received, dtype=np.complex128))
    capacity = rows.shape[1] * constellation.bits_per_symbol
    if capacity != code.n:
        raise HypothesisShapeError(
            f"frame carries {capacity} bits but code {code.name} "
            f"has length {code.n}")
    grid = bayes_equalize(rows, params, constellation)
    demod_llrs = soft_demodulate(grid)
    decoded = ldpc.bp_decode(code, demod_llrs, max_iters=max_bp_iters)
    extrinsic = decoded.message_llrs - demod_llrs[code.message_positions]
    bits_hat = (extrinsic <= 0).astype(np.uint8)
    symbols_hat = modulate(ldpc.encode(code, bits_hat), constellation)
    return DetectionResult(
        bits_hat=bits_hat,
        codeword_llrs=demod_llrs,
        message_llrs=extrinsic,
        symbols_hat=symbols_hat,
        decoder_converged=decoded.converged)

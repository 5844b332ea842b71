"""Multipath frame synthesis with circularly-symmetric complex Gaussian
noise, for one or several receivers, plus ground-truth bookkeeping and a
binary frame dump format for replay tests.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .modem import SymbolFrame

__all__ = [
    "ChannelParams",
    "FrameTruth",
    "ReceivedFrame",
    "snr_db_to_noise_power",
    "noise_power_to_snr_db",
    "draw_channel",
    "transmit",
    "dump_frame",
    "load_frame",
]


@dataclass
class ChannelParams:
    """Per-path gains and phases plus the receiver noise power.

    The complex tap vector is ``gains * exp(1j * phases)``; the leading
    tap is index 0.  Gains may be zero; the noise power must be positive.
    """

    gains: np.ndarray
    phases: np.ndarray
    noise_power: float

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=np.float64)
        self.phases = np.asarray(self.phases, dtype=np.float64)
        if self.gains.shape != self.phases.shape or self.gains.ndim != 1:
            raise ValueError("gains and phases must be 1-D and equal length")
        if (self.gains < 0).any():
            raise ValueError("gains must be nonnegative")
        if not self.noise_power > 0:
            raise ValueError("noise power must be positive")

    @property
    def n_paths(self) -> int:
        return len(self.gains)

    @property
    def taps(self) -> np.ndarray:
        return self.gains * np.exp(1j * self.phases)

    def copy(self) -> "ChannelParams":
        return ChannelParams(self.gains.copy(), self.phases.copy(),
                             self.noise_power)


@dataclass
class FrameTruth:
    """Ground truth recorded in simulation mode, for metric computation."""

    params: list  # ChannelParams per receiver
    modulation: str
    code: str
    message_bits: np.ndarray
    coded_bits: np.ndarray
    symbols: SymbolFrame


@dataclass
class ReceivedFrame:
    """K x N received samples; row k belongs to receiver k."""

    samples: np.ndarray
    truth: Optional[FrameTruth] = field(default=None, repr=False)

    def __post_init__(self):
        self.samples = np.atleast_2d(
            np.asarray(self.samples, dtype=np.complex128))

    @property
    def n_receivers(self) -> int:
        return self.samples.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.samples.shape[1]


def snr_db_to_noise_power(snr_db: float) -> float:
    """Noise power for a given SNR under unit symbol energy."""
    return float(10.0 ** (-snr_db / 10.0))


def noise_power_to_snr_db(noise_power: float) -> float:
    return float(-10.0 * np.log10(noise_power))


def draw_channel(rng: np.random.Generator, n_paths: int,
                 tap_variance: float, noise_power: float,
                 fix_leading: bool = True) -> ChannelParams:
    """Draw a random multipath channel.

    With ``fix_leading`` the leading tap is exactly 1 (gain 1, phase 0);
    the remaining taps are complex Gaussian with the given per-tap
    variance (split evenly between real and imaginary parts).
    """
    if n_paths < 1:
        raise ValueError("need at least one path")
    if not tap_variance > 0:
        raise ValueError("tap variance must be positive")
    scale = np.sqrt(tap_variance / 2.0)
    taps = scale * (rng.standard_normal(n_paths)
                    + 1j * rng.standard_normal(n_paths))
    if fix_leading:
        taps[0] = 1.0
    return ChannelParams(np.abs(taps), np.angle(taps) % (2 * np.pi),
                         noise_power)


def _convolve(symbols: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Linear convolution truncated to the frame: symbols before the
    frame start are zero."""
    n = len(symbols)
    out = np.zeros(n, dtype=np.complex128)
    for ell, tap in enumerate(taps):
        if ell == 0:
            out += tap * symbols
        elif ell < n:
            out[ell:] += tap * symbols[:-ell]
    return out


def transmit(symbols: SymbolFrame, params, rng: np.random.Generator,
             ) -> ReceivedFrame:
    """Pass a symbol frame through one channel per receiver and add noise.

    ``params`` is a single ChannelParams or a list of them (one per
    receiver); all receivers must share the number of paths.
    """
    if isinstance(params, ChannelParams):
        params = [params]
    n_paths = params[0].n_paths
    if any(p.n_paths != n_paths for p in params):
        raise ValueError("receivers must share the number of paths")
    s = symbols.symbols
    rows = np.empty((len(params), len(s)), dtype=np.complex128)
    for k, p in enumerate(params):
        noise_scale = np.sqrt(p.noise_power / 2.0)
        noise = noise_scale * (rng.standard_normal(len(s))
                               + 1j * rng.standard_normal(len(s)))
        rows[k] = _convolve(s, p.taps) + noise
    return ReceivedFrame(rows)


_MAGIC = b"BRXF"
_HEADER = struct.Struct("<4sIIIB")  # magic, K, N, L, little-endian flag


def dump_frame(frame: ReceivedFrame, path) -> None:
    """Write samples in the binary replay layout.

    Header: magic, uint32 receiver count K, uint32 frame length N,
    uint32 path count L (0 when no truth is attached), and a flag byte
    (1 = little-endian payload).  Payload: K*N row-major complex samples
    as interleaved re/im float64.
    """
    n_paths = frame.truth.params[0].n_paths if frame.truth else 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, frame.n_receivers, frame.n_symbols,
                              n_paths, 1))
        fh.write(np.ascontiguousarray(
            frame.samples, dtype="<c16").tobytes())


def load_frame(path) -> ReceivedFrame:
    """Read a frame written by dump_frame (truth is not serialized)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, k, n, _, flag = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a frame dump")
        if flag != 1:
            raise ValueError(f"{path}: unsupported endianness flag {flag}")
        data = np.frombuffer(fh.read(16 * k * n), dtype="<c16")
    return ReceivedFrame(data.astype(np.complex128).reshape(k, n))

"""Constellations and bit/symbol mapping.

Provides the three built-in Gray-labeled constellations (QPSK, 8-PSK,
16-QAM), hard modulation/demapping, posterior-mean soft symbols, and the
bit-zero point subsets consumed by the soft demodulator.

Labeling convention (fixed; test vectors in tests/test_modem.py):

* Points are stored indexed by their label integer, i.e. ``points[m]`` is
  the point whose bit label is the binary expansion of ``m`` (MSB first).
* QPSK: bit 1 selects the real sign, bit 2 the imaginary sign, with bit
  value 0 mapping to the positive half-plane: ``00 -> (1+1j)/sqrt(2)``.
* 16-QAM: bits (1,2) Gray-select the real PAM-4 level, bits (3,4) the
  imaginary one, with ``00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3`` (scaled
  by 1/sqrt(10)); ``0000 -> (3+3j)/sqrt(10)``.
* 8-PSK: points on the unit circle at angles ``2*pi*k/8``; the point at
  position ``k`` carries the Gray label ``k ^ (k >> 1)``.

All constellations are normalized to unit average symbol energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "SymbolFrame",
    "get_constellation",
    "modulate",
    "demap",
    "bit_zero_set",
    "soft_symbol",
]


@dataclass(frozen=True)
class Constellation:
    """A finite symbol set with a fixed bit labeling.

    Attributes
    ----------
    name : str
        Identifier usable in configs ("qpsk", "8psk", "16qam").
    points : np.ndarray
        Complex points, unit average energy, indexed by label integer.
    bits_per_symbol : int
        Number of bits carried by one symbol (log2 of the set size).
    labels : np.ndarray
        (size, bits_per_symbol) 0/1 matrix; row m is the bit label of
        points[m], most significant bit first.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int
    labels: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        size = len(self.points)
        if size != 2 ** self.bits_per_symbol:
            raise ValueError("constellation size must be 2**bits_per_symbol")
        if self.labels is None:
            labels = ((np.arange(size)[:, None]
                       >> np.arange(self.bits_per_symbol - 1, -1, -1)) & 1)
            object.__setattr__(self, "labels", labels.astype(np.uint8))
        mean_energy = np.mean(np.abs(self.points) ** 2)
        if abs(mean_energy - 1.0) > 1e-12:
            raise ValueError(f"constellation not unit energy: {mean_energy}")

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass
class SymbolFrame:
    """A length-N vector of (possibly soft) complex symbols."""

    symbols: np.ndarray

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)


def _qpsk() -> Constellation:
    # bit 0 -> positive axis; label (b1, b2) -> (sign of re, sign of im)
    pts = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)
    return Constellation("qpsk", pts, 2)


_PAM4 = {(0, 0): 3.0, (0, 1): 1.0, (1, 1): -1.0, (1, 0): -3.0}


def _16qam() -> Constellation:
    pts = np.empty(16, dtype=np.complex128)
    for m in range(16):
        b = [(m >> k) & 1 for k in (3, 2, 1, 0)]
        pts[m] = complex(_PAM4[(b[0], b[1])], _PAM4[(b[2], b[3])])
    return Constellation("16qam", pts / np.sqrt(10.0), 4)


def _8psk() -> Constellation:
    # position k on the circle carries Gray label k ^ (k >> 1); points[]
    # is indexed by label, so invert that map.
    pts = np.empty(8, dtype=np.complex128)
    for k in range(8):
        label = k ^ (k >> 1)
        pts[label] = np.exp(2j * np.pi * k / 8)
    return Constellation("8psk", pts, 3)


_REGISTRY = {c.name: c for c in (_qpsk(), _8psk(), _16qam())}


def get_constellation(name: str) -> Constellation:
    """Look up a built-in constellation by its string id."""
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise KeyError(f"unknown constellation {name!r}; "
                       f"available: {sorted(_REGISTRY)}") from None


def modulate(bits, constellation: Constellation) -> SymbolFrame:
    """Map a coded-bit vector to symbols, bits_per_symbol bits at a time.

    The bit count must already be divisible by bits_per_symbol; padding
    is the caller's responsibility.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    b = constellation.bits_per_symbol
    if bits.ndim != 1 or len(bits) % b:
        raise ValueError(f"bit count {bits.shape} not divisible by {b}")
    groups = bits.reshape(-1, b)
    weights = 1 << np.arange(b - 1, -1, -1)
    indices = groups @ weights
    return SymbolFrame(constellation.points[indices])


def demap(frame: SymbolFrame, constellation: Constellation) -> np.ndarray:
    """Nearest-point hard demapping back to a bit vector."""
    d = np.abs(frame.symbols[:, None] - constellation.points[None, :])
    indices = np.argmin(d, axis=1)
    return constellation.labels[indices].reshape(-1).astype(np.uint8)


def bit_zero_set(constellation: Constellation, g: int) -> np.ndarray:
    """Indices of the points whose g-th bit (1-based) is zero.

    Always exactly half of the constellation.
    """
    if not 1 <= g <= constellation.bits_per_symbol:
        raise ValueError(f"bit index {g} out of range "
                         f"1..{constellation.bits_per_symbol}")
    return np.nonzero(constellation.labels[:, g - 1] == 0)[0]


def soft_symbol(posterior, constellation: Constellation) -> complex:
    """Posterior-mean symbol from a per-point probability vector."""
    p = np.asarray(posterior, dtype=np.float64)
    if p.shape != (constellation.size,):
        raise ValueError(f"posterior shape {p.shape} does not match "
                         f"constellation size {constellation.size}")
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("posterior must be nonnegative and sum to 1")
    return complex(p @ constellation.points)

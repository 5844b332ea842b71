"""Binary linear block codes: alist loading, GF(2) encoding, BP decoding,
and the parity-check consistency (syndrome) LLR metrics used for coding
recognition.

Code assets ship with the package under ``blindrx/assets/codes`` and are
addressed by id string (``ldpc_648_r12`` ... ``ldpc_1944_r56``,
``hamming_7_4``, ``hamming_8_4_ext``).  The asset directory can be
overridden with the ``BLINDRX_CODE_DIR`` environment variable or the
``asset_dir`` argument.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import _kernels

__all__ = [
    "LinearBlockCode",
    "BpResult",
    "parse_alist",
    "code_from_parity_check",
    "load_code",
    "available_codes",
    "encode",
    "bp_decode",
    "syndrome_llr",
    "syndrome_llr_profile",
    "average_syndrome_llr",
]

LLR_CLAMP = _kernels.LLR_CLAMP
_TANH_CLAMP = 1.0 - 1e-12


@dataclass
class LinearBlockCode:
    """A binary (n, q) block code defined by its parity-check matrix.

    ``row_supports`` lists, per check row, the sorted 1-based column
    indices of its nonzero entries.  ``message_positions`` are the
    0-based codeword positions holding the systematic message bits;
    typically 0..q-1, but a recorded column permutation may move them
    when the right block of H is singular.
    """

    name: str
    h: np.ndarray
    g: np.ndarray
    n: int
    q: int
    rate: float
    row_supports: list = field(repr=False)
    message_positions: np.ndarray = field(repr=False)
    # edge-list view of H consumed by the BP kernels
    edge_col: np.ndarray = field(repr=False)
    row_ptr: np.ndarray = field(repr=False)
    row_of_edge: np.ndarray = field(repr=False)

    @property
    def n_checks(self) -> int:
        return self.n - self.q


@dataclass
class BpResult:
    """Belief-propagation output: posterior LLRs plus a convergence flag.

    ``message_llrs`` are the posteriors at the systematic message
    positions; ``codeword_llrs`` cover all n positions.  ``converged``
    is False when the decoder exhausted its iteration budget without the
    hard decision satisfying every check (best-effort posteriors).
    """

    message_llrs: np.ndarray
    codeword_llrs: np.ndarray
    converged: bool
    iterations: int


def parse_alist(text: str) -> np.ndarray:
    """Parse an alist-format parity-check matrix into a dense 0/1 array.

    Layout: "n m", "max_col_w max_row_w", per-column weights, per-row
    weights, then 1-based index lists (zero-padded entries ignored),
    columns first.
    """
    tokens = text.split()
    pos = 0

    def take(count):
        nonlocal pos
        chunk = tokens[pos:pos + count]
        pos += count
        return [int(v) for v in chunk]

    n, m = take(2)
    max_col_w, max_row_w = take(2)
    col_weights = take(n)
    take(m)  # row weights, implied by the row index lists
    h = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        entries = take(max_col_w)
        for v in entries:
            if v:
                h[v - 1, j] = 1
        if sum(1 for v in entries if v) != col_weights[j]:
            raise ValueError(f"alist column {j}: weight mismatch")
    # row lists are redundant given the column lists; skip the remainder
    return h


def _gf2_systematic(h: np.ndarray):
    """Row-reduce H so its parity block becomes the identity.

    Pivots are sought right-to-left (columns n-1 down to 0 for check row
    m-1 down to 0), preferring the last m columns so that the systematic
    message lands in the leading positions.  Columns are swapped only if
    the preferred pivot column is dependent; any swaps are recorded and
    applied to the returned reduced matrix's column order mapping.

    Returns (reduced copy of H in original column order is NOT preserved;
    instead) a tuple (p_block, message_positions, parity_positions) where
    ``p_block`` is the m x q matrix P with H-equivalent form [P | I] under
    the returned column ordering ``message_positions + parity_positions``.
    """
    m, n = h.shape
    q = n - m
    work = h.astype(np.uint8).copy()
    cols = list(range(n))
    for i in range(m - 1, -1, -1):
        target = q + i  # desired pivot column (in current ordering)
        pivot_rows = np.nonzero(work[:i + 1, cols[target]])[0]
        if pivot_rows.size == 0:
            # swap in the rightmost remaining independent column
            found = False
            for j in range(target - 1, -1, -1):
                if np.nonzero(work[:i + 1, cols[j]])[0].size:
                    cols[target], cols[j] = cols[j], cols[target]
                    pivot_rows = np.nonzero(work[:i + 1, cols[target]])[0]
                    found = True
                    break
            if not found:
                raise ValueError("parity-check matrix is not full rank")
        r = pivot_rows[-1]
        if r != i:
            work[[r, i]] = work[[i, r]]
        col = work[:, cols[target]]
        hits = np.nonzero(col)[0]
        hits = hits[hits != i]
        work[hits] ^= work[i]
    message_positions = np.array(cols[:q], dtype=np.int64)
    p_block = work[:, [cols[q + i] for i in range(m)]]
    # sanity: parity block must now be the identity
    if not np.array_equal(p_block, np.eye(m, dtype=np.uint8)):
        raise AssertionError("elimination failed to produce identity block")
    return work[:, message_positions], message_positions, cols[q:]


def code_from_parity_check(name: str, h: np.ndarray) -> LinearBlockCode:
    """Build a code (with derived systematic generator) from a dense H."""
    h = np.ascontiguousarray(h, dtype=np.uint8)
    m, n = h.shape
    q = n - m
    if q <= 0:
        raise ValueError(f"H of shape {h.shape} leaves no message bits")
    p_block, msg_pos, par_pos = _gf2_systematic(h)
    g = np.zeros((q, n), dtype=np.uint8)
    g[np.arange(q), msg_pos] = 1
    for i, col in enumerate(par_pos):
        g[:, col] = p_block[i]
    if ((h @ g.T) % 2).any():
        raise AssertionError(f"{name}: generator does not satisfy H G^T = 0")
    supports0 = [np.nonzero(row)[0] for row in h]
    row_supports = [s + 1 for s in supports0]
    edge_col = np.concatenate(supports0).astype(np.int32)
    row_len = np.array([len(s) for s in supports0])
    row_ptr = np.concatenate([[0], np.cumsum(row_len)]).astype(np.int32)
    row_of_edge = np.repeat(np.arange(m), row_len).astype(np.int32)
    return LinearBlockCode(
        name=name, h=h, g=g, n=n, q=q, rate=q / n,
        row_supports=row_supports, message_positions=msg_pos,
        edge_col=edge_col, row_ptr=row_ptr, row_of_edge=row_of_edge)


def _asset_dir(asset_dir=None):
    if asset_dir is not None:
        return str(asset_dir)
    env = os.environ.get("BLINDRX_CODE_DIR")
    if env:
        return env
    return str(resources.files("blindrx.assets") / "codes")


def available_codes(asset_dir=None) -> list:
    """Ids of the code assets present in the asset directory."""
    directory = _asset_dir(asset_dir)
    return sorted(f[:-6] for f in os.listdir(directory)
                  if f.endswith(".alist"))


_CODE_CACHE: dict = {}


def load_code(name: str, asset_dir=None) -> LinearBlockCode:
    """Load a code asset by id, with caching."""
    directory = _asset_dir(asset_dir)
    key = (name, directory)
    if key not in _CODE_CACHE:
        path = os.path.join(directory, f"{name}.alist")
        if not os.path.exists(path):
            raise FileNotFoundError(
                f"no code asset {name!r} in {directory} "
                f"(available: {available_codes(asset_dir)})")
        with open(path) as fh:
            h = parse_alist(fh.read())
        _CODE_CACHE[key] = code_from_parity_check(name, h)
    return _CODE_CACHE[key]


def encode(code: LinearBlockCode, message) -> np.ndarray:
    """GF(2) encode; the systematic positions reproduce the message."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (code.q,):
        raise ValueError(f"message shape {message.shape} != ({code.q},)")
    return (message @ code.g) % 2


def bp_decode(code: LinearBlockCode, channel_llrs,
              max_iters: int = 50) -> BpResult:
    """Sum-product decode with syndrome early exit (flooding schedule)."""
    llrs = np.ascontiguousarray(channel_llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"LLR shape {llrs.shape} != ({code.n},)")
    if not np.isfinite(llrs).all():
        raise ValueError("channel LLRs must be finite")
    posterior, iterations, converged = _kernels.bp_decode(
        llrs, code.edge_col, code.row_ptr, code.row_of_edge,
        code.n, max_iters)
    return BpResult(
        message_llrs=posterior[code.message_positions],
        codeword_llrs=posterior,
        converged=bool(converged),
        iterations=int(iterations))


def syndrome_llr(code: LinearBlockCode, codeword_llrs, i: int) -> float:
    """LLR that parity check i (1-based) is satisfied by the soft bits.

    gamma_i = 2 atanh( prod_tau tanh(psi_{pi_i(tau)} / 2) ), clamped.
    """
    if not 1 <= i <= code.n_checks:
        raise ValueError(f"check index {i} out of range 1..{code.n_checks}")
    psi = np.clip(np.asarray(codeword_llrs, dtype=np.float64),
                  -LLR_CLAMP, LLR_CLAMP)
    prod = np.prod(np.tanh(0.5 * psi[code.row_supports[i - 1] - 1]))
    return float(2.0 * np.arctanh(np.clip(prod, -_TANH_CLAMP, _TANH_CLAMP)))


def syndrome_llr_profile(code: LinearBlockCode, codeword_llrs) -> np.ndarray:
    """gamma_i for every check row, vectorized over the edge list."""
    psi = np.clip(np.asarray(codeword_llrs, dtype=np.float64),
                  -LLR_CLAMP, LLR_CLAMP)
    t = np.tanh(0.5 * psi[code.edge_col])
    prods = np.multiply.reduceat(t, code.row_ptr[:-1])
    return 2.0 * np.arctanh(np.clip(prods, -_TANH_CLAMP, _TANH_CLAMP))


def average_syndrome_llr(code: LinearBlockCode, codeword_llrs,
                         iota: int) -> float:
    """Average of gamma_1..gamma_iota (the coding-recognition feature)."""
    if not 1 <= iota <= code.n_checks:
        raise ValueError(f"prefix {iota} out of range 1..{code.n_checks}")
    gammas = syndrome_llr_profile(code, codeword_llrs)
    return float(np.mean(gammas[:iota]))

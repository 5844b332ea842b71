"""Pure-numpy implementations of the two hot kernels.

These mirror the compiled versions in ``_native.pyx`` exactly; the package
works without a compiler, just slower.  Signatures are shared so the
backend can be swapped transparently (see ``_kernels.__init__``).
"""

import numpy as np

LLR_CLAMP = 30.0
_TANH_CLAMP = 1.0 - 1e-12


def bp_decode(llr_in, edge_col, row_ptr, row_of_edge, n_vars, max_iters):
    """Flooding sum-product decode over an edge-list parity-check graph.

    Parameters
    ----------
    llr_in : (n,) float64 channel LLRs (positive favors bit 0).
    edge_col : (E,) int32 variable index of each edge, grouped by check row.
    row_ptr : (m+1,) int32 edge segment boundaries per check row.
    row_of_edge : (E,) int32 check index of each edge.
    n_vars : number of variable nodes n.
    max_iters : maximum flooding iterations.

    Returns
    -------
    (posterior, iterations, converged) : full-codeword posterior LLRs
    (clamped), iterations needed for the hard decision to satisfy every
    check (0 when the input already did), and the convergence flag.

    At least one message-passing round always runs so the posterior
    carries check-node information on top of the channel LLRs; the
    downstream extrinsic subtraction would otherwise be identically zero
    on an error-free frame.
    """
    llr = np.clip(np.asarray(llr_in, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)
    starts = row_ptr[:-1]
    n_edges = len(edge_col)
    check_msgs = np.zeros(n_edges, dtype=np.float64)
    posterior = llr.copy()
    clean_input = _syndrome_ok(posterior, edge_col, starts)
    # ragged check rows padded to a rectangle so the exclusive product
    # can use exact prefix/suffix cumulative products (division by a
    # possibly-zero tanh would need an epsilon that biases zero LLRs)
    widths = np.diff(row_ptr)
    pos_in_row = np.arange(n_edges) - np.repeat(starts, widths)
    rect = np.ones((len(starts), int(widths.max())), dtype=np.float64)
    for it in range(1, max_iters + 1):
        col_sum = np.bincount(edge_col, weights=check_msgs, minlength=n_vars)
        var_msgs = np.clip(llr[edge_col] + col_sum[edge_col] - check_msgs,
                           -LLR_CLAMP, LLR_CLAMP)
        t = np.tanh(0.5 * var_msgs)
        rect[row_of_edge, pos_in_row] = t
        prefix = np.ones_like(rect)
        np.cumprod(rect[:, :-1], axis=1, out=prefix[:, 1:])
        suffix = np.ones_like(rect)
        suffix[:, :-1] = np.cumprod(rect[:, :0:-1], axis=1)[:, ::-1]
        excl = (prefix * suffix)[row_of_edge, pos_in_row]
        ratio = np.clip(excl, -_TANH_CLAMP, _TANH_CLAMP)
        check_msgs = np.clip(2.0 * np.arctanh(ratio), -LLR_CLAMP, LLR_CLAMP)
        # the posterior itself stays unclamped: clamping it would cancel the
        # check-node contribution wherever the input sits at the clamp, and
        # the extrinsic (posterior minus input) would collapse to zero
        col_sum = np.bincount(edge_col, weights=check_msgs, minlength=n_vars)
        posterior = llr + col_sum
        if clean_input:
            return posterior, 0, True
        if _syndrome_ok(posterior, edge_col, starts):
            return posterior, it, True
    return posterior, max_iters, False


def _syndrome_ok(posterior, edge_col, starts):
    hard = (posterior <= 0).astype(np.uint8)
    parities = np.bitwise_xor.reduceat(hard[edge_col], starts)
    return not parities.any()


def equalize(rows, taps, inv_noise, points):
    """Sequential per-symbol posterior computation with soft ISI feedback.

    Parameters
    ----------
    rows : (K, N) complex128 received samples, one row per receiver.
    taps : (K, L) complex128 channel taps per receiver.
    inv_noise : (K,) float64 reciprocal noise powers 1/sigma_k^2.
    points : (M,) complex128 constellation points.

    Returns
    -------
    (probs, soft) : (M, N) per-symbol posteriors over the points and the
    (N,) posterior-mean symbols used as ISI feedback.
    """
    n_rx, n_sym = rows.shape
    n_taps = taps.shape[1]
    probs = np.empty((len(points), n_sym), dtype=np.float64)
    soft = np.zeros(n_sym, dtype=np.complex128)
    lead = taps[:, 0]
    for j in range(n_sym):
        base = rows[:, j].copy()
        for ell in range(1, min(n_taps, j + 1)):
            base -= taps[:, ell] * soft[j - ell]
        diff = base[:, None] - lead[:, None] * points[None, :]
        metric = -inv_noise @ (diff.real ** 2 + diff.imag ** 2)
        metric -= metric.max()
        p = np.exp(metric)
        p /= p.sum()
        probs[:, j] = p
        soft[j] = p @ points
    return probs, soft

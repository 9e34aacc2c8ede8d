"""Pure-NumPy fallback for the sparse matrix assembly kernel.

Same contract as the compiled extension ``fockbox._assembly``: see
:func:`assemble`.  Vectorized over basis states, one pass per term, so it
stays usable (if slower) when the extension is unavailable.
"""

from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)


def assemble(coeffs, opcodes, nops, basis):
    """Apply packed ladder strings to every basis state.

    Parameters
    ----------
    coeffs : complex128[nt]
        Term coefficients.
    opcodes : int32[nt, kmax]
        Per-term factor codes ``mode_index*2 + create``, applied right to
        left (operator order), padded with -1.
    nops : int32[nt]
        Number of valid codes per term.
    basis : uint64[nb]
        Occupancy bit patterns, strictly ascending.

    Returns
    -------
    rows, cols : int64 arrays
    vals : complex128 array
    dropped : int
        Count of (term, column) images that fell outside the basis.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    opcodes = np.asarray(opcodes, dtype=np.int32)
    nops = np.asarray(nops, dtype=np.int32)
    basis = np.asarray(basis, dtype=np.uint64)
    nb = basis.size
    nt = coeffs.size

    rows_out: list[np.ndarray] = []
    cols_out: list[np.ndarray] = []
    vals_out: list[np.ndarray] = []
    dropped = 0
    all_cols = np.arange(nb, dtype=np.int64)

    for t in range(nt):
        state = basis.copy()
        sign = np.ones(nb, dtype=np.int8)
        alive = np.ones(nb, dtype=bool)
        for j in range(int(nops[t]) - 1, -1, -1):
            code = int(opcodes[t, j])
            k = code >> 1
            create = bool(code & 1)
            bit = np.uint64(1 << k)
            below = np.uint64((1 << k) - 1)
            occupied = (state & bit) != 0
            alive &= (~occupied) if create else occupied
            if not alive.any():
                break
            parity = np.bitwise_count(state & below)
            sign = np.where(parity & 1, -sign, sign)
            state = np.where(alive, state ^ bit, state)
        if not alive.any():
            continue
        src = all_cols[alive]
        img = state[alive]
        pos = np.searchsorted(basis, img)
        pos_clipped = np.minimum(pos, nb - 1)
        found = basis[pos_clipped] == img
        dropped += int((~found).sum())
        if not found.any():
            continue
        rows_out.append(pos_clipped[found].astype(np.int64))
        cols_out.append(src[found])
        vals_out.append(coeffs[t] * sign[alive][found])

    if rows_out:
        rows = np.concatenate(rows_out)
        cols = np.concatenate(cols_out)
        vals = np.concatenate(vals_out)
    else:
        rows = np.zeros(0, dtype=np.int64)
        cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0, dtype=np.complex128)
    return rows, cols, vals, dropped

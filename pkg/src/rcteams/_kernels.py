"""Array kernels over the assignment table of a signature.

The assignment table is an ``(n_assignments, n_vars)`` int64 array listing
every assignment as value indices.  Laws are packed into flat arrays (see
:class:`rcteams.model.PackedLaws`) so the kernels never touch Python objects.

Each kernel exists twice: a vectorised numpy version and a numba ``@njit``
loop version with the same contract.  ``RCT_NUMBA=0`` in the environment forces
the numpy path; otherwise numba is used when it imports.
"""

from __future__ import annotations

import os

import numpy as np

# -- numpy path --------------------------------------------------------------


def np_compat_mask(table, law_var, law_card, law_par, law_npar, law_stride, law_off, rel, active):
    n = table.shape[0]
    out = np.ones(n, dtype=np.bool_)
    for j in range(law_var.shape[0]):
        if not active[j]:
            continue
        idx = np.zeros(n, dtype=np.int64)
        for p in range(law_npar[j]):
            idx += table[:, law_par[j, p]] * law_stride[j, p]
        flat = law_off[j] + idx * law_card[j] + table[:, law_var[j]]
        out &= rel[flat]
    return out


def np_match_mask(table, cols, vals):
    if cols.shape[0] == 0:
        return np.ones(table.shape[0], dtype=np.bool_)
    return np.all(table[:, cols] == vals, axis=1)


def np_member_mask(table, cols, radix, members):
    n = table.shape[0]
    if members.shape[0] == 0:
        return np.zeros(n, dtype=np.bool_)
    strides = np.ones(cols.shape[0], dtype=np.int64)
    for p in range(cols.shape[0] - 2, -1, -1):
        strides[p] = strides[p + 1] * radix[p + 1]
    keys = table[:, cols] @ strides if cols.shape[0] else np.zeros(n, dtype=np.int64)
    size = int(np.prod(radix)) if cols.shape[0] else 1
    seen = np.zeros(size, dtype=np.bool_)
    seen[keys[members]] = True
    return seen[keys]


def np_intervened_mask(table, law_var, law_card, law_par, law_npar, law_stride, law_off, rel,
                       active, xcols, xvals, ncols, nradix, members):
    out = np_compat_mask(table, law_var, law_card, law_par, law_npar, law_stride, law_off, rel, active)
    out &= np_match_mask(table, xcols, xvals)
    out &= np_member_mask(table, ncols, nradix, members)
    return out


# -- numba path --------------------------------------------------------------

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

HAVE_NUMBA = njit is not None

if HAVE_NUMBA:

    @njit(cache=False)
    def nb_compat_mask(table, law_var, law_card, law_par, law_npar, law_stride, law_off, rel, active):
        n = table.shape[0]
        out = np.ones(n, dtype=np.bool_)
        for i in range(n):
            for j in range(law_var.shape[0]):
                if not active[j]:
                    continue
                idx = 0
                for p in range(law_npar[j]):
                    idx += table[i, law_par[j, p]] * law_stride[j, p]
                if not rel[law_off[j] + idx * law_card[j] + table[i, law_var[j]]]:
                    out[i] = False
                    break
        return out

    @njit(cache=False)
    def nb_match_mask(table, cols, vals):
        n = table.shape[0]
        out = np.ones(n, dtype=np.bool_)
        for i in range(n):
            for p in range(cols.shape[0]):
                if table[i, cols[p]] != vals[p]:
                    out[i] = False
                    break
        return out

    @njit(cache=False)
    def _keys(table, cols, radix):
        n = table.shape[0]
        keys = np.zeros(n, dtype=np.int64)
        for i in range(n):
            k = 0
            for p in range(cols.shape[0]):
                k = k * radix[p] + table[i, cols[p]]
            keys[i] = k
        return keys

    @njit(cache=False)
    def nb_member_mask(table, cols, radix, members):
        n = table.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        if members.shape[0] == 0:
            return out
        size = 1
        for p in range(cols.shape[0]):
            size *= radix[p]
        keys = _keys(table, cols, radix)
        seen = np.zeros(size, dtype=np.bool_)
        for m in range(members.shape[0]):
            seen[keys[members[m]]] = True
        for i in range(n):
            out[i] = seen[keys[i]]
        return out

    @njit(cache=False)
    def nb_intervened_mask(table, law_var, law_card, law_par, law_npar, law_stride, law_off, rel,
                           active, xcols, xvals, ncols, nradix, members):
        n = table.shape[0]
        out = np.zeros(n, dtype=np.bool_)
        if members.shape[0] == 0:
            return out
        size = 1
        for p in range(ncols.shape[0]):
            size *= nradix[p]
        keys = _keys(table, ncols, nradix)
        seen = np.zeros(size, dtype=np.bool_)
        for m in range(members.shape[0]):
            seen[keys[members[m]]] = True
        for i in range(n):
            if not seen[keys[i]]:
                continue
            ok = True
            for p in range(xcols.shape[0]):
                if table[i, xcols[p]] != xvals[p]:
                    ok = False
                    break
            if not ok:
                continue
            for j in range(law_var.shape[0]):
                if not active[j]:
                    continue
                idx = 0
                for p in range(law_npar[j]):
                    idx += table[i, law_par[j, p]] * law_stride[j, p]
                if not rel[law_off[j] + idx * law_card[j] + table[i, law_var[j]]]:
                    ok = False
                    break
            out[i] = ok
        return out


def _use_numba() -> bool:
    flag = os.environ.get("RCT_NUMBA", "1").strip().lower()
    return HAVE_NUMBA and flag not in ("0", "false", "no", "off")


BACKEND = "numba" if _use_numba() else "numpy"

if BACKEND == "numba":
    compat_mask = nb_compat_mask
    match_mask = nb_match_mask
    member_mask = nb_member_mask
    intervened_mask = nb_intervened_mask
else:
    compat_mask = np_compat_mask
    match_mask = np_match_mask
    member_mask = np_member_mask
    intervened_mask = np_intervened_mask


def mask_to_bits(mask: np.ndarray) -> int:
    """Pack a boolean mask into an int whose bit ``i`` is ``mask[i]``."""
    if mask.shape[0] == 0:
        return 0
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def bits_to_indices(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out

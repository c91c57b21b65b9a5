"""Vectorized kernels for the large exhaustive law scans.

These are plain reimplementations of per-point arithmetic that the scalar
code in :mod:`statemonad` and :mod:`algebra` also performs; the unit tests
cross-check both routes on small objects.  Every kernel walks its domain in
chunks and returns the first counterexample index, or None.

All domains handled here fit in int64; anything larger never reaches these
kernels (the callers switch to lazy bigint evaluation instead).
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 20


def exp_map_table(ft, y: int, z: int, n: int, dom_size: int) -> tuple[int, ...]:
    """Table of the exponentiated map: postcompose every ``g: n -> y`` with ft."""
    lookup = np.asarray(ft, dtype=np.int64)
    out = np.empty(dom_size, dtype=np.int64)
    for start in range(0, dom_size, CHUNK):
        g = np.arange(start, min(start + CHUNK, dom_size), dtype=np.int64)
        code = np.zeros_like(g)
        p = 1
        rest = g
        for _ in range(n):
            rest, d = np.divmod(rest, y)
            code += lookup[d] * p
            p *= z
        out[start : start + g.size] = code
    return tuple(out.tolist())


def _first_mismatch(start: int, bad: np.ndarray) -> int | None:
    idx = np.nonzero(bad)[0]
    if idx.size:
        return start + int(idx[0])
    return None


def _chunks(total: int):
    start = 0
    while start < total:
        stop = min(start + CHUNK, total)
        yield start, np.arange(start, stop, dtype=np.int64)
        start = stop


def mult_agreement_scan(ctx, x) -> int | None:
    """Compare the exponentiated-evaluation multiplication against the
    explicit run-outer-then-inner formula over all of TTX."""
    from .finset import evaluation

    s = ctx.state.size
    xn = x.size
    pair_sx = s * xn
    tx = ctx.t_obj(x).size
    outer = s * tx
    total = outer**s
    eps = np.asarray(evaluation(ctx.pair_obj(x), ctx.state).table, dtype=np.int64)
    powc = np.asarray([pair_sx**c for c in range(s)], dtype=np.int64)
    for start, w in _chunks(total):
        code_a = np.zeros_like(w)
        code_b = np.zeros_like(w)
        p = 1
        rest = w.copy()
        for _ in range(s):
            a = rest % outer
            rest //= outer
            c, t = np.divmod(a, tx)
            code_a += eps[a] * p
            code_b += ((t // powc[c]) % pair_sx) * p
            p *= pair_sx
        witness = _first_mismatch(start, code_a != code_b)
        if witness is not None:
            return witness
    return None


def associativity_scan(ctx, x) -> int | None:
    """Compare the two flattening orders pointwise over all of TTTX.

    Requires the multiplication table over TTX to be materializable.
    """
    s = ctx.state.size
    tx = ctx.t_obj(x).size
    ttx_obj = ctx.t_obj(ctx.t_obj(x))
    ttx = ttx_obj.size
    mid = s * tx
    outer = s * ttx
    total = outer**s
    mult = np.asarray(
        [ctx.mult_at(x, w) for w in range(ttx)], dtype=np.int64
    )
    powc = np.asarray([mid**c for c in range(s)], dtype=np.int64)
    for start, w in _chunks(total):
        code_l = np.zeros_like(w)
        code_r = np.zeros_like(w)
        p = 1
        rest = w.copy()
        for _ in range(s):
            a = rest % outer
            rest //= outer
            c, t = np.divmod(a, ttx)
            code_l += (c * tx + mult[t]) * p
            code_r += ((t // powc[c]) % mid) * p
            p *= mid
        witness = _first_mismatch(start, mult[code_l] != mult[code_r])
        if witness is not None:
            return witness
    return None


def algebra_assoc_scan(ctx, x, h) -> int | None:
    """Check ``h . T(h) == h . mult`` over all of TTX for a structure table."""
    s = ctx.state.size
    xn = x.size
    pair_sx = s * xn
    tx = ctx.t_obj(x).size
    outer = s * tx
    total = outer**s
    hh = np.asarray(h, dtype=np.int64)
    powc = np.asarray([pair_sx**c for c in range(s)], dtype=np.int64)
    for start, w in _chunks(total):
        th_code = np.zeros_like(w)
        mu_code = np.zeros_like(w)
        p = 1
        rest = w.copy()
        for _ in range(s):
            a = rest % outer
            rest //= outer
            c, t = np.divmod(a, tx)
            th_code += (c * xn + hh[t]) * p
            mu_code += ((t // powc[c]) % pair_sx) * p
            p *= pair_sx
        witness = _first_mismatch(start, hh[th_code] != hh[mu_code])
        if witness is not None:
            return witness
    return None


def tuple_identity_scan(
    lookup,
    a_size: int,
    left_parts: list,
    right_parts: list,
) -> int | None:
    """Check ``lookup(encode(p)) == lookup(encode(q))`` over a product of
    per-coordinate (p, q) pair lists.

    Coordinate ``s`` ranges over ``zip(left_parts[s], right_parts[s])``; the
    flattened combination index of the first failure is returned.
    """
    look = np.asarray(lookup, dtype=np.int64)
    lens = [len(p) for p in left_parts]
    total = 1
    for n in lens:
        total *= n
    if total == 0:
        return None
    lefts = [np.asarray(p, dtype=np.int64) for p in left_parts]
    rights = [np.asarray(q, dtype=np.int64) for q in right_parts]
    for start, idx in _chunks(total):
        lcode = np.zeros_like(idx)
        rcode = np.zeros_like(idx)
        rest = idx.copy()
        p = 1
        for s, n in enumerate(lens):
            sel = rest % n
            rest //= n
            lcode += lefts[s][sel] * p
            rcode += rights[s][sel] * p
            p *= a_size
        witness = _first_mismatch(start, look[lcode] != look[rcode])
        if witness is not None:
            return witness
    return None

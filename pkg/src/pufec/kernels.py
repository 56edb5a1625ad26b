"""Hot decoding kernels, each built twice: numba ``@njit`` and pure numpy.

The dispatched names at the bottom (``nearest_codeword``, ``rm1_corr_decode``,
``reed_decode_batch``) point at the numba build unless numba is unavailable
or ``PUFEC_PURE_NUMPY=1`` is set.  Both builds are kept importable so tests
can assert bit-identical outputs and the benchmark can time them head to
head.
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(inline="always")
def _popcount_u64(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


# ---------------------------------------------------------------------------
# nearest codeword in a packed codebook

def nearest_codeword_np(words, book):
    """Minimum-distance lookup of each packed word against a packed codebook.

    ``words`` is (B, W) uint64, ``book`` is (K, W) uint64.  Returns
    ``(best_index, best_distance, tie)`` where ``tie`` flags words with two
    or more codewords at the minimum distance.
    """
    d = np.bitwise_count(words[:, None, :] ^ book[None, :, :]).sum(
        axis=2, dtype=np.int64
    )
    best = d.argmin(axis=1).astype(np.int64)
    bestd = np.take_along_axis(d, best[:, None], axis=1)[:, 0]
    tie = (d == bestd[:, None]).sum(axis=1) > 1
    return best, bestd, tie


@njit(cache=True)
def nearest_codeword_nb(words, book):
    B, W = words.shape
    K = book.shape[0]
    best = np.empty(B, np.int64)
    bestd = np.empty(B, np.int64)
    tie = np.zeros(B, np.bool_)
    for i in range(B):
        bd = np.int64(1 << 60)
        bi = np.int64(-1)
        cnt = 0
        for j in range(K):
            d = np.int64(0)
            for w in range(W):
                d += np.int64(_popcount_u64(words[i, w] ^ book[j, w]))
            if d < bd:
                bd = d
                bi = j
                cnt = 1
            elif d == bd:
                cnt += 1
        best[i] = bi
        bestd[i] = bd
        tie[i] = cnt > 1
    return best, bestd, tie


# ---------------------------------------------------------------------------
# fast Hadamard transform (in place, batch rows)

def fht_inplace_np(x):
    """Walsh-Hadamard transform of each row of (B, n) int32, in place."""
    B, n = x.shape
    h = 1
    while h < n:
        y = x.reshape(B, -1, 2, h)
        u = y[:, :, 0, :].copy()
        v = y[:, :, 1, :]
        y[:, :, 0, :] = u + v
        y[:, :, 1, :] = u - v
        h *= 2
    return x


@njit(cache=True)
def fht_inplace_nb(x):
    B, n = x.shape
    for b in range(B):
        h = 1
        while h < n:
            for start in range(0, n, 2 * h):
                for j in range(start, start + h):
                    u = x[b, j]
                    v = x[b, j + h]
                    x[b, j] = u + v
                    x[b, j + h] = u - v
            h *= 2
    return x


# ---------------------------------------------------------------------------
# transform-domain ML decoding of first-order Reed-Muller words

def rm1_corr_decode_np(signs):
    """ML-decode rows of +/-1 values (B, n) int32 as first-order RM words.

    Returns ``(a, b, dist, tie)``: the linear part ``a`` (variable i is bit i),
    the affine bit ``b``, the distance to the winner, and an exact tie flag.
    The input buffer is consumed (transformed in place).
    """
    B, n = signs.shape
    t = fht_inplace_np(signs)
    at = np.abs(t)
    a = at.argmax(axis=1).astype(np.int64)
    m = np.take_along_axis(at, a[:, None], axis=1)[:, 0].astype(np.int64)
    cnt = (at == m[:, None]).sum(axis=1, dtype=np.int64)
    cnt = np.where(m == 0, 2 * cnt, cnt)
    bestt = np.take_along_axis(t, a[:, None], axis=1)[:, 0]
    b = (bestt < 0).astype(np.int64)
    dist = (n - m) // 2
    tie = cnt > 1
    return a, b, dist, tie


@njit(cache=True)
def rm1_corr_decode_nb(signs):
    B, n = signs.shape
    a_out = np.empty(B, np.int64)
    b_out = np.empty(B, np.int64)
    dist = np.empty(B, np.int64)
    tie = np.zeros(B, np.bool_)
    for bi in range(B):
        h = 1
        while h < n:
            for start in range(0, n, 2 * h):
                for j in range(start, start + h):
                    u = signs[bi, j]
                    v = signs[bi, j + h]
                    signs[bi, j] = u + v
                    signs[bi, j + h] = u - v
            h *= 2
        best = np.int64(-1)
        besta = np.int64(0)
        bestt = np.int64(0)
        cnt = np.int64(0)
        for a in range(n):
            t = np.int64(signs[bi, a])
            at = t if t >= 0 else -t
            if at > best:
                best = at
                besta = a
                bestt = t
                cnt = 1 if at > 0 else 2
            elif at == best:
                cnt += 1 if at > 0 else 2
        a_out[bi] = besta
        b_out[bi] = 1 if bestt < 0 else 0
        dist[bi] = (n - best) // 2
        tie[bi] = cnt > 1
    return a_out, b_out, dist, tie


# ---------------------------------------------------------------------------
# majority-logic (Reed) decoding of RM(r, m) words, batched

def reed_decode_batch_np(words, pos, gsize, row_idx, stage_starts, gen, d):
    """Decode each row of ``words`` (B, n) with staged majority votes.

    Plan arrays describe the vote structure: ``pos[q]`` lists the n positions
    of monomial q grouped contiguously into votes of size ``gsize[q]``;
    ``row_idx[q]`` is the generator row carrying that monomial; stages are
    ``stage_starts`` slices ordered by descending degree.  Returns
    ``(status, info, dist, codeword)`` with status 0 for a unique decode and
    1 for failure (a tied vote, or a residual of weight >= d/2).
    """
    B, n = words.shape
    k = gen.shape[0]
    w = words.astype(np.uint8).copy()
    alive = np.ones(B, dtype=bool)
    info = np.zeros((B, k), dtype=np.uint8)
    nstage = len(stage_starts) - 1
    for s in range(nstage):
        m0 = int(stage_starts[s])
        m1 = int(stage_starts[s + 1])
        nm = m1 - m0
        gs = int(gsize[m0])
        ng = n // gs
        idx = pos[m0:m1].reshape(-1)
        gathered = w[:, idx].reshape(B, nm, ng, gs)
        votes = np.bitwise_xor.reduce(gathered, axis=3)
        ones = votes.sum(axis=2, dtype=np.int64)
        alive &= ~(2 * ones == ng).any(axis=1)
        coeff = (2 * ones > ng).astype(np.uint8)
        info[:, row_idx[m0:m1]] = coeff
        delta = (coeff.astype(np.int64) @ gen[row_idx[m0:m1]].astype(np.int64)) & 1
        w ^= delta.astype(np.uint8)
    wt = w.sum(axis=1, dtype=np.int64)
    alive &= 2 * wt < d
    status = np.where(alive, 0, 1).astype(np.uint8)
    info[~alive] = 0
    dist = np.where(alive, wt, 0).astype(np.int64)
    cw = np.where(alive[:, None], words ^ w, 0).astype(np.uint8)
    return status, info, dist, cw


@njit(cache=True)
def reed_decode_batch_nb(words, pos, gsize, row_idx, stage_starts, gen, d):
    B, n = words.shape
    k = gen.shape[0]
    status = np.zeros(B, np.uint8)
    info = np.zeros((B, k), np.uint8)
    dist = np.zeros(B, np.int64)
    cw = np.zeros((B, n), np.uint8)
    nstage = stage_starts.shape[0] - 1
    w = np.empty(n, np.uint8)
    for bi in range(B):
        for j in range(n):
            w[j] = words[bi, j]
        ok = True
        for s in range(nstage):
            m0 = stage_starts[s]
            m1 = stage_starts[s + 1]
            for q in range(m0, m1):
                gs = gsize[q]
                ng = n // gs
                ones = 0
                for g in range(ng):
                    acc = np.uint8(0)
                    base = g * gs
                    for t in range(gs):
                        acc ^= w[pos[q, base + t]]
                    ones += acc
                if 2 * ones == ng:
                    ok = False
                    break
                info[bi, row_idx[q]] = 1 if 2 * ones > ng else 0
            if not ok:
                break
            for q in range(m0, m1):
                r = row_idx[q]
                if info[bi, r] == 1:
                    for j in range(n):
                        w[j] ^= gen[r, j]
        if ok:
            wt = 0
            for j in range(n):
                wt += w[j]
            if 2 * wt >= d:
                ok = False
            else:
                dist[bi] = wt
                for j in range(n):
                    cw[bi, j] = words[bi, j] ^ w[j]
        if not ok:
            status[bi] = 1
            for r in range(k):
                info[bi, r] = 0
    return status, info, dist, cw


if NUMBA_ENABLED:
    nearest_codeword = nearest_codeword_nb
    fht_inplace = fht_inplace_nb
    rm1_corr_decode = rm1_corr_decode_nb
    reed_decode_batch = reed_decode_batch_nb
else:
    nearest_codeword = nearest_codeword_np
    fht_inplace = fht_inplace_np
    rm1_corr_decode = rm1_corr_decode_np
    reed_decode_batch = reed_decode_batch_np

"""Generalized minimum distance decoding.

Per-position integer reliabilities steer a ladder of error-erasure trials:
trial 0 erases only the pre-erased positions, and each following trial
erases the 2 least reliable positions not yet erased, stopping before the
erasure count reaches the minimum distance.  Every unique candidate that
the trials produce is scored by the reliability-weighted mismatch against
the hard-decision word, and the lowest score wins (ties broken by fewer raw
mismatches, then by earliest trial).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bits, codes

__all__ = [
    "ReliabilityVector",
    "reliability_from_distance",
    "gmd_decode",
    "gmd_decode_many",
]


@dataclass(frozen=True, eq=False)
class ReliabilityVector:
    """Non-negative per-position weights; erased positions must weigh 0."""

    weights: np.ndarray
    erased: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.int64)
        e = np.asarray(self.erased, dtype=bool)
        if w.ndim != 1 or e.shape != w.shape:
            raise ValueError("weights and erased must be matching 1-D arrays")
        if (w < 0).any():
            raise ValueError("reliability weights must be non-negative")
        if w[e].any():
            raise ValueError("pre-erased positions must have reliability 0")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "erased", e)

    @classmethod
    def uniform(cls, n: int, weight: int = 1) -> "ReliabilityVector":
        return cls(np.full(n, weight, dtype=np.int64), np.zeros(n, dtype=bool))


def reliability_from_distance(d_level: int, dists, erased) -> ReliabilityVector:
    """Convert per-position decoding distances to weights d_level - 2*dist,
    clamped at 0; erased positions get weight 0."""
    dists = np.asarray(dists, dtype=np.int64)
    erased = np.asarray(erased, dtype=bool)
    w = np.clip(d_level - 2 * dists, 0, None)
    w[erased] = 0
    return ReliabilityVector(w, erased)


def _erasure_schedule(code: codes.LinearCode, rel: ReliabilityVector):
    """Pre-erased mask plus the fixed order in which positions get erased."""
    n = code.n
    if rel.weights.size != n:
        raise ValueError(f"reliability length {rel.weights.size} != code length {n}")
    base = rel.erased
    live = np.nonzero(~base)[0]
    # ascending reliability, ties by lowest index (lexsort: last key is primary)
    order = live[np.lexsort((live, rel.weights[live]))]
    sizes = []
    tau = int(base.sum())
    taken = 0
    while tau < code.d:
        sizes.append(taken)
        if taken >= order.size:
            break
        step = min(2, order.size - taken)
        taken += step
        tau += step
    return base, order, sizes


def _select(rel, hard, cand_ids, cand_trials, lookup_cw, lookup_info):
    """Score deduped candidates and pick the winner.

    ``cand_ids`` are opaque identities in trial order; ``lookup_cw`` /
    ``lookup_info`` map a candidate's trial-list position to its codeword
    and information word.
    """
    if len(cand_ids) == 0:
        return codes.DecodeOutcome.failure()
    best = None
    seen = set()
    live = ~rel.erased
    for pos, (cid, trial) in enumerate(zip(cand_ids, cand_trials)):
        if cid in seen:
            continue
        seen.add(cid)
        cw = lookup_cw(pos)
        mism = (cw != hard) & live
        score = int(rel.weights[mism].sum())
        raw = int(np.count_nonzero(mism))
        key = (score, raw, trial)
        if best is None or key < best[0]:
            best = (key, cw, pos)
    _, cw, pos = best
    return codes.DecodeOutcome.unique(cw, lookup_info(pos), best[0][1])


def _gmd_generic(code, hard, rel, base=None) -> codes.DecodeOutcome:
    """Reference trial loop built directly on error_erasure_decode."""
    base_mask, order, sizes = _erasure_schedule(code, rel)
    outs = []
    ids = []
    trials = []
    for trial, taken in enumerate(sizes):
        mask = base_mask.copy()
        mask[order[:taken]] = True
        out = codes.error_erasure_decode(code, hard, mask, base=base)
        if out.is_unique:
            outs.append(out)
            ids.append(out.codeword.tobytes())
            trials.append(trial)
    return _select(
        rel, hard, ids, trials,
        lambda pos: outs[pos].codeword,
        lambda pos: outs[pos].info,
    )


def _trial_fills(hards, base_mask, order, sizes):
    """Fill matrix (L, T, 2, n) for L words sharing one erasure ladder."""
    L, n = hards.shape
    T = len(sizes)
    # trial j erases base_mask plus the first sizes[j] entries of order
    rank = np.full(n, n, dtype=np.int64)
    rank[order] = np.arange(order.size)
    masks = (rank[np.newaxis, :] < np.asarray(sizes)[:, np.newaxis]) | base_mask
    m8 = masks.astype(np.uint8)
    fills = np.empty((L, T, 2, n), dtype=np.uint8)
    fills[:, :, 0, :] = hards[:, None, :] & (1 - m8[None, :, :])
    fills[:, :, 1, :] = hards[:, None, :] | m8[None, :, :]
    return masks, fills


def _pick_per_trial(valid, ids, mism):
    """Apply the error-erasure candidate rule to each trial's two fills.

    ``valid``/``ids``/``mism`` are (T, 2); returns for each trial the chosen
    fill index or -1 (no candidate: nothing valid, or a tie between two
    distinct codewords with equal mismatch counts).
    """
    v0, v1 = valid[:, 0], valid[:, 1]
    same = ids[:, 0] == ids[:, 1]
    strict0 = mism[:, 0] < mism[:, 1]
    strict1 = mism[:, 1] < mism[:, 0]
    pick = np.full(valid.shape[0], -1, dtype=np.int64)
    both = v0 & v1
    pick[v0 & ~v1] = 0
    pick[v1 & ~v0] = 1
    pick[both & same] = 0
    pick[both & ~same & strict0] = 0
    pick[both & ~same & strict1] = 1
    return pick


def gmd_decode_many(code: codes.LinearCode, hards, rel: ReliabilityVector):
    """GMD-decode several words of one RM code under a shared reliability
    vector (one erasure ladder, one batched kernel call).

    Returns a list of DecodeOutcome, one per row of ``hards``.
    """
    if code.rm is None:
        raise ValueError("batched GMD needs an RM code; use gmd_decode")
    hards = np.ascontiguousarray(np.atleast_2d(hards), dtype=np.uint8)
    L, n = hards.shape
    if n != code.n:
        raise ValueError(f"word length {n} != code length {code.n}")
    base_mask, order, sizes = _erasure_schedule(code, rel)
    T = len(sizes)
    if T == 0:
        return [codes.DecodeOutcome.failure()] * L
    masks, fills = _trial_fills(hards, base_mask, order, sizes)
    flat = fills.reshape(L * T * 2, n)

    first_order = code.rm[0] == 1
    if first_order:
        idx, dist, tie = codes.rm1_ml_many(code, flat)
        valid = (~tie) & (2 * dist < code.d)
        cb = code.codebook()
        ids_flat = idx
        cand_cw = cb.words[idx.reshape(L, T, 2)]
        cw_of = lambda i: cb.words[int(ids_flat[i])]
        info_of = lambda i: codes.index_to_info(int(ids_flat[i]), code.k)
    else:
        status, info_flat, dist, cw_flat = codes.reed_decode_many(code, flat)
        valid = status == 0
        # identity of a candidate: its packed codeword
        packed = bits.pack_rows_u64(cw_flat)
        ids_flat = np.array([w.tobytes() for w in packed], dtype=object)
        cand_cw = cw_flat.reshape(L, T, 2, n)
        cw_of = lambda i: cw_flat[i]
        info_of = lambda i: info_flat[i]

    valid = valid.reshape(L, T, 2)
    ids = ids_flat.reshape(L, T, 2)
    # mismatches of each candidate codeword against its word on the
    # positions its trial did not erase
    mism = ((cand_cw != hards[:, None, None, :]) & ~masks[None, :, None, :]).sum(
        axis=3, dtype=np.int64
    )

    outs = []
    for l in range(L):
        pick = _pick_per_trial(valid[l], ids[l], mism[l])
        chosen = np.nonzero(pick >= 0)[0]
        cand_ids = [ids[l, j, pick[j]] for j in chosen]
        flat_pos = [(l * T + j) * 2 + pick[j] for j in chosen]
        outs.append(
            _select(
                rel, hards[l], cand_ids, list(chosen),
                lambda p, fp=flat_pos: cw_of(fp[p]),
                lambda p, fp=flat_pos: info_of(fp[p]),
            )
        )
    return outs


def gmd_decode(code: codes.LinearCode, hard, rel: ReliabilityVector) -> codes.DecodeOutcome:
    """GMD decoding of ``hard`` under per-position reliabilities.

    Returns the best-scoring unique candidate over the erasure-trial ladder,
    or failure when no trial decodes.  ``distance`` on the outcome is the raw
    mismatch count against ``hard`` outside the pre-erased positions.
    """
    hard = bits.as_bits(hard, code.n)
    if code.rm is not None:
        return gmd_decode_many(code, hard[np.newaxis, :], rel)[0]
    return _gmd_generic(code, hard, rel)

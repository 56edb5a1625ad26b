"""Binary linear codes: Reed-Muller construction, ML / majority-logic /
error-erasure decoding.

Conventions fixed here and relied on everywhere else:

* Evaluation points of RM(r, m) are the integers 0..2^m-1; variable ``x_i``
  of a point ``j`` is bit ``i`` of ``j``.
* Generator rows are monomial evaluations ordered by ascending degree, ties
  broken lexicographically by variable index, so row 0 is the all-ones row.
* Information words map to codebook indices little-endian: info bit ``t`` is
  bit ``t`` of the index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import bits, kernels

__all__ = [
    "CodeParams",
    "LinearCode",
    "Codebook",
    "DecodeOutcome",
    "rm_code",
    "encode",
    "encode_many",
    "build_codebook",
    "ml_decode",
    "rm1_ml_decode",
    "reed_decode",
    "reed_decode_many",
    "error_erasure_decode",
    "base_decode",
    "info_of_codeword",
]

CODEBOOK_BOUND = 1 << 20
ML_BASE_BOUND = 1 << 16


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    d: int


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    """Result of one decoding attempt.

    ``kind`` is "unique", "erasure" (tie, no winner declared) or "failure".
    ``distance`` is the mismatch count between the received word and the
    returned codeword, counted over the positions the decoder actually used
    (all of them, except erasure decoding which skips erased positions).
    """

    kind: str
    codeword: np.ndarray | None = None
    info: np.ndarray | None = None
    distance: int | None = None

    @classmethod
    def unique(cls, codeword, info, distance) -> "DecodeOutcome":
        return cls("unique", codeword, info, int(distance))

    @classmethod
    def erasure(cls) -> "DecodeOutcome":
        return cls("erasure")

    @classmethod
    def failure(cls) -> "DecodeOutcome":
        return cls("failure")

    @property
    def is_unique(self) -> bool:
        return self.kind == "unique"

    @property
    def is_erasure(self) -> bool:
        return self.kind == "erasure"

    @property
    def is_failure(self) -> bool:
        return self.kind == "failure"


class LinearCode:
    """A binary linear code given by its generator matrix.

    Immutable after construction (arrays are marked read-only); derived
    objects such as the parity-check matrix, codebook and decoding plans are
    cached lazily.
    """

    def __init__(self, generator, d: int, label: str, rm: tuple[int, int] | None = None,
                 monomials: list[tuple[int, ...]] | None = None):
        G = bits.as_bit_matrix(generator).copy()
        k, n = G.shape
        _, _, rank = bits.row_reduce(G)
        if rank < k:
            raise ValueError(f"{label}: generator matrix is rank deficient")
        G.flags.writeable = False
        self.generator = G
        self.n = n
        self.k = k
        self.d = int(d)
        self.label = label
        self.rm = rm
        self.monomials = monomials
        self._parity_check = None
        self._codebook = None
        self._reed_plan = None
        self._info_transform = None

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.n, self.k, self.d)

    @property
    def parity_check(self) -> np.ndarray:
        if self._parity_check is None:
            H = bits.nullspace_basis(self.generator)
            H.flags.writeable = False
            self._parity_check = H
        return self._parity_check

    def codebook(self) -> "Codebook":
        if self._codebook is None:
            self._codebook = build_codebook(self)
        return self._codebook

    def __repr__(self) -> str:
        return f"LinearCode({self.label}, n={self.n}, k={self.k}, d={self.d})"


def rm_code(r: int, m: int) -> LinearCode:
    """Reed-Muller code of order r and length 2^m.

    Parameters are n = 2^m, k = sum_{i<=r} C(m, i), d = 2^(m-r).  The
    first-order codes double as the (2^m, m+1, 2^(m-1)) biorthogonal family.
    """
    if not (0 <= r <= m):
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    if m > 20:
        raise ValueError("m > 20 is beyond the practical bound")
    n = 1 << m
    idx = np.arange(n, dtype=np.int64)
    var_eval = [((idx >> i) & 1).astype(np.uint8) for i in range(m)]
    mons: list[tuple[int, ...]] = []
    rows = []
    for deg in range(r + 1):
        for S in itertools.combinations(range(m), deg):
            mons.append(S)
            row = np.ones(n, dtype=np.uint8)
            for v in S:
                row &= var_eval[v]
            rows.append(row)
    G = np.array(rows, dtype=np.uint8)
    k = sum(comb(m, i) for i in range(r + 1))
    assert G.shape == (k, n)
    return LinearCode(G, d=1 << (m - r), label=f"RM({r},{m})", rm=(r, m), monomials=mons)


def encode(code: LinearCode, info) -> np.ndarray:
    """Encode an information word: info @ G over GF(2)."""
    info = bits.as_bits(info, code.k)
    return ((info.astype(np.int64) @ code.generator.astype(np.int64)) & 1).astype(np.uint8)


def encode_many(code: LinearCode, infos: np.ndarray) -> np.ndarray:
    infos = np.asarray(infos, dtype=np.uint8)
    return ((infos.astype(np.int64) @ code.generator.astype(np.int64)) & 1).astype(np.uint8)


def index_to_info(i, k: int) -> np.ndarray:
    """Codebook index -> information word (little-endian bits)."""
    i = np.asarray(i, dtype=np.int64)
    return ((i[..., None] >> np.arange(k)) & 1).astype(np.uint8)


@dataclass(eq=False)
class Codebook:
    """All 2^k codewords, indexed by the information word's integer value."""

    code: LinearCode
    words: np.ndarray   # (2^k, n) uint8
    packed: np.ndarray  # (2^k, W) uint64

    def __len__(self) -> int:
        return self.words.shape[0]

    def min_distance(self) -> int:
        """Minimum nonzero codeword weight, from full enumeration."""
        w = self.words.sum(axis=1, dtype=np.int64)
        return int(w[w > 0].min())


def build_codebook(code: LinearCode, bound: int = CODEBOOK_BOUND) -> Codebook:
    """Enumerate every codeword; refuses when 2^k exceeds ``bound``."""
    size = 1 << code.k
    if size > bound:
        raise ValueError(
            f"codebook for {code.label} would hold 2^{code.k} words, above the bound of {bound}"
        )
    words = np.zeros((size, code.n), dtype=np.uint8)
    G = code.generator
    for t in range(code.k):
        step = 1 << t
        words[step : 2 * step] = words[:step] ^ G[t]
    words.flags.writeable = False
    return Codebook(code=code, words=words, packed=bits.pack_rows_u64(words))


def ml_decode(cb: Codebook, received) -> DecodeOutcome:
    """Exact minimum-distance decoding against a full codebook.

    Returns the unique nearest codeword, or an erasure when two or more
    codewords tie at the minimum distance.  Never fails.
    """
    received = bits.as_bits(received, cb.code.n)
    packed = bits.pack_rows_u64(received[np.newaxis, :])
    best, dist, tie = kernels.nearest_codeword(packed, cb.packed)
    if tie[0]:
        return DecodeOutcome.erasure()
    i = int(best[0])
    return DecodeOutcome.unique(cb.words[i], index_to_info(i, cb.code.k), int(dist[0]))


# ---------------------------------------------------------------------------
# first-order RM: transform-domain ML (identical results to ml_decode)

def _require_rm1(code: LinearCode):
    if code.rm is None or code.rm[0] != 1:
        raise ValueError(f"{code.label} is not a first-order RM code")


def rm1_ml_many(code: LinearCode, words: np.ndarray):
    """Batch ML decode of first-order RM words via the Hadamard transform.

    Returns ``(codeword_index, dist, tie)`` arrays; the codeword index is the
    codebook index b + 2a of the winning affine word.
    """
    _require_rm1(code)
    signs = (1 - 2 * words.astype(np.int32)).astype(np.int32)
    a, b, dist, tie = kernels.rm1_corr_decode(np.ascontiguousarray(signs))
    return b + 2 * a, dist, tie


def rm1_ml_decode(code: LinearCode, received) -> DecodeOutcome:
    received = bits.as_bits(received, code.n)
    idx, dist, tie = rm1_ml_many(code, received[np.newaxis, :])
    if tie[0]:
        return DecodeOutcome.erasure()
    info = index_to_info(int(idx[0]), code.k)
    return DecodeOutcome.unique(encode(code, info), info, int(dist[0]))


# ---------------------------------------------------------------------------
# majority-logic (Reed) decoding

def _reed_plan(code: LinearCode):
    """Vote-structure arrays for staged majority decoding of an RM code."""
    if code._reed_plan is not None:
        return code._reed_plan
    if code.rm is None:
        raise ValueError(f"{code.label} is not an RM code")
    r, m = code.rm
    n = code.n
    order = sorted(range(code.k), key=lambda q: (-len(code.monomials[q]), code.monomials[q]))
    pos = np.empty((code.k, n), dtype=np.int32)
    gsize = np.empty(code.k, dtype=np.int32)
    row_idx = np.empty(code.k, dtype=np.int32)
    stage_starts = [0]
    prev_deg = None
    for slot, q in enumerate(order):
        S = code.monomials[q]
        deg = len(S)
        if prev_deg is not None and deg != prev_deg:
            stage_starts.append(slot)
        prev_deg = deg
        T = [v for v in range(m) if v not in S]
        s = len(S)
        sub = np.arange(1 << s, dtype=np.int64)
        off = np.zeros(1 << s, dtype=np.int64)
        for j, v in enumerate(S):
            off += ((sub >> j) & 1) << v
        grp = np.arange(1 << (m - s), dtype=np.int64)
        base = np.zeros(1 << (m - s), dtype=np.int64)
        for t, v in enumerate(T):
            base += ((grp >> t) & 1) << v
        pos[slot] = (base[:, None] + off[None, :]).reshape(-1).astype(np.int32)
        gsize[slot] = 1 << s
        row_idx[slot] = q
    stage_starts.append(code.k)
    plan = (pos, gsize, row_idx, np.asarray(stage_starts, dtype=np.int32),
            np.ascontiguousarray(code.generator), code.d)
    code._reed_plan = plan
    return plan


def reed_decode_many(code: LinearCode, words: np.ndarray):
    """Batch bounded-distance majority-logic decoding.

    Returns ``(status, info, dist, codeword)``; status 0 means a unique
    decode with residual weight < d/2, status 1 a failure (tied vote or
    residual out of radius).
    """
    plan = _reed_plan(code)
    words = np.ascontiguousarray(words, dtype=np.uint8)
    return kernels.reed_decode_batch(words, *plan)


def reed_decode(code: LinearCode, received) -> DecodeOutcome:
    """Majority-logic decoding of one RM word; corrects any weight < d/2."""
    received = bits.as_bits(received, code.n)
    status, info, dist, cw = reed_decode_many(code, received[np.newaxis, :])
    if status[0] != 0:
        return DecodeOutcome.failure()
    return DecodeOutcome.unique(cw[0], info[0], int(dist[0]))


# ---------------------------------------------------------------------------
# base bounded-distance dispatch and error-erasure decoding

def base_decode(code: LinearCode, received) -> DecodeOutcome:
    """Hard-decision decode with the cheapest suitable decoder.

    First-order RM goes through the Hadamard transform, small codes through
    the exhaustive codebook, any other RM code through majority logic.
    """
    if code.rm is not None and code.rm[0] == 1:
        return rm1_ml_decode(code, received)
    if (1 << code.k) <= ML_BASE_BOUND:
        return ml_decode(code.codebook(), received)
    if code.rm is not None:
        return reed_decode(code, received)
    raise ValueError(f"no decoder available for {code.label}")


def _erasure_mask(code: LinearCode, erasures) -> np.ndarray:
    mask = np.zeros(code.n, dtype=bool)
    if erasures is None:
        return mask
    er = np.asarray(list(erasures) if not isinstance(erasures, np.ndarray) else erasures)
    if er.dtype == bool:
        if er.size != code.n:
            raise ValueError("erasure mask length mismatch")
        return er.copy()
    if er.size:
        if er.min() < 0 or er.max() >= code.n:
            raise ValueError("erasure position out of range")
        mask[er.astype(np.intp)] = True
    return mask


def error_erasure_decode(code: LinearCode, received, erasures, base=None) -> DecodeOutcome:
    """Error-erasure decoding by the two-fill trick.

    The erased positions are filled with all zeros and with all ones, each
    filled copy is decoded by a bounded-distance decoder (candidates beyond
    d/2 of their fill are dropped), and the candidate with fewer mismatches
    on the non-erased positions wins.  Guaranteed correct whenever
    2*errors + erasures < d.  Fails when the erasure count reaches d, when
    neither fill yields a candidate, or when two distinct candidates tie.
    """
    received = bits.as_bits(received, code.n)
    mask = _erasure_mask(code, erasures)
    tau = int(mask.sum())
    if tau >= code.d:
        return DecodeOutcome.failure()
    if base is None:
        base = base_decode
    keep = ~mask

    candidates = []
    fills = (0,) if tau == 0 else (0, 1)
    for fill in fills:
        word = received.copy()
        word[mask] = fill
        out = base(code, word)
        if out.is_unique and 2 * out.distance < code.d:
            e = int(np.count_nonzero((out.codeword != received) & keep))
            candidates.append((e, fill, out))

    if not candidates:
        return DecodeOutcome.failure()
    if len(candidates) == 2:
        e0, _, out0 = candidates[0]
        e1, _, out1 = candidates[1]
        if np.array_equal(out0.codeword, out1.codeword):
            candidates = [candidates[0]]
        elif e0 == e1:
            return DecodeOutcome.failure()
        else:
            candidates = [min(candidates, key=lambda c: c[0])]
    e, _, out = candidates[0]
    return DecodeOutcome.unique(out.codeword, out.info, e)


# ---------------------------------------------------------------------------
# codeword -> information word

def info_of_codeword(code: LinearCode, codeword) -> np.ndarray:
    """Invert the encoding map for a valid codeword."""
    codeword = bits.as_bits(codeword, code.n)
    if code._info_transform is None:
        R, T, pivots, rank = bits.row_reduce_with_transform(code.generator)
        code._info_transform = (np.asarray(pivots, dtype=np.intp), T)
    pivots, T = code._info_transform
    z = codeword[pivots]
    return ((z.astype(np.int64) @ T.astype(np.int64)) & 1).astype(np.uint8)

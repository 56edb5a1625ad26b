"""Two-level generalized concatenated codes and the two-stage decoder.

A codeword is an (n_outer x n_inner) bit matrix whose rows are inner-code
words.  The inner code is partitioned into cosets of a higher-distance
subcode; the coset label of each row is protected by one outer code per
label bit, and the remaining bit (which element of the two-word coset) by a
final outer code.  Decoding runs stage 1 (per-row ML over the full inner
codebook, then GMD per label bit) and stage 2 (per-row ML inside the now
known coset, then GMD for the element bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache

import numpy as np

from . import bits, codes, kernels
from .codes import DecodeOutcome, LinearCode
from .gmd import gmd_decode, gmd_decode_many, reliability_from_distance

__all__ = [
    "CosetPartition",
    "GCCodeSpec",
    "coset_partition",
    "gc_encode",
    "gc_decode",
    "puf_gcc_2048",
    "toy_gcc",
]


@dataclass(eq=False)
class CosetPartition:
    """Partition of a parent code into cosets of the subcode spanned by a
    subset of generator rows; the information bits on the remaining rows
    label the cosets."""

    parent: LinearCode
    subcode_rows: tuple[int, ...]
    label_rows: tuple[int, ...]
    subcode_distance: int

    @property
    def num_cosets(self) -> int:
        return 1 << len(self.label_rows)

    def representative(self, label) -> np.ndarray:
        """Coset representative: the label bits encoded on the label rows."""
        label = bits.as_bits(label, len(self.label_rows))
        info = np.zeros(self.parent.k, dtype=np.uint8)
        info[list(self.label_rows)] = label
        return codes.encode(self.parent, info)

    def label_of(self, codeword) -> np.ndarray:
        info = codes.info_of_codeword(self.parent, codeword)
        return info[list(self.label_rows)]


def coset_partition(inner: LinearCode, subcode_rows) -> CosetPartition:
    """Split ``inner`` along the given generator rows.

    The selected rows must span a subcode whose minimum distance strictly
    exceeds the parent's; the partition into its cosets is then checked to
    cover the parent codebook exactly.
    """
    rows = tuple(sorted(set(int(r) for r in subcode_rows)))
    if not rows:
        raise ValueError("need at least one subcode generator row")
    if any(r < 0 or r >= inner.k for r in rows):
        raise ValueError("subcode row index out of range")
    sub_gen = inner.generator[list(rows)]
    sub_words = np.zeros((1 << len(rows), inner.n), dtype=np.uint8)
    for t in range(len(rows)):
        step = 1 << t
        sub_words[step : 2 * step] = sub_words[:step] ^ sub_gen[t]
    wt = sub_words.sum(axis=1, dtype=np.int64)
    sub_d = int(wt[wt > 0].min())
    if sub_d <= inner.d:
        raise ValueError(
            f"subcode distance {sub_d} does not exceed parent distance {inner.d}; "
            "partition levels must strictly increase"
        )
    label_rows = tuple(r for r in range(inner.k) if r not in rows)

    # the cosets must tile the parent codebook
    cb = inner.codebook()
    seen = set()
    for lab in range(1 << len(label_rows)):
        info = np.zeros(inner.k, dtype=np.uint8)
        info[list(label_rows)] = codes.index_to_info(lab, len(label_rows))
        rep = codes.encode(inner, info)
        for w in sub_words:
            seen.add((rep ^ w).tobytes())
    if len(seen) != len(cb):
        raise ValueError("cosets do not partition the parent codebook")

    return CosetPartition(inner, rows, label_rows, sub_d)


@dataclass(eq=False)
class GCCodeSpec:
    """A concrete two-level generalized concatenated code."""

    inner: LinearCode
    partition: CosetPartition
    label_codes: list[LinearCode]
    element_code: LinearCode
    label: str

    def __post_init__(self):
        if len(self.partition.subcode_rows) != 1:
            raise ValueError("the two-stage decoder needs two-element cosets "
                             "(exactly one subcode generator row)")
        if len(self.label_codes) != len(self.partition.label_rows):
            raise ValueError("need one outer code per coset label bit")
        lengths = {c.n for c in self.label_codes} | {self.element_code.n}
        if len(lengths) != 1:
            raise ValueError("all outer codes must share one length")
        self.inner_codebook = self.inner.codebook()
        self._generator = None

    @property
    def n_outer(self) -> int:
        return self.element_code.n

    @property
    def n_inner(self) -> int:
        return self.inner.n

    @property
    def n(self) -> int:
        return self.n_outer * self.n_inner

    @property
    def k(self) -> int:
        return sum(c.k for c in self.label_codes) + self.element_code.k

    @property
    def designed_distance(self) -> int:
        level1 = min(c.d for c in self.label_codes) * self.inner.d
        level2 = self.element_code.d * self.partition.subcode_distance
        return min(level1, level2)

    def generator(self) -> np.ndarray:
        """Generator of the flattened (n_outer * n_inner) linear code."""
        if self._generator is None:
            eye = np.eye(self.k, dtype=np.uint8)
            G = np.stack([gc_encode(self, row).reshape(-1) for row in eye])
            G.flags.writeable = False
            self._generator = G
        return self._generator

    def __repr__(self) -> str:
        return f"GCCodeSpec({self.label}, n={self.n}, k={self.k})"


def _split_info(spec: GCCodeSpec, info: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    segs = []
    at = 0
    for c in spec.label_codes:
        segs.append(info[at : at + c.k])
        at += c.k
    return segs, info[at:]


def gc_encode(spec: GCCodeSpec, info) -> np.ndarray:
    """Encode ``spec.k`` information bits into an (n_outer, n_inner) matrix.

    Layout: the label-code segments come first, in label-bit order, then the
    element-code segment.
    """
    info = bits.as_bits(info, spec.k)
    label_segs, elem_seg = _split_info(spec, info)
    label_mat = np.stack(
        [codes.encode(c, seg) for c, seg in zip(spec.label_codes, label_segs)], axis=1
    )  # (n_outer, L)
    elem = codes.encode(spec.element_code, elem_seg)  # (n_outer,)
    U = np.zeros((spec.n_outer, spec.inner.k), dtype=np.uint8)
    U[:, list(spec.partition.label_rows)] = label_mat
    U[:, spec.partition.subcode_rows[0]] = elem
    return codes.encode_many(spec.inner, U)


def gc_decode(spec: GCCodeSpec, received) -> DecodeOutcome:
    """Two-stage decoding of a received bit matrix (or flat vector).

    Stage 1 ML-decodes each row against the full inner codebook (ties become
    row erasures) and GMD-decodes each coset label bit across rows, the
    reliability of row j being inner_d - 2*dist_j.  Stage 2 re-decodes every
    row inside its decoded two-word coset (distance ties erase the row) and
    GMD-decodes the element bits.  Any outer failure fails the whole word;
    on success the corrected codeword is re-encoded from the recovered
    information bits.
    """
    received = np.asarray(received, dtype=np.uint8)
    mat = received.reshape(spec.n_outer, spec.n_inner)

    # stage 1: per-row ML over the inner codebook
    packed = bits.pack_rows_u64(mat)
    idx, dist1, tie1 = kernels.nearest_codeword(packed, spec.inner_codebook.packed)
    infos = codes.index_to_info(idx, spec.inner.k)  # (n_outer, k_inner)
    label_rows = list(spec.partition.label_rows)
    hard_labels = infos[:, label_rows]
    hard_labels[tie1] = 0
    rel1 = reliability_from_distance(spec.inner.d, dist1, tie1)

    label_infos = []
    label_cw = np.empty((spec.n_outer, len(label_rows)), dtype=np.uint8)
    if all(c is spec.label_codes[0] for c in spec.label_codes):
        # identical outer codes share one erasure ladder and kernel call
        outs = gmd_decode_many(spec.label_codes[0], hard_labels.T, rel1)
    else:
        outs = [gmd_decode(c, hard_labels[:, t], rel1)
                for t, c in enumerate(spec.label_codes)]
    for t, out in enumerate(outs):
        if not out.is_unique:
            return DecodeOutcome.failure()
        label_infos.append(out.info)
        label_cw[:, t] = out.codeword

    # stage 2: ML inside the two-element coset of each row
    reps = ((label_cw.astype(np.int64) @ spec.inner.generator[label_rows].astype(np.int64)) & 1).astype(np.uint8)
    sub_row = spec.inner.generator[spec.partition.subcode_rows[0]]
    diff0 = mat ^ reps
    d0 = diff0.sum(axis=1, dtype=np.int64)
    d1 = (diff0 ^ sub_row).sum(axis=1, dtype=np.int64)
    tie2 = d0 == d1
    hard_elem = (d1 < d0).astype(np.uint8)
    hard_elem[tie2] = 0
    rel2 = reliability_from_distance(
        spec.partition.subcode_distance, np.minimum(d0, d1), tie2
    )
    out = gmd_decode(spec.element_code, hard_elem, rel2)
    if not out.is_unique:
        return DecodeOutcome.failure()

    info = np.concatenate(label_infos + [out.info])
    # rebuild the codeword from the outer codewords already in hand
    # (identical to gc_encode(spec, info) by construction)
    U = np.zeros((spec.n_outer, spec.inner.k), dtype=np.uint8)
    U[:, label_rows] = label_cw
    U[:, spec.partition.subcode_rows[0]] = out.codeword
    codeword = codes.encode_many(spec.inner, U)
    distance = int(np.count_nonzero(codeword != mat))
    return DecodeOutcome.unique(codeword.reshape(-1), info, distance)


@cache
def puf_gcc_2048() -> GCCodeSpec:
    """The production instance: inner (16,5,8) first-order RM code split on
    its all-ones row into 16 cosets of the (16,1,16) repetition code, four
    (128,8,64) outer codes for the label bits and a (128,99,8) outer code
    for the element bits; n = 2048, k = 131."""
    inner = rm_inner_16()
    part = coset_partition(inner, (0,))
    outer = codes.rm_code(1, 7)
    labels = [outer] * 4
    element = codes.rm_code(4, 7)
    return GCCodeSpec(inner, part, labels, element, label="gcc-2048-131")


@cache
def toy_gcc() -> GCCodeSpec:
    """Exhaustively testable miniature with the same two-level shape:
    inner (8,4,4), cosets of (8,1,8), three (8,4,4) label codes and one
    (8,7,2) element code; n = 64, k = 19."""
    inner = codes.rm_code(1, 3)
    part = coset_partition(inner, (0,))
    outer = codes.rm_code(1, 3)
    labels = [outer] * 3
    element = codes.rm_code(2, 3)
    return GCCodeSpec(inner, part, labels, element, label="toy-64-19")


@cache
def rm_inner_16() -> LinearCode:
    return codes.rm_code(1, 4)

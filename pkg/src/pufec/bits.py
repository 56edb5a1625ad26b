"""Exact GF(2) linear algebra on numpy bit arrays.

Bit vectors are 1-D ``uint8`` arrays with values in {0, 1}; bit matrices are
2-D.  Packing to bytes (for files) and to ``uint64`` words (for fast
syndrome arithmetic) is always little-endian within a byte/word: bit ``i``
of a byte is ``(byte >> i) & 1``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_bits",
    "as_bit_matrix",
    "hamming_distance",
    "mat_vec_mul",
    "gf2_matmul",
    "row_reduce",
    "row_reduce_with_transform",
    "nullspace_basis",
    "pack_bits",
    "unpack_bits",
    "pack_rows_u64",
    "parity_matvec_u64",
]


def as_bits(x, length: int | None = None) -> np.ndarray:
    """Coerce a sequence / 0-1 string to a uint8 bit vector.

    Raises ValueError on non-binary entries or a length mismatch.
    """
    if isinstance(x, str):
        x = [int(ch) for ch in x]
    a = np.asarray(x, dtype=np.uint8)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D bit vector, got shape {a.shape}")
    if a.size and a.max() > 1:
        raise ValueError("bit vector entries must be 0 or 1")
    if length is not None and a.size != length:
        raise ValueError(f"expected {length} bits, got {a.size}")
    return a


def as_bit_matrix(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D bit matrix, got shape {a.shape}")
    if a.size and a.max() > 1:
        raise ValueError("bit matrix entries must be 0 or 1")
    return a


def hamming_distance(a, b) -> int:
    """Number of positions where two equal-length bit vectors differ."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def mat_vec_mul(M, v) -> np.ndarray:
    """GF(2) product M @ v for a bit matrix and bit vector."""
    M = as_bit_matrix(M)
    v = as_bits(v)
    if M.shape[1] != v.size:
        raise ValueError(f"dimension mismatch: {M.shape[1]} columns vs {v.size} bits")
    return ((M.astype(np.int64) @ v.astype(np.int64)) & 1).astype(np.uint8)


def gf2_matmul(A, B) -> np.ndarray:
    """GF(2) matrix product A @ B."""
    A = as_bit_matrix(A)
    B = as_bit_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    return ((A.astype(np.int64) @ B.astype(np.int64)) & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# packed helpers (uint64 words, little-endian bits)

def pack_rows_u64(M) -> np.ndarray:
    """Pack the rows of a bit matrix into little-endian uint64 words."""
    M = np.atleast_2d(np.asarray(M, dtype=np.uint8))
    rows, cols = M.shape
    nwords = max(1, (cols + 63) // 64)
    padded = np.zeros((rows, nwords * 64), dtype=np.uint8)
    padded[:, :cols] = M
    by = np.packbits(padded, axis=1, bitorder="little")
    return by.view("<u8").reshape(rows, nwords)


def unpack_rows_u64(P, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(P, dtype="<u8")
    by = words.view(np.uint8).reshape(words.shape[0], -1)
    bits = np.unpackbits(by, axis=1, bitorder="little")
    return bits[:, :cols]


def parity_matvec_u64(P, v) -> np.ndarray:
    """GF(2) matrix-vector product on packed rows: bit i = parity(P[i] & v).

    ``P`` is (rows, nwords) uint64, ``v`` is (nwords,) uint64.
    """
    acc = np.bitwise_count(P & v[np.newaxis, :]).sum(axis=1)
    return (acc & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# row reduction

def row_reduce(M) -> tuple[np.ndarray, list[int], int]:
    """Reduced row-echelon form over GF(2).

    Returns ``(reduced, pivot_columns, rank)``.  The row space is preserved
    and the output is deterministic for a given input.
    """
    M = as_bit_matrix(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return M.copy(), [], 0
    P = pack_rows_u64(M)
    pivots: list[int] = []
    rank = 0
    for col in range(cols):
        w, b = divmod(col, 64)
        shift = np.uint64(b)
        one = np.uint64(1)
        below = (P[rank:, w] >> shift) & one
        nz = np.nonzero(below)[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            P[[rank, piv]] = P[[piv, rank]]
        colbit = ((P[:, w] >> shift) & one).astype(bool)
        colbit[rank] = False
        if colbit.any():
            P[colbit] ^= P[rank]
        pivots.append(col)
        rank += 1
        if rank == rows:
            break
    return unpack_rows_u64(P, cols), pivots, rank


def row_reduce_with_transform(M) -> tuple[np.ndarray, np.ndarray, list[int], int]:
    """Row reduce and also return T with ``reduced = T @ M`` over GF(2)."""
    M = as_bit_matrix(M)
    rows, cols = M.shape
    aug = np.hstack([M, np.eye(rows, dtype=np.uint8)])
    red, pivots, rank = row_reduce(aug)
    # pivots beyond the original columns belong to the identity block
    lead = [p for p in pivots if p < cols]
    return red[:, :cols], red[:, cols:], lead, len(lead)


def nullspace_basis(G) -> np.ndarray:
    """Basis (as rows) of the right nullspace of a full-row-rank bit matrix.

    For a generator matrix G of a code this is a parity-check matrix H with
    ``G @ H.T == 0``.  Raises ValueError naming the first dependent row when
    G does not have full row rank.
    """
    G = as_bit_matrix(G)
    k, n = G.shape
    R, pivots, rank = row_reduce(G)
    if rank < k:
        # error path only: locate the first row dependent on its predecessors
        prev = 0
        for i in range(k):
            _, _, r_i = row_reduce(G[: i + 1])
            if r_i == prev:
                raise ValueError(
                    f"generator row {i} is linearly dependent on earlier rows"
                )
            prev = r_i
        raise ValueError("generator matrix is rank deficient")
    free = [c for c in range(n) if c not in set(pivots)]
    H = np.zeros((len(free), n), dtype=np.uint8)
    if free:
        H[np.arange(len(free)), free] = 1
        piv = np.asarray(pivots, dtype=np.intp)
        H[:, piv] = R[:rank, free].T
    return H


# ---------------------------------------------------------------------------
# byte (de)serialization

def pack_bits(bits) -> bytes:
    """Pack a bit vector into bytes, little-endian within each byte."""
    bits = as_bits(bits)
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_bits(data: bytes, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; trailing pad bits must be zero."""
    raw = np.frombuffer(data, dtype=np.uint8)
    if raw.size * 8 < nbits:
        raise ValueError(f"need {nbits} bits but got only {raw.size} bytes")
    bits = np.unpackbits(raw, bitorder="little")
    if bits[nbits:].any():
        raise ValueError("nonzero padding bits after payload")
    return bits[:nbits].copy()

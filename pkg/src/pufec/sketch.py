"""Secure sketches over any registered codec.

The syndrome construction stores w = H @ y as helper data; recovery computes
s = H @ y' ^ w, lifts s to any vector v with H @ v = s (systematic
back-substitution through a precomputed transform), decodes v, and subtracts
the recovered error pattern.  The code-offset construction stores
w = y ^ encode(x) for a random information word x.  Either way the helper
reveals only the coset of y: sketch(y ^ c) == sketch(y) for every codeword.

A recovered response never comes back silently truncated: on any decoder
failure the result is None.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import bits

__all__ = [
    "HelperData",
    "sketch",
    "recover",
    "code_offset_sketch",
    "response_info",
    "extract_key",
    "fold_digest",
]

SCHEME_SYNDROME = "syndrome"
SCHEME_CODE_OFFSET = "code-offset"


@dataclass(frozen=True, eq=False)
class HelperData:
    """Public helper output of a sketch: the scheme, the code it was made
    with, and the payload bits (a syndrome of length n-k, or an offset of
    length n)."""

    scheme: str
    code_id: str
    payload: np.ndarray

    def __post_init__(self):
        if self.scheme not in (SCHEME_SYNDROME, SCHEME_CODE_OFFSET):
            raise ValueError(f"unknown sketch scheme {self.scheme!r}")
        object.__setattr__(self, "payload", bits.as_bits(self.payload))


def expected_payload_bits(codec, scheme: str) -> int:
    return codec.n - codec.k if scheme == SCHEME_SYNDROME else codec.n


def _syndrome_tables(codec):
    """Packed parity-check matrix plus the lift that inverts it on pivots."""
    cached = getattr(codec, "_syndrome_tables", None)
    if cached is not None:
        return cached
    H = bits.nullspace_basis(codec.generator())
    Hp = bits.pack_rows_u64(H)
    # reduced = T @ H with unit pivot columns, so the vector v supported on
    # the pivots with v[pivots] = T @ s satisfies H @ v = s
    _, T, pivots, rank = bits.row_reduce_with_transform(H)
    assert rank == H.shape[0]
    tables = (Hp, bits.pack_rows_u64(T), np.asarray(pivots, dtype=np.intp))
    codec._syndrome_tables = tables
    return tables


def _syndrome_of(codec, y: np.ndarray) -> np.ndarray:
    Hp, _, _ = _syndrome_tables(codec)
    return bits.parity_matvec_u64(Hp, bits.pack_rows_u64(y[np.newaxis, :])[0])


def _lift_syndrome(codec, s: np.ndarray) -> np.ndarray:
    """Some vector v with H @ v = s."""
    _, Tp, pivots = _syndrome_tables(codec)
    v = np.zeros(codec.n, dtype=np.uint8)
    v[pivots] = bits.parity_matvec_u64(Tp, bits.pack_rows_u64(s[np.newaxis, :])[0])
    return v


def sketch(codec, y) -> HelperData:
    """Syndrome helper data for a response y of length n."""
    y = bits.as_bits(y, codec.n)
    return HelperData(SCHEME_SYNDROME, codec.code_id, _syndrome_of(codec, y))


def code_offset_sketch(codec, y, rng: np.random.Generator) -> tuple[HelperData, np.ndarray]:
    """Code-offset helper data plus the uniform information word it embeds."""
    y = bits.as_bits(y, codec.n)
    x = rng.integers(0, 2, codec.k, dtype=np.uint8)
    payload = y ^ codec.encode(x)
    return HelperData(SCHEME_CODE_OFFSET, codec.code_id, payload), x


def recover(codec, y_prime, helper: HelperData):
    """Rebuild the enrolled response from a noisy re-read and helper data.

    Returns the response exactly whenever the re-read error lies within the
    decoder's correction capability, or None when decoding fails.
    """
    y_prime = bits.as_bits(y_prime, codec.n)
    if helper.payload.size != expected_payload_bits(codec, helper.scheme):
        raise ValueError(
            f"helper payload has {helper.payload.size} bits, expected "
            f"{expected_payload_bits(codec, helper.scheme)} for scheme {helper.scheme}"
        )
    if helper.scheme == SCHEME_SYNDROME:
        s = _syndrome_of(codec, y_prime) ^ helper.payload
        v = _lift_syndrome(codec, s)
        out = codec.decode(v)
        if not out.is_unique:
            return None
        return y_prime ^ v ^ out.codeword
    out = codec.decode(y_prime ^ helper.payload)
    if not out.is_unique:
        return None
    return helper.payload ^ out.codeword


def response_info(codec, y, helper: HelperData) -> np.ndarray:
    """Information bits determined by an exact response and its helper data.

    The helper shifts y onto a codeword (syndrome lift or raw offset), whose
    information word is then read off; identical at enrollment and after a
    successful recovery.
    """
    y = bits.as_bits(y, codec.n)
    if helper.scheme == SCHEME_SYNDROME:
        shift = _lift_syndrome(codec, helper.payload)
    else:
        shift = helper.payload
    return codec.info_of_codeword(y ^ shift)


# ---------------------------------------------------------------------------
# key extraction

def extract_key(y_or_info, out_bits: int, digest=None) -> np.ndarray:
    """Deterministic digest of a bit vector, truncated to ``out_bits`` bits.

    ``digest`` maps bytes to bytes; the default is SHA-256.  Use
    :func:`fold_digest` for reproducible non-cryptographic test vectors.
    """
    data = bits.pack_bits(y_or_info)
    if digest is None:
        digest = lambda b: hashlib.sha256(b).digest()
    out = digest(data)
    if out_bits > 8 * len(out):
        raise ValueError(f"digest yields {8 * len(out)} bits, need {out_bits}")
    return bits.unpack_bits(out, 8 * len(out))[:out_bits].copy()


def fold_digest(data: bytes, size: int = 32) -> bytes:
    """Mixing fold for test vectors only; no cryptographic strength."""
    state = 0xCBF29CE484222325
    out = bytearray()
    stream = data if data else b"\x00"
    i = 0
    while len(out) < size:
        state ^= stream[i % len(stream)] + i
        state = (state * 0x100000001B3) & ((1 << 64) - 1)
        out.append((state >> 32) & 0xFF)
        i += 1
    return bytes(out[:size])

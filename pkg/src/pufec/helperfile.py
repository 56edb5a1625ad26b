"""Binary helper-data files and response-file parsing.

Helper file layout (all little-endian):

    magic   4 bytes  b"PUFS"
    version 1 byte   0x01
    scheme  1 byte   0x01 syndrome, 0x02 code-offset
    code_id 1 byte length + that many ASCII bytes
    payload 4-byte bit count, then the bits packed little-endian within
            bytes, zero-padded to a byte boundary

Response files hold exactly n bits: ``.bin`` is the packed little-endian
bits, ``.hex`` the ASCII hex of those bytes (whitespace ignored).
"""

from __future__ import annotations

import struct

import numpy as np

from . import bits
from .sketch import SCHEME_CODE_OFFSET, SCHEME_SYNDROME, HelperData

MAGIC = b"PUFS"
VERSION = 1

_SCHEME_BYTE = {SCHEME_SYNDROME: 1, SCHEME_CODE_OFFSET: 2}
_BYTE_SCHEME = {v: k for k, v in _SCHEME_BYTE.items()}


class HelperFileError(ValueError):
    """Malformed helper-data file."""


def serialize_helper(helper: HelperData) -> bytes:
    cid = helper.code_id.encode("ascii")
    if len(cid) > 255:
        raise HelperFileError("code id longer than 255 bytes")
    head = MAGIC + bytes([VERSION, _SCHEME_BYTE[helper.scheme], len(cid)]) + cid
    payload = bits.pack_bits(helper.payload)
    return head + struct.pack("<I", helper.payload.size) + payload


def parse_helper(blob: bytes) -> HelperData:
    if len(blob) < 7 or blob[:4] != MAGIC:
        raise HelperFileError("not a helper-data file (bad magic)")
    if blob[4] != VERSION:
        raise HelperFileError(f"unsupported helper-file version {blob[4]}")
    if blob[5] not in _BYTE_SCHEME:
        raise HelperFileError(f"unknown scheme byte {blob[5]:#x}")
    scheme = _BYTE_SCHEME[blob[5]]
    idlen = blob[6]
    at = 7 + idlen
    if len(blob) < at + 4:
        raise HelperFileError("truncated helper-data file")
    try:
        code_id = blob[7:at].decode("ascii")
    except UnicodeDecodeError:
        raise HelperFileError("code id is not ASCII") from None
    (nbits,) = struct.unpack("<I", blob[at : at + 4])
    body = blob[at + 4 :]
    if len(body) != (nbits + 7) // 8:
        raise HelperFileError(
            f"payload holds {len(body)} bytes, expected {(nbits + 7) // 8}"
        )
    try:
        payload = bits.unpack_bits(body, nbits)
    except ValueError as e:
        raise HelperFileError(str(e)) from None
    return HelperData(scheme, code_id, payload)


def write_helper(path: str, helper: HelperData) -> None:
    _atomic_write(path, serialize_helper(helper))


def read_helper(path: str) -> HelperData:
    with open(path, "rb") as fh:
        return parse_helper(fh.read())


# ---------------------------------------------------------------------------
# response files

def read_response(path: str, nbits: int, fmt: str | None = None) -> np.ndarray:
    """Read a response of exactly ``nbits`` bits (.bin packed / .hex ASCII)."""
    if fmt is None:
        fmt = "hex" if path.lower().endswith(".hex") else "bin"
    with open(path, "rb") as fh:
        raw = fh.read()
    if fmt == "hex":
        try:
            raw = bytes.fromhex(raw.decode("ascii").strip())
        except (UnicodeDecodeError, ValueError):
            raise HelperFileError(f"{path}: not valid hex") from None
    elif fmt != "bin":
        raise ValueError(f"unknown response format {fmt!r}")
    if len(raw) * 8 < nbits or len(raw) != (nbits + 7) // 8:
        raise HelperFileError(
            f"{path}: expected {nbits} bits, got {len(raw) * 8}"
        )
    try:
        return bits.unpack_bits(raw, nbits)
    except ValueError as e:
        raise HelperFileError(f"{path}: {e}") from None


def write_response(path: str, response, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = "hex" if path.lower().endswith(".hex") else "bin"
    data = bits.pack_bits(response)
    if fmt == "hex":
        data = data.hex().encode("ascii") + b"\n"
    _atomic_write(path, data)


def write_key(path: str, key_bits) -> None:
    """Key file: lowercase hex of the packed key bits, one line."""
    _atomic_write(path, bits.pack_bits(key_bits).hex().encode("ascii") + b"\n")


def _atomic_write(path: str, data: bytes) -> None:
    import os

    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)

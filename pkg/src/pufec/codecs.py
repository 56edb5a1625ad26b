"""Uniform encode/decode front over plain linear codes and GC codes, plus
the registry of code ids the CLI and sketch files refer to."""

from __future__ import annotations

import numpy as np

from . import bits, codes, concat
from .codes import DecodeOutcome


class LinearCodec:
    """A plain linear code driven by its default hard-decision decoder."""

    def __init__(self, code: codes.LinearCode, code_id: str):
        self.code = code
        self.code_id = code_id

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def designed_distance(self) -> int:
        return self.code.d

    def describe(self) -> str:
        return self.code.label

    def encode(self, info) -> np.ndarray:
        return codes.encode(self.code, info)

    def decode(self, word) -> DecodeOutcome:
        out = codes.base_decode(self.code, word)
        return out if out.is_unique else DecodeOutcome.failure()

    def generator(self) -> np.ndarray:
        return self.code.generator

    def info_of_codeword(self, cw) -> np.ndarray:
        return codes.info_of_codeword(self.code, cw)


class GcCodec:
    """The generalized concatenated code behind a flat-vector interface."""

    def __init__(self, spec: concat.GCCodeSpec):
        self.spec = spec
        self.code_id = spec.label
        self._flat = None
        self._gen_packed = None

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def designed_distance(self) -> int:
        return self.spec.designed_distance

    def describe(self) -> str:
        s = self.spec
        outer = f"{len(s.label_codes)}x{s.label_codes[0].label} + {s.element_code.label}"
        return f"GC[{s.inner.label} / {outer}]"

    def encode(self, info) -> np.ndarray:
        # XOR of packed generator rows; same map as gc_encode, minus the
        # per-level plumbing (the generator is built from gc_encode itself)
        info = bits.as_bits(info, self.k)
        if self._gen_packed is None:
            self._gen_packed = bits.pack_rows_u64(self.generator())
        sel = self._gen_packed[info.astype(bool)]
        if sel.shape[0] == 0:
            return np.zeros(self.n, dtype=np.uint8)
        word = np.bitwise_xor.reduce(sel, axis=0)
        return bits.unpack_rows_u64(word[np.newaxis, :], self.n)[0]

    def decode(self, word) -> DecodeOutcome:
        return concat.gc_decode(self.spec, word)

    def generator(self) -> np.ndarray:
        return self.spec.generator()

    def info_of_codeword(self, cw) -> np.ndarray:
        if self._flat is None:
            self._flat = codes.LinearCode(
                self.spec.generator(), d=self.spec.designed_distance,
                label=self.code_id + "-flat")
        return codes.info_of_codeword(self._flat, cw)


_BUILDERS = {
    "gcc-2048-131": lambda: GcCodec(concat.puf_gcc_2048()),
    "toy-64-19": lambda: GcCodec(concat.toy_gcc()),
    "rm-1-4": lambda: LinearCodec(codes.rm_code(1, 4), "rm-1-4"),
    "rm-1-7": lambda: LinearCodec(codes.rm_code(1, 7), "rm-1-7"),
    "rm-4-7": lambda: LinearCodec(codes.rm_code(4, 7), "rm-4-7"),
    "rep-16": lambda: LinearCodec(codes.rm_code(0, 4), "rep-16"),
}

_CACHE: dict = {}


def list_code_ids() -> list[str]:
    return sorted(_BUILDERS)


def get_codec(code_id: str):
    """Look up a registered codec; raises KeyError listing the known ids."""
    if code_id not in _BUILDERS:
        raise KeyError(
            f"unknown code id {code_id!r}; registered: {', '.join(list_code_ids())}"
        )
    if code_id not in _CACHE:
        _CACHE[code_id] = _BUILDERS[code_id]()
    return _CACHE[code_id]

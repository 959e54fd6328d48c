"""End-to-end data path: interleave, split into units, XOR with the keystream.

The destination runs the same steps backwards. Both ends derive the
keystream and the interleaver permutation from shared seeds, so no key
material ever travels with the ciphertext.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .keygen import OkgConfig, ReseedEntry, SyncRng, keystream, pack_bits, unpack_bits

MAGIC = b"OLFS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")  # magic, version, reserved, L_M in bits
HEADER_SIZE = _HEADER.size


class IntegrityError(ValueError):
    """Ciphertext units are missing, duplicated or of the wrong size."""


class FormatError(ValueError):
    """A ciphertext file is malformed or truncated."""


def _bits(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint8)


def permutation(n: int, seed: bytes | str) -> np.ndarray:
    """Seeded pseudorandom permutation of ``range(n)``.

    A Fisher-Yates shuffle (numpy's ``Generator.permutation``) driven by a
    Philox counter-mode generator whose 128-bit key is drawn from a
    ``SyncRng`` on ``seed``.
    """
    key = np.frombuffer(SyncRng(seed, label=b"olfsr/interleave").bytes(16), dtype="<u8")
    return np.random.Generator(np.random.Philox(key=key)).permutation(n)


def interleave(M, seed: bytes | str) -> np.ndarray:
    """Output bit ``i`` is input bit ``perm[i]``."""
    M = _bits(M)
    return M[permutation(len(M), seed)]


def deinterleave(M, seed: bytes | str) -> np.ndarray:
    M = _bits(M)
    out = np.empty_like(M)
    out[permutation(len(M), seed)] = M
    return out


def xor_encrypt(m, k) -> np.ndarray:
    m, k = _bits(m), _bits(k)
    if m.shape != k.shape:
        raise ValueError(f"message and key lengths differ: {m.size} != {k.size}")
    return m ^ k


xor_decrypt = xor_encrypt


@dataclass(frozen=True)
class SessionParams:
    """Shared session secrets and sizes.

    ``unit_len`` defaults to the generator's ``segment_len`` so that every
    unit is encrypted under exactly one reseed segment.
    """

    total_len: int
    okg: OkgConfig
    interleave_seed: bytes
    unit_len: int | None = None

    def __post_init__(self):
        if isinstance(self.interleave_seed, str):
            object.__setattr__(self, "interleave_seed", self.interleave_seed.encode())
        if self.unit_len is None:
            object.__setattr__(self, "unit_len", self.okg.segment_len)
        if self.total_len < 0:
            raise ValueError("total_len must be non-negative")
        if self.unit_len < 1:
            raise ValueError("unit_len must be >= 1")

    @property
    def unit_count(self) -> int:
        return math.ceil(self.total_len / self.unit_len)


@dataclass(slots=True)
class CipherUnit:
    index: int
    payload: np.ndarray

    def __post_init__(self):
        if len(self.payload) == 0:
            raise ValueError("cipher units must be non-empty")


def encrypt_session(M, p: SessionParams) -> tuple[list[CipherUnit], list[ReseedEntry]]:
    M = _bits(M)
    if len(M) != p.total_len:
        raise ValueError(f"message has {len(M)} bits, session expects {p.total_len}")
    ks = keystream(p.okg, p.okg.rng(), p.total_len)
    ct = xor_encrypt(interleave(M, p.interleave_seed), ks.bits)
    return _split_units(ct, p.unit_len), ks.log


def _split_units(bits: np.ndarray, unit_len: int) -> list[CipherUnit]:
    return [CipherUnit(i, bits[s : s + unit_len]) for i, s in enumerate(range(0, len(bits), unit_len))]


def decrypt_session(units: Sequence[CipherUnit], p: SessionParams) -> np.ndarray:
    ordered = sorted(units, key=lambda u: u.index)
    indices = [u.index for u in ordered]
    if indices != list(range(p.unit_count)):
        missing = sorted(set(range(p.unit_count)) - set(indices))
        raise IntegrityError(f"unit indices {indices[:8]}... do not cover 0..{p.unit_count - 1}; missing {missing[:8]}")
    payloads = [u.payload if isinstance(u.payload, np.ndarray) and u.payload.dtype == np.uint8 else _bits(u.payload) for u in ordered]
    ct = np.concatenate(payloads) if payloads else np.zeros(0, np.uint8)
    if len(ct) != p.total_len:
        raise IntegrityError(f"units carry {len(ct)} bits, session expects {p.total_len}")
    ks = keystream(p.okg, p.okg.rng(), p.total_len)
    return deinterleave(xor_decrypt(ct, ks.bits), p.interleave_seed)


# ---------------------------------------------------------------------------
# Ciphertext files
# ---------------------------------------------------------------------------


def dump_ciphertext(units: Sequence[CipherUnit], total_len: int) -> bytes:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, 0, total_len)
    if not units:
        return header
    ordered = sorted(units, key=lambda u: u.index)
    return header + pack_bits(np.concatenate([u.payload for u in ordered]))


def load_ciphertext(data: bytes, unit_len: int) -> tuple[list[CipherUnit], int]:
    if len(data) < HEADER_SIZE:
        raise FormatError("file shorter than the 16-byte header")
    magic, version, _, total_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    body = data[HEADER_SIZE:]
    if len(body) != (total_len + 7) // 8:
        raise FormatError(f"payload holds {len(body)} bytes, header announces {total_len} bits")
    bits = unpack_bits(body, total_len)
    return _split_units(bits, unit_len), total_len


def encrypt_bytes(plaintext: bytes, okg: OkgConfig, interleave_seed: bytes | str) -> bytes:
    M = unpack_bits(plaintext)
    p = SessionParams(len(M), okg, interleave_seed)
    units, _ = encrypt_session(M, p)
    return dump_ciphertext(units, p.total_len)


def decrypt_bytes(ciphertext: bytes, okg: OkgConfig, interleave_seed: bytes | str) -> bytes:
    units, total_len = load_ciphertext(ciphertext, okg.segment_len)
    p = SessionParams(total_len, okg, interleave_seed)
    return pack_bits(decrypt_session(units, p))


def encrypt_file(src: str | Path, dst: str | Path, okg: OkgConfig, interleave_seed: bytes | str) -> None:
    Path(dst).write_bytes(encrypt_bytes(Path(src).read_bytes(), okg, interleave_seed))


def decrypt_file(src: str | Path, dst: str | Path, okg: OkgConfig, interleave_seed: bytes | str) -> None:
    Path(dst).write_bytes(decrypt_bytes(Path(src).read_bytes(), okg, interleave_seed))

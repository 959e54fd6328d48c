"""Software model of the optical key generator.

A bank of ``P`` Fibonacci LFSRs; a synchronized deterministic RNG picks
which register is active and its nonzero seed, and the bank is reseeded
after every ``segment_len`` output bits.

Register convention: bit ``i`` of the register integer is stage ``i + 1``.
Stage 1 is the output end; the feedback bit (parity of ``register & taps``)
enters at stage ``g``. The first output bit after seeding is therefore the
lowest bit of the seed, and the first ``g`` output bits *are* the seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import accumulate, islice, repeat
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .gf2poly import GenPoly


class LfsrStateError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Single register
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _jump_tables(mask: int) -> tuple[tuple[int, ...], ...]:
    """Byte-sliced lookup tables for advancing a register by ``g`` steps.

    Advancing by ``g`` steps is linear, so the image of a register is the
    XOR of the images of its bytes.
    """
    poly = GenPoly(mask)
    g, taps = poly.degree, poly.taps
    columns = []
    for i in range(g):
        r = 1 << i
        for _ in range(g):
            r = (r >> 1) | (((r & taps).bit_count() & 1) << (g - 1))
        columns.append(r)
    tables = []
    for k in range(0, g, 8):
        cols = columns[k : k + 8]
        table = [0] * (1 << len(cols))
        for b in range(1, len(table)):
            low = b & -b
            table[b] = table[b ^ low] ^ cols[low.bit_length() - 1]
        tables.append(tuple(table))
    return tuple(tables)


@lru_cache(maxsize=4096)
def _advance_fn(mask: int):
    tables = _jump_tables(mask)
    if len(tables) == 1:
        (t0,) = tables
        return lambda r, _: t0[r]
    if len(tables) == 2:
        t0, t1 = tables
        return lambda r, _: t0[r & 0xFF] ^ t1[r >> 8]

    def advance(r, _):
        out = 0
        for t in tables:
            out ^= t[r & 0xFF]
            r >>= 8
        return out

    return advance


def unpack_registers(registers: Sequence[int], g: int, count: int) -> np.ndarray:
    """Turn a list of register snapshots taken every ``g`` steps into output bits."""
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    if g <= 64:
        words = np.array(registers, dtype=np.uint64)
        shifts = np.arange(g, dtype=np.uint64)
        bits = ((words[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
        return bits.ravel()[:count]
    out = np.empty(len(registers) * g, dtype=np.uint8)
    for k, r in enumerate(registers):
        out[k * g : (k + 1) * g] = [(r >> i) & 1 for i in range(g)]
    return out[:count]


@dataclass
class LfsrState:
    """One register: its polynomial, current fill, and bits emitted since seeding."""

    poly: GenPoly
    register: int
    emitted: int = 0

    def __post_init__(self):
        g = self.poly.degree
        if not 0 < self.register < (1 << g):
            raise LfsrStateError(
                f"register must be a nonzero {g}-bit value, got {self.register:#x}"
            )

    @property
    def degree(self) -> int:
        return self.poly.degree

    def step(self) -> int:
        """Emit one bit and shift the feedback bit in at stage ``g``."""
        r = self.register
        if r == 0:
            raise LfsrStateError("all-zero register")
        g = self.poly.degree
        fb = (r & self.poly.taps).bit_count() & 1
        self.register = (r >> 1) | (fb << (g - 1))
        self.emitted += 1
        return r & 1

    def run(self, count: int) -> np.ndarray:
        """Emit ``count`` bits as a uint8 array."""
        regs = self._advance(count)
        return unpack_registers(regs, self.poly.degree, count)

    def _advance(self, count: int) -> list[int]:
        """Move ``count`` steps ahead; return the register every ``g`` steps on the way."""
        if count < 0:
            raise ValueError("bit count must be non-negative")
        if count == 0:
            return []
        g = self.poly.degree
        blocks = -(-count // g)
        regs = list(accumulate(repeat(None, blocks), _advance_fn(self.poly.mask), initial=self.register))
        # The register after ``count`` steps is the next g output bits.
        base = (blocks - 1) * g
        window = regs[blocks - 1] | (regs[blocks] << g)
        self.register = (window >> (count - base)) & ((1 << g) - 1)
        self.emitted += count
        del regs[blocks]
        return regs


def lfsr_step(state: LfsrState) -> int:
    """Advance ``state`` in place by one step and return the emitted bit."""
    return state.step()


def lfsr_bits(poly: GenPoly, seed: int, count: int) -> np.ndarray:
    return LfsrState(poly, seed).run(count)


def lfsr_period(poly: GenPoly, seed: int = 1) -> int:
    """Cycle length of the register trajectory starting at ``seed``."""
    g, taps = poly.degree, poly.taps
    r = seed
    for n in range(1, 1 << g):
        r = (r >> 1) | (((r & taps).bit_count() & 1) << (g - 1))
        if r == seed:
            return n
    # Only reached when the trajectory enters a cycle that excludes the seed
    # (possible when the constant term is 0).
    raise LfsrStateError(f"seed {seed:#x} is not on a cycle of {poly}")


# ---------------------------------------------------------------------------
# Synchronized RNG
# ---------------------------------------------------------------------------


class SyncRng:
    """Deterministic byte stream keyed by a shared secret.

    Blocks are ``SHAKE-256(label || seed || counter)``; two instances built
    from the same seed and label produce identical output, which is what
    keeps source and destination in lockstep.
    """

    BLOCK = 1 << 14

    def __init__(self, seed: bytes | str, label: bytes = b"olfsr/okg"):
        if isinstance(seed, str):
            seed = seed.encode()
        self._prefix = len(label).to_bytes(2, "little") + label + seed
        self._counter = 0
        self._buf = b""
        self._pos = 0

    def _refill(self, need: int) -> None:
        chunks = [self._buf[self._pos :]]
        have = len(chunks[0])
        while have < need:
            block = hashlib.shake_256(
                self._prefix + self._counter.to_bytes(8, "little")
            ).digest(self.BLOCK)
            self._counter += 1
            chunks.append(block)
            have += len(block)
        self._buf = b"".join(chunks)
        self._pos = 0

    def bytes(self, n: int) -> bytes:
        if len(self._buf) - self._pos < n:
            self._refill(n)
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out

    def randbits(self, k: int) -> int:
        if k == 0:
            return 0
        nbytes = (k + 7) // 8
        return int.from_bytes(self.bytes(nbytes), "little") & ((1 << k) - 1)

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection sampling."""
        if n < 1:
            raise ValueError("randbelow needs n >= 1")
        k = (n - 1).bit_length()
        while True:
            r = self.randbits(k)
            if r < n:
                return r

    def words(self, n: int) -> np.ndarray:
        """``n`` uniform 64-bit words."""
        return np.frombuffer(self.bytes(8 * n), dtype="<u8").copy()


# ---------------------------------------------------------------------------
# Generator bank and reseeding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OkgConfig:
    """Parallel LFSR bank and its reseed policy.

    ``segment_len`` is the number of key bits produced between reseeds.
    ``skip_bits`` discards that many bits after every reseed (0 by default).
    """

    polys: tuple[GenPoly, ...]
    segment_len: int
    rng_seed: bytes
    skip_bits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if isinstance(self.rng_seed, str):
            object.__setattr__(self, "rng_seed", self.rng_seed.encode())
        if not self.polys:
            raise ValueError("at least one polynomial is required")
        for p in self.polys:
            if not p.is_generator():
                raise ValueError(f"{p} has no constant term")
        if self.segment_len < 1:
            raise ValueError("segment_len must be >= 1")
        if self.skip_bits < 0:
            raise ValueError("skip_bits must be >= 0")

    @classmethod
    def fixed_degree(cls, polys: Sequence[GenPoly], n: int, rng_seed: bytes | str, **kw) -> OkgConfig:
        """Bank of ``P >= 2`` same-degree registers with ``segment_len = n * g``."""
        degrees = {p.degree for p in polys}
        if len(degrees) != 1:
            raise ValueError("fixed-degree mode needs polynomials of one degree")
        (g,) = degrees
        if len(polys) < 2:
            raise ValueError("fixed-degree mode needs P >= 2")
        if not 1 <= n <= ((1 << g) - 1) // g:
            raise ValueError(f"n must lie in [1, (2^g - 1)/g] for g={g}")
        return cls(tuple(polys), n * g, rng_seed, **kw)

    @property
    def P(self) -> int:
        return len(self.polys)

    def rng(self) -> SyncRng:
        return SyncRng(self.rng_seed)


class ReseedEntry(NamedTuple):
    offset: int
    poly_index: int
    poly: GenPoly
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {"offset": self.offset, "poly": self.poly.to_hex(), "seed": format(self.seed, "x")},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str, polys: Sequence[GenPoly] = ()) -> ReseedEntry:
        d = json.loads(line)
        poly = GenPoly.from_hex(d["poly"])
        index = polys.index(poly) if poly in polys else -1
        return cls(d["offset"], index, poly, int(d["seed"], 16))


def next_selection(rng: SyncRng, cfg: OkgConfig) -> tuple[int, int]:
    """Draw ``(poly_index, seed)``; the seed is uniform over nonzero fills."""
    index = rng.randbelow(cfg.P)
    g = cfg.polys[index].degree
    while True:
        seed = rng.randbits(g)
        if seed:
            return index, seed


def draw_selections(rng: SyncRng, cfg: OkgConfig, count: int) -> list[tuple[int, int]]:
    """``count`` consecutive ``next_selection`` draws, consuming the same bytes."""
    P = cfg.P
    k_index = (P - 1).bit_length()
    n_index, m_index = (k_index + 7) // 8, (1 << k_index) - 1
    shapes = [((p.degree + 7) // 8, (1 << p.degree) - 1) for p in cfg.polys]
    need = n_index + max(n for n, _ in shapes)
    from_bytes = int.from_bytes
    buf, pos = rng._buf, rng._pos
    out = []
    for _ in range(count):
        index = 0
        while k_index:
            if pos + need > len(buf):
                rng._buf, rng._pos = buf, pos
                rng._refill(SyncRng.BLOCK)
                buf, pos = rng._buf, 0
            index = from_bytes(buf[pos : pos + n_index], "little") & m_index
            pos += n_index
            if index < P:
                break
        nbytes, mask = shapes[index]
        while True:
            if pos + nbytes > len(buf):
                rng._buf, rng._pos = buf, pos
                rng._refill(SyncRng.BLOCK)
                buf, pos = rng._buf, 0
            seed = from_bytes(buf[pos : pos + nbytes], "little") & mask
            pos += nbytes
            if seed:
                break
        out.append((index, seed))
    rng._buf, rng._pos = buf, pos
    return out


@dataclass
class Keystream:
    bits: np.ndarray
    log: list[ReseedEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.bits)


def keystream(
    cfg: OkgConfig,
    rng: SyncRng | None = None,
    total_bits: int = 0,
    selections: Iterable[tuple[int, int]] | None = None,
) -> Keystream:
    """Produce ``total_bits`` key bits, reseeding every ``cfg.segment_len`` bits.

    ``selections`` overrides the RNG with explicit ``(poly_index, seed)``
    pairs, one per segment; it exists for experiments on crafted splices.
    """
    if total_bits < 0:
        raise ValueError("total_bits must be non-negative")
    seg = cfg.segment_len
    nseg = segment_count(total_bits, seg)
    if selections is None:
        selections = draw_selections(rng if rng is not None else cfg.rng(), cfg, nseg)
    else:
        selections = list(islice(selections, nseg))
        if len(selections) < nseg:
            raise ValueError(f"need {nseg} selections, got {len(selections)}")
    polys = cfg.polys
    log = []
    for k, (index, seed) in enumerate(selections):
        poly = polys[index]
        if not 0 < seed < (1 << poly.degree):
            raise LfsrStateError(f"seed must be a nonzero {poly.degree}-bit value, got {seed:#x}")
        log.append(ReseedEntry(k * seg, index, poly, seed))
    out = np.empty(total_bits, dtype=np.uint8)
    if nseg == 0:
        return Keystream(out, log)

    starts = [e.seed for e in log]
    if cfg.skip_bits:
        starts = [_skipped(e.poly, e.seed, cfg.skip_bits) for e in log]
    last = nseg - 1
    out[last * seg :] = LfsrState(log[last].poly, starts[last]).run(total_bits - last * seg)
    # Full segments, grouped by polynomial so each group can be run in lockstep.
    full = out[: last * seg].reshape(last, seg)
    groups: dict[int, list[int]] = {}
    for k in range(last):
        groups.setdefault(selections[k][0], []).append(k)
    for index, rows in groups.items():
        poly = polys[index]
        if poly.degree <= 64 and len(rows) >= _LOCKSTEP_MIN_SEGMENTS:
            step = max(1, _LOCKSTEP_CHUNK_BITS // seg)
            for i in range(0, len(rows), step):
                chunk = rows[i : i + step]
                full[chunk] = _lockstep_rows(poly, [starts[k] for k in chunk], seg)
        else:
            for k in rows:
                full[k] = LfsrState(poly, starts[k]).run(seg)
    return Keystream(out, log)


_LOCKSTEP_MIN_SEGMENTS = 16
_LOCKSTEP_CHUNK_BITS = 1 << 22


def _skipped(poly: GenPoly, seed: int, skip: int) -> int:
    state = LfsrState(poly, seed)
    state._advance(skip)
    return state.register


@lru_cache(maxsize=4096)
def _jump_arrays(mask: int) -> tuple[np.ndarray, ...]:
    return tuple(np.array(t, dtype=np.uint64) for t in _jump_tables(mask))


def _lockstep_rows(poly: GenPoly, seeds: Sequence[int], length: int) -> np.ndarray:
    """Run one register per seed side by side; row ``i`` is ``length`` bits from ``seeds[i]``."""
    g = poly.degree
    blocks = -(-length // g)
    tables = _jump_arrays(poly.mask)
    shifts = [np.uint64(8 * k) for k in range(len(tables))]
    byte = np.uint64(0xFF)
    regs = np.empty((len(seeds), blocks), dtype="<u8")
    regs[:, 0] = seeds
    for j in range(1, blocks):
        r = regs[:, j - 1]
        acc = tables[0][r & byte]
        for t, sh in zip(tables[1:], shifts[1:]):
            acc ^= t[(r >> sh) & byte]
        regs[:, j] = acc
    bits = np.unpackbits(regs.view(np.uint8).reshape(len(seeds), blocks, 8), axis=-1, bitorder="little")
    return bits[:, :, :g].reshape(len(seeds), blocks * g)[:, :length]


def segment_count(total_bits: int, segment_len: int) -> int:
    return math.ceil(total_bits / segment_len)


def replay(log: Sequence[ReseedEntry], segment_len: int, total_bits: int, skip_bits: int = 0) -> np.ndarray:
    """Regenerate a keystream from its reseed log alone."""
    out = np.empty(total_bits, dtype=np.uint8)
    for entry in log:
        length = min(segment_len, total_bits - entry.offset)
        state = LfsrState(entry.poly, entry.seed)
        if skip_bits:
            state.run(skip_bits)
        out[entry.offset : entry.offset + length] = state.run(length)
    return out


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack bits little-endian within each byte (first bit -> LSB)."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, count: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return bits if count is None else bits[:count]


def write_log(path: str | Path, log: Iterable[ReseedEntry]) -> None:
    lines = [entry.to_json() + "\n" for entry in log]
    Path(path).write_text("".join(lines))


def read_log(path: str | Path, polys: Sequence[GenPoly] = ()) -> list[ReseedEntry]:
    text = Path(path).read_text()
    return [ReseedEntry.from_json(line, polys) for line in text.splitlines() if line.strip()]

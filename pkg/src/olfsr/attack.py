"""Attacks on the key generator: Berlekamp-Massey and exhaustive key search.

Polynomial convention: ``BmResult.connection_poly`` is returned in the same
*generator* form the key generator uses, i.e. the recurrence is
``s[t+L] = sum(p_j * s[t+j] for j < L)`` where ``p_j`` is bit ``j`` of the
mask and bit ``L`` is the leading 1. Berlekamp-Massey internally builds the
reciprocal (``C(x) = 1 + c_1 x + ... + c_L x^L``); ``reciprocal`` converts.
So running BM on an LFSR's output gives back that LFSR's own polynomial.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .gf2poly import GenPoly
from .keygen import LfsrState, OkgConfig, ReseedEntry, _advance_fn, keystream


def reciprocal(mask: int, length: int) -> int:
    """Reverse the ``length + 1`` low coefficients: ``x^L * C(1/x)``."""
    out = 0
    for i in range(length + 1):
        if (mask >> i) & 1:
            out |= 1 << (length - i)
    return out


@dataclass(frozen=True)
class BmResult:
    connection_poly: int
    linear_complexity: int
    recovered_seed: int

    @property
    def poly(self) -> GenPoly | None:
        return GenPoly(self.connection_poly) if self.linear_complexity else None

    def generate(self, count: int) -> np.ndarray:
        """Regenerate ``count`` bits from the recovered register."""
        if self.linear_complexity == 0:
            return np.zeros(count, dtype=np.uint8)
        return LfsrState(self.poly, self.recovered_seed).run(count)

    def to_dict(self) -> dict:
        L = self.linear_complexity
        return {
            "connection_poly": format(self.connection_poly, "x"),
            "linear_complexity": L,
            "recovered_seed": format(self.recovered_seed, "x"),
            "poly": str(self.poly) if L else "1",
        }


def _bm(seq) -> tuple[int, int, list[int]]:
    """Binary Berlekamp-Massey. Returns (C, L, profile) with C in reciprocal form."""
    C, B, L, m = 1, 1, 0, 1
    window = 0  # bit i holds s[n - i]
    profile = []
    for n, bit in enumerate(seq):
        window = (window << 1) | int(bit)
        if (C & window).bit_count() & 1:
            T = C
            C ^= B << m
            if 2 * L <= n:
                L, B, m = n + 1 - L, T, 1
            else:
                m += 1
        else:
            m += 1
        profile.append(L)
    return C, L, profile


def berlekamp_massey(seq) -> BmResult:
    """Shortest LFSR that generates ``seq``."""
    seq = np.asarray(seq, dtype=np.uint8)
    if seq.size == 0:
        raise ValueError("berlekamp_massey needs at least one bit")
    C, L, _ = _bm(seq.tolist())
    seed = sum(int(b) << i for i, b in enumerate(seq[:L].tolist()))
    return BmResult(reciprocal(C, L), L, seed)


def linear_complexity(seq) -> int:
    seq = np.asarray(seq, dtype=np.uint8)
    return _bm(seq.tolist())[1] if seq.size else 0


def linear_complexity_profile(seq) -> list[tuple[int, int]]:
    """``(prefix_len, L)`` for every prefix length ``1..len(seq)``."""
    _, _, profile = _bm(np.asarray(seq, dtype=np.uint8).tolist())
    return [(n + 1, L) for n, L in enumerate(profile)]


# ---------------------------------------------------------------------------
# Reseeded splices
# ---------------------------------------------------------------------------


@dataclass
class SpliceResult:
    linear_complexity: int
    continuation: list[bool]
    bits: np.ndarray
    log: list[ReseedEntry]

    @property
    def has_fresh_reseed(self) -> bool:
        return not all(self.continuation)


def _is_continuation(prev: ReseedEntry, nxt: ReseedEntry, segment_len: int, bits: np.ndarray) -> bool:
    """Does the previous register, run forward, produce the next segment?"""
    state = LfsrState(prev.poly, prev.seed)
    state.run(nxt.offset - prev.offset)
    end = min(nxt.offset + segment_len, len(bits))
    return bool(np.array_equal(state.run(end - nxt.offset), bits[nxt.offset : end]))


def splice_complexity(
    cfg: OkgConfig,
    segments: int,
    selections: Iterable[tuple[int, int]] | None = None,
) -> SpliceResult:
    """Linear complexity of ``segments`` reseeded segments joined together.

    ``continuation[k]`` flags segment ``k + 1`` as a mere continuation of
    segment ``k``'s register trajectory, in which case the splice adds no
    linear complexity.
    """
    if segments < 1:
        raise ValueError("need at least one segment")
    ks = keystream(cfg, cfg.rng(), segments * cfg.segment_len, selections=selections)
    flags = [
        _is_continuation(a, b, cfg.segment_len, ks.bits)
        for a, b in zip(ks.log, ks.log[1:])
    ]
    return SpliceResult(linear_complexity(ks.bits), flags, ks.bits, ks.log)


def continuing_seed(poly: GenPoly, seed: int, steps: int) -> int:
    """Register fill after ``steps`` bits; reseeding with it continues the stream."""
    state = LfsrState(poly, seed)
    state.run(steps)
    return state.register


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

MAX_BFA_DEGREE = 20
_BATCH = 256
MIN_TAU_SAMPLES = 10_000


@dataclass
class BfaResult:
    tried: int
    found: bool
    elapsed: float
    per_try: float
    tried_per_segment: list[int] = field(default_factory=list)
    recovered: list[tuple[GenPoly, int] | None] = field(default_factory=list)

    def predicted_time(self) -> float:
        """Counting law N * tau * P * (2^g - 1), with the measured tau."""
        return self.tried * self.per_try

    def to_dict(self) -> dict:
        return {
            "tried": self.tried,
            "found": self.found,
            "elapsed": self.elapsed,
            "per_try": self.per_try,
            "tried_per_segment": self.tried_per_segment,
            "recovered": [
                None if r is None else {"poly": r[0].to_hex(), "seed": format(r[1], "x")}
                for r in self.recovered
            ],
        }


def _to_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _prefix_int(advance, g: int, seed: int, blocks: int, width_mask: int) -> int:
    """First ``blocks * g`` output bits of a register as an integer (LSB first)."""
    out = r = seed
    shift = g
    for _ in range(blocks - 1):
        r = advance(r, None)
        out |= r << shift
        shift += g
    return out & width_mask


def _search_segment(cipher_int, plain_int, width, polys, timings):
    """Try every (poly, seed) in order; stop at the first that decrypts correctly."""
    mask = (1 << width) - 1
    tried = 0
    clock = time.perf_counter
    for poly in polys:
        g = poly.degree
        advance = _advance_fn(poly.mask)
        blocks = -(-width // g)
        top = 1 << g
        for start in range(1, top, _BATCH):
            stop = min(start + _BATCH, top)
            t0 = clock()
            hit = None
            for seed in range(start, stop):
                key = _prefix_int(advance, g, seed, blocks, mask)
                if cipher_int ^ key == plain_int:
                    hit = seed
                    break
            dt = clock() - t0
            if hit is not None:
                return tried + hit - start + 1, (poly, hit)
            # Only batches that ran to completion are timed.
            n = stop - start
            tried += n
            timings.append((dt / n, n))
    return tried, None


def brute_force_attack(
    ciphertext,
    known_plaintext,
    polys: Sequence[GenPoly],
    segment_len: int,
    window: int | None = None,
    tau_probe: bool = False,
    repeat: int = 1,
) -> BfaResult:
    """Exhaustive (polynomial, seed) search, segment by segment.

    A guess is accepted when XOR-decrypting the first ``window`` bits of a
    segment (default ``4 * g``) reproduces the known plaintext there.
    ``known_plaintext`` is aligned with ``ciphertext``. ``per_try`` is the
    median time of one guess; with ``tau_probe`` it is topped up with extra
    probe guesses until at least 10^4 guesses were timed. With ``repeat > 1``
    the whole search is rerun and both ``elapsed`` and the timings come from
    the fastest run, which strips scheduler stalls from short experiments
    (the same idea as ``timeit``).
    """
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    polys = list(polys)
    if not polys:
        raise ValueError("empty search space")
    g_max = max(p.degree for p in polys)
    if g_max > MAX_BFA_DEGREE:
        raise ValueError(
            f"brute force limited to g <= {MAX_BFA_DEGREE}; g={g_max} would need "
            f"~{len(polys)} * 2^{g_max} guesses per segment"
        )
    ct = np.asarray(ciphertext, dtype=np.uint8)
    pt = np.asarray(known_plaintext, dtype=np.uint8)
    if len(pt) < len(ct):
        raise ValueError("known plaintext must cover the ciphertext")
    window = window or 4 * g_max

    timings: list[tuple[float, int]] = []
    elapsed = float("inf")
    for _ in range(repeat):
        per_segment, recovered, run_timings = [], [], []
        t0 = time.perf_counter()
        for start in range(0, len(ct), segment_len):
            w = min(window, len(ct) - start)
            tried, hit = _search_segment(
                _to_int(ct[start : start + w]), _to_int(pt[start : start + w]), w, polys, run_timings
            )
            per_segment.append(tried)
            recovered.append(hit)
        run_time = time.perf_counter() - t0
        if run_time < elapsed:
            # Per-guess timings come from the same run as ``elapsed``.
            elapsed, timings = run_time, run_timings

    if tau_probe:
        probe_width = min(window, segment_len, len(ct)) or window
        while sum(n for _, n in timings) < MIN_TAU_SAMPLES:
            # Impossible target (all-ones vs. zero plaintext) forces full batches.
            _search_segment(-1, 0, probe_width, polys[:1], timings)
    if timings:
        per_try = statistics.median(t for t, _ in timings)
    else:
        per_try = elapsed / max(sum(per_segment), 1)
    return BfaResult(
        tried=sum(per_segment),
        found=bool(recovered) and all(r is not None for r in recovered),
        elapsed=elapsed,
        per_try=per_try,
        tried_per_segment=per_segment,
        recovered=recovered,
    )

"""Exit criteria, one test each, at their stated tolerances.

Every test appends a single PASS/FAIL line to ``conftest.ACCEPTANCE_LINES``;
the lines are printed in the terminal summary.
"""

import random
import time

import numpy as np
import pytest

import conftest
from olfsr.analysis import (
    YEAR_SECONDS,
    KeyspaceSpec,
    ThreatParams,
    bfa_time,
    boundary_min_g,
    optimal_key_length,
    security_report,
)
from olfsr.attack import berlekamp_massey, brute_force_attack, splice_complexity
from olfsr.cipher import SessionParams, decrypt_session, encrypt_session
from olfsr.gf2poly import GenPoly, all_primitive, count_primitive, enumerate_primitive, is_irreducible
from olfsr.keygen import LfsrState, OkgConfig, keystream, lfsr_bits

pytestmark = pytest.mark.acceptance

THREAT = ThreatParams()  # L_M = 1.25e9 bits, tau = 1e-18 s, T = 1e13 years


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def test_01_round_trip_sessions():
    rnd = random.Random(2024)
    failures = 0
    start = time.perf_counter()
    for i in range(1000):
        g = rnd.randint(8, 16)
        P = rnd.choice((2, 3, 4))
        n = rnd.randint(1, min(32, ((1 << g) - 1) // g))
        L_M = rnd.randint(1, 100_000)
        okg = OkgConfig.fixed_degree(enumerate_primitive(g, P, seed=i), n, rnd.randbytes(16))
        params = SessionParams(L_M, okg, rnd.randbytes(16))
        message = np.frombuffer(rnd.randbytes(L_M), dtype=np.uint8) & 1
        units, _ = encrypt_session(message, params)
        failures += not np.array_equal(decrypt_session(units, params), message)
    elapsed = time.perf_counter() - start
    record(1, "round trip", failures == 0 and elapsed < 10, f"1000 sessions, {failures} failures, {elapsed:.2f} s (< 10 s)")


def _state_period(poly, seed=1):
    state = LfsrState(poly, seed)
    for steps in range(1, 1 << poly.degree):
        state.step()
        if state.register == seed:
            return steps
    return None


def test_02_period_law():
    start = time.perf_counter()
    bad = []
    checked = 0
    for g in range(1, 13):
        full = (1 << g) - 1
        primitive = {p.mask for p in all_primitive(g)}
        for low in range(1, 1 << g, 2):
            poly = (1 << g) | low
            if not is_irreducible(poly):
                continue
            checked += 1
            period = _state_period(GenPoly(poly))
            if poly in primitive:
                ok = period == full
            else:
                ok = period is not None and period < full and full % period == 0
            if ok:
                bits = lfsr_bits(GenPoly(poly), 1, 2 * period)
                ok = np.array_equal(bits[:period], bits[period:])
            if not ok:
                bad.append((g, hex(poly), period))
    elapsed = time.perf_counter() - start
    record(2, "period law", not bad and elapsed < 60, f"{checked} irreducible polys g<=12, {len(bad)} violations, {elapsed:.1f} s")


def test_03_primitive_counts():
    mismatches = [g for g in range(1, 17) if count_primitive(g) != len(all_primitive(g))]
    record(3, "primitive counts", not mismatches and count_primitive(10) == 60, f"g=1..16 exact, mismatches {mismatches}, g=10 -> {count_primitive(10)}")


def test_04_bm_first_try():
    rnd = random.Random(4)
    failures = trials = 0
    for g in range(2, 11):
        period = (1 << g) - 1
        for poly in all_primitive(g):
            for _ in range(100):
                seed = rnd.randrange(1, 1 << g)
                full = lfsr_bits(poly, seed, max(period, 2 * g))
                r = berlekamp_massey(full[: 2 * g])
                trials += 1
                failures += not (r.poly == poly and np.array_equal(r.generate(len(full)), full))
    record(4, "BM recovery from 2g bits", failures == 0, f"{trials} (poly, seed) trials, {failures} failures")


def test_05_reseeding_defense():
    summary = []
    total_ok = True
    for g in range(8, 13):
        polys = tuple(enumerate_primitive(g, 2))
        ok = trials = attempt = 0
        while trials < 100:
            cfg = OkgConfig(polys, 2 * g, f"splice-{g}-{attempt}".encode())
            attempt += 1
            r = splice_complexity(cfg, 4)
            if any(r.continuation):
                continue  # not a verified non-continuing splice
            trials += 1
            ok += r.linear_complexity > g
        summary.append(f"g={g} {ok}/100")
        total_ok &= ok == 100
    record(5, "reseeding defense", total_ok, ", ".join(summary))


def test_06_c2_key_length():
    values = {optimal_key_length(KeyspaceSpec.degree_range(g_min, 45)) for g_min in range(10, 45)}
    record(6, "C2 optimal key length", all(abs(v - 84) <= 1 for v in values), f"L_k over g_min=10..44: {sorted(values)} (target 84 +- 1)")


def test_07_c1_bfa_time():
    years = bfa_time(KeyspaceSpec.degree_range(10, 37), THREAT) / YEAR_SECONDS
    record(7, "C1 brute force time", 200 < years < 1e4, f"g_max=37: {years:.4g} years (200 < T < 1e4)")


def test_08_c2_bfa_time():
    years = [bfa_time(KeyspaceSpec.degree_range(g_min, 45), THREAT) / YEAR_SECONDS for g_min in range(10, 45)]
    lo, hi = min(years), max(years)
    variation = (hi - lo) / hi
    passed = lo > 1.8e8 and variation < 0.01
    record(8, "C2 brute force time", passed, f"min {lo:.4g} years (need > 1.8e8), variation {variation:.2%} (need < 1%)")


def test_09_storage():
    c1 = security_report(KeyspaceSpec.degree_range(10, 37), THREAT).storage_GB
    c2 = security_report(KeyspaceSpec.degree_range(10, 45), THREAT).storage_GB
    passed = 15 <= c1 <= 35 and 3e3 <= c2 <= 3e4
    record(9, "storage", passed, f"C1 {c1:.2f} GB in [15, 35], C2 {c2:.0f} GB in [3e3, 3e4]")


def test_10_boundary():
    g3 = boundary_min_g(3, 8, THREAT)
    g2 = boundary_min_g(2, 5, THREAT)
    passed = abs(g3 - 106) <= 1 and abs(g2 - 106) <= 1 and 8 * g3 == 848
    record(10, "dimensioning boundary", passed, f"P=3,n=8 -> g={g3}; P=2,n=5 -> g={g2}; L_k = 8g = {8 * g3}")


def test_11_bfa_counting_law():
    g, P, N = 10, 2, 3
    bank = tuple(enumerate_primitive(g, P))
    seg = 4 * g
    cfg = OkgConfig(bank, seg, b"victim")
    ks = keystream(cfg, cfg.rng(), N * seg)
    plain = np.random.default_rng(11).integers(0, 2, N * seg, dtype=np.uint8)
    cipher = plain ^ ks.bits
    wrong_bank = [p for p in all_primitive(g) if p not in bank][:P]
    r = brute_force_attack(cipher, plain, wrong_bank, seg, tau_probe=True, repeat=5)
    expected = N * P * ((1 << g) - 1)
    ratio = r.elapsed / r.predicted_time()
    passed = not r.found and r.tried == expected and 0.5 <= ratio <= 2.0
    record(
        11,
        "brute force counting law",
        passed,
        f"tried {r.tried} (expected {expected}), wall {r.elapsed * 1e3:.2f} ms vs tried*tau {r.predicted_time() * 1e3:.2f} ms (ratio {ratio:.2f})",
    )


def test_12_wrong_key_ber():
    total = 200_000
    polys = tuple(enumerate_primitive(16, 3))
    message = np.random.default_rng(12).integers(0, 2, total, dtype=np.uint8)
    sender = SessionParams(total, OkgConfig(polys, 256, b"right"), b"perm")
    receiver = SessionParams(total, OkgConfig(polys, 256, b"wrong"), b"perm")
    units, _ = encrypt_session(message, sender)
    ber = float((decrypt_session(units, receiver) != message).mean())
    record(12, "wrong key bit error rate", 0.45 <= ber <= 0.55, f"BER {ber:.4f} over {total} bits")

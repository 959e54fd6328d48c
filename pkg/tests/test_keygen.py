import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from olfsr.gf2poly import GenPoly, all_primitive, enumerate_primitive
from olfsr.keygen import (
    LfsrState,
    LfsrStateError,
    OkgConfig,
    ReseedEntry,
    SyncRng,
    draw_selections,
    keystream,
    lfsr_bits,
    lfsr_step,
    next_selection,
    pack_bits,
    read_log,
    replay,
    segment_count,
    unpack_bits,
    write_log,
)
from oracles import lfsr_sequence

X4_X_1 = GenPoly(0b10011)
X4_X3_1 = GenPoly(0b11001)


def bits_str(bits):
    return "".join(str(int(b)) for b in bits)


class TestLfsr:
    def test_golden_period_x4_x_1(self):
        assert bits_str(lfsr_bits(X4_X_1, 0b0001, 15)) == "100010011010111"

    def test_golden_matches_hand_oracle(self):
        assert lfsr_sequence(0b10011, 1, 15) == [int(c) for c in "100010011010111"]

    def test_step_by_step(self):
        s = LfsrState(X4_X_1, 1)
        out = [lfsr_step(s) for _ in range(15)]
        assert bits_str(out) == "100010011010111"
        assert s.register == 1 and s.emitted == 15

    def test_period_3(self):
        bits = lfsr_bits(GenPoly(0b111), 0b01, 12)
        assert bits_str(bits) == "101" * 4

    def test_zero_bits(self):
        s = LfsrState(X4_X_1, 0b1010)
        assert s.run(0).size == 0
        assert s.register == 0b1010 and s.emitted == 0

    def test_zero_register_rejected(self):
        with pytest.raises(LfsrStateError):
            LfsrState(X4_X_1, 0)
        with pytest.raises(LfsrStateError):
            LfsrState(X4_X_1, 1 << 4)

    @settings(max_examples=60)
    @given(st.integers(2, 70), st.data())
    def test_fast_path_matches_bitwise_oracle(self, g, data):
        low = data.draw(st.integers(0, (1 << g) - 1)) | 1
        poly = GenPoly((1 << g) | low)
        seed = data.draw(st.integers(1, (1 << g) - 1))
        n = data.draw(st.integers(0, 5 * g + 3))
        assert lfsr_bits(poly, seed, n).tolist() == lfsr_sequence(poly.mask, seed, n)

    @settings(max_examples=40)
    @given(st.integers(0, 80), st.integers(0, 80))
    def test_run_is_resumable(self, a, b):
        poly = GenPoly(0b10000000000101101)
        s = LfsrState(poly, 0x1234)
        joined = np.concatenate([s.run(a), s.run(b)])
        assert joined.tolist() == lfsr_sequence(poly.mask, 0x1234, a + b)
        assert s.emitted == a + b

    @pytest.mark.parametrize("g", range(2, 9))
    def test_period_and_balance(self, g):
        period = (1 << g) - 1
        for poly in all_primitive(g):
            bits = lfsr_bits(poly, 1, 2 * period)
            assert np.array_equal(bits[:period], bits[period:])
            assert int(bits[:period].sum()) == 1 << (g - 1)
            # no shorter period divides
            for d in range(1, period):
                if period % d == 0:
                    assert not np.array_equal(bits[:d], bits[d : 2 * d]) or d == period


class TestSyncRng:
    def test_same_seed_same_stream(self):
        assert SyncRng(b"k").bytes(100) == SyncRng("k").bytes(100)

    def test_labels_separate_streams(self):
        assert SyncRng(b"k").bytes(32) != SyncRng(b"k", label=b"other").bytes(32)

    def test_chunking_does_not_matter(self):
        a = SyncRng(b"k")
        b = SyncRng(b"k")
        joined = b"".join(a.bytes(n) for n in (1, 7, 20000, 3, 40000))
        assert joined == b.bytes(60011)

    @given(st.integers(1, 1000))
    def test_randbelow_range(self, n):
        r = SyncRng(str(n))
        assert all(0 <= r.randbelow(n) < n for _ in range(20))


class TestSelection:
    def cfg(self, P=3, g=8, seed=b"s"):
        return OkgConfig(tuple(enumerate_primitive(g, P)), 16, seed)

    def test_endpoints_agree(self):
        cfg = self.cfg()
        a, b = SyncRng(cfg.rng_seed), SyncRng(cfg.rng_seed)
        assert [next_selection(a, cfg) for _ in range(50)] == [next_selection(b, cfg) for _ in range(50)]

    @settings(max_examples=30)
    @given(st.integers(1, 9), st.integers(0, 3000), st.binary(max_size=4))
    def test_batched_draws_match_single_draws(self, P, count, secret):
        polys = tuple(enumerate_primitive(4, 2)) + tuple(enumerate_primitive(12, 7)) + tuple(enumerate_primitive(20, 1))
        cfg = OkgConfig(polys[:P], 16, secret)
        a, b = cfg.rng(), cfg.rng()
        assert draw_selections(a, cfg, count) == [next_selection(b, cfg) for _ in range(count)]
        assert a.bytes(40) == b.bytes(40)

    def test_seed_never_zero(self):
        cfg = OkgConfig((GenPoly(0b111),), 4, b"z")
        rng = cfg.rng()
        seeds = {next_selection(rng, cfg)[1] for _ in range(2000)}
        assert seeds == {0b01, 0b10, 0b11}

    def test_index_uniformity_chi_square(self):
        cfg = self.cfg(P=3)
        rng = cfg.rng()
        counts = np.bincount([next_selection(rng, cfg)[0] for _ in range(100_000)], minlength=3)
        expected = 100_000 / 3
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        # chi-square with 2 dof: mean 2, sd 2; 3 sigma bound
        assert chi2 < 2 + 3 * 2

    def test_seed_uniformity(self):
        cfg = OkgConfig((GenPoly(0b1011),), 3, b"u")
        rng = cfg.rng()
        counts = np.bincount([next_selection(rng, cfg)[1] for _ in range(70_000)], minlength=8)
        assert counts[0] == 0
        expected = 10_000
        chi2 = float(((counts[1:] - expected) ** 2 / expected).sum())
        assert chi2 < 6 + 3 * np.sqrt(12)


class TestKeystream:
    def test_reseed_offsets(self):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 8, b"k")
        ks = keystream(cfg, cfg.rng(), 24)
        assert [e.offset for e in ks.log] == [0, 8, 16]

    def test_deterministic_between_endpoints(self):
        cfg = OkgConfig(tuple(enumerate_primitive(12, 3)), 100, b"shared")
        a = keystream(cfg, SyncRng(b"shared"), 5000)
        b = keystream(cfg, SyncRng(b"shared"), 5000)
        assert np.array_equal(a.bits, b.bits) and a.log == b.log

    def test_different_secret_differs(self):
        polys = tuple(enumerate_primitive(12, 3))
        a = keystream(OkgConfig(polys, 100, b"a"), None, 5000)
        b = keystream(OkgConfig(polys, 100, b"b"), None, 5000)
        assert not np.array_equal(a.bits, b.bits)

    def test_replay_from_log(self):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 8, b"replay")
        ks = keystream(cfg, cfg.rng(), 24)
        manual = np.concatenate([lfsr_sequence(e.poly.mask, e.seed, 8) for e in ks.log])
        assert np.array_equal(ks.bits, manual)
        assert np.array_equal(replay(ks.log, 8, 24), ks.bits)

    def test_segment_purity(self):
        cfg = OkgConfig(tuple(enumerate_primitive(10, 4)), 50, b"pure")
        ks = keystream(cfg, cfg.rng(), 1000)
        for e in ks.log:
            seg = ks.bits[e.offset : e.offset + 50].tolist()
            g, c = e.poly.degree, e.poly.coeffs
            for t in range(len(seg) - g):
                assert seg[t + g] == sum(c[i] & seg[t + i] for i in range(g)) % 2

    @pytest.mark.parametrize("g, P, seg", [(5, 2, 7), (12, 3, 40), (33, 2, 70), (64, 2, 130), (20, 1, 1)])
    def test_lockstep_path_matches_oracle(self, g, P, seg):
        # Enough segments per polynomial to take the vectorized path.
        cfg = OkgConfig(tuple(enumerate_primitive(g, P, seed=g)), seg, b"lockstep")
        total = 60 * seg - 3
        ks = keystream(cfg, cfg.rng(), total)
        assert len(ks.log) == segment_count(total, seg) >= 57
        for e in ks.log:
            length = min(seg, total - e.offset)
            assert ks.bits[e.offset : e.offset + length].tolist() == lfsr_sequence(e.poly.mask, e.seed, length)

    def test_lockstep_with_skip(self):
        cfg = OkgConfig(tuple(enumerate_primitive(9, 2)), 20, b"k", skip_bits=5)
        ks = keystream(cfg, cfg.rng(), 20 * 50)
        assert np.array_equal(ks.bits, replay(ks.log, 20, 1000, skip_bits=5))

    def test_too_few_selections(self):
        cfg = OkgConfig((X4_X_1,), 4, b"k")
        with pytest.raises(ValueError):
            keystream(cfg, None, 12, selections=[(0, 1)])

    def test_partial_final_segment(self):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 8, b"k")
        ks = keystream(cfg, cfg.rng(), 21)
        assert len(ks.bits) == 21 and len(ks.log) == 3 == segment_count(21, 8)
        assert np.array_equal(ks.bits, keystream(cfg, cfg.rng(), 24).bits[:21])

    def test_zero_bits(self):
        cfg = OkgConfig((X4_X_1,), 8, b"k")
        ks = keystream(cfg, cfg.rng(), 0)
        assert ks.bits.size == 0 and ks.log == []

    def test_mixed_degrees(self):
        polys = (GenPoly(0b111), GenPoly(0b10011), GenPoly(0b100101))
        cfg = OkgConfig(polys, 7, b"mix")
        ks = keystream(cfg, cfg.rng(), 70)
        assert {e.poly.degree for e in ks.log} == {2, 4, 5}
        for e in ks.log:
            assert 0 < e.seed < 1 << e.poly.degree
        assert np.array_equal(replay(ks.log, 7, 70), ks.bits)

    def test_skip_bits(self):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 8, b"k", skip_bits=3)
        ks = keystream(cfg, cfg.rng(), 24)
        for e in ks.log:
            expected = lfsr_sequence(e.poly.mask, e.seed, 11)[3:]
            assert ks.bits[e.offset : e.offset + 8].tolist() == expected

    def test_explicit_selections(self):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 4, b"k")
        ks = keystream(cfg, None, 8, selections=[(0, 1), (1, 0b1000)])
        assert bits_str(ks.bits) == "1000" + bits_str(lfsr_bits(X4_X3_1, 0b1000, 4))

    def test_balance(self):
        cfg = OkgConfig(tuple(enumerate_primitive(16, 3)), 256, b"balance")
        ks = keystream(cfg, cfg.rng(), 200_000)
        assert abs(ks.bits.mean() - 0.5) < 0.01


class TestConfig:
    def test_fixed_degree(self):
        polys = enumerate_primitive(8, 2)
        cfg = OkgConfig.fixed_degree(polys, 3, b"x")
        assert cfg.segment_len == 24 and cfg.P == 2

    def test_fixed_degree_rejects(self):
        with pytest.raises(ValueError):
            OkgConfig.fixed_degree(enumerate_primitive(8, 1), 3, b"x")
        with pytest.raises(ValueError):
            OkgConfig.fixed_degree(enumerate_primitive(4, 2), 4, b"x")  # n > 15/4
        with pytest.raises(ValueError):
            OkgConfig.fixed_degree([GenPoly(0b111), GenPoly(0b1011)], 1, b"x")

    def test_rejects_polynomial_without_constant(self):
        with pytest.raises(ValueError):
            OkgConfig((GenPoly(0b10010),), 8, b"x")

    def test_rejects_bad_segment(self):
        with pytest.raises(ValueError):
            OkgConfig((X4_X_1,), 0, b"x")


class TestFormats:
    def test_log_json_line(self):
        assert ReseedEntry(0, 0, X4_X_1, 1).to_json() == '{"offset":0,"poly":"13","seed":"1"}'

    def test_log_round_trip(self, tmp_path):
        cfg = OkgConfig((X4_X_1, X4_X3_1), 8, b"k")
        ks = keystream(cfg, cfg.rng(), 40)
        path = tmp_path / "log.jsonl"
        write_log(path, ks.log)
        assert all(json.loads(line) for line in path.read_text().splitlines())
        assert read_log(path, cfg.polys) == ks.log

    def test_pack_little_endian_within_byte(self):
        assert pack_bits(np.array([1, 0, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)) == b"\x01\x01"
        assert pack_bits(np.array([0, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)) == b"\x80"

    @given(st.lists(st.integers(0, 1), max_size=100))
    def test_pack_round_trip(self, bits):
        arr = np.array(bits, dtype=np.uint8)
        assert unpack_bits(pack_bits(arr), len(bits)).tolist() == bits

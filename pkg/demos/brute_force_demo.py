"""
Exhaustive key search on a toy instance
=======================================

The attacker knows the bank's polynomials and some plaintext, and tries
every (polynomial, seed) pair per segment. An unsuccessful search costs
exactly P * (2^g - 1) guesses per segment, and the wall time follows the
number of guesses times the per-guess time.
"""

import numpy as np

from olfsr import OkgConfig, all_primitive, brute_force_attack, enumerate_primitive, keystream

g, P, N = 12, 2, 4
bank = tuple(enumerate_primitive(g, P))
segment = 4 * g
cfg = OkgConfig(bank, segment, b"victim secret")
ks = keystream(cfg, cfg.rng(), N * segment)
plain = np.random.default_rng(0).integers(0, 2, N * segment, dtype=np.uint8)
cipher = plain ^ ks.bits

hit = brute_force_attack(cipher, plain, bank, segment, tau_probe=True)
print("found:", hit.found, "guesses per segment:", hit.tried_per_segment)
print("recovered seeds match:", [s for _, s in hit.recovered] == [e.seed for e in ks.log])

decoys = [p for p in all_primitive(g) if p not in bank][:P]
miss = brute_force_attack(cipher, plain, decoys, segment, tau_probe=True, repeat=3)
print("found:", miss.found, "tried:", miss.tried, "= N * P * (2^g - 1) =", N * P * ((1 << g) - 1))
print(f"per guess {miss.per_try * 1e9:.0f} ns; wall {miss.elapsed * 1e3:.1f} ms; predicted {miss.predicted_time() * 1e3:.1f} ms")

"""
An encrypted session end to end
===============================

Both endpoints hold the same secrets: the polynomial bank, the seed of the
synchronized RNG, and the interleaver seed. The message is interleaved,
XORed with the reseeded keystream and cut into units. The receiver undoes
each step.
"""

import numpy as np

from olfsr import OkgConfig, SessionParams, decrypt_session, encrypt_session, enumerate_primitive

rng = np.random.default_rng(7)
message = rng.integers(0, 2, 100_000, dtype=np.uint8)

bank = tuple(enumerate_primitive(16, 3, seed=42))
okg = OkgConfig.fixed_degree(bank, n=8, rng_seed=b"shared secret")
params = SessionParams(len(message), okg, interleave_seed=b"interleaver")

units, log = encrypt_session(message, params)
print("units:", len(units), "of", params.unit_len, "bits;", "reseeds:", len(log))
print("first reseeds:", [entry.to_json() for entry in log[:3]])

# Units may arrive in any order.
shuffled = [units[i] for i in rng.permutation(len(units))]
recovered = decrypt_session(shuffled, params)
print("recovered exactly:", np.array_equal(recovered, message))

# A receiver with the wrong RNG seed sees noise.
wrong = SessionParams(len(message), OkgConfig.fixed_degree(bank, 8, b"guess"), b"interleaver")
ber = float((decrypt_session(units, wrong) != message).mean())
print(f"bit error rate with a wrong seed: {ber:.3f}")

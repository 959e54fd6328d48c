"""
Breaking a plain LFSR, and why reseeding helps
==============================================

Berlekamp-Massey needs only 2g output bits to rebuild a plain register.
Reseeding with a fresh (polynomial, seed) pair every segment pushes the
linear complexity of the spliced stream well above g.
"""

import numpy as np

from olfsr import OkgConfig, berlekamp_massey, enumerate_primitive, lfsr_bits, linear_complexity_profile, splice_complexity

g = 16
poly = enumerate_primitive(g, 1, seed=1)[0]
stream = lfsr_bits(poly, 0xBEEF, 5000)

# 32 observed bits are enough.
result = berlekamp_massey(stream[: 2 * g])
print("true polynomial:     ", poly)
print("recovered polynomial:", result.poly)
print("whole stream predicted:", np.array_equal(result.generate(5000), stream))

# The complexity profile of a plain register plateaus at g.
profile = linear_complexity_profile(stream[:64])
print("profile at 16, 32, 64 bits:", [L for n, L in profile if n in (16, 32, 64)])

# With reseeding, four segments of 2g bits carry far more complexity.
cfg = OkgConfig(tuple(enumerate_primitive(g, 2)), 2 * g, b"demo secret")
splice = splice_complexity(cfg, 4)
print("spliced complexity:", splice.linear_complexity, "(plain register:", g, ")")
print("any segment merely continuing the last one:", any(splice.continuation))

# BM on the spliced stream no longer predicts it.
guess = berlekamp_massey(splice.bits[: 2 * g])
print("prediction from 2g bits correct:", np.array_equal(guess.generate(len(splice.bits)), splice.bits))

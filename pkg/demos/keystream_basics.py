"""
Primitive polynomials and the plain LFSR
========================================

A register built on a primitive polynomial of degree g cycles through all
2^g - 1 nonzero fills before repeating. Irreducible but non-primitive
polynomials give shorter cycles.
"""

import numpy as np

from olfsr import GenPoly, all_primitive, count_primitive, is_irreducible, is_primitive, lfsr_bits, lfsr_period

# x^4 + x + 1 is primitive: seeded with 0001 it runs through a full period of 15.
poly = GenPoly.from_exponents(4, 1, 0)
print(poly, "primitive:", is_primitive(poly))
print("first 15 bits:", "".join(map(str, lfsr_bits(poly, 0b0001, 15))))
print("period:", lfsr_period(poly))

# x^4 + x^3 + x^2 + x + 1 is irreducible but x only has order 5 modulo it.
other = GenPoly(0b11111)
print(other, "irreducible:", is_irreducible(other), "primitive:", is_primitive(other))
print("period:", lfsr_period(other))

# How many primitive polynomials are there for each degree?
for g in (8, 10, 16, 32, 64):
    print(f"g={g:2d}: {count_primitive(g)} primitive polynomials")

# A full period is balanced: 2^(g-1) ones and 2^(g-1) - 1 zeros.
g = 10
for p in all_primitive(g)[:3]:
    bits = lfsr_bits(p, 1, (1 << g) - 1)
    print(p, "ones:", int(bits.sum()), "zeros:", int((bits == 0).sum()))

# Consecutive periods repeat exactly.
bits = lfsr_bits(all_primitive(g)[0], 1, 2 * ((1 << g) - 1))
print("period repeats:", np.array_equal(bits[:1023], bits[1023:]))

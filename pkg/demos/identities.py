"""Exact rational checks behind the N1/N2 construction."""

from fractions import Fraction

from relutest import constructions as C

for k in range(2, 13, 2):
    print(f"k={k:2d}  xi={str(C.xi(k)):>8}  gap={str(C.parity_gap(k)):>8}  "
          f"(k-1)-wise uniform={C.check_k_minus_1_wise(k)}  full tuple uniform={C.full_tuple_uniform(k)}")

g = Fraction(1, 32)
for ell in (1, 4, 9, 16):
    gap = C.expectation_gap(ell, g)
    print(f"l={ell:2d}  gap={float(gap):.5f}  within [{float(g * ell / 4):.5f}, {float(4 * g * ell):.5f}]")

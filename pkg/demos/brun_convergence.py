"""Brun expansion of a vector and how fast its convergents approach it."""

from fractions import Fraction

from stepped import brun_expansion, convergents, direction_distance

beta = (Fraction(1, 19), Fraction(25, 76))
alpha = (1,) + beta

expansion = brun_expansion(beta, 20)
print("moves:", " ".join(f"({s.a},{s.i},{s.j})" for s in expansion.steps))
print("termination:", expansion.termination.value)

for n, c in enumerate(convergents(beta, 20), start=1):
    approx = (c.q,) + tuple(c.p)
    print(f"{n:>2}  q={c.q:<6} distance={direction_distance(approx, alpha):.3e}")

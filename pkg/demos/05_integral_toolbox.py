"""Self-test of the closed-form integral calculus behind the continuum terms.

Every closed form is checked against brute-force quadrature of its
definition, and the two rational kernels behind the limiting constant are
integrated to 23 pi.
"""

import math

import numpy as np

from cplab import (ab_identity_check, angular_bracket_kernels, angular_factor,
                   closed_integral, integral_quadrature_oracle)

rng = np.random.default_rng(1)
print("closed forms vs quadrature oracle on random argument triples:")
for kind, exps in (("111", (1, 1, 1)), ("221", (2, 2, 1)),
                   ("212", (2, 1, 2)), ("311", (3, 1, 1))):
    worst = 0.0
    for _ in range(20):
        a, b, c = rng.uniform(0.1, 10.0, size=3)
        closed = closed_integral(kind, a, b, c)
        oracle = integral_quadrature_oracle(*exps, a, b, c)
        worst = max(worst, abs(closed / oracle - 1.0))
    print(f"  kind {kind}: worst relative deviation {worst:.2e}")

print(f"\nunit arguments: I[111](1,1,1) = "
      f"{closed_integral('111', 1, 1, 1)} (exactly 1/8)")
print(f"index swap: I[221](a;b;c) - I[212](a;c;b) = "
      f"{closed_integral('221', 2, 3, 5) - closed_integral('212', 2, 5, 3):.1e}")

print(f"\nangular factor at the pole pair (0,0): {angular_factor(0, 0):.6f}"
      f" = 6 pi^2 = {6 * math.pi ** 2:.6f}")
j0, j2 = angular_bracket_kernels(math.pi)
print(f"bracket kernels at r = pi: {j0:.6f}, {j2:.6f} "
      f"(second is -4/pi^2 = {-4 / math.pi ** 2:.6f})")

value = ab_identity_check()
print(f"\nrational kernel identity: {value:.8f} = 23 pi = "
      f"{23 * math.pi:.8f}")
print(f"with the 2 pi per kernel reinstated: {value * (2 * math.pi) ** 2:.1f}"
      f" = 92 pi^3 = {92 * math.pi ** 3:.1f}")

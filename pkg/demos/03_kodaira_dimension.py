"""
Counting holomorphic pluricanonical sections
=============================================

"""

import math

# sections of the m-th power of the canonical bundle reduce to Fourier
# modes (n, m') satisfying an integer quadratic relation
from akgeo.plurigenus import (
    analytic_modes,
    brute_force_modes,
    discriminant,
    ellipticity_check,
    kodaira_dimension,
    mode_equation,
)

# on the t4 = 0 slice only the constant mode survives
eq = mode_equation((0.1, 0.1, 0.2, 0.0), m=1)
print("coefficients:", eq.quad_s, eq.cross, eq.quad_x, "rhs:", eq.rhs)
print("modes:", brute_force_modes(eq, 1000))

# off the slice the right-hand side is positive and the discriminant
# is strictly negative, so no integer pair can solve the relation
eq = mode_equation((0.0, 0.0, 0.0, 0.1), m=1)
print("discriminant at n=0:", discriminant(eq, 0))
print("modes:", brute_force_modes(eq, 1000), "analytic:", analytic_modes(eq))

# the Kodaira dimension follows from P_1, ..., P_10
for t in [(0.1, 0.1, 0.1, 0.0), (0.1, 0.1, 0.1, 0.05)]:
    res = kodaira_dimension(t, 10)
    kappa = "-inf" if res.kappa == -math.inf else res.kappa
    print(t, "P_m =", sorted(set(res.per_m.values())), "kappa =", kappa)

# the symbol of the operator behind the count is elliptic
verdict = ellipticity_check((0.3, 0.0, -0.3, 0.3), 16)
print("elliptic:", verdict.elliptic, "min eigenvalue:", verdict.min_eigenvalue)

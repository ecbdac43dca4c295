"""A degree -1 Poisson structure that cannot be quantized.

Three coordinates xi, tau (degree -1) and z (degree -2), with the bivector
built from two vector fields P = tau d/dxi + tau xi d/dz and Q = d/dtau.
The naive second-order operator squares to a nonzero multiple of d/dz, and
the lifting loop shows that no correction can fix it.
"""

from fractions import Fraction

from dpq.graded import Coordinate, Ring, TruncationBounds
from dpq.operators import lie_derivative
from dpq.polyvector import PoissonStructure, mc_check
from dpq.quantizer import modular_dg, quantize

R = Ring((Coordinate("xi", -1), Coordinate("tau", -1), Coordinate("z", -2)),
         TruncationBounds(6, 6, 12))
xi, tau, z = R.gens()
P = tau * R.momentum("xi") + tau * xi * R.momentum("z")
Q = R.momentum("tau")

s = PoissonStructure(R, R.zero(), {2: P * Q})
print("bivector     :", s.Pi[2])
print("Maurer-Cartan:", mc_check(s).status)

# symmetrised product of the two Lie derivatives
LP, LQ = lie_derivative(P), lie_derivative(Q)
D2 = (LP @ LQ + LQ @ LP) * Fraction(1, 2)
print("Delta_2      :", D2)
print("Delta_2^2    :", D2 @ D2)

res = quantize(s)
print("quantize     :", res.status, "at k =", res.report.k)
print("  class      :", res.report.cocycle)
print("  solver     :", res.report.status)

# the class is the symbol of the modular vector field, as a dg computation shows
rep = modular_dg(s, D2, TruncationBounds(4, 4))
print("modular X1   :", rep.X1, "| status", rep.status)

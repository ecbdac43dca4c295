"""Canonical quantization of a Lie algebra by the odd Fourier transform.

The two-dimensional nonabelian algebra [e1, e2] = e2 gives a linear
Poisson structure on g*[-1]. Conjugating the Chevalley-Eilenberg Lie
derivative by the Berezin-Fourier transform produces a square-zero
operator whose derived bracket gives back the Lie bracket.
"""

from dpq.graded import Coordinate, Ring, TruncationBounds
from dpq.hbar import derived_brackets, extended_symbol, is_bv_infinity
from dpq.linfty import StructureConstants, check_linfty, fourier_quantize, linear_poisson
from dpq.operators import apply

bounds = TruncationBounds(6, 6, 12)
B = Ring((), bounds)
g = StructureConstants((), (Coordinate("e1", 0), Coordinate("e2", 0)), {},
                       {(0, 1): {1: B.one()}}, bounds)
print("L-infinity check:", check_linfty(g).status)

D = fourier_quantize(g)
R = D.ring
x1, x2 = R.gens()
print("Delta_2        :", D[2])
print("BV check       :", is_bv_infinity(D).verdict)
print("symbol at h=1  :", extended_symbol(D).at_one())
print("linear Poisson :", linear_poisson(g).total)
print("Delta(x1 x2)   :", apply(D[2], x1 * x2))
print("[x1, x2]       :", derived_brackets(D, x1, x2))

# the same thing from the command line
print("\ntry:  python -m dpq linfty-quantize fixtures/lie2.dpq")

"""Evens-Lu-Weinstein quantization with a gradient cocycle.

For the tangent algebroid of the plane and s = df, the Lie-algebroid
differential twisted by s is conjugated into a BV operator. The contraction
with df commutes with the conjugated de Rham differential because df is
closed; a non-closed one-form is refused.
"""

from dpq.graded import Coordinate, Ring, TruncationBounds
from dpq.hbar import is_bv_infinity
from dpq.linfty import CocycleError, StructureConstants, elw_quantize
from dpq.operators import commutator

bounds = TruncationBounds(6, 6, 12)
base = (Coordinate("x", 0), Coordinate("y", 0))
B = Ring(base, bounds)
x, y = B.gens()
TM = StructureConstants(base, (Coordinate("ex", 0), Coordinate("ey", 0)),
                        {(0,): {0: B.one()}, (1,): {1: B.one()}}, {}, bounds)

f = x * x * y + y ** 3
res = elw_quantize(TM, None, [f.partial("x"), f.partial("y")])
for n, op in sorted(res.Delta.coeffs.items()):
    print(f"h^{n}:", op)
print("BV check      :", is_bv_infinity(res.Delta).verdict)
print("[conj d, i_df]:", commutator(res.conj, res.iota) or 0)

try:
    elw_quantize(TM, None, [B.zero(), x])
except CocycleError as err:
    print("x dy          : refused,", err)

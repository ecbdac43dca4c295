"""Watching one lifting step succeed.

Start from the Fourier quantization of the tangent algebroid of the plane,
spoil it by h^3 times a Lie derivative (this keeps the symbol, so it is a
legal starting point), and let the loop repair it. The obstruction class is
exact, the solver finds a primitive, and the square vanishes again.
"""

from dpq.graded import Coordinate, Ring, TruncationBounds
from dpq.hbar import hbar, is_bv_infinity, t_index
from dpq.linfty import StructureConstants, linear_poisson
from dpq.operators import lie_derivative
from dpq.quantizer import QuantizationState, initial_state, lift_step, obstruction

bounds = TruncationBounds(6, 6, 12)
base = (Coordinate("x", 0), Coordinate("y", 0))
B = Ring(base, bounds)
TM = StructureConstants(base, (Coordinate("ex", 0), Coordinate("ey", 0)),
                        {(0,): {0: B.one()}, (1,): {1: B.one()}}, {}, bounds)
s = linear_poisson(TM)
R = s.ring

Y = R.var("x") * R.momentum("xi_ey")
start = initial_state(s)
state = QuantizationState(s, start.Delta + hbar(R, 3, lie_derivative(Y)), 1, [], start.bounds)

while state.omega():
    rep = obstruction(state)
    print(f"k={state.k}  t(square)={t_index(state.omega())}  class={rep.cocycle or 0}  {rep.status}")
    state = lift_step(state)

print("repaired at k =", state.k, "|", is_bv_infinity(state.Delta).verdict)

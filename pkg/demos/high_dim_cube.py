"""Show where the face-tube areas stop decreasing in the codimension."""

from slabiso import cube_nd

for n in range(6, 14):
    v = cube_nd.conjecture_verdict(n)
    status = "decreasing" if v.monotone_on_integers else f"rises after k={v.failure_witness}"
    print(f"n={n:2d}  v_s={cube_nd.v_s(n):.3e}  {status}  induction={v.induction_lhs:.4f}")

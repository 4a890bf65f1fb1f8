"""Run the mesh certificate for the box [0,1]^3 and print the headline numbers."""

from slabiso import cube3

report = cube3.verify_appendix(3e-4)
print(f"verdict        {report['verdict']}")
print(f"mesh sizes     N0={report['N0']} N1={report['N1']}")
print(f"mesh minimum   {report['mesh_min_P']:.13f} at v0={report['argmin'][0]:.10f}")
print(f"lower bound    {report['lower_bound_P']:.4e}")

x0, xi0, v_min = cube3.solve_vmin()
print(f"one-sided min  v_min={v_min:.6f} (x0={x0:.6f})")
r = cube3.q3_ranges(1.0)
print(f"sphere range   (0, {r.sphere[1]:.6f}]")

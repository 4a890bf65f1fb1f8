"""Tabulate the numerical profile of the Gaussian slab of width T against its bounds."""

import sys

from slabiso import gauss_slab

T = float(sys.argv[1]) if len(sys.argv) > 1 else 4.0
print(f"regime: {gauss_slab.regime(T)}")
print(f"{'vbar':>6} {'area':>10} {'envelope':>10} {'kind':>11}")
for point in gauss_slab.profile_table(T, 9):
    env = gauss_slab.lower_envelope(T, point.vbar)
    print(f"{point.vbar:6.3f} {point.area:10.6f} {env:10.6f} {point.kind:>11}")

"""
Polarization correlations of the source
=======================================

Linear analyzers in front of both detectors probe the entanglement of the
pair.  Fringe visibilities in the H/V and diagonal bases combine into the
Bell parameter ``S``; any value above 2 rules out a local hidden-variable
description.
"""

import math

import numpy as np

from antihom import bell_test, polarization_scan

grid = np.linspace(0, math.pi, 13)
for theta2, name in ((0.0, "H"), (math.pi / 4, "D")):
    sym = polarization_scan(0.0, theta2, grid)
    anti = polarization_scan(math.pi, theta2, grid)
    print(f"analyzer L at {name}")
    for t, a, b in zip(np.degrees(grid), sym, anti):
        print(f"  theta_R={t:6.1f}  symmetric={a:.3f}  singlet={b:.3f}")

print()
for mixing in (0.0, 0.1, 0.3):
    res = bell_test(math.pi, mixing=mixing)
    print(f"white-noise weight {mixing:.1f}: V1={res.V1:.3f} V2={res.V2:.3f} S={res.S:.3f}"
          f" nonclassical={res.nonclassical}")

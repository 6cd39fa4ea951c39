"""
Interference on a lossy splitter
================================

The splitter ``t = r = 0.5`` (or ``t = -r = 0.5``) absorbs half of the
incident energy.  To track what happens to absorbed photons the 2x2 map is
embedded in a 4x4 unitary with two loss modes.  The outcome table lists how
many photons reach each detector and how many are absorbed.
"""

import math

from antihom import (
    coincidence_probability,
    dilate,
    loss_distribution,
    lossy_bs,
    pair_output,
    port_distribution,
)
from antihom.experiment import outcome_breakdown

M = lossy_bs(+1)
print("sample matrix:\n", M.real)
print("4x4 dilation (real part):\n", dilate(M).real.round(3))

for phi, label in ((0.0, "symmetric"), (math.pi, "antisymmetric")):
    print()
    print(f"{label} pair, full overlap")
    dist = pair_output(phi, M, g=1.0)
    losses = [p for p in dist.register.ports if p.startswith("loss")]
    for (nl, nr, nloss), p in sorted(port_distribution(dist, ["L", "R", losses]).items()):
        print(f"  N_L={nl} N_R={nr} N_loss={nloss}  p={p:.4f}")
    print("  coincidence probability:", round(coincidence_probability(dist), 12))
    print("  absorbed photon count:", {k: round(v, 12) for k, v in loss_distribution(dist).items()})
    print("  breakdown:", {k: round(v, 12) for k, v in outcome_breakdown(dist).items()})

# Without overlap both pairs behave like classical particles
print()
print("no overlap:", round(coincidence_probability(pair_output(0.0, M, g=0.0)), 12))

"""
Designing a thin-film absorber
==============================

A metal/dielectric/metal stack is tuned so its scattering matrix matches
the ideal lossy splitter ``t = r = 0.5``.  The design objective ignores a
common phase of ``t`` and ``r``, which is the same as moving the reference
planes.  The designed film absorbs one standing-wave pattern completely and
transmits the other.
"""

import math
from pathlib import Path

from antihom import BeamsplitterSpec, coherent_response, design_stack, stack_response
from antihom.materials import load_materials, load_stack, load_template

here = Path(__file__).parent
mats = load_materials()

# A plain silicon-nitride membrane is a partial mirror
sin = load_stack(here / "data" / "sin100.json", 810.0, mats)
resp = stack_response(sin)
print(f"SiN 100 nm: T={resp.T:.4f} R={resp.R_left:.4f} A={resp.A_left:.2e}")

# Chromium index passed explicitly in the template file
template = load_template(here / "data" / "crsincr.json", 810.0, mats)
result = design_stack(template, BeamsplitterSpec(0.5, 0.5))
print()
print("designed Cr/SiN/Cr:", {k: round(v, 2) for k, v in result.params.items()}, "nm")
print(f"residual {result.residual:.2e}")
r = result.response
print(f"|t|={abs(r.t):.4f} |r|={abs(r.r_left):.4f} absorption={r.A_left:.4f}")

h = math.sqrt(0.5)
for a_r, label in ((h, "symmetric"), (-h, "antisymmetric")):
    _, _, absorbed = coherent_response(result.stack, h, a_r)
    print(f"{label:>13} illumination: absorbed fraction {absorbed:.4f}")

"""Shape of the overlap kernel K(u) on [0, beta] for different baths.

The kernel is symmetric about beta/2 and vanishes at both ends; a slower
cutoff makes it flatter and closer to the parabola u(beta - u)/(2 beta) that
the high-temperature form integrates exactly.
"""

import numpy as np

from meanforce.spectral import DiscreteModes, LorentzDrude, OhmicHardCutoff, overlap_kernel
from meanforce.svg import render_line_plot

BETA = 1.0

baths = [
    ("lorentz-drude wc=0.25", LorentzDrude(1.0, 0.25)),
    ("lorentz-drude wc=1.0", LorentzDrude(1.0, 1.0)),
    ("ohmic hard cutoff wc=1.0", OhmicHardCutoff(1.0, 1.0)),
    ("single mode w=1", DiscreteModes([(1.0, 1.0)])),
]

u = np.linspace(0.0, BETA, 81)
series = []
for label, sd in baths:
    k = np.array([overlap_kernel(sd, BETA, float(ui)) for ui in u])
    series.append((label, u, k))
    print(f"{label:28s} peak K(beta/2) = {k[40]:.6f}")

parabola = u * (BETA - u) / (2.0 * BETA)
series.append(("parabola u(b-u)/2b", u, parabola))

with open("kernel_shapes.svg", "w") as fh:
    fh.write(render_line_plot(series, title="overlap kernel, beta = 1",
                              x_label="u", y_label="K(u)"))
print("wrote kernel_shapes.svg")

"""
Coupled pairs prepared in GHZ-type states
=========================================

Two G4-coupled pairs whose electrons start in a GHZ or classical GHZ state
give a yield pattern without peaks, unlike singlet-born pairs.  A coarse
grid keeps this quick; the acceptance suite uses 201 x 151.
"""
import numpy as np

from rpsense import ModelSpec, YieldParams, preset_topology, response_pattern
from rpsense.peaks import detect_peaks

m = ModelSpec(topology=preset_topology("two_pair_G4"))
theta = np.linspace(0, 2, 81)
g = np.linspace(0, 0.6, 61)

for kind in ("Singlet", "ClassicalGHZ", "GHZ"):
    pat = response_pattern(m, kind, 0, theta, g, YieldParams(0.1))
    rows = sum(len(detect_peaks(pat.row(i), 1e-3)) for i in range(g.size))
    cols = sum(len(detect_peaks(pat.column(j), 1e-3)) for j in range(theta.size))
    spread = pat.yield_grid.max() - pat.yield_grid.min()
    print(f"{kind:13s} peaks along theta: {rows:4d}  along g: {cols:4d}  yield range {spread:.3e}")

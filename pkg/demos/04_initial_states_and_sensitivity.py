"""
Initial states and field sensitivity
====================================

The sensitivity sqrt(Phi) / dPhi/dtheta tells how small a field change can
be resolved.  Entangled (singlet) and classically mixed preparations differ
markedly at weak field.
"""
import numpy as np

from rpsense import ModelSpec, YieldParams, sensitivity
from rpsense.observables import find_kstar, printed_kstar, sensitivity_ratio_R

yp = YieldParams(0.05)
thetas = np.linspace(0.01, 1.0, 100)
for kind in ("Singlet", "ClassicalMixed", "PlusSuperposition"):
    s = [sensitivity(ModelSpec(), kind, 0, float(t), yp) for t in thetas]
    best = min(s, key=lambda x: x.magnitude)
    slope = max(abs(x.derivative) for x in s)
    print(f"{kind:18s} max|dPhi/dtheta| = {slope:.4f}   best |S| = {best.magnitude:.4f}")

# weak-field ratio of singlet to plus-state sensitivities and its unit crossing
for k in (0.01, 0.03, 0.05, 0.1):
    print(f"R(k={k}) = {sensitivity_ratio_R(k, 1.0, 0.1):.4f}")
print(f"k* (bisection) = {find_kstar(1.0, 0.1):.6f}")
print("closed-form branches:", printed_kstar(1.0, 0.1))

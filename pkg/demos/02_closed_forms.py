"""
Closed-form yields of an isolated pair
======================================

The spectral yield of a single pair has short analytic expressions.  Here we
compare them with the numerical result and with the alternative weightings
kept for reference.
"""
import numpy as np

from rpsense import ModelSpec, PairParams, FieldParams, YieldParams, singlet_yield
from rpsense.observables import closed_form_phi_gab, closed_form_phi_init

yp = YieldParams(0.1)

# three initial electron states, G_AB = 0
print("theta   state               spectral    closed form  printed weights")
for th in (0.0, 0.5, 1.0, 2.0):
    for kind in ("Singlet", "ClassicalMixed", "PlusSuperposition"):
        num = singlet_yield(ModelSpec(field=FieldParams(th)), kind, 0, yp)
        exact = closed_form_phi_init(kind, th, yp)
        printed = closed_form_phi_init(kind, th, yp, variant="printed")
        print(f"{th:5.2f}   {kind:18s}  {num:.8f}  {exact:.8f}   {printed:.8f}")

# singlet-born pair with intra-pair coupling
worst = {"corrected": 0.0, "printed": 0.0, "numerator_swap": 0.0}
for th in np.arange(0, 2.0001, 0.25):
    for gab in np.arange(-0.5, 0.5001, 0.125):
        num = singlet_yield(ModelSpec(PairParams(1.0, gab), FieldParams(th)), "Singlet", 0, yp)
        for v in worst:
            worst[v] = max(worst[v], abs(closed_form_phi_gab(1.0, th, gab, yp, v) - num))
print()
for v, d in worst.items():
    print(f"G_AB closed form, {v:15s} max deviation {d:.2e}")

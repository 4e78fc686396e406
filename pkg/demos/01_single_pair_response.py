"""
Single radical pair: response to the field
==========================================

One nucleus and two electrons.  We sweep the reduced field theta and watch
the singlet yield, first without and then with an intra-pair Ising coupling.
"""
import numpy as np

from rpsense import ModelSpec, PairParams, YieldParams, response_curve

# k = 0.1 in units of the hyperfine constant a
yp = YieldParams(0.1)
theta = np.round(np.arange(0, 2.0001, 0.01), 10)

# isolated pair: the yield falls off from its zero-field value
curve = response_curve(ModelSpec(), "Singlet", 0, theta, yp)
print(f"Phi_S(theta=0) = {curve.yields[0]:.6f}")
print(f"Phi_S(theta=2) = {curve.yields[-1]:.6f}")

# with G_AB switched on a ridge appears near theta = 2 G_AB
for gab in (0.25, 0.5, 0.75):
    c = response_curve(ModelSpec(pair=PairParams(1.0, gab)), "Singlet", 0, theta, yp)
    i = int(np.argmax(c.yields))
    print(f"G_AB={gab:4.2f}: yield maximum at theta={theta[i]:.2f} (2 G_AB = {2 * gab:.2f})")

# the maximum sits slightly above 2 G_AB at finite k and moves onto it as k shrinks
for k in (0.1, 0.05, 0.01):
    fine = np.round(np.arange(0.9, 1.1001, 0.0005), 10)
    c = response_curve(ModelSpec(pair=PairParams(1.0, 0.5)), "Singlet", 0, fine, YieldParams(k))
    print(f"k={k:<5} offset of the maximum from theta=1: {fine[np.argmax(c.yields)] - 1:+.4f}")

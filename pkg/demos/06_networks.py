"""
Larger networks
===============

Chains and stars of up to four pairs.  End pairs of a G4 chain behave
identically; in a G2 chain they do not, because the first pair couples
through its B electron and the last through its A electron.
"""
import time

from rpsense import FieldParams, ModelSpec, preset_topology, singlet_yield

for name, n in (("chain_G4", 3), ("chain_G2", 3), ("chain_G4", 4), ("chain_G2", 4), ("star_G4", 4)):
    m = ModelSpec(field=FieldParams(0.8), g=0.3, topology=preset_topology(name, n))
    t0 = time.perf_counter()
    ys = [singlet_yield(m, "Singlet", p) for p in range(n)]
    dt = time.perf_counter() - t0
    print(f"{name}({n}): " + "  ".join(f"pair {p}: {y:.6f}" for p, y in enumerate(ys)) + f"   [{dt:.2f} s]")

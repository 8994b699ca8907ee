"""Convergence order of the smooth stepper and the projection onto manifolds."""

import numpy as np

from hybridslide import HybridModel, SimConfig, SwitchingFunction, project_to_manifold, simulate

far = SwitchingFunction("far", lambda x: x[0] + 100.0)
growth = HybridModel([far], [lambda x: x] * 2, ("x",))

prev = None
for dt in (0.1, 0.05, 0.025, 0.0125):
    tr = simulate(growth, [1.0], SimConfig(t_end=1.0, dt_init=dt, dt_max=dt, adaptive=False))
    err = abs(tr.states[-1, 0] - np.e)
    print(f"dt={dt:<7} error {err:.3e}" + (f"  ratio {prev / err:.2f}" if prev else ""))
    prev = err

circle = HybridModel([SwitchingFunction("c", lambda x: x[0] ** 2 + x[1] ** 2 - 1.0)], [lambda x: x] * 2, ("x", "y"))
x, lam, it = project_to_manifold(circle, [2.0, 1.0], [0], full_output=True)
print(f"\nclosest point of the unit circle to (2, 1): {x}, multiplier {lam[0]:.4f}, {it} Newton steps")
print(f"expected {np.array([2.0, 1.0]) / np.sqrt(5)}")

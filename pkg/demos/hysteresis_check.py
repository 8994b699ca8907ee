"""Compare the sliding solution with brute-force relay chattering.

A relay with hysteresis band delta switches flows only after overshooting
the manifold by delta.  Its trajectory should approach the sliding
solution linearly in delta.
"""

import numpy as np

from hybridslide import SimConfig, StickSlip2Params, make_case_study_1, simulate
from hybridslide.hysteresis import hysteresis_simulate

P = StickSlip2Params(k=0.0, A_amp=0.0, Fc1=0.1, Fc2=0.06, x0=(0.0, 1.0, 0.0, 1.0, 0.0, -0.5))
model = make_case_study_1(P)
trace = simulate(model, P.initial_state(), SimConfig(t_end=10.0, dt_max=0.01))
print("regimes visited:", sorted(set(trace.regime)))

for delta in (1e-2, 1e-3):
    xs, n = hysteresis_simulate(model, P.initial_state(), 10.0, delta, delta / 10, t_eval=trace.times)
    err = np.max(np.abs(xs[:, :6] - trace.states[:, :6]))
    print(f"delta={delta:g}: {n} relay switches, max state error {err:.2e}")

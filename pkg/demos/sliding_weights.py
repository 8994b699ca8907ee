"""Weights of the sliding motion on one manifold and on an intersection.

On one manifold the tangent weights and the closed-form rational weights
coincide.  On the intersection of two manifolds they differ: only the
tangent weights keep the motion on the intersection, while the rational
ones flag the moment a single flow takes over.
"""

import numpy as np

from hybridslide import StickSlip2Params, make_case_study_1, sliding_vector_field, sliding_weights, solve_kappa
from hybridslide.models import cs1_regime, oracle_sliding_cs1

P = StickSlip2Params(k=0.0, A_amp=0.01, omega=0.0, phi=np.pi / 2, Fc1=0.05, Fc2=0.05)
model = make_case_study_1(P)
x = np.array([0.0, 0.3, 0.0, 0.3, 0.0, 0.3, 0.0])

for name in ("a1", "delta"):
    reg = cs1_regime(name)
    w = sliding_weights(model, x, reg.active, reg.signs)
    k = solve_kappa(model, x, reg.active, reg.signs)
    fs = sliding_vector_field(model, x, reg)
    print(f"{reg.label(model)}: tangent weights {np.round(w.weights, 4)}, rational weights {np.round(k.weights, 4)}")
    print(f"  accelerations {fs[[1, 3, 5]]}, closed form {oracle_sliding_cs1(P, name, x)[[1, 3, 5]]}")
    print(f"  tangency residual: tangent {w.residual:.1e}, rational {k.residual:.1e}")

"""When does a trajectory stick to a switching manifold?

On the relative-velocity manifold ``v_m = v_M1`` with ``v_m < v_M2`` the two
adjacent flows are q3 and q4.  Sliding (sticking) needs both to point
toward the manifold; a closed-form inequality says when.  The classifier
below never sees that inequality.
"""

import numpy as np

from hybridslide import StickSlip2Params, classify_switch_point, make_case_study_1
from hybridslide.models import cs1_chatter_conditions

for A in (0.05, 0.01, -0.05, -0.12):
    P = StickSlip2Params(k=0.0, A_amp=A, omega=0.0, phi=np.pi / 2, Fc1=0.02, Fc2=0.06)
    model = make_case_study_1(P)
    x = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    cls = classify_switch_point(model, x, [0])
    closed = cs1_chatter_conditions(P, x)["a2"]
    print(f"A={A:+.2f}: classifier says {cls}, |A + Fc2| < 2 Fc1 is {closed}")

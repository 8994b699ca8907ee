"""Regions, sign patterns and normal projections of the two-contact model.

Two switching functions split the state space into four regions.  Each
region is a column of the sign matrix; the normal projections of the four
flows onto each manifold decide what happens when the motion hits it.
"""

import numpy as np

from hybridslide import StickSlip2Params, build_sign_matrix, make_case_study_1, normal_projection_matrix, region_index

print("sign matrix for two manifolds (row = manifold, column = region):")
print(build_sign_matrix(2))

# a constant net force A = 0.05 on the small mass: spring off, forcing frozen at its peak
P = StickSlip2Params(k=0.0, A_amp=0.05, omega=0.0, phi=np.pi / 2, Fc1=0.02, Fc2=0.06)
model = make_case_study_1(P)

x = np.array([0.0, 0.7, 0.0, 0.5, 0.0, 0.9, 0.0])
r = region_index(model, x)
print(f"\nv_m=0.7, v_M1=0.5, v_M2=0.9 lies in region {r} ({model.region_names[r]})")

x_on = np.array([0.0, 0.5, 0.0, 0.5, 0.0, 0.9, 0.0])
print(f"with v_m = v_M1 the state is marked {region_index(model, x_on)}")

F = normal_projection_matrix(model, x_on)
print("\nnormal projections (rows = regions, columns = manifolds a, b):")
for i, row in enumerate(F):
    print(f"  {model.region_names[i]}: {row[0]:+.3f} {row[1]:+.3f}")

"""Outer-loop LQR design walk-through.

Augments the ADMIRE plant with integrated tracking errors, solves the
Riccati fixed point, and inspects the result: gain, residual, closed-loop
spectral radius, and the analytic scalar sanity check whose solution is the
golden ratio.
"""

import math

import numpy as np

from alloc_adapt import admire_preset, build_augmented, solve_dare
from alloc_adapt.matrixcore import spectral_radius

# scalar warm-up: A = B = Q = R = 1 has P = (1+sqrt(5))/2, K = (sqrt(5)-1)/2
sol = solve_dare(np.eye(1), np.eye(1), np.eye(1), np.eye(1))
print("scalar check:")
print(f"  P = {sol.P[0, 0]:.12f}  (golden ratio {((1 + math.sqrt(5)) / 2):.12f})")
print(f"  K = {sol.K[0, 0]:.12f}")

model = admire_preset()
aug = build_augmented(model.A, model.B_v, model.C, model.dt)
print(f"\naugmented system: {aug.A_bar.shape[0]} states "
      f"({model.n} plant + {model.r} error integrators)")

sol = solve_dare(aug.A_bar, aug.B_bar, np.eye(8), np.diag([1.0, 1.0, 0.1]))
print(f"converged in {sol.iterations} iterations, residual {sol.residual:.2e}")
print("gain K (moments x augmented state):")
for row in sol.K:
    print("  [" + "  ".join(f"{v: .4f}" for v in row) + "]")

rho = spectral_radius(aug.A_bar - aug.B_bar @ sol.K)
print(f"closed-loop spectral radius: {rho:.6f}")
print(f"open-loop plant spectral radius: {spectral_radius(model.A):.4f} (unstable pitch axis)")

"""Tour of the model layer: coefficient families and the 10-component structure.

Builds coefficient sets from the two-parameter generator family, classifies
them, and inspects the skew pair (K, M) and the potential whose gradient
closes the first-order form.
"""

import numpy as np

from msint import (
    ModelCoefficients,
    classify_structure,
    coefficients_from_generators,
    grad_S,
    ms_matrices,
    potential_S,
)

print("== generator family ==")
for theta, nu, mu in [(1.0, 0.0, 0.0), (np.sqrt(1 / 3), 0.5, 0.0), (0.8, 0.2, 0.6)]:
    c = coefficients_from_generators(theta, nu, mu)
    print(f"theta={theta:.3f} nu={nu} mu={mu} -> a={c.a:+.4f} b={c.b:+.4f} c={c.c:+.4f} d={c.d:+.4f}")

print("\n== structural classification ==")
sets = {
    "benchmark set": ModelCoefficients(
        a=0.0, b=1 / 6, c=0.0, d=1 / 6,
        alpha12=0.46, beta11=0.23, beta22=0.73,
    ),
    "pairing-complete": ModelCoefficients(
        a=0.0, b=1 / 6, c=0.0, d=1 / 6,
        alpha12=0.46, beta11=0.23, beta22=0.23,
    ),
    "generic (a != c)": ModelCoefficients(a=0.1, b=0.0, c=0.2, d=0.0),
}
for name, coeffs in sets.items():
    print(f"{name:>22}: {classify_structure(coeffs).value}")

print("\n== skew pair and potential ==")
coeffs = sets["benchmark set"]
structure = ms_matrices(coeffs)
K, M = structure.time_matrix, structure.space_matrix
print("K skew:", np.array_equal(K, -K.T), " M skew:", np.array_equal(M, -M.T))
print("K row 0:", K[0])

rng = np.random.default_rng(0)
z = rng.normal(size=10)
grad = grad_S(z, coeffs)
fd = np.zeros(10)
for i in range(10):
    e = np.zeros(10)
    e[i] = 1e-6
    fd[i] = (potential_S(z + e, coeffs) - potential_S(z - e, coeffs)) / 2e-6
print(f"gradient vs finite differences: max defect {np.max(np.abs(grad - fd)):.2e}")
print(f"linearization defect at 1e-5 scale: "
      f"{np.max(np.abs(grad_S(1e-5 * z, coeffs) - structure.linear_part @ (1e-5 * z))):.2e}")

"""Coefficient family and multi-symplectic structure of abcd-Boussinesq systems.

The two-equation family propagates a surface deviation ``eta`` and a horizontal
velocity ``u`` with four dispersion constants ``a, b, c, d`` and two homogeneous
quadratic nonlinearities.  When ``a == c`` and the nonlinearity coefficients are
pairwise compatible, the system embeds into a 10-component first-order form
built from two skew-symmetric matrices and a scalar potential; that form is what
the structure-preserving discretizations in this package act on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import StructureError

#: Absolute tolerance for the structural equality checks (a == c and the
#: alpha/beta pairings).  Coefficients are user-supplied exact rationals or
#: short decimals, so a tight absolute tolerance is appropriate.
STRUCTURE_TOL = 1e-12

#: Component order of the 10-vector attached to each grid node.
Z_COMPONENTS = ("eta", "phi1", "v1", "w1", "p1", "u", "phi2", "v2", "w2", "p2")


class StructureClass(enum.Enum):
    """Structural classification of a coefficient set."""

    GENERIC = "generic"
    MULTI_SYMPLECTIC = "multi_symplectic"
    MULTI_SYMPLECTIC_HAMILTONIAN = "multi_symplectic_hamiltonian"

    @property
    def is_multi_symplectic(self) -> bool:
        return self is not StructureClass.GENERIC


@dataclass(frozen=True)
class ModelCoefficients:
    """Dispersion constants and quadratic-nonlinearity coefficients.

    ``theta``, ``nu``, ``mu`` are optional generator metadata; when present they
    must reproduce ``(a, b, c, d)`` through :func:`coefficients_from_generators`.
    ``b`` and ``d`` must be nonnegative so the implicit operators
    ``I - b*D_h**2`` and ``I - d*D_h**2`` stay invertible.
    """

    a: float
    b: float
    c: float
    d: float
    alpha11: float = 0.0
    alpha12: float = 0.0
    alpha22: float = 0.0
    beta11: float = 0.0
    beta12: float = 0.0
    beta22: float = 0.0
    theta: float | None = None
    nu: float | None = None
    mu: float | None = None

    def __post_init__(self):
        if self.b < 0.0 or self.d < 0.0:
            raise ValueError(f"b and d must be nonnegative, got b={self.b}, d={self.d}")
        gens = (self.theta, self.nu, self.mu)
        if any(g is not None for g in gens):
            if any(g is None for g in gens):
                raise ValueError("theta, nu, mu must be given together or not at all")
            if not 0.0 <= self.theta <= 1.0:
                raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
            ta = 0.5 * (self.theta**2 - 1.0 / 3.0)
            tc = 0.5 * (1.0 - self.theta**2)
            expected = {
                "a": ta * self.nu,
                "b": ta * (1.0 - self.nu),
                "c": tc * self.mu,
                "d": tc * (1.0 - self.mu),
            }
            for name, value in expected.items():
                if abs(getattr(self, name) - value) > 1e-14:
                    raise ValueError(
                        f"{name}={getattr(self, name)} inconsistent with generators "
                        f"(theta={self.theta}, nu={self.nu}, mu={self.mu})"
                    )

    def replace(self, **kwargs) -> "ModelCoefficients":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


@dataclass(frozen=True, eq=False)
class MSStructure:
    """The matrix triplet of the 10-component first-order form.

    ``time_matrix`` and ``space_matrix`` are the skew-symmetric pair multiplying
    the time and space derivatives; ``linear_part`` is the (symmetric)
    linearization of the potential gradient at the origin.
    """

    time_matrix: np.ndarray
    space_matrix: np.ndarray
    linear_part: np.ndarray


def coefficients_from_generators(theta: float, nu: float, mu: float) -> ModelCoefficients:
    """Build ``(a, b, c, d)`` from the two-parameter generator family.

    a = (theta^2 - 1/3) nu / 2        b = (theta^2 - 1/3)(1 - nu) / 2
    c = (1 - theta^2) mu / 2          d = (1 - theta^2)(1 - mu) / 2

    Nonlinearity coefficients are left at zero for the caller to set.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    ta = 0.5 * (theta**2 - 1.0 / 3.0)
    tc = 0.5 * (1.0 - theta**2)
    return ModelCoefficients(
        a=ta * nu,
        b=ta * (1.0 - nu),
        c=tc * mu,
        d=tc * (1.0 - mu),
        theta=theta,
        nu=nu,
        mu=mu,
    )


def classify_structure(coeffs: ModelCoefficients, tol: float = STRUCTURE_TOL) -> StructureClass:
    """Classify a coefficient set as generic, multi-symplectic, or Hamiltonian.

    Multi-symplectic requires ``a == c``, ``alpha12 == 2*beta11`` and
    ``beta12 == 2*alpha22``.  The Hamiltonian subclass is the ``(a, b, a, b)``
    family and additionally requires ``beta12 == 2*alpha11 == 2*alpha22``,
    ``alpha12 == 2*beta11 == 2*beta22`` and ``b == d``.
    """
    ms = (
        abs(coeffs.a - coeffs.c) <= tol
        and abs(coeffs.alpha12 - 2.0 * coeffs.beta11) <= tol
        and abs(coeffs.beta12 - 2.0 * coeffs.alpha22) <= tol
    )
    if not ms:
        return StructureClass.GENERIC
    ham = (
        abs(coeffs.beta12 - 2.0 * coeffs.alpha11) <= tol
        and abs(coeffs.beta12 - 2.0 * coeffs.alpha22) <= tol
        and abs(coeffs.alpha12 - 2.0 * coeffs.beta11) <= tol
        and abs(coeffs.alpha12 - 2.0 * coeffs.beta22) <= tol
        and abs(coeffs.b - coeffs.d) <= tol
    )
    return StructureClass.MULTI_SYMPLECTIC_HAMILTONIAN if ham else StructureClass.MULTI_SYMPLECTIC


def require_multi_symplectic(coeffs: ModelCoefficients) -> StructureClass:
    """Raise :class:`StructureError` unless the coefficients are MS."""
    cls = classify_structure(coeffs)
    if not cls.is_multi_symplectic:
        raise StructureError(
            "operation requires multi-symplectic coefficients "
            f"(a == c, alpha12 == 2*beta11, beta12 == 2*alpha22); got a={coeffs.a}, "
            f"c={coeffs.c}, alpha12={coeffs.alpha12}, beta11={coeffs.beta11}, "
            f"beta12={coeffs.beta12}, alpha22={coeffs.alpha22}"
        )
    return cls


def nonlinearity_A(eta, u, coeffs: ModelCoefficients):
    """First quadratic nonlinearity; componentwise on arrays."""
    return coeffs.alpha11 * eta * eta + coeffs.alpha12 * eta * u + coeffs.alpha22 * u * u


def nonlinearity_B(eta, u, coeffs: ModelCoefficients):
    """Second quadratic nonlinearity; componentwise on arrays."""
    return coeffs.beta11 * eta * eta + coeffs.beta12 * eta * u + coeffs.beta22 * u * u


def nonlinearity_A_jacobian(eta, u, coeffs: ModelCoefficients):
    """Partial derivatives (dA/deta, dA/du), componentwise."""
    return (
        2.0 * coeffs.alpha11 * eta + coeffs.alpha12 * u,
        coeffs.alpha12 * eta + 2.0 * coeffs.alpha22 * u,
    )


def nonlinearity_B_jacobian(eta, u, coeffs: ModelCoefficients):
    """Partial derivatives (dB/deta, dB/du), componentwise."""
    return (
        2.0 * coeffs.beta11 * eta + coeffs.beta12 * u,
        coeffs.beta12 * eta + 2.0 * coeffs.beta22 * u,
    )


def potential_S(z, coeffs: ModelCoefficients) -> float:
    """Scalar potential of the 10-component form, evaluated at one node.

    ``z`` is indexed per :data:`Z_COMPONENTS`.  Requires MS coefficients (the
    potential carries a single dispersion constant ``a`` in place of the pair
    ``a, c``).
    """
    require_multi_symplectic(coeffs)
    z = np.asarray(z, dtype=float)
    eta, _, v1, w1, p1, u, _, v2, w2, p2 = z
    return (
        p1 * eta
        - eta * u
        - coeffs.alpha11 / 3.0 * eta**3
        - coeffs.beta11 * eta**2 * u
        - 0.5 * coeffs.beta12 * eta * u**2
        + 0.5 * coeffs.b * v1 * w1
        - coeffs.beta22 / 3.0 * u**3
        + 0.5 * coeffs.d * v2 * w2
        - coeffs.a * v1 * v2
        + p2 * u
    )


def grad_S(z, coeffs: ModelCoefficients):
    """Exact gradient of :func:`potential_S`; vectorizes over node blocks.

    Accepts either a single 10-vector or an ``(n, 10)`` array of node blocks
    and returns the same shape.
    """
    require_multi_symplectic(coeffs)
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    blocks = z[None, :] if single else z
    eta, v1, w1, p1 = blocks[:, 0], blocks[:, 2], blocks[:, 3], blocks[:, 4]
    u, v2, w2, p2 = blocks[:, 5], blocks[:, 7], blocks[:, 8], blocks[:, 9]
    g = np.zeros_like(blocks)
    g[:, 0] = p1 - u - (coeffs.alpha11 * eta**2 + 2.0 * coeffs.beta11 * eta * u + 0.5 * coeffs.beta12 * u**2)
    g[:, 2] = 0.5 * coeffs.b * w1 - coeffs.a * v2
    g[:, 3] = 0.5 * coeffs.b * v1
    g[:, 4] = eta
    g[:, 5] = p2 - eta - (coeffs.beta11 * eta**2 + coeffs.beta12 * eta * u + coeffs.beta22 * u**2)
    g[:, 7] = 0.5 * coeffs.d * w2 - coeffs.a * v1
    g[:, 8] = 0.5 * coeffs.d * v2
    g[:, 9] = u
    return g[0] if single else g


def hessian_S_quadratic_part(eta, u, coeffs: ModelCoefficients):
    """State-dependent part of the potential Hessian.

    The Hessian at a node is ``linear_part + Q`` where ``Q`` acts only on the
    ``(eta, u)`` pair.  Returns the three componentwise entries
    ``(Q_ee, Q_eu, Q_uu)`` as arrays matching the input shape.
    """
    q_ee = -2.0 * coeffs.alpha11 * eta - 2.0 * coeffs.beta11 * u
    q_eu = -2.0 * coeffs.beta11 * eta - coeffs.beta12 * u
    q_uu = -coeffs.beta12 * eta - 2.0 * coeffs.beta22 * u
    return q_ee, q_eu, q_uu


def ms_matrices(coeffs: ModelCoefficients) -> MSStructure:
    """Assemble the skew pair and the symmetric linear part, entry by entry."""
    require_multi_symplectic(coeffs)
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    K = np.zeros((10, 10))
    K[0, 1] = 0.5
    K[0, 2] = -0.5 * b
    K[1, 0] = -0.5
    K[2, 0] = 0.5 * b
    K[5, 6] = 0.5
    K[5, 7] = -0.5 * d
    K[6, 5] = -0.5
    K[7, 5] = 0.5 * d

    M = np.zeros((10, 10))
    M[0, 3] = -0.5 * b
    M[0, 7] = a
    M[1, 4] = -1.0
    M[2, 5] = -c
    M[3, 0] = 0.5 * b
    M[4, 1] = 1.0
    M[5, 2] = c
    M[5, 8] = -0.5 * d
    M[6, 9] = -1.0
    M[7, 0] = -a
    M[8, 5] = 0.5 * d
    M[9, 6] = 1.0

    L = np.zeros((10, 10))
    L[0, 4] = 1.0
    L[0, 5] = -1.0
    L[2, 3] = 0.5 * b
    L[2, 7] = -a
    L[3, 2] = 0.5 * b
    L[4, 0] = 1.0
    L[5, 0] = -1.0
    L[5, 9] = 1.0
    L[7, 2] = -a
    L[7, 8] = 0.5 * d
    L[8, 7] = 0.5 * d
    L[9, 5] = 1.0
    return MSStructure(time_matrix=K, space_matrix=M, linear_part=L)

"""Periodic uniform grids and shift-invariant (circulant) grid operators.

Every operator here commutes with the cyclic shift, so it is diagonal in the
discrete Fourier basis: application, composition and inversion all happen on
the symbol (the vector of eigenvalues ordered like ``numpy.fft.fftfreq``).
Dense matrices built from the circulant generator are kept only as test
oracles; production paths go through the FFT.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ReconstructionError, SingularOperatorError

#: Relative threshold below which a symbol entry counts as a kernel mode.
KERNEL_TOL = 1e-13


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: ``n`` nodes covering ``[x0, x0 + length)``."""

    x0: float
    length: float
    n: int

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError(f"domain length must be positive, got {self.length}")
        if self.n < 4:
            raise ValueError(f"need at least 4 nodes, got {self.n}")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def fundamental_wavenumber(self) -> float:
        """Wavenumber spacing 2*pi/length of the Fourier modes."""
        return 2.0 * np.pi / self.length

    @property
    def mode_numbers(self) -> np.ndarray:
        """Integer mode indices in FFT order (0, 1, ..., -1)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n)

    @property
    def symmetry_center(self) -> float:
        """Fixed point of the order-reversing map, x0 + (n-1)h/2."""
        return self.x0 + 0.5 * (self.n - 1) * self.h


@dataclass(frozen=True, eq=False)
class CirculantOperator:
    """Shift-invariant linear map on periodic grid data.

    ``first_column`` is the circulant generator (the image of the first unit
    vector); ``symbol`` holds the eigenvalues on the discrete Fourier basis in
    ``fftfreq`` order.  Input arrays may be 1-D of length ``n`` or 2-D of shape
    ``(n, m)``; 2-D input is transformed column by column.
    """

    grid: GridSpec
    symbol: np.ndarray
    kind: str
    first_column: np.ndarray = field(default=None)

    def __post_init__(self):
        if len(self.symbol) != self.grid.n:
            raise ValueError("symbol length does not match the grid")
        if self.first_column is None:
            col = np.fft.ifft(self.symbol)
            object.__setattr__(self, "first_column", np.real(col))

    def apply(self, values: np.ndarray, power: int = 1) -> np.ndarray:
        """Apply the operator (or its ``power``-th composition) via the FFT."""
        values = np.asarray(values)
        spectrum = np.fft.fft(values, axis=0)
        sym = self.symbol**power
        if values.ndim == 2:
            sym = sym[:, None]
        return np.real(np.fft.ifft(sym * spectrum, axis=0))

    def __call__(self, values: np.ndarray, power: int = 1) -> np.ndarray:
        return self.apply(values, power)

    def compose(self, other: "CirculantOperator") -> "CirculantOperator":
        if other.grid != self.grid:
            raise ValueError("operators live on different grids")
        return CirculantOperator(self.grid, self.symbol * other.symbol, "composite")

    def __matmul__(self, other: "CirculantOperator") -> "CirculantOperator":
        return self.compose(other)

    def power(self, exponent: int) -> "CirculantOperator":
        return CirculantOperator(self.grid, self.symbol**exponent, "composite")

    def dense(self) -> np.ndarray:
        """Dense matrix assembled from the generator (test oracle only)."""
        n = self.grid.n
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        return self.first_column[idx]

    @property
    def kernel_mask(self) -> np.ndarray:
        """Boolean mask of the Fourier modes annihilated by the operator."""
        scale = max(1.0, float(np.max(np.abs(self.symbol))))
        return np.abs(self.symbol) <= KERNEL_TOL * scale

    def is_skew_symmetric(self, tol: float = 1e-12) -> bool:
        """True when the symbol is purely imaginary (operator transpose = -operator)."""
        scale = max(1.0, float(np.max(np.abs(self.symbol))))
        return bool(np.max(np.abs(np.real(self.symbol))) <= tol * scale)


def _phases(grid: GridSpec) -> np.ndarray:
    return 2.0 * np.pi * grid.mode_numbers / grid.n


def forward_difference(grid: GridSpec) -> CirculantOperator:
    """(D_x Z)_j = (Z_{j+1} - Z_j)/h, indices mod n."""
    symbol = (np.exp(1j * _phases(grid)) - 1.0) / grid.h
    col = np.zeros(grid.n)
    col[0] = -1.0 / grid.h
    col[-1] = 1.0 / grid.h
    return CirculantOperator(grid, symbol, "forward_diff", col)


def average(grid: GridSpec) -> CirculantOperator:
    """(M_x Z)_j = (Z_{j+1} + Z_j)/2, indices mod n."""
    symbol = (np.exp(1j * _phases(grid)) + 1.0) / 2.0
    if grid.n % 2 == 0:
        symbol[grid.n // 2] = 0.0  # exact zero at the alternating mode
    col = np.zeros(grid.n)
    col[0] = 0.5
    col[-1] = 0.5
    return CirculantOperator(grid, symbol, "average", col)


def central_difference(grid: GridSpec) -> CirculantOperator:
    """(D_h Z)_j = (Z_{j+1} - Z_{j-1})/(2h); skew-symmetric."""
    symbol = 1j * np.sin(_phases(grid)) / grid.h
    if grid.n % 2 == 0:
        symbol[grid.n // 2] = 0.0  # exact zero at the alternating mode
    col = np.zeros(grid.n)
    col[1] = -1.0 / (2.0 * grid.h)
    col[-1] = 1.0 / (2.0 * grid.h)
    return CirculantOperator(grid, symbol, "central_diff", col)


def spectral_derivative(grid: GridSpec) -> CirculantOperator:
    """Pseudospectral differentiation of the trigonometric interpolant.

    For even ``n`` the derivative symbol of the highest (Nyquist) mode is set
    to zero, the standard convention that keeps the operator real-valued and
    skew-symmetric.
    """
    symbol = 1j * grid.fundamental_wavenumber * grid.mode_numbers
    if grid.n % 2 == 0:
        symbol = symbol.copy()
        symbol[grid.n // 2] = 0.0
    return CirculantOperator(grid, symbol, "spectral")


def identity_operator(grid: GridSpec) -> CirculantOperator:
    col = np.zeros(grid.n)
    col[0] = 1.0
    return CirculantOperator(grid, np.ones(grid.n, dtype=complex), "identity", col)


@dataclass(frozen=True)
class ReversalOperator:
    """Order-reversing permutation (x_j -> x_{n-1-j}); an involution."""

    grid: GridSpec

    def apply(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values)[::-1]

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.apply(values)

    def dense(self) -> np.ndarray:
        return np.eye(self.grid.n)[::-1]


def reversal(grid: GridSpec) -> ReversalOperator:
    return ReversalOperator(grid)


def anticommute_check(op: CirculantOperator, trials: int = 20, seed: int = 0, tol: float = 1e-12) -> bool:
    """Whether the operator anticommutes with the order reversal.

    Applies ``D (rev x) + rev (D x)`` to ``trials`` random unit-scale inputs and
    compares the sup-norm against ``tol`` (scaled by the operator magnitude).
    """
    rev = reversal(op.grid)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.max(np.abs(op.symbol))))
    for _ in range(trials):
        x = rng.standard_normal(op.grid.n)
        residual = op.apply(rev(x)) + rev(op.apply(x))
        if np.max(np.abs(residual)) > tol * scale:
            return False
    return True


def helmholtz_solve(alpha: float, deriv: CirculantOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(I - alpha * D^2) w = rhs`` exactly in symbol space.

    For a skew-symmetric ``D`` (purely imaginary symbol) and ``alpha >= 0``
    every per-mode denominator satisfies ``1 - alpha*lambda^2 >= 1``, so the
    solve never amplifies a mode.  Negative ``alpha`` is accepted as long as no
    denominator vanishes.
    """
    denom = np.real(1.0 - alpha * deriv.symbol**2)
    if np.min(np.abs(denom)) < 1e-12:
        raise SingularOperatorError(
            f"helmholtz operator singular: min |1 - alpha*lambda^2| = {np.min(np.abs(denom)):.3e}"
        )
    rhs = np.asarray(rhs)
    spectrum = np.fft.fft(rhs, axis=0)
    div = denom if rhs.ndim == 1 else denom[:, None]
    return np.real(np.fft.ifft(spectrum / div, axis=0))


def kernel_projection(op: CirculantOperator, values: np.ndarray) -> np.ndarray:
    """Project grid data onto the kernel modes of the operator."""
    spectrum = np.fft.fft(values)
    out = np.zeros_like(spectrum)
    mask = op.kernel_mask
    out[mask] = spectrum[mask]
    return np.real(np.fft.ifft(out))


def solve_modulo_kernel(op: CirculantOperator, rhs: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Solve ``op f = rhs`` per mode, gauging the kernel modes of ``f`` to zero.

    The kernel modes of ``rhs`` must vanish (relative to its magnitude) or the
    system has no solution and a :class:`ReconstructionError` is raised.
    """
    spectrum = np.fft.fft(rhs)
    mask = op.kernel_mask
    n = op.grid.n
    scale = max(np.max(np.abs(spectrum)) / n, 1e-30)
    bad = np.max(np.abs(spectrum[mask])) / n if np.any(mask) else 0.0
    if bad > rtol * max(1.0, scale):
        raise ReconstructionError(
            f"right-hand side has content {bad:.3e} in a kernel mode of the grid operator"
        )
    out = np.zeros_like(spectrum)
    out[~mask] = spectrum[~mask] / op.symbol[~mask]
    return np.real(np.fft.ifft(out))


@dataclass(frozen=True)
class SingularityReport:
    invertible: bool
    min_abs_symbol: float


def parity_singularity_report(grid: GridSpec, which: str = "average", alpha: float = 0.0) -> SingularityReport:
    """Invertibility of the averaging-based operators by minimum symbol modulus.

    ``which`` selects the plain averaging operator or the partitioned
    Runge-Kutta operator ``M_x - alpha * D_x D_c`` (with ``D_c`` the central
    difference).  Both are invertible exactly when the node count is odd: for
    even ``n`` the averaging symbol vanishes at the Nyquist mode.
    """
    m = average(grid).symbol
    if which == "average":
        symbol = m
    elif which == "prk":
        symbol = m - alpha * forward_difference(grid).symbol * central_difference(grid).symbol
    else:
        raise ValueError(f"unknown operator kind {which!r}; expected 'average' or 'prk'")
    min_abs = float(np.min(np.abs(symbol)))
    return SingularityReport(invertible=min_abs > 1e-14, min_abs_symbol=min_abs)


def make_operator(grid: GridSpec, kind: str) -> CirculantOperator:
    """Factory for the named first-derivative approximations."""
    if kind in ("spectral", "Spectral"):
        return spectral_derivative(grid)
    if kind in ("central", "central_diff", "CentralDiff"):
        return central_difference(grid)
    raise ValueError(f"unknown operator kind {kind!r}; expected 'spectral' or 'central'")

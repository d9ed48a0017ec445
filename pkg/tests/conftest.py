"""Shared fixtures: reference coefficient sets, small grids, dense oracles."""

import numpy as np
import pytest

from msint.gridops import GridSpec, central_difference, spectral_derivative
from msint.model import ModelCoefficients
from msint.semidiscrete import StateField


@pytest.fixture
def benchmark_ms_coeffs():
    """The multi-symplectic benchmark nonlinearity set with b = d = 1/6."""
    return ModelCoefficients(
        a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0,
        alpha11=0.0, alpha12=0.46, alpha22=0.0,
        beta11=0.23, beta12=0.0, beta22=0.73,
    )


@pytest.fixture
def hamiltonian_coeffs():
    """Corrected Hamiltonian set (beta22 lowered to 0.23 so all pairings hold)."""
    return ModelCoefficients(
        a=0.0, b=1.0 / 6.0, c=0.0, d=1.0 / 6.0,
        alpha11=0.0, alpha12=0.46, alpha22=0.0,
        beta11=0.23, beta12=0.0, beta22=0.23,
    )


@pytest.fixture
def generic_ms_coeffs():
    """MS set with a = c nonzero and unequal b, d (exercises every term)."""
    return ModelCoefficients(
        a=0.05, b=0.2, c=0.05, d=0.3,
        alpha11=0.11, alpha12=0.46, alpha22=0.15,
        beta11=0.23, beta12=0.30, beta22=0.73,
    )


@pytest.fixture
def grid16():
    return GridSpec(x0=-3.0, length=6.0, n=16)


@pytest.fixture
def grid64():
    return GridSpec(x0=0.0, length=2.0 * np.pi, n=64)


def smooth_random_state(grid, seed=0, kill_kernel=True, scale=0.3):
    """Random band-limited state; optionally strips mean and Nyquist content."""
    rng = np.random.default_rng(seed)
    n = grid.n
    modes = np.abs(np.fft.fftfreq(n, 1.0 / n))
    filt = np.exp(-0.4 * modes)

    def draw():
        spec = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * filt
        if kill_kernel:
            spec[0] = 0.0
            if n % 2 == 0:
                spec[n // 2] = 0.0
        vals = np.real(np.fft.ifft(spec))
        return scale * vals / max(1e-12, np.max(np.abs(vals)))

    return StateField(grid, draw(), draw())


def dense_deriv(op):
    """Dense matrix oracle of a circulant operator."""
    return op.dense()


@pytest.fixture(params=["spectral", "central"])
def any_skew_operator(request, grid16):
    if request.param == "spectral":
        return spectral_derivative(grid16)
    return central_difference(grid16)

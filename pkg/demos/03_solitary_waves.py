"""Solitary-wave generation: classical and generalized profiles.

Solves the periodic traveling-wave system for two coefficient sets: one whose
profile decays cleanly (classical) and one whose resonance dresses the core
with non-decaying tail ripples (generalized).  Then advances the classical
wave in time and checks that it simply translates at its design speed.
"""

import numpy as np

from msint import (
    GridSpec,
    ModelCoefficients,
    SchemeConfig,
    SolitaryWaveSpec,
    run,
    solve_profile,
)
from msint.semidiscrete import make_reduced_system
from msint.waves import spectral_translate

grid = GridSpec(-64.0, 128.0, 1024)
nonlinearity = dict(alpha12=0.46, beta11=0.23, beta22=0.73)

cases = {
    "classical (b = d = 1/6, c_s = 1.2)": (
        ModelCoefficients(a=0.0, b=1 / 6, c=0.0, d=1 / 6, **nonlinearity), 1.2),
    "generalized (a = c = 1/6, c_s = 1.3)": (
        ModelCoefficients(a=1 / 6, b=0.0, c=1 / 6, d=0.0, **nonlinearity), 1.3),
}

profiles = {}
for name, (coeffs, speed) in cases.items():
    wave = solve_profile(SolitaryWaveSpec(speed, grid), coeffs)
    profiles[name] = (wave, coeffs)
    print(f"{name}")
    print(f"   {wave.classification.upper()}  peak={np.max(np.abs(wave.state.eta)):.4f}  "
          f"residual={wave.residual:.1e}  tail ripple={wave.tail_amplitude:.1e}  "
          f"newton iterations={wave.newton_iterations}")

print("\n== translation test for the classical wave ==")
wave, coeffs = profiles["classical (b = d = 1/6, c_s = 1.2)"]
system = make_reduced_system(coeffs, grid)
t_end = 10.0
result = run(wave.state, system, SchemeConfig(dt=0.025), t_end=t_end, sample_every=100)
final = result.final_state
correlation = np.real(np.fft.ifft(np.fft.fft(final.eta) * np.conj(np.fft.fft(wave.state.eta))))
peak = int(np.argmax(correlation))
left, mid, right = correlation[peak - 1], correlation[peak], correlation[(peak + 1) % grid.n]
shift = (peak + 0.5 * (left - right) / (left - 2 * mid + right)) * grid.h
print(f"measured displacement over t = {t_end}: {shift:.4f} (expected {1.2 * t_end})")
recentered = spectral_translate(final.eta, grid, -shift)
print(f"shape error after re-centering: {np.max(np.abs(recentered - wave.state.eta)):.2e}")

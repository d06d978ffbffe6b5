"""Recovering oscillator parameters from a noisy witness-sample absorbance."""

import numpy as np

from polariton_engine.dielectric import DielectricModel, LorentzOscillator
from polariton_engine.fitting import absorbance, fit_lorentz
from polariton_engine.spectrum import Spectrum

rng = np.random.default_rng(11)
nu = np.arange(1940.0, 2026.0, 0.1)
truth = DielectricModel(1.375, (LorentzOscillator(2000.0, 1983.0, 3.0),))
pathlength = 1e-3  # 10 um film

data = absorbance(truth, nu, pathlength) * (1 + rng.normal(0.0, 0.01, nu.size))
print(f"peak absorbance {data.max():.3f}")

start = truth.with_oscillators([LorentzOscillator(1500.0, 1980.0, 5.0)])
fit = fit_lorentz(Spectrum(nu, {"absorbance": data}), start, pathlength)
print(f"{fit.message} after {fit.n_iter} iterations; residual {fit.initial_residual_norm:.3g} -> {fit.residual_norm:.3g}")
for name, v, e, t in zip(fit.names, fit.values, fit.stderr, (2000.0, 1983.0, 3.0)):
    print(f"{name:7s} {v:10.4f} +/- {e:.4f}   (true {t})")

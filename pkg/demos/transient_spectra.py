"""Pump-probe spectra of the polariton system and what they say about the
excited population.

A pump leaves a fraction f of molecules in v=1. The bleach weakens the 0->1
coupling and the new 1->2 absorption at 1968 cm^-1 adds a third mode.
"""

import numpy as np

from polariton_engine.pump_probe import (
    detuning_for_lp,
    estimate_excited_fraction,
    extract_features,
    quantum_transient,
    up_shift,
)
from polariton_engine.quantum_model import QmParams, resonances

p = QmParams(f_pu=0.05)
grid = np.arange(1900.0, 2060.0, 0.05)

# %% One transient spectrum at zero detuning
spec = quantum_transient(p, grid)
feats = extract_features(spec, p.omega0)
print(f"ground LP/UP: {feats.e_lp:.2f} / {feats.e_up:.2f} cm^-1")
print(f"UP derivative zero crossing {feats.up_zero_crossing:.2f}, lobes {feats.up_signs}")
print(f"LP-region extremum {feats.lp_extremum:+.3f} at {feats.lp_extremum_position:.2f}")
print("resonances with 5% excited:", np.round(resonances(p), 2))

# %% Detuning scan: the LP feature is largest when LP meets the 1->2 line
print("\n LP target   detuning   max|dT| (LP region)")
for target in (1958.0, 1963.0, 1968.0, 1973.0):
    d = detuning_for_lp(target, p)
    f = extract_features(quantum_transient(p.with_(omega_c=p.omega0 + d), grid), p.omega0)
    print(f"{target:9.0f} {d:10.2f} {abs(f.lp_extremum):12.4f}")

# %% From a measured UP red-shift back to the excited fraction
for f in (0.05, 0.075):
    s = up_shift(f, p)
    print(f"\nf={f}: UP shifts by {s:.4f} cm^-1 -> estimate {estimate_excited_fraction(s, p):.6f}")

"""Reference permittivity and optical constants at 40 significant digits.

Evaluates the single-pole complex susceptibility A / (nu0^2 - nu^2 - i Gamma nu)
with mpmath and takes the principal square root, which is an independent route
to the split real/imaginary formulas used in the package. Run directly to print
the constants pinned in tests/test_dielectric.py.
"""

import mpmath as mp

mp.mp.dps = 40

CASES = [
    # (n_bg, A, nu0, Gamma, nu)
    (1.375, 2000, 1983, 3, 1975),
    (1.375, 2600, 1983, 3, 1983),
    (1.375, 2600, 1983, 3, 1990.5),
]


def evaluate(n_bg, A, nu0, gamma, nu):
    n_bg, A, nu0, gamma, nu = map(mp.mpf, (n_bg, A, nu0, gamma, nu))
    eps = n_bg**2 + A / (nu0**2 - nu**2 - 1j * gamma * nu)
    idx = mp.sqrt(eps)
    return eps.real, eps.imag, idx.real, idx.imag, 4 * mp.pi * nu * idx.imag


if __name__ == "__main__":
    for case in CASES:
        print(case, [mp.nstr(v, 20) for v in evaluate(*case)])

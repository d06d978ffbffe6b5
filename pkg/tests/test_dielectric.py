import cmath

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polariton_engine.dielectric import (
    DielectricModel,
    LorentzOscillator,
    complex_index,
    excited_model,
    optical_constants,
    optical_constants_from_permittivity,
    permittivity,
)

W = LorentzOscillator(2600.0, 1983.0, 3.0)

# 40-digit values from tests/oracles/dielectric_oracle.py:
# (n_bg, A, nu0, Gamma, nu) -> (eps1, eps2, n, k, alpha)
ORACLE = [
    ((1.375, 2000, 1983, 3, 1975), (1.9516514178812623554, 0.011419325604676587156, 1.3970211600647392912, 0.0040870267148091746622, 101.43420750793086809)),
    ((1.375, 2600, 1983, 3, 1983), (1.890625, 0.43704824340225247941, 1.3840353941366610704, 0.15788911369382865972, 3934.4566542816470937)),
    ((1.375, 2600, 1983, 3, 1990.5), (1.8067480911940730511, 0.016807045373418657781, 1.3441678379954872478, 0.0062518403202097310534, 156.3795370174860938)),
]


def single(n_bg, A, nu0, gamma):
    return DielectricModel(n_bg, (LorentzOscillator(A, nu0, gamma),))


def test_empty_medium_is_background_only():
    assert permittivity(DielectricModel(1.375), 1983.0) == (1.890625, 0.0)


def test_on_resonance_real_part_is_background():
    eps1, eps2 = permittivity(single(1.0, 2000.0, 1983.0, 3.0), 1983.0)
    assert eps1 == 1.0
    assert eps2 == pytest.approx(2000.0 / (3.0 * 1983.0), rel=1e-15)


@pytest.mark.parametrize("case,expected", ORACLE)
def test_matches_high_precision_oracle(case, expected):
    n_bg, A, nu0, gamma, nu = case
    model = single(n_bg, A, nu0, gamma)
    eps1, eps2 = permittivity(model, nu)
    oc = optical_constants(model, nu)
    got = (eps1, eps2, oc.n, oc.k, oc.alpha)
    np.testing.assert_allclose(got, expected, rtol=1e-13)


@pytest.mark.parametrize(
    "eps,expected",
    [((1.890625, 0.0), (1.375, 0.0)), ((0.0, 2.0), (1.0, 1.0))],
)
def test_index_from_permittivity_closed_forms(eps, expected):
    oc = optical_constants_from_permittivity(*eps, nu=1983.0)
    assert (oc.n, oc.k) == pytest.approx(expected, abs=1e-15)
    assert oc.alpha == pytest.approx(4 * np.pi * 1983.0 * expected[1], rel=1e-15)


@pytest.mark.parametrize("nu", [0.0, -5.0, np.nan])
def test_rejects_non_positive_frequency(nu):
    with pytest.raises(ValueError):
        permittivity(DielectricModel(1.375, (W,)), nu)


@pytest.mark.parametrize(
    "bad", [dict(amplitude=-1.0, center=1983.0, width=3.0), dict(amplitude=1.0, center=0.0, width=3.0), dict(amplitude=1.0, center=1983.0, width=0.0)]
)
def test_oscillator_invariants(bad):
    with pytest.raises(ValueError):
        LorentzOscillator(**bad)


def test_background_index_below_one_rejected():
    with pytest.raises(ValueError):
        DielectricModel(0.9)


oscillators = st.builds(
    LorentzOscillator,
    amplitude=st.floats(0.0, 1e5),
    center=st.floats(100.0, 4000.0),
    width=st.floats(0.1, 100.0),
)
models = st.builds(
    DielectricModel,
    n_bg=st.floats(1.0, 4.0),
    oscillators=st.lists(oscillators, max_size=4).map(tuple),
)
wavenumbers = st.floats(50.0, 5000.0)


@given(models, wavenumbers)
def test_passivity(model, nu):
    eps1, eps2 = permittivity(model, nu)
    oc = optical_constants(model, nu)
    assert eps2 >= 0 and oc.k >= 0 and oc.alpha >= 0 and oc.n >= 0


@given(models, wavenumbers)
def test_index_squares_back_to_permittivity(model, nu):
    eps1, eps2 = permittivity(model, nu)
    idx = complex(complex_index(model, np.array([nu]))[0])
    sq = idx * idx
    scale = abs(complex(eps1, eps2))
    assert abs(sq.real - eps1) <= 1e-12 * scale
    assert abs(sq.imag - eps2) <= 1e-12 * scale


@given(models, wavenumbers)
def test_index_matches_principal_complex_root(model, nu):
    eps1, eps2 = permittivity(model, nu)
    ref = cmath.sqrt(complex(eps1, eps2))
    idx = complex(complex_index(model, np.array([nu]))[0])
    assert abs(idx - ref) <= 1e-12 * abs(ref)


@given(oscillators, oscillators, st.floats(1.0, 3.0), wavenumbers)
def test_oscillator_terms_add(o1, o2, n_bg, nu):
    both = permittivity(DielectricModel(n_bg, (o1, o2)), nu)
    a = permittivity(DielectricModel(n_bg, (o1,)), nu)
    b = permittivity(DielectricModel(n_bg, (o2,)), nu)
    bg = n_bg**2
    assert both[0] == pytest.approx(a[0] + b[0] - bg, rel=1e-12, abs=1e-12)
    assert both[1] == pytest.approx(a[1] + b[1], rel=1e-12, abs=1e-300)


def test_vectorised_matches_scalar():
    model = DielectricModel(1.375, (W,))
    nu = np.linspace(1900, 2060, 17)
    e1, e2 = permittivity(model, nu)
    for i, x in enumerate(nu):
        assert (e1[i], e2[i]) == permittivity(model, float(x))


class TestExcitedModel:
    base = DielectricModel(1.375, (LorentzOscillator(2000.0, 1983.0, 3.0),))

    def test_five_percent_amplitudes(self):
        ex = excited_model(self.base, 0, 0.05, 1968.0, delta=-0.25)
        assert ex.oscillators[0].amplitude == pytest.approx(1800.0, rel=1e-15)
        assert ex.oscillators[1].amplitude == pytest.approx(112.5, rel=1e-15)
        assert ex.oscillators[1].center == 1968.0
        assert ex.oscillators[1].width == 3.0

    def test_zero_fraction_leaves_optics_unchanged(self):
        ex = excited_model(self.base, 0, 0.0, 1968.0, delta=-0.25)
        assert ex.oscillators[0] == self.base.oscillators[0]
        assert ex.oscillators[1].amplitude == 0.0
        nu = np.linspace(1900, 2060, 101)
        for a, b in zip(permittivity(ex, nu), permittivity(self.base, nu)):
            assert np.array_equal(a, b)

    def test_half_fraction_endpoint(self):
        ex = excited_model(self.base, 0, 0.5, 1968.0, delta=-0.25)
        assert ex.oscillators[0].amplitude == 0.0
        assert ex.oscillators[1].amplitude == pytest.approx(0.5625 * 2000.0)

    @pytest.mark.parametrize("f", [-0.01, 0.51])
    def test_fraction_out_of_range(self, f):
        with pytest.raises(ValueError):
            excited_model(self.base, 0, f, 1968.0)

    def test_bad_ground_index(self):
        with pytest.raises(IndexError):
            excited_model(self.base, 3, 0.1, 1968.0)

    @given(st.floats(0.0, 0.5), st.floats(0.0, 0.5))
    def test_bleach_is_monotone(self, f1, f2):
        lo, hi = sorted((f1, f2))
        assume(hi - lo > 1e-12)
        a = excited_model(self.base, 0, lo, 1968.0).oscillators[0].amplitude
        b = excited_model(self.base, 0, hi, 1968.0).oscillators[0].amplitude
        assert b < a

    def test_explicit_hot_width(self):
        ex = excited_model(self.base, 0, 0.1, 1968.0, hot_width=5.0)
        assert ex.oscillators[-1].width == 5.0

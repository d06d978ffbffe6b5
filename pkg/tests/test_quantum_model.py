import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polariton_engine.quantum_model import (
    QmParams,
    build_h_eff,
    cavity_amplitude,
    delta_T_qm,
    eigenvalues_3x3,
    linear_transmission,
    resonances,
    transient_transmission,
    up_resonance,
)
from polariton_engine.spectrum import find_peaks

from oracles.eigen_oracle import best_match, companion_roots

GRID = np.arange(1900.0, 2060.0, 0.01)
P = QmParams()


def random_symmetric(rng, scale=1.0, shift=0.0):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return scale * (a + a.T) / 2 + shift * np.eye(3)


class TestParams:
    @pytest.mark.parametrize(
        "kwargs", [dict(kappa=0.0), dict(gamma_m=-1.0), dict(gN=-1.0), dict(f_pu=0.6), dict(f_pu=-0.1), dict(delta=-1.0)]
    )
    def test_invariants(self, kwargs):
        with pytest.raises(ValueError):
            QmParams(**kwargs)

    def test_derived_lines(self):
        assert P.omega12 == 1968.0
        assert P.with_(omega_c=1990.0).detuning == 7.0


class TestEffectiveMatrix:
    def test_reference_couplings(self):
        h = build_h_eff(P.with_(f_pu=0.05))
        assert h[0, 1].real == pytest.approx(18.5 * np.sqrt(0.9), rel=1e-15)
        assert h[0, 2].real == pytest.approx(18.5 * np.sqrt(0.1) * 0.75, rel=1e-15)
        assert h[0, 1].real == pytest.approx(17.551, abs=5e-4)
        assert h[0, 2].real == pytest.approx(4.388, abs=5e-4)

    def test_structure(self):
        h = build_h_eff(P.with_(f_pu=0.2, omega_c=1990.0))
        assert np.array_equal(h, h.T)
        assert h[1, 2] == 0
        expected_trace = (1990 - 5j) + (1983 - 1.5j) + (1968 - 1.5j)
        assert np.trace(h) == expected_trace

    def test_ground_state_decouples_hot_line(self):
        h = build_h_eff(P)
        assert h[0, 2] == 0 and h[2, 0] == 0


class TestEigenvalues:
    def test_diagonal(self):
        d = np.diag([3 - 1j, -2 + 0.5j, 7.0])
        vals = eigenvalues_3x3(d).values
        np.testing.assert_allclose(vals, [-2 + 0.5j, 3 - 1j, 7.0], atol=1e-12)

    def test_ground_state_block_structure(self):
        vals = resonances(P)
        block = np.linalg.eigvals(build_h_eff(P)[:2, :2])
        assert vals[1] == pytest.approx(1968.0 - 1.5j, abs=1e-9)
        np.testing.assert_allclose(sorted(block, key=lambda z: z.real), vals[[0, 2]], atol=1e-9)

    def test_companion_oracle_seeded(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            m = random_symmetric(rng, scale=rng.uniform(0.1, 30.0), shift=rng.uniform(-2000, 2000))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                es = eigenvalues_3x3(m)
            assert best_match(es.values, companion_roots(m)) < 1e-9
            assert abs(es.values.sum() - np.trace(m)) < 1e-9
            assert np.all(es.residuals < 1e-9 * max(1.0, np.abs(m).max()))

    @settings(max_examples=200)
    @given(
        st.lists(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False), min_size=6, max_size=6)
    )
    def test_companion_oracle_property(self, entries):
        a, b, c, d, e, f = entries
        m = np.array([[a, b, c], [b, d, e], [c, e, f]], dtype=complex)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            es = eigenvalues_3x3(m)
        scale = max(1.0, np.abs(m).max())
        assert abs(es.values.sum() - np.trace(m)) < 1e-9 * scale
        if not es.near_degenerate:
            assert best_match(es.values, companion_roots(m)) < 1e-9 * scale

    def test_sorted_by_real_then_imaginary(self):
        vals = eigenvalues_3x3(np.diag([1 + 2j, 1 - 1j, 0.5])).values
        np.testing.assert_allclose(vals, [0.5, 1 - 1j, 1 + 2j], atol=1e-12)

    def test_degenerate_pair_flagged(self):
        with pytest.warns(RuntimeWarning, match="near-degenerate"):
            es = eigenvalues_3x3(np.diag([2.0, 2.0, 5.0]))
        assert es.near_degenerate == [(0, 1)]

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            eigenvalues_3x3(np.eye(2))


class TestLinear:
    def test_rabi_splitting(self):
        T = linear_transmission(P, GRID)["T"]
        peaks = find_peaks(GRID, T, min_height=0.1 * T.max())
        assert peaks.size == 2
        split = peaks[1] - peaks[0]
        # the damped maxima sit a few tenths wider than 2 gN = 37
        assert abs(split - 37.0) < 1.0

    def test_empty_cavity_is_unit_lorentzian(self):
        p = P.with_(gN=0.0)
        T = linear_transmission(p, GRID)["T"]
        assert T.max() == pytest.approx(1.0, abs=1e-6)
        assert find_peaks(GRID, T)[0] == pytest.approx(1983.0, abs=1e-6)
        lor = (p.kappa / 2) ** 2 / ((GRID - 1983.0) ** 2 + (p.kappa / 2) ** 2)
        np.testing.assert_allclose(T, lor, atol=1e-14)

    def test_rejects_excited_population(self):
        with pytest.raises(ValueError):
            linear_transmission(P.with_(f_pu=0.05), GRID)

    def test_transient_path_reproduces_linear(self):
        for d in (-8.0, 0.0, 8.0):
            p = P.with_(omega_c=1983.0 + d)
            diff = transient_transmission(p, GRID)["T"] - linear_transmission(p, GRID)["T"]
            assert np.max(np.abs(diff)) < 1e-12

    @settings(max_examples=100)
    @given(
        st.floats(1900, 2060),
        st.floats(0, 40),
        st.floats(0.5, 30),
        st.floats(0, 10),
        st.floats(0, 0.5),
        st.floats(-0.9, 1.0),
    )
    def test_transmission_within_unit_interval(self, wc, gN, kappa, gamma, f, delta):
        p = QmParams(omega_c=wc, gN=gN, kappa=kappa, gamma_m=gamma, f_pu=f, delta=delta)
        T = transient_transmission(p, GRID[::20])["T"]
        assert np.all(T >= 0) and np.all(T <= 1 + 1e-9)


class TestTransient:
    def test_amplitude_poles_are_the_eigenvalues(self):
        # A(w) * prod(w - lambda_i) / prod_{j>1}(w - h_jj) is the constant -i kappa/2
        for f in (0.0, 0.05, 0.3):
            p = P.with_(f_pu=f, omega_c=1986.0)
            h = build_h_eff(p)
            lam = resonances(p)
            w = GRID[::50]
            amp = cavity_amplitude(p, w)
            num = np.prod([w - x for x in lam], axis=0)
            den = (w - h[1, 1]) * (w - h[2, 2])
            np.testing.assert_allclose(amp * num / den, -0.5j * p.kappa, rtol=1e-9)

    def test_peaks_sit_near_resonances(self):
        p = P.with_(f_pu=0.05)
        T = transient_transmission(p, GRID)["T"]
        peaks = find_peaks(GRID, T, min_height=0.01 * T.max())
        lam = resonances(p).real
        assert peaks.size == 3
        # maxima of |A|^2 are pulled off Re(lambda) by overlapping damped poles
        np.testing.assert_allclose(peaks, lam, atol=1.0)

    def test_up_red_shifts_and_hot_line_appears(self):
        ground = find_peaks(GRID, transient_transmission(P, GRID)["T"], min_height=0.05)
        excited = find_peaks(GRID, transient_transmission(P.with_(f_pu=0.05), GRID)["T"], min_height=0.01)
        assert excited[-1] < ground[-1]
        assert np.any(np.abs(excited - 1968.0) < 3.0)

    def test_up_resonance_monotone_in_fraction(self):
        fs = np.linspace(0, 0.25, 26)
        ups = [up_resonance(P.with_(f_pu=f)) for f in fs]
        assert np.all(np.diff(ups) < 0)

    def test_rabi_contraction_without_hot_channel(self):
        for f in (0.05, 0.1, 0.25):
            h = build_h_eff(P.with_(f_pu=f))
            h[0, 2] = h[2, 0] = 0
            vals = eigenvalues_3x3(h).values
            # drop the uncoupled 1->2 line, which can sort between the branches
            vals = vals[np.argsort(np.abs(vals - h[2, 2]))[1:]]
            outer = abs(vals[1].real - vals[0].real)
            assert outer == pytest.approx(2 * 18.5 * np.sqrt(1 - 2 * f), abs=1.0)

    def test_delta_T_zero_without_population(self):
        assert np.array_equal(delta_T_qm(P, GRID)["dT"], np.zeros(GRID.size))

    def test_delta_T_sign_convention(self):
        p = P.with_(f_pu=0.05)
        dT = delta_T_qm(p, GRID)["dT"]
        np.testing.assert_array_equal(dT, -(transient_transmission(p, GRID)["T"] - transient_transmission(P, GRID)["T"]))

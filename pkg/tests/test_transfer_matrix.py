import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polariton_engine.dielectric import DielectricModel, LorentzOscillator
from polariton_engine.fabry_perot import CavityGeometry, fp_transmission, length_for_mode
from polariton_engine.fitting import fit_dispersion
from polariton_engine.transfer_matrix import (
    Layer,
    LayerStack,
    Mirror,
    NoSplittingError,
    locate_polaritons,
    microcavity,
    polariton_absorption_vs_angle,
    quarter_wave_mirror,
    replace_spacer_medium,
    tra,
)

GRID = np.arange(1900.0, 2060.0, 0.05)
W = LorentzOscillator(2600.0, 1983.0, 3.0)
SPACER = 0.0026377328852373854  # normal-incidence mode ~1932 cm^-1, reaches 1983 near 18 degrees


def film(n_film, d=1e-4, ambient=1.0, substrate=None, **kw):
    substrate = n_film if substrate is None else substrate
    return LayerStack((Layer(np.inf, ambient), Layer(d, n_film), Layer(np.inf, substrate)), **kw)


def reference_stack(amplitude=2600.0, theta=0.0):
    medium = DielectricModel(1.375, (LorentzOscillator(amplitude, 1983.0, 3.0),))
    mirror = quarter_wave_mirror(4.0, 2.0, 3, 1983.0, high_first=False)
    return microcavity(medium, SPACER, mirror, ambient=1.4, theta=theta)


class TestClosedForms:
    def test_single_interface_normal_incidence(self):
        s = tra(film(1.5), np.array([1000.0, 2000.0]))
        np.testing.assert_allclose(s["R"], 0.04, atol=1e-14)
        np.testing.assert_allclose(s["T"], 0.96, atol=1e-14)
        np.testing.assert_allclose(s["A"], 0.0, atol=1e-14)

    @pytest.mark.parametrize("pol", ["s", "p"])
    def test_single_interface_oblique_fresnel(self, pol):
        theta = np.radians(30.0)
        n1, n2 = 1.0, 1.5
        ct = np.sqrt(1 - (np.sin(theta) / n2) ** 2)
        ci = np.cos(theta)
        if pol == "s":
            r = (n1 * ci - n2 * ct) / (n1 * ci + n2 * ct)
        else:
            r = (n2 * ci - n1 * ct) / (n2 * ci + n1 * ct)
        s = tra(film(n2, polarization=pol, theta=30.0), np.array([2000.0]))
        assert s["R"][0] == pytest.approx(r**2, abs=1e-14)
        assert s["T"][0] == pytest.approx(1 - r**2, abs=1e-14)

    def test_brewster_angle_p_reflection_vanishes(self):
        theta = np.degrees(np.arctan(1.5))
        s = tra(film(1.5, polarization="p", theta=theta), np.array([2000.0]))
        assert s["R"][0] < 1e-25

    def test_quarter_wave_mirror_admittance(self):
        stack = LayerStack((Layer(np.inf, 1.0), *quarter_wave_mirror(4.0, 2.0, 3, 1983.0), Layer(np.inf, 1.5)))
        y = (4.0 / 2.0) ** 6 * 1.5
        assert tra(stack, np.array([1983.0]))["R"][0] == pytest.approx(((1 - y) / (1 + y)) ** 2, rel=1e-12)

    def test_half_wave_film_is_absentee(self):
        d = 1 / (2 * 2.0 * 2000.0)
        s = tra(film(2.0, d=d, substrate=1.5), np.array([2000.0]))
        assert s["R"][0] == pytest.approx(0.04, abs=1e-13)


class TestSingleFilmLimit:
    def sheets(self, medium, R, L):
        m = Mirror(R, index=1.375)
        return LayerStack((Layer(np.inf, 1.375), m, Layer(L, medium), m, Layer(np.inf, 1.375)))

    def test_empty_cavity_matches_airy(self):
        L = length_for_mode(1983.0, 14, 1.375)
        T_tmm = tra(self.sheets(1.375, 0.96, L), GRID)["T"]
        T_fp = fp_transmission(CavityGeometry(length=L, r_mirror=0.96), None, GRID)["T"]
        np.testing.assert_allclose(T_tmm, T_fp, atol=1e-12)

    @pytest.mark.parametrize("R", [0.8, 0.96])
    def test_absorbing_film_matches_airy_within_two_percent(self, R):
        L = length_for_mode(1983.0, 14, 1.375)
        medium = DielectricModel(1.375, (W,))
        T_tmm = tra(self.sheets(medium, R, L), GRID)["T"]
        T_fp = fp_transmission(CavityGeometry(length=L, r_mirror=R), medium, GRID)["T"]
        rms = np.sqrt(np.mean((T_tmm - T_fp) ** 2))
        assert rms / T_fp.max() < 0.02


indices = st.floats(1.0, 4.0)
thicknesses = st.floats(1e-5, 1e-3)
lossless_layers = st.lists(st.tuples(thicknesses, indices), min_size=1, max_size=8)


@settings(max_examples=1000)
@given(
    lossless_layers,
    st.floats(1.0, 2.0),
    indices,
    st.sampled_from(["s", "p"]),
    st.sampled_from([0.0, 15.0, 30.0]),
)
def test_energy_conservation_lossless(layers, ambient, substrate, pol, theta):
    stack = LayerStack(
        (Layer(np.inf, ambient), *(Layer(d, n) for d, n in layers), Layer(np.inf, substrate)), pol, theta
    )
    s = tra(stack, np.linspace(1800.0, 2200.0, 9))
    assert np.max(np.abs(s["T"] + s["R"] - 1)) < 1e-10


absorbing_layers = st.lists(st.tuples(thicknesses, indices, st.floats(0.0, 0.5)), min_size=1, max_size=6)


def _absorbing_stack(layers, ambient, substrate, pol, theta):
    return LayerStack(
        (Layer(np.inf, ambient), *(Layer(d, complex(n, k)) for d, n, k in layers), Layer(np.inf, substrate)),
        pol,
        theta,
    )


@settings(max_examples=200)
@given(absorbing_layers, indices, indices, st.sampled_from(["s", "p"]), st.floats(0.0, 60.0))
def test_reciprocity(layers, ambient, substrate, pol, theta):
    stack = _absorbing_stack(layers, ambient, substrate, pol, theta)
    nu = np.linspace(1800.0, 2200.0, 7)
    np.testing.assert_allclose(tra(stack, nu)["T"], tra(stack.reversed(), nu)["T"], atol=1e-10)


@settings(max_examples=200)
@given(absorbing_layers, indices, indices, st.sampled_from(["s", "p"]), st.floats(0.0, 60.0))
def test_passive_absorption_non_negative(layers, ambient, substrate, pol, theta):
    s = tra(_absorbing_stack(layers, ambient, substrate, pol, theta), np.linspace(1800.0, 2200.0, 7))
    assert np.all(s["A"] >= -1e-12)
    assert np.all((s["T"] >= 0) & (s["R"] >= 0))


def test_dispersive_medium_is_reciprocal():
    stack = reference_stack(theta=12.0)
    np.testing.assert_allclose(tra(stack, GRID)["T"], tra(stack.reversed(), GRID)["T"], atol=1e-10)


class TestRejections:
    def test_gain_medium(self):
        with pytest.raises(ValueError, match="gain"):
            tra(film(complex(1.5, -0.01), substrate=1.5), GRID[:3])

    def test_evanescent_ambient(self):
        # the conserved transverse index is sin(theta) in vacuum units, so only an
        # ambient with n < 1 can be beyond its critical angle
        with pytest.raises(ValueError, match="evanescent"):
            tra(film(1.5, ambient=0.8, theta=60.0), GRID[:3])

    def test_absorbing_half_space(self):
        with pytest.raises(ValueError):
            tra(film(1.5, ambient=complex(1.5, 0.1)), GRID[:3])

    def test_structure(self):
        with pytest.raises(ValueError):
            LayerStack((Layer(np.inf, 1.0), Layer(np.inf, 1.5)))
        with pytest.raises(ValueError):
            LayerStack((Layer(np.inf, 1.0), Layer(0.0, 1.5), Layer(np.inf, 1.5)))
        with pytest.raises(ValueError):
            LayerStack((Layer(1.0, 1.0), Layer(1e-4, 1.5), Layer(np.inf, 1.5)))
        with pytest.raises(ValueError):
            film(1.5, theta=90.0)


class TestReferenceStack:
    def test_absorption_peak_between_polaritons_at_resonance(self):
        stack = reference_stack(theta=18.0)
        lp, up = locate_polaritons(stack, GRID, 1983.0)
        s = tra(stack, GRID)
        inside = (s.grid > lp + 5) & (s.grid < up - 5)
        x, A = s.grid[inside], s["A"][inside]
        # local maxima of the absorption between the branches, clustered at the bare line
        i = np.flatnonzero((A[1:-1] > A[:-2]) & (A[1:-1] > A[2:])) + 1
        assert i.size > 0
        assert np.min(np.abs(x[i] - 1983.0)) < 3.0

    def test_extremal_angles_agree(self):
        sweep = polariton_absorption_vs_angle(reference_stack(), np.arange(0.0, 36.0), GRID, 1983.0)
        assert abs(sweep.theta_min_splitting - sweep.theta_max_absorption) <= 1.0
        assert 15.0 <= sweep.theta_min_splitting <= 21.0

    def test_min_splitting_matches_fitted_coupling(self):
        sweep = polariton_absorption_vs_angle(reference_stack(), np.arange(0.0, 30.0), GRID, 1983.0)
        ok = np.isfinite(sweep.e_lp)
        fit = fit_dispersion(sweep.theta[ok], sweep.e_lp[ok], sweep.e_up[ok])
        assert fit.converged
        assert np.nanmin(sweep.splitting) == pytest.approx(2 * fit.as_dict()["g0"], rel=0.05)

    def test_uncoupled_spacer_reports_no_splitting(self):
        stack = reference_stack(amplitude=0.0, theta=18.0)
        with pytest.raises(NoSplittingError):
            locate_polaritons(stack, GRID, 1983.0)
        with pytest.raises(NoSplittingError):
            polariton_absorption_vs_angle(stack, [16.0, 18.0, 20.0], GRID, 1983.0)

    def test_unresolved_angles_become_nan_with_diagnostics(self):
        sweep = polariton_absorption_vs_angle(reference_stack(), [0.0, 18.0], GRID, 1983.0)
        assert np.isnan(sweep.e_lp[0]) and np.isfinite(sweep.e_lp[1])
        assert len(sweep.diagnostics) == 1

    def test_replace_spacer_medium_targets_thickest_layer(self):
        stack = reference_stack()
        swapped = replace_spacer_medium(stack, 1.375)
        spacers = [el for el in swapped.layers if isinstance(el, Layer) and el.thickness == SPACER]
        assert spacers[0].medium == 1.375

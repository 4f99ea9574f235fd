import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchwaves import spectral, wave
from branchwaves.errors import ContourResolutionError, DomainError, SplittingError
from branchwaves.model import Params, wave_jacobian
from branchwaves.odeint import IntegratorOptions, integrate_complex


@pytest.fixture(scope="module")
def setup():
    return spectral.make_setup()


@pytest.fixture(scope="module")
def critical_wave(setup):
    return setup.wave


class TestSetup:
    def test_defaults(self, setup):
        assert setup.params.c == 2.0
        assert setup.params.r == 0.0
        assert setup.w_exp == pytest.approx(1.0)
        zs = setup.wave.trajectory.zs
        assert setup.L >= 30.0
        assert setup.L > -zs[0]
        assert setup.L > zs[-1]

    def test_settled_at_ends(self, setup):
        for z_end in (-setup.L, setup.L):
            a, _ = setup.coefficients(z_end)
            assert abs(a) <= 1e-8 * setup.wave.a_max

    def test_short_domain_rejected(self, critical_wave):
        # the seed ramp of the shot wave is still ~1e-7 at z = -30
        with pytest.raises(DomainError):
            spectral.make_setup(wave=critical_wave, L=30.0)

    def test_bad_weight(self, critical_wave):
        with pytest.raises(DomainError):
            spectral.make_setup(wave=critical_wave, w_exp=0.0)

    def test_extension_by_limits(self, setup):
        zs = setup.wave.trajectory.zs
        a, i = setup.coefficients(zs[0] - 1.0)
        assert a == 0.0
        assert i == setup.wave.i_minus_inf
        a, i = setup.coefficients(zs[-1] + 1.0)
        assert a == 0.0
        assert i == setup.wave.i_plus_inf

    def test_table_matches_scalar(self, setup):
        zq = np.linspace(-setup.L, setup.L, 37)
        a_tab, i_tab = setup.coefficient_table(zq)
        for k, z in enumerate(zq):
            a, i = setup.coefficients(float(z))
            assert a_tab[k] == pytest.approx(a, abs=1e-14)
            assert i_tab[k] == pytest.approx(i, abs=1e-14)


class TestLinearizationMatrix:
    def test_limit_eigenvalues(self, setup):
        g = 0.7 + 0.3j
        w, c = setup.w_exp, setup.params.c
        for z_end, i_lim in (
            (setup.L, setup.wave.i_plus_inf),
            (-setup.L, setup.wave.i_minus_inf),
        ):
            m = spectral.linearization_matrix(z_end, g, setup)
            got = np.sort_complex(np.linalg.eigvals(m))
            root = cmath.sqrt(c * c / 4.0 + g + i_lim - 1.0)
            want = np.sort_complex(
                np.array([g / c + w, w - c / 2.0 + root, w - c / 2.0 - root])
            )
            assert np.max(np.abs(got - want)) < 1e-12

    def test_critical_limits_at_hand_gamma(self, setup):
        # c = 2, w = 1, gamma = 4: shifted roots are gamma/2 + 1 and
        # +-sqrt(gamma) ahead of the front, +-sqrt(2 + gamma) behind it
        g = 4.0
        ahead = np.sort_complex(
            np.linalg.eigvals(spectral.linearization_matrix(setup.L, g, setup))
        )
        assert ahead == pytest.approx(np.array([-2.0, 2.0, 3.0]), abs=1e-6)
        behind = np.sort_complex(
            np.linalg.eigvals(spectral.linearization_matrix(-setup.L, g, setup))
        )
        want = np.sort_complex(np.array([3.0, -math.sqrt(6), math.sqrt(6)]))
        assert behind == pytest.approx(want, abs=1e-12)

    def test_gamma_zero_is_weighted_jacobian(self, setup):
        a0, i0 = setup.coefficients(0.0)
        m = spectral.linearization_matrix(0.0, 0.0, setup)
        j = wave_jacobian((a0, 0.0, i0), setup.params)
        assert np.max(np.abs(m - j - setup.w_exp * np.eye(3))) == 0.0

    def test_outside_domain(self, setup):
        with pytest.raises(DomainError):
            spectral.linearization_matrix(setup.L + 1.0, 1.0, setup)
        with pytest.raises(DomainError):
            spectral.linearization_matrix(-setup.L - 1.0, 1.0, setup)


class TestLimitSplitting:
    def test_hand_values(self, setup):
        ls = spectral.limit_splitting(1.0, setup)
        s3 = math.sqrt(3.0)
        assert np.allclose(ls.nu_plus, [1.5, 1.0, -1.0], atol=1e-6)
        assert np.allclose(ls.nu_minus, [1.5, s3, -s3], atol=1e-9)
        assert ls.k_minus == 2
        assert ls.k_plus == 1

    def test_basis_solves_limit_systems(self, setup):
        g = 2.5 + 1.5j
        ls = spectral.limit_splitting(g, setup)
        m_minus = spectral.linearization_matrix(-setup.L, g, setup)
        for v, nu in zip(ls.unstable_minus, ls.nu_minus[:2]):
            assert np.max(np.abs(m_minus @ v - nu * v)) < 1e-9
        m_plus = spectral.linearization_matrix(setup.L, g, setup)
        x = ls.stable_plus
        assert np.max(np.abs(m_plus @ x - ls.nu_plus[2] * x)) < 1e-9

    @settings(max_examples=100, deadline=None)
    @given(
        re=st.floats(min_value=0.0, max_value=900.0),
        im=st.floats(min_value=-900.0, max_value=900.0),
    )
    def test_counts_and_conjugates(self, setup, re, im):
        g = complex(re, im)
        if abs(g) < 1e-2 or abs(g - 2.0) < 1e-2:
            return
        ls = spectral.limit_splitting(g, setup)
        assert ls.k_minus == 2
        assert ls.k_plus == 1
        bar = spectral.limit_splitting(g.conjugate(), setup)
        for a, b in zip(ls.nu_minus + ls.nu_plus, bar.nu_minus + bar.nu_plus):
            assert b == pytest.approx(a.conjugate(), abs=1e-12)

    def test_left_half_plane_rejected(self, setup):
        with pytest.raises(DomainError):
            spectral.limit_splitting(-1.0, setup)

    def test_gamma_zero_rejected(self, setup):
        with pytest.raises(DomainError):
            spectral.limit_splitting(0.0, setup)

    def test_weight_below_band(self, critical_wave):
        # a vanishing weight leaves the front i-decay on the boundary
        tiny = spectral.make_setup(wave=critical_wave, w_exp=1e-12)
        with pytest.raises(SplittingError):
            spectral.limit_splitting(1.0, tiny)

    def test_eigenvector_collision(self, setup):
        # at gamma = 2 the rear (1, lambda, *) family degenerates against
        # the i-mode; the wedge used by evans is immune
        with pytest.raises(SplittingError):
            spectral.limit_splitting(2.0, setup)
        assert spectral.evans(2.0, setup) != 0


class TestEvans:
    def test_nonzero_at_four(self, setup):
        e = spectral.evans(4.0, setup)
        assert abs(e) > 0.1
        assert abs(e.imag) < 1e-10 * abs(e)

    def test_matches_adaptive_route(self, setup):
        # independent propagation of the same two-sided pairing with the
        # generic adaptive integrator
        w, p, L = setup.w_exp, setup.params, setup.L
        opts = IntegratorOptions(rel_tol=1e-8, abs_tol=1e-11, max_step=0.5)
        eye = np.eye(3, dtype=complex)
        for g in (4.0 + 0j, 3j):
            nu_m, nu_p = spectral._checked_rates(g, setup)
            lam2 = nu_m[1] - w

            def rear(z, v):
                a, i = setup.coefficients(z)
                m2 = spectral._wedge_square(
                    spectral._weighted_matrix(a, i, g, p, w)
                )
                return (m2 - (nu_m[0] + nu_m[1]) * eye) @ v

            v0 = np.array([0.0, -1.0, -lam2], dtype=complex)
            tv = integrate_complex(rear, v0, (-L, 0.0), opts)

            lam3 = nu_p[2] - w
            x0 = np.array(
                [1.0, lam3, (setup.wave.i_plus_inf + p.r) / (g - p.c * lam3)],
                dtype=complex,
            )

            def front(z, x):
                a, i = setup.coefficients(z)
                m = spectral._weighted_matrix(a, i, g, p, w)
                return (m - nu_p[2] * eye) @ x

            tx = integrate_complex(front, x0, (L, 0.0), opts)
            v, x = tv.states[-1], tx.states[-1]
            reference = v[0] * x[2] - v[1] * x[1] + v[2] * x[0]
            got = spectral.evans(g, setup)
            assert abs(got - reference) < 1e-4 * abs(reference)

    def test_step_convergence(self, setup):
        g = 3j
        coarse = spectral.evans(g, setup, step=0.2)
        fine = spectral.evans(g, setup, step=0.05)
        finer = spectral.evans(g, setup, step=0.025)
        assert abs(coarse - fine) < 1e-3 * abs(fine)
        assert abs(finer - fine) < 1e-6 * abs(fine)

    def test_conjugate_symmetry(self, setup):
        rng = np.random.default_rng(20260816)
        worst = 0.0
        for _ in range(50):
            g = complex(rng.uniform(0.0, 100.0), rng.uniform(-100.0, 100.0))
            if abs(g) < 1e-2:
                continue
            e = spectral.evans(g, setup)
            e_bar = spectral.evans(g.conjugate(), setup)
            worst = max(worst, abs(e_bar - e.conjugate()) / abs(e))
        assert worst < 1e-8

    def test_domain_extension_invariance(self, setup):
        wider = spectral.make_setup(wave=setup.wave, L=setup.L + 5.0)
        for g in (4.0 + 0j, 0.3 + 7.0j):
            e = spectral.evans(g, setup)
            assert abs(spectral.evans(g, wider) - e) < 1e-4 * abs(e)

    def test_finite_at_contour_extremes(self, setup):
        for g in (1000j, 1e-3 * 1j, 1000.0 + 0j):
            e = spectral.evans(g, setup)
            assert np.isfinite(e)
            assert e != 0

    def test_invalid_inputs(self, setup):
        with pytest.raises(DomainError):
            spectral.evans(-0.5, setup)
        with pytest.raises(DomainError):
            spectral.evans(1.0, setup, step=0.0)


class TestEvansSample:
    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            spectral.EvansSample(1.0, complex(math.nan, 0.0))
        with pytest.raises(DomainError):
            spectral.EvansSample(complex(math.inf, 0.0), 1.0)


class TestContour:
    def test_geometry_defaults(self):
        pts = spectral.contour_of_S()
        assert pts[0] == -1000j
        assert pts[-1] == pts[0]
        assert pts.real.min() >= -1e-12
        mods = np.abs(pts)
        assert mods.min() >= 1e-3 * (1.0 - 1e-12)
        assert mods.max() <= 1000.0 * (1.0 + 1e-12)

    def test_orientation_and_turning_points(self):
        pts = spectral.contour_of_S(0.1, 10.0, 32)
        # outer arc runs counterclockwise from -i r_max
        assert pts[1].real > 0 and pts[1].imag > pts[0].imag
        k_top = int(np.argmin(np.abs(pts - 10j)))
        assert pts[k_top] == 10j
        # descent to the inner radius happens on the imaginary axis
        seg = pts[k_top : k_top + 3]
        assert np.all(seg.real == 0.0)
        assert np.all(np.diff(seg.imag) < 0)

    def test_log_density_on_segments(self):
        pts = spectral.contour_of_S(1e-3, 1000.0, 64)
        on_axis = pts[(pts.real == 0.0) & (pts.imag > 0)]
        mods = np.abs(on_axis)
        ratios = mods[:-1] / mods[1:]
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_validation(self):
        with pytest.raises(DomainError):
            spectral.contour_of_S(10.0, 1.0)
        with pytest.raises(DomainError):
            spectral.contour_of_S(base_n=4)


def _circle(center, radius, n):
    th = np.linspace(0.0, 2.0 * math.pi, n + 1)
    pts = center + radius * np.exp(1j * th)
    pts[-1] = pts[0]
    return pts


class TestWinding:
    def test_synthetic_identity(self):
        wind, max_step = spectral.winding_number(
            None, _circle(0.5, 1.0, 32), fn=lambda g: g
        )
        assert wind == 1
        assert max_step <= math.pi / 3.0

    def test_zero_free_function(self):
        wind, _ = spectral.winding_number(
            None, _circle(0.5, 1.0, 32), fn=lambda g: g - 5.0
        )
        assert wind == 0

    def test_double_zero(self):
        wind, _ = spectral.winding_number(
            None, _circle(0.5, 1.0, 64), fn=lambda g: (g - 0.5) ** 2
        )
        assert wind == 2

    def test_refinement_resolves_coarse_contour(self):
        # five points around the circle leave raw steps above pi/3
        wind, max_step = spectral.winding_number(
            None, _circle(0.5, 1.0, 5), fn=lambda g: g
        )
        assert wind == 1
        assert max_step <= math.pi / 3.0

    def test_unresolvable_phase(self):
        # a hard sign jump keeps a pi argument step at every bisection depth
        with pytest.raises(ContourResolutionError):
            spectral.winding_number(
                None,
                _circle(0.5, 1.0, 8),
                fn=lambda g: 1.0 if g.imag < 0.25 else -1.0,
            )

    def test_wave_contour_is_zero_free(self, setup):
        contour = spectral.contour_of_S(0.1, 10.0, 48)
        wind, max_step = spectral.winding_number(setup, contour)
        assert wind == 0
        assert max_step <= math.pi / 3.0

    def test_validation(self, setup):
        with pytest.raises(DomainError):
            spectral.winding_number(None, _circle(0.5, 1.0, 16))
        open_path = _circle(0.5, 1.0, 16)
        open_path[-1] = open_path[-1] + 0.1
        with pytest.raises(DomainError):
            spectral.winding_number(setup, open_path)
        with pytest.raises(DomainError):
            spectral.winding_number(setup, np.array([1.0 + 0j, 2.0 + 0j]))

    def test_non_finite_sample_rejected(self):
        with pytest.raises(DomainError):
            spectral.winding_number(
                None, _circle(0.5, 1.0, 8), fn=lambda g: math.nan
            )

"""Spinodal bounds, saturation pair, region classification and fractions."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from vdwrelax import thermo
from vdwrelax.equilibrium import (
    MixtureState,
    Region,
    classify,
    energy_difference_residual,
    maxwell_area_residual,
    maxwell_construction,
    mixture_free_energy,
    spinodal_bounds,
    volume_fractions,
)
from vdwrelax.errors import DegenerateMixture, DomainError, NoSpinodal
from vdwrelax.thermo import ThermoParams

SUBCRITICAL = [0.3, 0.5, 0.7, 0.85, 0.9, 0.95, 0.99, 0.999]


class TestSpinodal:
    def test_reference_values(self, spin):
        assert spin.rho_minus == pytest.approx(0.5810799446067126, abs=1e-12)
        assert spin.rho_plus == pytest.approx(1.488804708901845, abs=1e-12)

    @pytest.mark.parametrize("T", SUBCRITICAL)
    def test_roots_of_p_prime(self, T):
        p = ThermoParams(T)
        s = spinodal_bounds(p)
        assert s.rho_minus < p.critical_density < s.rho_plus
        for r in (s.rho_minus, s.rho_plus):
            assert abs(thermo.pressure_derivative(r, p)) < 1e-9
        mid = np.linspace(s.rho_minus, s.rho_plus, 50)[1:-1]
        assert np.all(thermo.pressure_derivative(mid, p) < 0.0)

    @pytest.mark.parametrize("T", [1.0, 1.2, 5.0])
    def test_supercritical(self, T):
        with pytest.raises(NoSpinodal):
            spinodal_bounds(ThermoParams(T))

    def test_local_extrema_of_isotherm(self, params, spin):
        # brute-force oracle: extremum locations of p on a fine grid
        lo = minimize_scalar(lambda r: -thermo.pressure(r, params), bounds=(0.2, 1.0), method="bounded",
                             options=dict(xatol=1e-10))
        hi = minimize_scalar(lambda r: thermo.pressure(r, params), bounds=(1.0, 2.5), method="bounded",
                             options=dict(xatol=1e-10))
        assert lo.x == pytest.approx(spin.rho_minus, abs=1e-6)
        assert hi.x == pytest.approx(spin.rho_plus, abs=1e-6)


class TestMaxwell:
    def test_reference_values(self, sat):
        assert sat.rho1_star == pytest.approx(0.319729, abs=1e-5)
        assert sat.rho2_star == pytest.approx(1.807140, abs=1e-5)
        assert sat.p_star == pytest.approx(0.504492, abs=1e-5)
        assert abs(sat.mu_star) == pytest.approx(3.977178, abs=1e-4)

    def test_high_precision(self, sat):
        assert sat.rho1_star == pytest.approx(0.3197299645188561, abs=1e-11)
        assert sat.rho2_star == pytest.approx(1.807140327336405, abs=1e-11)
        assert sat.p_star == pytest.approx(0.5044916497874876, abs=1e-11)
        assert sat.mu_star == pytest.approx(-3.977178511, abs=1e-8)

    @pytest.mark.parametrize("T", SUBCRITICAL)
    def test_equalities_and_ordering(self, T):
        p = ThermoParams(T)
        s = spinodal_bounds(p)
        m = maxwell_construction(p, s)
        assert 0.0 < m.rho1_star < s.rho_minus < s.rho_plus < m.rho2_star < p.rho_max
        p1, p2 = thermo.pressure(m.rho1_star, p), thermo.pressure(m.rho2_star, p)
        mu1, mu2 = thermo.chemical_potential(m.rho1_star, p), thermo.chemical_potential(m.rho2_star, p)
        assert abs(p1 - p2) < 1e-9 * max(1.0, abs(p1))
        assert abs(mu1 - mu2) < 1e-9 * max(1.0, abs(mu1))
        assert p1 == pytest.approx(m.p_star, abs=1e-9)
        assert mu1 == pytest.approx(m.mu_star, abs=1e-9)

    @pytest.mark.parametrize("T", [0.5, 0.85, 0.95])
    def test_equal_area_and_common_tangent(self, T):
        p = ThermoParams(T)
        m = maxwell_construction(p)
        assert abs(maxwell_area_residual(m, p)) < 1e-9
        assert abs(energy_difference_residual(m, p)) < 1e-9

    def test_equal_area_by_quadrature(self, params, sat):
        # independent trapezoid quadrature of (p - p*) d(1/rho)
        v = np.linspace(1.0 / sat.rho2_star, 1.0 / sat.rho1_star, 400001)
        integrand = thermo.pressure(1.0 / v, params) - sat.p_star
        area = np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(v))
        assert abs(area) < 1e-8

    def test_brute_force_scan_near_critical(self):
        # oracle: pressure-level bisection with scan-based branch inversion
        p = ThermoParams(0.99)
        s = spinodal_bounds(p)
        m = maxwell_construction(p, s)
        gas = np.linspace(1e-3, s.rho_minus, 200001)
        liq = np.linspace(s.rho_plus, 2.9, 200001)
        lo, hi = thermo.pressure(s.rho_plus, p), thermo.pressure(s.rho_minus, p)
        for _ in range(60):
            ps = 0.5 * (lo + hi)
            rg = np.interp(ps, thermo.pressure(gas, p), gas)
            rl = np.interp(ps, thermo.pressure(liq, p), liq)
            gap = thermo.chemical_potential(rg, p) - thermo.chemical_potential(rl, p)
            lo, hi = (ps, hi) if gap < 0 else (lo, ps)
        assert m.p_star == pytest.approx(ps, abs=1e-8)
        assert m.rho1_star == pytest.approx(rg, abs=1e-6)
        assert m.rho2_star == pytest.approx(rl, abs=1e-6)

    def test_bracketed_by_lower_temperature(self, sat):
        m = maxwell_construction(ThermoParams(0.9))
        assert sat.rho1_star < m.rho1_star < m.rho2_star < sat.rho2_star
        assert m.rho1_star == pytest.approx(0.42574163772, abs=1e-9)
        assert m.rho2_star == pytest.approx(1.65727021200, abs=1e-9)

    def test_supercritical(self):
        with pytest.raises(NoSpinodal):
            maxwell_construction(ThermoParams(1.05))

    def test_minimises_mixture_energy(self, params, sat):
        # for rho inside the pair no other two-phase split beats the saturation pair
        rng = np.random.default_rng(7)
        rho = 1.0
        best = mixture_free_energy(MixtureState(rho, sat.rho1_star, sat.rho2_star), params)
        r1 = rng.uniform(0.01, rho - 1e-3, 10000)
        r2 = rng.uniform(rho + 1e-3, 2.99, 10000)
        al1 = (rho - r2) / (r1 - r2)
        F = al1 * thermo.specific_free_energy(r1, params) + (1 - al1) * thermo.specific_free_energy(r2, params)
        assert np.all(F >= best - 1e-12)
        assert best < thermo.specific_free_energy(rho, params)


class TestClassify:
    def test_regions(self, sat, spin):
        cases = [(0.1, Region.PURE_GAS), (0.45, Region.METASTABLE_GAS), (1.0, Region.SPINODAL),
                 (1.6, Region.METASTABLE_LIQUID), (2.5, Region.PURE_LIQUID)]
        for rho, region in cases:
            assert classify(rho, sat, spin) is region

    def test_tie_breaking(self, sat, spin):
        assert classify(spin.rho_minus, sat, spin) is Region.SPINODAL
        assert classify(spin.rho_plus, sat, spin) is Region.SPINODAL
        assert classify(sat.rho1_star, sat, spin) is Region.METASTABLE_GAS
        assert classify(sat.rho2_star, sat, spin) is Region.METASTABLE_LIQUID

    def test_tiling(self, sat, spin):
        grid = np.linspace(1e-6, 3.0 - 1e-6, 20001)
        order = [list(Region).index(classify(r, sat, spin)) for r in grid]
        # monotone sequence visiting every region exactly once
        assert order == sorted(order)
        assert set(order) == set(range(5))

    @given(st.floats(1e-6, 3.0 - 1e-6))
    def test_total(self, rho):
        p = ThermoParams(0.85)
        s = spinodal_bounds(p)
        m = maxwell_construction(p, s)
        assert isinstance(classify(rho, m, s), Region)


class TestFractions:
    def test_values(self):
        a1, a2 = volume_fractions(MixtureState(1.0, 0.5, 1.5))
        assert (a1, a2) == (0.5, 0.5)

    @given(r1=st.floats(0.01, 1.4), gap=st.floats(1e-3, 1.5), t=st.floats(0.0, 1.0))
    def test_sum_and_mass(self, r1, gap, t):
        r2 = r1 + gap
        rho = r1 + t * (r2 - r1)
        a1, a2 = volume_fractions(MixtureState(rho, r1, r2))
        assert a1 + a2 == pytest.approx(1.0, abs=1e-14)
        assert a1 * r1 + a2 * r2 == pytest.approx(rho, rel=1e-12)
        assert -1e-12 <= a1 <= 1 + 1e-12

    def test_degenerate(self):
        with pytest.raises(DegenerateMixture):
            volume_fractions(MixtureState(1.0, 1.0, 1.0))

    def test_validate(self, params):
        with pytest.raises(ValueError):
            MixtureState(1.0, 1.2, 1.5).validate(params)
        with pytest.raises(ValueError):
            MixtureState(1.0, 1.5, 0.5).validate(params)
        with pytest.raises(DomainError):
            MixtureState(1.0, 0.5, 3.5).validate(params)

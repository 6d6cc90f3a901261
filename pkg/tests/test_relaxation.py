"""Relaxation source, sub-cycled Euler integrator and equilibrium search."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vdwrelax import thermo
from vdwrelax.equilibrium import MixtureState
from vdwrelax.errors import DomainError, StiffnessOverflow
from vdwrelax.relaxation import (
    EquilibriumKind,
    RelaxationSettings,
    classify_limit,
    euler_substep,
    find_equilibrium,
    iter_substeps,
    mixture_alpha1,
    rate_jacobian_norm,
    relax_step,
    source_rhs,
    substep_limit,
)
from vdwrelax.thermo import ThermoParams

PARAMS = {T: ThermoParams(T) for T in (0.7, 0.85, 0.95)}


def free_energy(state, params):
    a1 = mixture_alpha1(state)
    return a1 * thermo.specific_free_energy(state.rho1, params) + (1 - a1) * thermo.specific_free_energy(state.rho2, params)


def rates_oracle(rho, r1, r2, params):
    p1, p2 = thermo.pressure(r1, params), thermo.pressure(r2, params)
    mu1, mu2 = thermo.chemical_potential(r1, params), thermo.chemical_potential(r2, params)
    P = (rho - r1) * (rho - r2)
    return -P * (r2 * (mu2 - mu1) + p1 - p2), P * (r1 * (mu1 - mu2) - p1 + p2)


@st.composite
def admissible_states(draw, lo=0.02, hi=2.8):
    r1 = draw(st.floats(lo, hi - 0.02))
    r2 = draw(st.floats(r1 + 0.01, hi))
    t = draw(st.floats(0.01, 0.99))
    return MixtureState(r1 + t * (r2 - r1), r1, r2)


class TestSourceRhs:
    def test_matches_oracle(self, params):
        for rho, r1, r2 in [(1.0, 0.5, 1.6), (1.6, 0.3, 1.9), (0.4, 0.2, 2.0)]:
            r = source_rhs(MixtureState(rho, r1, r2), params)
            e1, e2 = rates_oracle(rho, r1, r2, params)
            assert r.drho1_dt == pytest.approx(e1, rel=1e-13)
            assert r.drho2_dt == pytest.approx(e2, rel=1e-13)
            assert r.drho_dt == 0.0

    def test_zero_at_saturation_pair(self, params, sat):
        r = source_rhs(MixtureState(1.0, sat.rho1_star, sat.rho2_star), params)
        assert r.norm < 1e-12

    def test_rounded_saturation_pair_is_only_near_rest(self, params):
        # six printed digits leave a residual of order 1e-6
        r = source_rhs(MixtureState(1.0, 0.319729, 1.807140), params)
        assert 1e-8 < r.norm < 1e-5

    @pytest.mark.parametrize("rho", [0.3, 0.5, 1.0, 1.7, 2.2])
    def test_zero_on_pure_states(self, params, rho):
        assert source_rhs(MixtureState(rho, rho, 2.5), params).norm == 0.0
        assert source_rhs(MixtureState(rho, 0.1, rho), params).norm == 0.0

    def test_fixed_points_on_grid(self, params, sat):
        # scanning a grid of states, near-zero rates occur only at pure or saturated states
        grid = np.linspace(0.05, 2.9, 40)
        for rho in grid[5:-5]:
            for r1 in grid[grid < rho]:
                for r2 in grid[grid > rho]:
                    n = source_rhs(MixtureState(rho, r1, r2), params).norm
                    if n < 1e-10:
                        near_sat = abs(r1 - sat.rho1_star) < 0.05 and abs(r2 - sat.rho2_star) < 0.05
                        assert near_sat or min(rho - r1, r2 - rho) < 1e-12

    def test_domain(self, params):
        with pytest.raises(DomainError):
            source_rhs(MixtureState(1.0, 0.0, 1.5), params)

    @given(admissible_states())
    def test_jacobian_norm_against_finite_differences(self, s):
        params = PARAMS[0.85]
        h = 1e-7
        cols = []
        for k in range(2):
            dp = [s.rho1, s.rho2]
            dm = [s.rho1, s.rho2]
            dp[k] += h
            dm[k] -= h
            fp = rates_oracle(s.rho, *dp, params)
            fm = rates_oracle(s.rho, *dm, params)
            cols.append([(fp[i] - fm[i]) / (2 * h) for i in range(2)])
        J = np.array(cols).T
        L = np.abs(J).sum(axis=1).max()
        assert rate_jacobian_norm(s, params) == pytest.approx(L, rel=1e-4, abs=1e-6)


class TestEuler:
    def test_one_step_oracle(self, params):
        s = MixtureState(1.0, 0.5, 1.6)
        settings = RelaxationSettings(1e-3)
        h = 1e-6
        e1, e2 = rates_oracle(1.0, 0.5, 1.6, params)
        out = euler_substep(s, h, settings, params)
        assert out.rho1 == pytest.approx(0.5 + h / 1e-3 * e1, rel=1e-14)
        assert out.rho2 == pytest.approx(1.6 + h / 1e-3 * e2, rel=1e-14)
        assert out.rho == s.rho

    def test_substep_limit_formula(self, params):
        s = MixtureState(1.0, 0.5, 1.6)
        settings = RelaxationSettings(1e-3, stiffness_limit=1e9)
        r = source_rhs(s, params)
        expected = 0.1 * min(0.5, 3.0 - 1.6, 1.1) * 1e-3 / r.norm
        assert substep_limit(s, settings, params) == pytest.approx(expected, rel=1e-14)

    def test_substeps_respect_limit(self, params):
        s = MixtureState(1.0, 0.5, 1.6)
        settings = RelaxationSettings(1e-3)
        prev, total = s, 0.0
        for h, out in iter_substeps(s, 0.01, settings, params):
            assert h <= substep_limit(prev, settings, params) * (1 + 1e-12)
            total += h
            prev = out
        assert total == pytest.approx(0.01, rel=1e-12)

    @pytest.mark.parametrize("r1, r2", [(1.0, 2.0), (0.2, 1.0)])
    def test_pure_rest_point_is_fixed(self, params, r1, r2):
        s = MixtureState(1.0, r1, r2)
        assert relax_step(s, 0.5, RelaxationSettings(1e-3), params) == s

    def test_relax_step_approaches_saturation(self, params, sat):
        out = relax_step(MixtureState(1.0, 0.5, 1.6), 0.05, RelaxationSettings(1e-3), params)
        assert out.rho1 == pytest.approx(sat.rho1_star, abs=1e-9)
        assert out.rho2 == pytest.approx(sat.rho2_star, abs=1e-9)

    def test_infinite_epsilon_is_identity(self, params):
        s = MixtureState(1.0, 0.5, 1.6)
        assert relax_step(s, 1.0, RelaxationSettings(math.inf), params) == s

    def test_epsilon_scaling(self, params):
        # relaxing over dt with epsilon equals relaxing over k dt with k epsilon
        s = MixtureState(1.0, 0.5, 1.6)
        a = relax_step(s, 1e-3, RelaxationSettings(1e-3), params)
        b = relax_step(s, 1e-2, RelaxationSettings(1e-2), params)
        assert a.rho1 == pytest.approx(b.rho1, rel=1e-12)
        assert a.rho2 == pytest.approx(b.rho2, rel=1e-12)

    def test_overflow(self, params):
        with pytest.raises(StiffnessOverflow):
            relax_step(MixtureState(1.0, 0.5, 1.6), 10.0, RelaxationSettings(1e-6, max_substeps=10), params)

    def test_invalid_settings(self):
        for kw in (dict(epsilon=0.0), dict(epsilon=1.0, max_substep_rate=0.0),
                   dict(epsilon=1.0, max_substeps=0), dict(epsilon=1.0, projection_delta=0.0)):
            with pytest.raises(ValueError):
                RelaxationSettings(**kw)

    @given(admissible_states())
    def test_ordering_and_bracketing_preserved(self, s):
        params = PARAMS[0.85]
        out = relax_step(s, 1e-3, RelaxationSettings(1e-3), params)
        assert out.rho1 <= s.rho <= out.rho2
        assert 0.0 < out.rho1 and out.rho2 < params.rho_max
        assert out.rho == s.rho


class TestDissipation:
    @pytest.mark.parametrize("T", sorted(PARAMS))
    @given(s=admissible_states(), eps=st.sampled_from([1e-4, 1e-3, 1e-2]))
    def test_free_energy_non_increasing(self, T, s, eps):
        params = PARAMS[T]
        settings = RelaxationSettings(eps)
        F = free_energy(s, params)
        for _, out in iter_substeps(s, 20 * eps, settings, params):
            Fn = free_energy(out, params)
            assert Fn <= F + 1e-12
            F = Fn


class TestFindEquilibrium:
    settings = RelaxationSettings(1e-3)

    def test_metastable_liquid_seed(self, params, sat):
        out, kind = find_equilibrium(MixtureState(1.6, 0.319729, 1.807140), self.settings, params)
        assert kind is EquilibriumKind.MIXTURE
        assert out.rho1 == pytest.approx(sat.rho1_star, abs=1e-6)
        assert out.rho2 == pytest.approx(sat.rho2_star, abs=1e-6)

    def test_spinodal_escapes_to_mixture(self, params, sat):
        out, kind = find_equilibrium(MixtureState(1.0, 0.99, 1.01), self.settings, params)
        assert kind is EquilibriumKind.MIXTURE
        assert out.rho1 == pytest.approx(sat.rho1_star, abs=1e-6)

    def test_pure_start(self, params):
        _, kind = find_equilibrium(MixtureState(0.5, 0.5 - 1e-6, 0.5 + 1e-6), self.settings, params)
        assert kind.is_pure

    def test_pure_gas_attractor(self, params):
        # stable gas density: the phase close to rho absorbs the other
        out, kind = find_equilibrium(MixtureState(0.3, 0.3 - 1e-3, 1.5), self.settings, params)
        assert kind is EquilibriumKind.PURE_1
        assert out.rho1 == pytest.approx(0.3, abs=1e-5)

    def test_pure_liquid_attractor(self, params):
        out, kind = find_equilibrium(MixtureState(2.0, 0.5, 2.0 + 1e-3), self.settings, params)
        assert kind is EquilibriumKind.PURE_2

    def test_metastable_without_seed_stays_pure(self, params):
        _, kind = find_equilibrium(MixtureState(1.7, 1.7 - 1e-3, 1.7 + 1e-3), self.settings, params)
        assert kind.is_pure

    @pytest.mark.parametrize("rho, seed", [(r, s) for r in (0.3, 0.5, 1.0, 1.2, 1.7, 2.2)
                                           for s in (0.1, 0.35, 1.9, 2.4) if abs(s - r) > 0.2])
    def test_attractor_or_repeller(self, params, rho, seed):
        # a small seed of density `seed` in a pure phase rho1 ~ rho shrinks exactly
        # when the seed lies above the tangent of f at rho1
        r1 = rho - 1e-4 if seed > rho else rho + 1e-4
        gap = (thermo.specific_free_energy(seed, params) - thermo.specific_free_energy(r1, params)
               - thermo.chemical_potential(r1, params) * (seed - r1))
        lo, hi = sorted((r1, seed))
        r = source_rhs(MixtureState(rho, lo, hi), params)
        toward = r.drho1_dt if r1 < rho else -r.drho2_dt
        assert np.sign(toward) == np.sign(gap)

    def test_classify_limit(self):
        assert classify_limit(MixtureState(1.0, 1.0, 2.0)) is EquilibriumKind.PURE_1
        assert classify_limit(MixtureState(1.0, 0.5, 1.0)) is EquilibriumKind.PURE_2
        assert classify_limit(MixtureState(1.0, 0.5, 2.0)) is EquilibriumKind.MIXTURE

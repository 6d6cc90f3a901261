"""Two-phase equilibrium of a van der Waals fluid.

Below the critical temperature the isotherm p(rho) has a decreasing branch
(the spinodal zone) bounded by the extrema rho_minus < rho_plus.  Saturated
states are the pair rho1_star < rho2_star carrying equal pressure and equal
chemical potential; between a saturation density and the nearest spinodal
bound lies a metastable single-phase region.
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import thermo
from .errors import ConvergenceFailure, DegenerateMixture, DomainError, NoSpinodal

log = logging.getLogger(__name__)

ROOT_XTOL = 1e-15
NEWTON_MAXITER = 50
NEWTON_RTOL = 1e-13
GAUSS_NODES = 64


@dataclass(frozen=True)
class SpinodalBounds:
    rho_minus: float
    rho_plus: float


@dataclass(frozen=True)
class SaturationData:
    rho1_star: float
    rho2_star: float
    p_star: float
    mu_star: float


@dataclass(frozen=True)
class MixtureState:
    """Bulk density and the two phase densities at a point.

    Canonical ordering is ``rho1 <= rho <= rho2``; :meth:`validate` checks it.
    """

    rho: float
    rho1: float
    rho2: float

    def validate(self, params=None):
        if not (self.rho1 <= self.rho <= self.rho2):
            raise DomainError(
                f"mixture ordering violated: rho1={self.rho1!r}, rho={self.rho!r}, rho2={self.rho2!r}"
            )
        if params is not None:
            thermo.check_density([self.rho, self.rho1, self.rho2], params)
        return self


class Region(enum.Enum):
    PURE_GAS = "PureGas"
    METASTABLE_GAS = "MetastableGas"
    SPINODAL = "Spinodal"
    METASTABLE_LIQUID = "MetastableLiquid"
    PURE_LIQUID = "PureLiquid"


def spinodal_bounds(params):
    """Locate the two zeros of p' in (0, 1/b).

    p'(rho) = 0 is equivalent to ``g(rho) = R T`` with
    ``g(rho) = 2 a rho (1 - b rho)^2``, which rises on (0, 1/(3b)) and falls
    on (1/(3b), 1/b).  Each branch is bracketed and solved with Brent's method.
    """
    if params.temperature >= params.critical_temperature:
        raise NoSpinodal(
            f"T={params.temperature} >= T_C={params.critical_temperature}: isotherm is monotone"
        )
    a, b, RT = params.a, params.b, params.RT

    def dp(r):
        return thermo._pressure_derivative(r, a, b, RT)

    peak = params.critical_density
    # dp > 0 near both ends, dp < 0 at the peak of g when T < T_C
    lo = brentq(dp, thermo.DENSITY_GUARD, peak, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    hi = brentq(dp, peak, params.rho_max - thermo.DENSITY_GUARD, xtol=ROOT_XTOL,
                rtol=4 * np.finfo(float).eps)
    return SpinodalBounds(float(lo), float(hi))


def _newton_saturation(r1, r2, spin, params):
    """2x2 Newton on (p(r1) - p(r2), mu(r1) - mu(r2)); None if it leaves the brackets."""
    a, b, RT = params.a, params.b, params.RT
    for _ in range(NEWTON_MAXITER):
        g1 = thermo._pressure(r1, a, b, RT) - thermo._pressure(r2, a, b, RT)
        g2 = thermo._chemical_potential(r1, a, b, RT) - thermo._chemical_potential(r2, a, b, RT)
        dp1 = thermo._pressure_derivative(r1, a, b, RT)
        dp2 = thermo._pressure_derivative(r2, a, b, RT)
        # J = [[p'(r1), -p'(r2)], [p'(r1)/r1, -p'(r2)/r2]]
        det = dp1 * dp2 * (1.0 / r1 - 1.0 / r2)
        if det == 0.0 or not math.isfinite(det):
            return None
        # Cramer's rule for J (d1, d2) = -(g1, g2)
        d1 = (g1 * dp2 / r2 - g2 * dp2) / det
        d2 = (g1 * dp1 / r1 - g2 * dp1) / det
        r1n, r2n = r1 + d1, r2 + d2
        if not (0.0 < r1n < spin.rho_minus and spin.rho_plus < r2n < params.rho_max):
            return None
        r1, r2 = r1n, r2n
        if abs(d1) <= NEWTON_RTOL * r1 and abs(d2) <= NEWTON_RTOL * r2:
            return r1, r2
    return None


def _bisection_saturation(spin, params):
    """Nested bracketed solve: outer root on p*, inner inversion of p per branch."""
    a, b, RT = params.a, params.b, params.RT
    p_hi = thermo._pressure(spin.rho_minus, a, b, RT)
    # gas-branch inversion needs p* above the pressure at the guard band
    p_lo = max(thermo._pressure(spin.rho_plus, a, b, RT),
               thermo._pressure(2.0 * thermo.DENSITY_GUARD, a, b, RT))
    eps = 1e-14 * max(1.0, abs(p_hi))

    def gas(ps):
        return brentq(lambda r: thermo._pressure(r, a, b, RT) - ps,
                      thermo.DENSITY_GUARD, spin.rho_minus, xtol=ROOT_XTOL)

    def liquid(ps):
        return brentq(lambda r: thermo._pressure(r, a, b, RT) - ps,
                      spin.rho_plus, params.rho_max - thermo.DENSITY_GUARD, xtol=ROOT_XTOL)

    def gap(ps):
        # strictly decreasing in ps: d(gap)/dp* = 1/rho_l - 1/rho_g < 0
        return (thermo._chemical_potential(liquid(ps), a, b, RT)
                - thermo._chemical_potential(gas(ps), a, b, RT))

    try:
        ps = brentq(gap, p_lo + eps, p_hi - eps, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except ValueError as exc:
        raise ConvergenceFailure(f"saturation bisection failed: {exc}") from exc
    return gas(ps), liquid(ps)


def maxwell_construction(params, spin=None):
    """Saturation pair with equal pressure and chemical potential.

    Newton starts from ``(rho_minus / 2, (rho_plus + 1/b) / 2)``; if an
    iterate leaves ``(0, rho_minus) x (rho_plus, 1/b)`` the solve restarts
    as a bracketed search on the saturation pressure.
    """
    if spin is None:
        spin = spinodal_bounds(params)
    guess = (0.5 * spin.rho_minus, 0.5 * (spin.rho_plus + params.rho_max))
    roots = _newton_saturation(*guess, spin, params)
    if roots is None:
        log.debug("Newton left the saturation brackets at T=%g, falling back", params.temperature)
        roots = _bisection_saturation(spin, params)
    r1, r2 = roots
    a, b, RT = params.a, params.b, params.RT
    p1, p2 = thermo._pressure(r1, a, b, RT), thermo._pressure(r2, a, b, RT)
    m1, m2 = thermo._chemical_potential(r1, a, b, RT), thermo._chemical_potential(r2, a, b, RT)
    scale = max(1.0, abs(p1), abs(m1))
    if abs(p1 - p2) > 1e-10 * scale or abs(m1 - m2) > 1e-10 * scale:
        raise ConvergenceFailure(
            f"saturation residuals too large: dp={p1 - p2:.3e}, dmu={m1 - m2:.3e}"
        )
    return SaturationData(float(r1), float(r2), float(0.5 * (p1 + p2)), float(0.5 * (m1 + m2)))


def maxwell_area_residual(sat, params, nodes=GAUSS_NODES):
    """Equal-area residual: mean of mu over [rho1*, rho2*] minus mu*.

    Evaluated with Gauss-Legendre quadrature in the segment parameter t.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    r = sat.rho2_star + t * (sat.rho1_star - sat.rho2_star)
    mean_mu = 0.5 * np.dot(w, thermo.chemical_potential(r, params))
    return float(mean_mu - sat.mu_star)


def energy_difference_residual(sat, params):
    f1 = thermo.specific_free_energy(sat.rho1_star, params)
    f2 = thermo.specific_free_energy(sat.rho2_star, params)
    mu1 = thermo.chemical_potential(sat.rho1_star, params)
    return float(f2 - f1 - mu1 * (sat.rho2_star - sat.rho1_star))


def classify(rho, sat, spin):
    """Stability region of a single-phase density.

    The spinodal bounds belong to :attr:`Region.SPINODAL`; ``rho1_star``
    counts as metastable gas and ``rho2_star`` as metastable liquid.
    """
    if rho < sat.rho1_star:
        return Region.PURE_GAS
    if rho < spin.rho_minus:
        return Region.METASTABLE_GAS
    if rho <= spin.rho_plus:
        return Region.SPINODAL
    if rho <= sat.rho2_star:
        return Region.METASTABLE_LIQUID
    return Region.PURE_LIQUID


def volume_fractions(state):
    """Return ``(alpha1, alpha2)`` with ``alpha1 = (rho - rho2) / (rho1 - rho2)``."""
    if state.rho1 == state.rho2:
        raise DegenerateMixture(
            f"rho1 == rho2 == {state.rho1!r}: volume fractions undefined"
        )
    alpha1 = (state.rho - state.rho2) / (state.rho1 - state.rho2)
    return alpha1, 1.0 - alpha1


def mixture_free_energy(state, params):
    """Free energy per unit volume of the two-phase mixture."""
    alpha1, alpha2 = volume_fractions(state)
    f1 = thermo.specific_free_energy(state.rho1, params)
    f2 = thermo.specific_free_energy(state.rho2, params)
    return alpha1 * f1 + alpha2 * f2

"""Isothermal van der Waals fluid.

At fixed temperature the fluid is described by its Helmholtz free energy

    E(M, V) = -a M^2 / V + R T (M log(M / (V - M b)) - M),

which is positively homogeneous of degree one in (M, V).  Setting V = 1
gives the free energy per unit volume f(rho) = E(rho, 1), and the remaining
potentials follow from partial derivatives of E:

    p(rho)  = -dE/dV (rho, 1) = R T rho / (1 - b rho) - a rho^2
    mu(rho) =  dE/dM (rho, 1) = R T log(rho / (1 - b rho))
                                + R T b rho / (1 - b rho) - 2 a rho

Differentiating once more,

    p'(rho)  = R T / (1 - b rho)^2 - 2 a rho
    mu'(rho) = p'(rho) / rho

and the Gibbs relation f = rho mu - p, f' = mu holds identically.

All public functions accept floats or numpy arrays and reject densities
outside the guard band ``(DENSITY_GUARD, 1/b - DENSITY_GUARD)``.  The
underscored kernels skip validation and are meant for inner loops.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

DENSITY_GUARD = 1e-12


@dataclass(frozen=True)
class ThermoParams:
    """Temperature and equation-of-state constants (reduced units by default).

    With ``a=3, b=1/3, R=8/3`` the critical point sits at ``T = rho = p = 1``.
    """

    temperature: float
    a: float = 3.0
    b: float = 1.0 / 3.0
    R: float = 8.0 / 3.0

    def __post_init__(self):
        for name in ("temperature", "a", "b", "R"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def RT(self):
        return self.R * self.temperature

    @property
    def rho_max(self):
        """Covolume limit 1/b."""
        return 1.0 / self.b

    @property
    def critical_temperature(self):
        # p' = 0 and p'' = 0 simultaneously at rho = 1/(3b)
        return 8.0 * self.a / (27.0 * self.R * self.b)

    @property
    def critical_density(self):
        return 1.0 / (3.0 * self.b)


def check_density(rho, params):
    """Raise :class:`DomainError` unless every entry of ``rho`` is admissible."""
    r = np.asarray(rho, dtype=float)
    lo, hi = DENSITY_GUARD, params.rho_max - DENSITY_GUARD
    bad = ~((r > lo) & (r < hi))
    if np.any(bad):
        first = r[bad].flat[0] if r.ndim else float(r)
        raise DomainError(
            f"density {first!r} outside admissible range ({lo:g}, {hi!r}) "
            f"at T={params.temperature}"
        )


def _pressure(rho, a, b, RT):
    return RT * rho / (1.0 - b * rho) - a * rho * rho


def _pressure_derivative(rho, a, b, RT):
    s = 1.0 - b * rho
    return RT / (s * s) - 2.0 * a * rho


def _chemical_potential(rho, a, b, RT):
    s = 1.0 - b * rho
    return RT * np.log(rho / s) + RT * b * rho / s - 2.0 * a * rho


def _free_energy(rho, a, b, RT):
    return -a * rho * rho + RT * rho * (np.log(rho / (1.0 - b * rho)) - 1.0)


def extensive_free_energy(M, V, params):
    """Helmholtz free energy E(M, V) of mass ``M`` in volume ``V``."""
    M = np.asarray(M, dtype=float)
    V = np.asarray(V, dtype=float)
    if np.any(M <= 0.0) or np.any(V <= 0.0):
        raise DomainError("mass and volume must be positive")
    free = V - M * params.b
    if np.any(free <= 0.0):
        raise DomainError("covolume violated: V - M b <= 0")
    a, RT = params.a, params.RT
    out = -a * M * M / V + RT * (M * np.log(M / free) - M)
    return out[()] if out.ndim == 0 else out


def specific_free_energy(rho, params):
    """Free energy per unit volume, f(rho) = E(rho, 1)."""
    check_density(rho, params)
    out = _free_energy(np.asarray(rho, dtype=float), params.a, params.b, params.RT)
    return out[()] if np.ndim(out) == 0 else out


def pressure(rho, params):
    check_density(rho, params)
    out = _pressure(np.asarray(rho, dtype=float), params.a, params.b, params.RT)
    return out[()] if np.ndim(out) == 0 else out


def chemical_potential(rho, params):
    """Chemical potential mu(rho) = f'(rho).

    Note the sign: in reduced units at T=0.85 the saturation value is about
    -3.977, not +3.977.
    """
    check_density(rho, params)
    out = _chemical_potential(np.asarray(rho, dtype=float), params.a, params.b, params.RT)
    return out[()] if np.ndim(out) == 0 else out


def pressure_derivative(rho, params):
    check_density(rho, params)
    out = _pressure_derivative(np.asarray(rho, dtype=float), params.a, params.b, params.RT)
    return out[()] if np.ndim(out) == 0 else out


def chemical_potential_derivative(rho, params):
    # isothermal Gibbs-Duhem: dmu = dp / rho
    return pressure_derivative(rho, params) / np.asarray(rho, dtype=float)

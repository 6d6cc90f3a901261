"""Mass-transfer dynamics driving a two-phase mixture to equilibrium.

With P = (rho - rho1)(rho - rho2) the phase densities evolve as

    drho1/dt = -P [rho2 (mu(rho2) - mu(rho1)) + p(rho1) - p(rho2)]
    drho2/dt = +P [rho1 (mu(rho1) - mu(rho2)) - p(rho1) + p(rho2)]

while the bulk density rho stays fixed.  The mixture free energy
alpha1 f(rho1) + alpha2 f(rho2) is non-increasing along trajectories.  Its
rest points are the single-phase states (rho equal to one of the phase
densities) and the saturation pair.

The 1/epsilon scaling is applied by the integrator only; :func:`source_rhs`
returns the unscaled rates.
"""

import enum
import math
from dataclasses import dataclass

from . import thermo
from .equilibrium import MixtureState, maxwell_construction, volume_fractions
from .errors import EquilibriumMismatch, NotConverged, StiffnessOverflow


@dataclass(frozen=True)
class SourceRate:
    drho1_dt: float
    drho2_dt: float

    @property
    def drho_dt(self):
        return 0.0

    @property
    def norm(self):
        return max(abs(self.drho1_dt), abs(self.drho2_dt))


@dataclass(frozen=True)
class RelaxationSettings:
    """Controls for the sub-cycled explicit Euler integrator.

    Each substep ``h`` obeys two limits:

    * ``h * |rhs|_inf / epsilon <= max_substep_rate * min(rho1, 1/b - rho2, rho2 - rho1)``
      (no substep moves a density by more than a fraction of its room), and
    * ``h * L / epsilon <= stiffness_limit`` where ``L`` is the row-sum norm of
      the Jacobian of the rates (keeps explicit Euler monotone near stiff
      rest points, where the first limit degenerates).
    """

    epsilon: float
    max_substep_rate: float = 0.1
    projection_delta: float = thermo.DENSITY_GUARD
    stiffness_limit: float = 0.5
    max_substeps: int = 1_000_000

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not self.max_substep_rate > 0.0 or not self.stiffness_limit > 0.0:
            raise ValueError("substep limits must be positive")
        if not self.projection_delta > 0.0:
            raise ValueError("projection_delta must be positive")
        if self.max_substeps < 1:
            raise ValueError("max_substeps must be at least 1")


class EquilibriumKind(enum.Enum):
    PURE_1 = "Pure1"
    PURE_2 = "Pure2"
    MIXTURE = "Mixture"

    @property
    def is_pure(self):
        return self is not EquilibriumKind.MIXTURE


def _potentials(r, a, b, RT):
    s = 1.0 - b * r
    p = RT * r / s - a * r * r
    mu = RT * math.log(r / s) + RT * b * r / s - 2.0 * a * r
    dp = RT / (s * s) - 2.0 * a * r
    return p, mu, dp


def _rates(rho, r1, r2, a, b, RT):
    """Unscaled rates and the row-sum norm of their Jacobian."""
    p1, mu1, dp1 = _potentials(r1, a, b, RT)
    p2, mu2, dp2 = _potentials(r2, a, b, RT)
    P = (rho - r1) * (rho - r2)
    B1 = r2 * (mu2 - mu1) + p1 - p2
    B2 = r1 * (mu1 - mu2) - p1 + p2
    d1 = -P * B1
    d2 = P * B2
    # dP/dr1 = r2 - rho, dP/dr2 = r1 - rho; r mu'(r) = p'(r)
    j11 = -((r2 - rho) * B1 + P * dp1 * (1.0 - r2 / r1))
    j12 = -((r1 - rho) * B1 + P * (mu2 - mu1))
    j21 = (r2 - rho) * B2 + P * (mu1 - mu2)
    j22 = (r1 - rho) * B2 + P * dp2 * (1.0 - r1 / r2)
    L = max(abs(j11) + abs(j12), abs(j21) + abs(j22))
    return d1, d2, L


def _project(rho, r1, r2, rho_max, delta):
    if r1 > r2:
        r1, r2 = r2, r1
    r1 = min(max(r1, delta), rho_max - delta)
    r2 = min(max(r2, delta), rho_max - delta)
    if rho < r1:
        r1 = rho
    if rho > r2:
        r2 = rho
    return r1, r2


def _substep_limit(rho, r1, r2, d1, d2, L, settings, rho_max):
    eps = settings.epsilon
    h = math.inf
    rnorm = max(abs(d1), abs(d2))
    if rnorm > 0.0:
        room = min(r1, rho_max - r2, r2 - r1)
        h = settings.max_substep_rate * room * eps / rnorm
    if L > 0.0:
        h = min(h, settings.stiffness_limit * eps / L)
    return h


def source_rhs(state, params):
    thermo.check_density([state.rho, state.rho1, state.rho2], params)
    d1, d2, _ = _rates(state.rho, state.rho1, state.rho2, params.a, params.b, params.RT)
    return SourceRate(d1, d2)


def rate_jacobian_norm(state, params):
    """Row-sum norm of d(rates)/d(rho1, rho2), used for the stiffness limit."""
    thermo.check_density([state.rho, state.rho1, state.rho2], params)
    return _rates(state.rho, state.rho1, state.rho2, params.a, params.b, params.RT)[2]


def substep_limit(state, settings, params):
    """Largest admissible Euler substep at ``state`` (``inf`` at rest points)."""
    d1, d2, L = _rates(state.rho, state.rho1, state.rho2, params.a, params.b, params.RT)
    return _substep_limit(state.rho, state.rho1, state.rho2, d1, d2, L, settings, params.rho_max)


def euler_substep(state, h, settings, params):
    """One explicit Euler substep of length ``h`` followed by projection."""
    d1, d2, _ = _rates(state.rho, state.rho1, state.rho2, params.a, params.b, params.RT)
    k = h / settings.epsilon
    r1, r2 = _project(state.rho, state.rho1 + k * d1, state.rho2 + k * d2,
                      params.rho_max, settings.projection_delta)
    return MixtureState(state.rho, r1, r2)


def iter_substeps(state, dt, settings, params):
    """Advance ``state`` over ``dt``, yielding ``(h, state)`` after every substep.

    The remaining interval is split into equal pieces no longer than the
    current substep limit; the limit is re-evaluated after every substep.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    thermo.check_density([state.rho, state.rho1, state.rho2], params)
    a, b, RT = params.a, params.b, params.RT
    rho, r1, r2 = state.rho, state.rho1, state.rho2
    k_eps = 1.0 / settings.epsilon
    remaining = dt
    n = 0
    while remaining > 0.0:
        if n >= settings.max_substeps:
            raise StiffnessOverflow(
                f"relaxation needs more than {settings.max_substeps} substeps "
                f"(rho={rho!r}, start rho1={state.rho1!r}, rho2={state.rho2!r})"
            )
        d1, d2, L = _rates(rho, r1, r2, a, b, RT)
        hmax = _substep_limit(rho, r1, r2, d1, d2, L, settings, params.rho_max)
        if hmax >= remaining:
            h, last = remaining, True
        else:
            if not hmax > 0.0:
                raise StiffnessOverflow(f"substep limit collapsed to {hmax!r} at rho1={r1!r}, rho2={r2!r}")
            pieces = math.ceil(remaining / hmax)
            h, last = remaining / pieces, pieces == 1
        r1, r2 = _project(rho, r1 + h * k_eps * d1, r2 + h * k_eps * d2,
                          params.rho_max, settings.projection_delta)
        remaining = 0.0 if last else remaining - h
        n += 1
        yield h, MixtureState(rho, r1, r2)


def relax_step(state, dt, settings, params):
    """Integrate the source over ``dt`` with sub-cycled explicit Euler."""
    out = state
    for _, out in iter_substeps(state, dt, settings, params):
        pass
    return out


def classify_limit(state, density_tol=1e-5):
    """Pure1 / Pure2 when rho coincides with a phase density, else Mixture."""
    d1 = abs(state.rho - state.rho1)
    d2 = abs(state.rho2 - state.rho)
    if min(d1, d2) <= density_tol:
        return EquilibriumKind.PURE_1 if d1 <= d2 else EquilibriumKind.PURE_2
    return EquilibriumKind.MIXTURE


def find_equilibrium(state, settings, params, tol=1e-10, budget=1_000_000,
                     density_tol=1e-5, maxwell_tol=1e-4):
    """Integrate to a rest point of the relaxation dynamics.

    Each iteration is one Euler substep at the current substep limit, so
    slow phases (near-degenerate starts, where the rates are cubic in the
    density spread) are crossed in few steps.  Integration stops once the
    unscaled rates are below ``tol`` and the limit is identifiable: either
    ``rho`` lies within ``density_tol`` of a phase density (single phase) or
    the phase densities lie within ``maxwell_tol`` of the saturation pair.
    Approach to a single-phase attractor is only linear, so small rates
    alone do not settle the classification.

    ``budget`` caps the number of substeps.

    Returns
    -------
    (MixtureState, EquilibriumKind)
    """
    a, b, RT = params.a, params.b, params.RT
    thermo.check_density([state.rho, state.rho1, state.rho2], params)
    sat = None
    if params.temperature < params.critical_temperature:
        sat = maxwell_construction(params)

    def settled(r1, r2):
        if min(rho - r1, r2 - rho) <= density_tol:
            return True
        return sat is not None and (abs(r1 - sat.rho1_star) <= maxwell_tol
                                    and abs(r2 - sat.rho2_star) <= maxwell_tol)

    rho = state.rho
    r1, r2 = _project(rho, state.rho1, state.rho2, params.rho_max, settings.projection_delta)
    k_eps = 1.0 / settings.epsilon
    for _ in range(budget):
        d1, d2, L = _rates(rho, r1, r2, a, b, RT)
        if max(abs(d1), abs(d2)) < tol and settled(r1, r2):
            break
        h = _substep_limit(rho, r1, r2, d1, d2, L, settings, params.rho_max)
        if h == math.inf:
            # exact rest point that is not identifiable (cannot move further)
            break
        r1, r2 = _project(rho, r1 + h * k_eps * d1, r2 + h * k_eps * d2,
                          params.rho_max, settings.projection_delta)
    else:
        d1, d2, _ = _rates(rho, r1, r2, a, b, RT)
        if max(abs(d1), abs(d2)) >= tol or not settled(r1, r2):
            raise NotConverged(
                f"|rhs| = {max(abs(d1), abs(d2)):.3e} (tol {tol:g}) at rho1={r1!r}, "
                f"rho2={r2!r} after {budget} substeps"
            )
    state = MixtureState(rho, r1, r2)

    kind = classify_limit(state, density_tol)
    if kind is EquilibriumKind.MIXTURE:
        if sat is None:
            raise EquilibriumMismatch("two-phase rest point above the critical temperature")
        if (abs(state.rho1 - sat.rho1_star) > maxwell_tol
                or abs(state.rho2 - sat.rho2_star) > maxwell_tol):
            raise EquilibriumMismatch(
                f"mixture limit ({state.rho1!r}, {state.rho2!r}) differs from saturation pair "
                f"({sat.rho1_star!r}, {sat.rho2_star!r})"
            )
    return state, kind


def mixture_alpha1(state):
    """alpha1 with the single-phase convention when rho1 == rho2."""
    if state.rho1 == state.rho2:
        return 1.0
    return volume_fractions(state)[0]

"""Finite-volume solver for the isothermal two-phase model.

Conserved variables per cell are ``W = (rho, rho1, rho2, rho u)`` with flux

    F(W) = (rho u, rho1 u, rho2 u, rho u^2 + p_mix),
    p_mix = alpha1 p(rho1) + alpha2 p(rho2).

The convective eigenvalues are u - c, u, u, u + c with

    c^2 = (alpha1 rho1 p'(rho1) + alpha2 rho2 p'(rho2)) / rho.

A time step is split: a first-order Rusanov update of the convective part,
then sub-cycled relaxation of each cell over the same dt.  When
``rho1 == rho2`` the cell is single-phase and ``alpha1 = 1``.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels, thermo
from .equilibrium import MixtureState, volume_fractions
from .errors import ComplexSoundSpeed, DegenerateWaveSpeed, InvalidState, StiffnessOverflow

DEFAULT_CFL = 0.45
CLAMP_C_MIN = 1e-8


class BoundaryRule(enum.Enum):
    TRANSMISSIVE = "transmissive"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ConservedCell:
    rho: float
    rho1: float
    rho2: float
    momentum: float

    @property
    def velocity(self):
        return self.momentum / self.rho

    def as_array(self):
        return np.array([self.rho, self.rho1, self.rho2, self.momentum])


class FluxVector(NamedTuple):
    mass: float
    mass1: float
    mass2: float
    momentum: float


@dataclass
class GridState:
    """Uniform 1D mesh.  ``W`` has shape ``(4, n_cells)``."""

    W: np.ndarray
    dx: float
    x_min: float

    def __post_init__(self):
        self.W = np.ascontiguousarray(self.W, dtype=np.float64)
        if self.W.ndim != 2 or self.W.shape[0] != 4:
            raise ValueError(f"W must have shape (4, N), got {self.W.shape}")
        if not self.dx > 0.0:
            raise ValueError("dx must be positive")

    @classmethod
    def from_cells(cls, cells, dx, x_min):
        return cls(np.array([c.as_array() for c in cells]).T, dx, x_min)

    @property
    def n_cells(self):
        return self.W.shape[1]

    @property
    def rho(self):
        return self.W[0]

    @property
    def rho1(self):
        return self.W[1]

    @property
    def rho2(self):
        return self.W[2]

    @property
    def momentum(self):
        return self.W[3]

    @property
    def velocity(self):
        return self.W[3] / self.W[0]

    @property
    def x_centers(self):
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def cell(self, i):
        return ConservedCell(*(float(v) for v in self.W[:, i]))

    def copy(self):
        return GridState(self.W.copy(), self.dx, self.x_min)


@dataclass
class StepDiagnostics:
    """Counters accumulated over calls that receive the same instance."""

    non_hyperbolic_events: int = 0
    relaxation_substeps: int = 0
    max_cell_substeps: int = 0
    steps: int = 0
    first_bad_cells: list = field(default_factory=list)


def _fractions(cell):
    if cell.rho1 == cell.rho2:
        return 1.0, 0.0
    return volume_fractions(MixtureState(cell.rho, cell.rho1, cell.rho2))


def mixture_pressure(cell, params):
    al1, al2 = _fractions(cell)
    return al1 * thermo.pressure(cell.rho1, params) + al2 * thermo.pressure(cell.rho2, params)


def sound_speed_squared(cell, params):
    al1, al2 = _fractions(cell)
    return (al1 * cell.rho1 * thermo.pressure_derivative(cell.rho1, params)
            + al2 * cell.rho2 * thermo.pressure_derivative(cell.rho2, params)) / cell.rho


def sound_speed(cell, params, c_min=None):
    """Mixture sound speed.

    A negative radicand raises :class:`ComplexSoundSpeed` unless ``c_min`` is
    given, in which case ``c_min`` is returned.
    """
    rad = sound_speed_squared(cell, params)
    if rad < 0.0:
        if c_min is None:
            raise ComplexSoundSpeed(
                f"negative sound-speed radicand {rad:.3e} (rho={cell.rho!r}, "
                f"rho1={cell.rho1!r}, rho2={cell.rho2!r}, alpha1={_fractions(cell)[0]!r})"
            )
        return c_min
    return math.sqrt(rad)


def physical_flux(cell, params):
    u = cell.velocity
    return FluxVector(cell.rho * u, cell.rho1 * u, cell.rho2 * u,
                      cell.momentum * u + mixture_pressure(cell, params))


def rusanov_flux(left, right, params, c_min=None):
    """Local Lax-Friedrichs flux with speed ``max(|u| + c)`` over both cells."""
    s = max(abs(left.velocity) + sound_speed(left, params, c_min),
            abs(right.velocity) + sound_speed(right, params, c_min))
    fl = physical_flux(left, params)
    fr = physical_flux(right, params)
    wl, wr = left.as_array(), right.as_array()
    return FluxVector(*(0.5 * (fl[k] + fr[k]) - 0.5 * s * (wr[k] - wl[k]) for k in range(4)))


def _strict(c_min):
    return -1.0 if c_min is None else float(c_min)


def _report_bad(n_bad, first, grid, diagnostics, c_min, where):
    if n_bad == 0:
        return
    if diagnostics is not None:
        diagnostics.non_hyperbolic_events += n_bad
        diagnostics.first_bad_cells.append(first)
    if c_min is None:
        cell = grid.cell(first)
        al1 = _fractions(cell)[0]
        raise ComplexSoundSpeed(
            f"{where}: {n_bad} non-hyperbolic cell(s); first at index {first} "
            f"(rho={cell.rho!r}, rho1={cell.rho1!r}, rho2={cell.rho2!r}, alpha1={al1!r})",
            index=first,
        )


def max_wave_speed(grid, params, c_min=None, diagnostics=None):
    smax, n_bad, first = kernels.get_backend().wave_speed(
        grid.W, params.a, params.b, params.RT, _strict(c_min))
    _report_bad(n_bad, first, grid, diagnostics, c_min, "wave speed")
    return smax


def cfl_dt(grid, cfl, params, c_min=None, dt_max=None, diagnostics=None):
    """``cfl * dx / max(|u| + c)``.

    When every cell is at rest with zero sound speed the bound is undefined:
    ``dt_max`` is returned if given, else :class:`DegenerateWaveSpeed` is raised.
    """
    if not 0.0 < cfl < 1.0:
        raise ValueError(f"cfl must lie in (0, 1), got {cfl!r}")
    smax = max_wave_speed(grid, params, c_min, diagnostics)
    if smax == 0.0:
        if dt_max is None:
            raise DegenerateWaveSpeed("all wave speeds vanish; supply dt_max")
        return dt_max
    return cfl * grid.dx / smax


def _check_densities(W, params, where):
    lo, hi = 0.0, params.rho_max
    bad = ~((W[:3] > lo) & (W[:3] < hi))
    if np.any(bad):
        row, idx = np.argwhere(bad)[0]
        name = ("rho", "rho1", "rho2")[row]
        raise InvalidState(f"{where}: {name}={W[row, idx]!r} left (0, 1/b) at cell {idx}", index=int(idx))


def convective_step(grid, dt, params, bc=BoundaryRule.TRANSMISSIVE, c_min=None, diagnostics=None):
    """Rusanov update over ``dt`` with ghost cells set by ``bc``."""
    periodic = BoundaryRule(bc) is BoundaryRule.PERIODIC
    Wn, n_bad, first = kernels.get_backend().convective_update(
        grid.W, dt / grid.dx, params.a, params.b, params.RT, periodic, _strict(c_min))
    _report_bad(n_bad, first, grid, diagnostics, c_min, "convective step")
    _check_densities(Wn, params, "convective step")
    return GridState(Wn, grid.dx, grid.x_min)


def relax_grid(grid, dt, settings, params, diagnostics=None):
    """Relax every cell over ``dt``; the bulk density row is left untouched."""
    Wn, total, worst, fail = kernels.get_backend().relax_cells(
        grid.W, dt, settings.epsilon, settings.max_substep_rate, settings.stiffness_limit,
        settings.projection_delta, settings.max_substeps, params.a, params.b, params.RT)
    if fail >= 0:
        c = grid.cell(fail)
        raise StiffnessOverflow(
            f"relaxation of cell {fail} needs more than {settings.max_substeps} substeps "
            f"(rho={c.rho!r}, rho1={c.rho1!r}, rho2={c.rho2!r})"
        )
    if diagnostics is not None:
        diagnostics.relaxation_substeps += total
        diagnostics.max_cell_substeps = max(diagnostics.max_cell_substeps, worst)
    return GridState(Wn, grid.dx, grid.x_min)


def full_step(grid, settings, cfl, params, bc=BoundaryRule.TRANSMISSIVE, dt_limit=None,
              c_min=None, dt_max=None, diagnostics=None):
    """One split step: Rusanov convection, then relaxation with the same dt.

    ``dt_limit`` caps the CFL step (used to land on an output time).
    Returns ``(grid, dt)``.
    """
    dt = cfl_dt(grid, cfl, params, c_min=c_min, dt_max=dt_max, diagnostics=diagnostics)
    if dt_limit is not None:
        dt = min(dt, dt_limit)
    grid = convective_step(grid, dt, params, bc, c_min=c_min, diagnostics=diagnostics)
    grid = relax_grid(grid, dt, settings, params, diagnostics)
    if diagnostics is not None:
        diagnostics.steps += 1
    return grid, dt


def energy_density(grid, params):
    """Per-cell rho u^2 / 2 + alpha1 f(rho1) + alpha2 f(rho2)."""
    rho, r1, r2, m = grid.W
    thermo.check_density(grid.W[:3], params)
    same = r1 == r2
    with np.errstate(divide="ignore", invalid="ignore"):
        al1 = np.where(same, 1.0, (rho - r2) / np.where(same, 1.0, r1 - r2))
    f1 = thermo.specific_free_energy(r1, params)
    f2 = thermo.specific_free_energy(r2, params)
    return 0.5 * m * m / rho + al1 * f1 + (1.0 - al1) * f2


def total_energy(grid, params):
    return float(grid.dx * np.sum(energy_density(grid, params)))


def total_mass(grid):
    return float(grid.dx * np.sum(grid.rho))


def total_momentum(grid):
    return float(grid.dx * np.sum(grid.momentum))

"""Riemann-problem scenarios: configuration, driver and CSV output.

Configuration files are flat ``key = value`` text with ``#`` comments::

    temperature = 0.85
    x_min = -1
    x_max = 1
    n_cells = 2000
    epsilon = 1e-3
    t_end = 0.2
    rho_L = @spinodal_minus
    ...

Density values may reference ``@spinodal_minus``, ``@spinodal_plus``,
``@saturation_gas`` or ``@saturation_liquid`` to use the solver's own
high-precision values at the configured temperature.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import hydro, thermo
from .equilibrium import maxwell_construction, spinodal_bounds
from .errors import InvalidState, ParseError, ValidationError, VdwError
from .relaxation import RelaxationSettings
from .thermo import ThermoParams

log = logging.getLogger(__name__)

COLUMNS = ("x", "rho", "rho1", "rho2", "u", "p1", "p2", "mu1", "mu2", "alpha1", "alpha2", "p_mix")

_FLOAT_KEYS = ("temperature", "x_min", "x_max", "interface_x", "cfl", "epsilon", "t_end")
_STATE_KEYS = ("rho_L", "rho1_L", "rho2_L", "u_L", "rho_R", "rho1_R", "rho2_R", "u_R")
_KNOWN_KEYS = set(_FLOAT_KEYS) | set(_STATE_KEYS) | {
    "n_cells", "boundary", "snapshot_times", "output_prefix"}
_REQUIRED_KEYS = ("temperature", "x_min", "x_max", "n_cells", "epsilon", "t_end") + _STATE_KEYS
_REFERENCES = ("@spinodal_minus", "@spinodal_plus", "@saturation_gas", "@saturation_liquid")


@dataclass(frozen=True)
class RiemannState:
    rho: float
    rho1: float
    rho2: float
    u: float

    def canonical(self):
        if self.rho1 > self.rho2:
            return replace(self, rho1=self.rho2, rho2=self.rho1)
        return self


@dataclass(frozen=True)
class ScenarioConfig:
    temperature: float
    x_min: float
    x_max: float
    n_cells: int
    epsilon: float
    t_end: float
    left_state: RiemannState
    right_state: RiemannState
    interface_x: float = None
    cfl: float = hydro.DEFAULT_CFL
    boundary: hydro.BoundaryRule = hydro.BoundaryRule.TRANSMISSIVE
    snapshot_times: tuple = ()
    output_prefix: str = "output"

    def __post_init__(self):
        if self.interface_x is None:
            object.__setattr__(self, "interface_x", 0.5 * (self.x_min + self.x_max))
        object.__setattr__(self, "boundary", hydro.BoundaryRule(self.boundary))
        object.__setattr__(self, "left_state", self.left_state.canonical())
        object.__setattr__(self, "right_state", self.right_state.canonical())
        object.__setattr__(self, "snapshot_times", tuple(sorted(self.snapshot_times)))
        self.validate()

    @property
    def params(self):
        return ThermoParams(self.temperature)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    def validate(self):
        if not self.temperature > 0.0:
            raise ValidationError("temperature must be positive")
        if not self.x_min < self.interface_x < self.x_max:
            raise ValidationError(
                f"need x_min < interface_x < x_max, got {self.x_min}, {self.interface_x}, {self.x_max}")
        if self.n_cells < 3:
            raise ValidationError(f"n_cells must be at least 3, got {self.n_cells}")
        if not self.t_end > 0.0:
            raise ValidationError(f"t_end must be positive, got {self.t_end}")
        if not self.epsilon > 0.0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.cfl < 1.0:
            raise ValidationError(f"cfl must lie in (0, 1), got {self.cfl}")
        if any(t < 0.0 for t in self.snapshot_times):
            raise ValidationError("snapshot_times must be non-negative")
        params = self.params
        for side, st in (("left", self.left_state), ("right", self.right_state)):
            if not st.rho1 <= st.rho <= st.rho2:
                raise ValidationError(
                    f"{side} state violates rho1 <= rho <= rho2: {st.rho1}, {st.rho}, {st.rho2}")
            try:
                thermo.check_density([st.rho, st.rho1, st.rho2], params)
            except VdwError as exc:
                raise ValidationError(f"{side} state: {exc}") from exc
            if not math.isfinite(st.u):
                raise ValidationError(f"{side} velocity must be finite")

    def with_overrides(self, epsilon=None, n_cells=None, t_end=None, output_prefix=None):
        changes = {k: v for k, v in dict(epsilon=epsilon, n_cells=n_cells, t_end=t_end,
                                         output_prefix=output_prefix).items() if v is not None}
        return replace(self, **changes)


def _parse_number(key, text, lineno, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(f"line {lineno}: key {key!r}: cannot parse {text!r} as {kind.__name__}") from None


def _resolve_reference(name, temperature, key, lineno):
    params = ThermoParams(temperature)
    try:
        if name in ("@spinodal_minus", "@spinodal_plus"):
            spin = spinodal_bounds(params)
            return spin.rho_minus if name == "@spinodal_minus" else spin.rho_plus
        sat = maxwell_construction(params)
        return sat.rho1_star if name == "@saturation_gas" else sat.rho2_star
    except VdwError as exc:
        raise ValidationError(f"line {lineno}: key {key!r}: cannot resolve {name}: {exc}") from exc


def load_config(source):
    """Parse configuration text into a validated :class:`ScenarioConfig`."""
    raw = {}
    for lineno, line in enumerate(source.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ParseError(f"line {lineno}: key {key!r} has no value")
        raw[key] = (value, lineno)

    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ValidationError(f"missing required key(s): {', '.join(missing)}")

    values = {}
    for key in _FLOAT_KEYS:
        if key in raw:
            values[key] = _parse_number(key, *raw[key])
    n_text, n_line = raw["n_cells"]
    values["n_cells"] = _parse_number("n_cells", n_text, n_line, int)
    if not values["temperature"] > 0.0:
        raise ValidationError("temperature must be positive")

    states = {}
    for key in _STATE_KEYS:
        text, lineno = raw[key]
        if text.startswith("@"):
            if key.startswith("u_") or text not in _REFERENCES:
                raise ParseError(f"line {lineno}: key {key!r}: unknown reference {text!r}")
            states[key] = _resolve_reference(text, values["temperature"], key, lineno)
        else:
            states[key] = _parse_number(key, text, lineno)

    if "snapshot_times" in raw:
        text, lineno = raw["snapshot_times"]
        values["snapshot_times"] = tuple(
            _parse_number("snapshot_times", t.strip(), lineno) for t in text.split(",") if t.strip())
    if "boundary" in raw:
        text, lineno = raw["boundary"]
        try:
            values["boundary"] = hydro.BoundaryRule(text.lower())
        except ValueError:
            raise ParseError(f"line {lineno}: boundary must be 'transmissive' or 'periodic', got {text!r}") from None
    if "output_prefix" in raw:
        values["output_prefix"] = raw["output_prefix"][0]

    left = RiemannState(states["rho_L"], states["rho1_L"], states["rho2_L"], states["u_L"])
    right = RiemannState(states["rho_R"], states["rho1_R"], states["rho2_R"], states["u_R"])
    return ScenarioConfig(left_state=left, right_state=right, **values)


def read_config(path):
    return load_config(Path(path).read_text())


def bundled_config_path(name):
    """Path of a scenario file shipped with the package (e.g. ``paper_test.cfg``)."""
    ref = resources.files("vdwrelax") / "scenarios" / name
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return Path(str(ref))


def init_riemann(config, params=None):
    """Piecewise-constant grid: cells centred left of ``interface_x`` get the left state."""
    params = params or config.params
    n, dx = config.n_cells, config.dx
    x = config.x_min + (np.arange(n) + 0.5) * dx
    left = x < config.interface_x
    W = np.empty((4, n))
    for row, attr in enumerate(("rho", "rho1", "rho2")):
        W[row] = np.where(left, getattr(config.left_state, attr), getattr(config.right_state, attr))
    W[3] = np.where(left, config.left_state.rho * config.left_state.u,
                    config.right_state.rho * config.right_state.u)
    try:
        thermo.check_density(W[:3], params)
    except VdwError as exc:
        raise InvalidState(f"initial data: {exc}") from exc
    return hydro.GridState(W, dx, config.x_min)


@dataclass
class Snapshot:
    """Per-cell output columns at one time level (see :data:`COLUMNS`)."""

    time: float
    step: int
    columns: dict

    def __len__(self):
        return len(self.columns["x"])


def snapshot_records(grid, params, time=0.0, step=0):
    rho, r1, r2, m = grid.W
    u = m / rho
    same = r1 == r2
    with np.errstate(divide="ignore", invalid="ignore"):
        al1 = np.where(same, 1.0, (rho - r2) / np.where(same, 1.0, r1 - r2))
    al2 = 1.0 - al1
    p1 = thermo.pressure(r1, params)
    p2 = thermo.pressure(r2, params)
    cols = dict(
        x=grid.x_centers, rho=rho.copy(), rho1=r1.copy(), rho2=r2.copy(), u=u,
        p1=p1, p2=p2,
        mu1=thermo.chemical_potential(r1, params), mu2=thermo.chemical_potential(r2, params),
        alpha1=al1, alpha2=al2, p_mix=al1 * p1 + al2 * p2,
    )
    return Snapshot(float(time), int(step), cols)


def write_snapshot(snapshot, path):
    if len(snapshot) == 0:
        raise ValueError("snapshot has no rows")
    table = np.column_stack([snapshot.columns[c] for c in COLUMNS])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in table:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def read_snapshot(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {c: data[:, k] for k, c in enumerate(COLUMNS)}


def snapshot_filename(prefix, t):
    return f"{prefix}_t{t:.6f}.csv"


_PLOT_TEMPLATE = '''"""Twelve-panel view of snapshot CSVs written by vdwrelax."""
import sys

import matplotlib.pyplot as plt
import numpy as np

T, A, B, R = {T!r}, {a!r}, {b!r}, {R!r}
FILES = {files!r}


def mu(r):
    s = 1.0 - B * r
    return R * T * np.log(r / s) + R * T * B * r / s - 2.0 * A * r


def p(r):
    return R * T * r / (1.0 - B * r) - A * r * r


PANELS = [
    ("rho", lambda d: d["rho"]), ("rho1", lambda d: d["rho1"]), ("rho2", lambda d: d["rho2"]),
    ("mu(rho)", lambda d: mu(d["rho"])), ("mu1", lambda d: d["mu1"]), ("mu2", lambda d: d["mu2"]),
    ("p_mix", lambda d: d["p_mix"]), ("p1", lambda d: d["p1"]), ("p2", lambda d: d["p2"]),
    ("alpha1", lambda d: d["alpha1"]), ("alpha2", lambda d: d["alpha2"]), ("u", lambda d: d["u"]),
]


def main(out=None):
    fig, axes = plt.subplots(4, 3, figsize=(12, 10), sharex=True)
    for name in FILES:
        raw = np.genfromtxt(name, delimiter=",", names=True)
        for ax, (title, get) in zip(axes.flat, PANELS):
            ax.plot(raw["x"], get(raw), lw=0.8, label=name)
            ax.set_title(title)
    axes.flat[0].legend(fontsize="x-small")
    fig.tight_layout()
    if out:
        fig.savefig(out, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
'''


def write_plot_script(prefix, csv_paths, params):
    path = Path(f"{prefix}_plot.py")
    files = [str(Path(p).name) for p in csv_paths]
    path.write_text(_PLOT_TEMPLATE.format(T=params.temperature, a=params.a, b=params.b,
                                          R=params.R, files=files))
    return path


@dataclass
class RunSummary:
    steps: int = 0
    final_time: float = 0.0
    mass_initial: float = 0.0
    mass_final: float = 0.0
    rho_min: float = math.inf
    rho_max: float = -math.inf
    energy_history: list = field(default_factory=list)
    non_hyperbolic_events: int = 0
    relaxation_substeps: int = 0
    max_cell_substeps: int = 0
    edge_cells_unchanged: bool = True
    wall_time: float = 0.0

    @property
    def mass_drift(self):
        return abs(self.mass_final - self.mass_initial) / abs(self.mass_initial)


@dataclass
class RunResult:
    snapshots: list
    summary: RunSummary
    final_grid: hydro.GridState
    initial_grid: hydro.GridState


def run(config, c_min=None, energy_every=1):
    """March the split scheme from the Riemann data to ``config.t_end``.

    Steps are shortened so that every requested snapshot time and ``t_end``
    are hit exactly; a snapshot is always taken at ``t_end``.
    """
    params = config.params
    settings = RelaxationSettings(config.epsilon)
    grid = init_riemann(config, params)
    initial = grid.copy()
    diag = hydro.StepDiagnostics()
    summary = RunSummary(mass_initial=hydro.total_mass(grid))
    summary.energy_history.append((0.0, hydro.total_energy(grid, params)))
    pending = [t for t in config.snapshot_times if t < config.t_end]
    snapshots = []

    def track(g):
        summary.rho_min = min(summary.rho_min, float(g.W[:3].min()))
        summary.rho_max = max(summary.rho_max, float(g.W[:3].max()))

    def emit(g, t, step):
        if not snapshots or snapshots[-1].step != step:
            snapshots.append(snapshot_records(g, params, t, step))

    track(grid)
    while pending and pending[0] <= 0.0:
        pending.pop(0)
        emit(grid, 0.0, 0)

    t, step = 0.0, 0
    wall = time.perf_counter()
    while t < config.t_end:
        target = pending[0] if pending else config.t_end
        remaining = target - t
        try:
            grid, dt = hydro.full_step(grid, settings, config.cfl, params, config.boundary,
                                       dt_limit=remaining, c_min=c_min, diagnostics=diag)
        except VdwError as exc:
            exc.args = (f"t={t:.9g}, step {step + 1}: {exc}",) + exc.args[1:]
            raise
        step += 1
        t = target if dt >= remaining else t + dt
        track(grid)
        if energy_every and step % energy_every == 0:
            summary.energy_history.append((t, hydro.total_energy(grid, params)))
        while pending and pending[0] <= t:
            pending.pop(0)
            emit(grid, t, step)
    emit(grid, t, step)

    summary.steps = step
    summary.final_time = t
    summary.mass_final = hydro.total_mass(grid)
    summary.non_hyperbolic_events = diag.non_hyperbolic_events
    summary.relaxation_substeps = diag.relaxation_substeps
    summary.max_cell_substeps = diag.max_cell_substeps
    summary.edge_cells_unchanged = bool(
        np.array_equal(grid.W[:, 0], initial.W[:, 0]) and np.array_equal(grid.W[:, -1], initial.W[:, -1]))
    summary.wall_time = time.perf_counter() - wall
    if config.boundary is hydro.BoundaryRule.TRANSMISSIVE and not summary.edge_cells_unchanged:
        log.warning("edge cells differ from the initial data at t=%g", t)
    return RunResult(snapshots, summary, grid, initial)


def write_outputs(result, config):
    """Write one CSV per snapshot plus the companion plot script."""
    paths = []
    for snap in result.snapshots:
        path = snapshot_filename(config.output_prefix, snap.time)
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_snapshot(snap, path)
        paths.append(path)
    script = write_plot_script(config.output_prefix, paths, config.params)
    return paths, script


def mixture_zone(snapshot, threshold=1e-3):
    """Boolean mask of cells where alpha1 * alpha2 exceeds ``threshold``."""
    c = snapshot.columns
    return c["alpha1"] * c["alpha2"] > threshold

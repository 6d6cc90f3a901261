"""Command line interface.

    vdwrelax run CONFIG [--epsilon E] [--cells N] [--t-end T]
    vdwrelax maxwell --temperature T
    vdwrelax relax --temperature T --rho R --rho1 R1 --rho2 R2 --epsilon E --t-end T

Failures exit with status 1 and print one line ``error: <Category>: <message>``
on stderr.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import hydro
from .equilibrium import MixtureState, maxwell_construction, spinodal_bounds
from .errors import VdwError
from .relaxation import RelaxationSettings, mixture_alpha1, relax_step
from .scenario import bundled_config_path, read_config, run, write_outputs
from .thermo import ThermoParams, chemical_potential, pressure, specific_free_energy


def _thermo_args(p):
    p.add_argument("--temperature", "-T", type=float, required=True)
    p.add_argument("--a", type=float, default=3.0, help="attraction constant")
    p.add_argument("--b", type=float, default=1.0 / 3.0, help="covolume")
    p.add_argument("--R", type=float, default=8.0 / 3.0, help="gas constant")


def _params(args):
    try:
        return ThermoParams(args.temperature, args.a, args.b, args.R)
    except ValueError as exc:
        raise SystemExit(_fail("ValidationError", str(exc)))


def cmd_maxwell(args, out):
    params = _params(args)
    spin = spinodal_bounds(params)
    sat = maxwell_construction(params, spin)
    for key, value in (("rho1_star", sat.rho1_star), ("rho2_star", sat.rho2_star),
                       ("p_star", sat.p_star), ("mu_star", sat.mu_star),
                       ("rho_minus", spin.rho_minus), ("rho_plus", spin.rho_plus)):
        out.write(f"{key}={value:.9g}\n")
    return 0


def cmd_relax(args, out):
    params = _params(args)
    settings = RelaxationSettings(args.epsilon)
    state = MixtureState(args.rho, min(args.rho1, args.rho2), max(args.rho1, args.rho2)).validate(params)
    times = np.linspace(0.0, args.t_end, args.samples + 1)
    out.write("t,rho1,rho2,alpha1,F,p1,p2,mu1,mu2\n")
    for k, t in enumerate(times):
        if k:
            state = relax_step(state, t - times[k - 1], settings, params)
        a1 = mixture_alpha1(state)
        F = a1 * specific_free_energy(state.rho1, params) + (1.0 - a1) * specific_free_energy(state.rho2, params)
        row = (t, state.rho1, state.rho2, a1, F,
               pressure(state.rho1, params), pressure(state.rho2, params),
               chemical_potential(state.rho1, params), chemical_potential(state.rho2, params))
        out.write(",".join(f"{v:.12g}" for v in row) + "\n")
    return 0


def cmd_run(args, out):
    path = Path(args.config)
    if not path.exists():
        path = bundled_config_path(args.config)
    config = read_config(path).with_overrides(
        epsilon=args.epsilon, n_cells=args.cells, t_end=args.t_end, output_prefix=args.output_prefix)
    c_min = hydro.CLAMP_C_MIN if args.clamp_sound_speed else None
    result = run(config, c_min=c_min)
    paths, script = write_outputs(result, config)
    s = result.summary
    out.write(f"steps={s.steps}\n")
    out.write(f"final_time={s.final_time:.9g}\n")
    out.write(f"mass_drift={s.mass_drift:.3e}\n")
    out.write(f"rho_min={s.rho_min:.9g}\n")
    out.write(f"rho_max={s.rho_max:.9g}\n")
    out.write(f"energy_initial={s.energy_history[0][1]:.12g}\n")
    out.write(f"energy_final={s.energy_history[-1][1]:.12g}\n")
    out.write(f"non_hyperbolic_events={s.non_hyperbolic_events}\n")
    out.write(f"max_cell_substeps={s.max_cell_substeps}\n")
    out.write(f"edge_cells_unchanged={str(s.edge_cells_unchanged).lower()}\n")
    out.write(f"wall_time={s.wall_time:.3f}\n")
    for p in paths:
        out.write(f"snapshot={p}\n")
    out.write(f"plot_script={script}\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="vdwrelax", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a Riemann-problem scenario")
    p.add_argument("config", help="configuration file, or the name of a bundled scenario")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--output-prefix", dest="output_prefix")
    p.add_argument("--clamp-sound-speed", action="store_true",
                   help=f"replace complex sound speeds by {hydro.CLAMP_C_MIN:g} instead of failing")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("maxwell", help="saturation pair and spinodal bounds")
    _thermo_args(p)
    p.set_defaults(func=cmd_maxwell)

    p = sub.add_parser("relax", help="integrate the homogeneous relaxation system")
    _thermo_args(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--rho1", type=float, required=True)
    p.add_argument("--rho2", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--t-end", type=float, dest="t_end", required=True)
    p.add_argument("--samples", type=int, default=200, help="number of output intervals")
    p.set_defaults(func=cmd_relax)
    return parser


def _fail(category, message):
    sys.stderr.write(f"error: {category}: {' '.join(str(message).split())}\n")
    return 1


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except VdwError as exc:
        return _fail(exc.category, exc)
    except (ValueError, OSError) as exc:
        return _fail(type(exc).__name__, exc)


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--cells N] [--repeat R]

Times each kernel on a random two-phase grid and one full run of the bundled
``paper_test.cfg`` scenario per backend.
"""

import argparse
import timeit

import numpy as np

from vdwrelax import kernels, scenario
from vdwrelax.thermo import ThermoParams


def random_grid(n, seed=0):
    rng = np.random.default_rng(seed)
    r1 = rng.uniform(0.05, 0.55, n)
    r2 = rng.uniform(1.55, 2.6, n)
    rho = r1 + rng.uniform(0.05, 0.95, n) * (r2 - r1)
    return np.ascontiguousarray(np.vstack([rho, r1, r2, rho * rng.normal(0, 0.3, n)]))


def bench(backend, W, params, repeat):
    k = kernels.get_backend(backend)
    a, b, RT = params.a, params.b, params.RT
    cases = {
        "wave_speed": lambda: k.wave_speed(W, a, b, RT, -1.0),
        "convective_update": lambda: k.convective_update(W, 1e-3, a, b, RT, False, -1.0),
        "relax_cells": lambda: k.relax_cells(W, 1e-3, 1e-3, 0.1, 0.5, 1e-12, 1_000_000, a, b, RT),
    }
    return {name: min(timeit.repeat(fn, number=1, repeat=repeat)) for name, fn in cases.items()}


def bench_scenario(backend):
    config = scenario.read_config(scenario.bundled_config_path("paper_test.cfg"))
    previous = kernels.set_backend(backend)
    try:
        return scenario.run(config).summary.wall_time
    finally:
        kernels.set_backend(previous)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    params = ThermoParams(0.85)
    W = random_grid(args.cells)
    backends = kernels.available_backends()
    results = {b: bench(b, W, params, args.repeat) for b in backends}
    results_run = {b: bench_scenario(b) for b in backends}

    print(f"{args.cells} cells, best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{b:>14}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    rows = list(results[backends[0]]) + ["paper_test run"]
    for name in rows:
        times = [results_run[b] if name == "paper_test run" else results[b][name] for b in backends]
        line = f"{name:<22}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times)
        if len(backends) > 1:
            line += f"{times[-1] / times[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()

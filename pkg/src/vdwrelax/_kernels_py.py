"""Numpy implementation of the grid kernels.

Used when the compiled ``_kernels`` extension is unavailable (or when
``VDWRELAX_PURE_PYTHON=1``).  Signatures and arithmetic mirror
``_kernels.pyx`` operation for operation.

The conserved state is a C-contiguous ``(4, N)`` float64 array holding
rows ``rho, rho1, rho2, rho*u``.  ``c_min < 0`` selects strict mode: a
negative sound-speed radicand is only counted (the caller raises);
``c_min >= 0`` replaces the speed of such cells by ``c_min``.
"""

import numpy as np

NAME = "python"


def _pressure(r, a, b, RT):
    return RT * r / (1.0 - b * r) - a * r * r


def _dpressure(r, a, b, RT):
    s = 1.0 - b * r
    return RT / (s * s) - 2.0 * a * r


def _chem(r, a, b, RT):
    s = 1.0 - b * r
    return RT * np.log(r / s) + RT * b * r / s - 2.0 * a * r


def _alpha1(rho, r1, r2):
    same = r1 == r2
    with np.errstate(divide="ignore", invalid="ignore"):
        al = (rho - r2) / np.where(same, 1.0, r1 - r2)
    return np.where(same, 1.0, al)


def _primitives(W, a, b, RT, c_min):
    rho, r1, r2, m = W
    u = m / rho
    al1 = _alpha1(rho, r1, r2)
    al2 = 1.0 - al1
    pmix = al1 * _pressure(r1, a, b, RT) + al2 * _pressure(r2, a, b, RT)
    rad = (al1 * r1 * _dpressure(r1, a, b, RT) + al2 * r2 * _dpressure(r2, a, b, RT)) / rho
    bad = rad < 0.0
    if c_min >= 0.0:
        c = np.where(bad, c_min, np.sqrt(np.where(bad, 0.0, rad)))
    else:
        c = np.sqrt(np.where(bad, 0.0, rad))
    return u, pmix, c, bad


def _bad_report(bad):
    n_bad = int(np.count_nonzero(bad))
    first = int(np.argmax(bad)) if n_bad else -1
    return n_bad, first


def wave_speed(W, a, b, RT, c_min):
    """Return ``(max |u| + c, n_bad, first_bad)``."""
    u, _, c, bad = _primitives(W, a, b, RT, c_min)
    n_bad, first = _bad_report(bad)
    return float(np.max(np.abs(u) + c)), n_bad, first


def convective_update(W, dt_dx, a, b, RT, periodic, c_min):
    """One Rusanov update.  Returns ``(W_new, n_bad, first_bad)``."""
    W = np.ascontiguousarray(W, dtype=np.float64)
    u, pmix, c, bad = _primitives(W, a, b, RT, c_min)
    n_bad, first = _bad_report(bad)
    F = np.empty_like(W)
    F[0] = W[0] * u
    F[1] = W[1] * u
    F[2] = W[2] * u
    F[3] = W[3] * u + pmix
    s = np.abs(u) + c
    if periodic:
        idx = np.r_[W.shape[1] - 1, np.arange(W.shape[1]), 0]
    else:
        idx = np.r_[0, np.arange(W.shape[1]), W.shape[1] - 1]
    We, Fe, se = W[:, idx], F[:, idx], s[idx]
    # face k sits between extended cells k and k+1
    smax = np.maximum(se[:-1], se[1:])
    flux = 0.5 * (Fe[:, :-1] + Fe[:, 1:]) - 0.5 * smax * (We[:, 1:] - We[:, :-1])
    Wn = W - dt_dx * (flux[:, 1:] - flux[:, :-1])
    return Wn, n_bad, first


def _rates(rho, r1, r2, a, b, RT):
    s1 = 1.0 - b * r1
    s2 = 1.0 - b * r2
    p1 = RT * r1 / s1 - a * r1 * r1
    p2 = RT * r2 / s2 - a * r2 * r2
    mu1 = RT * np.log(r1 / s1) + RT * b * r1 / s1 - 2.0 * a * r1
    mu2 = RT * np.log(r2 / s2) + RT * b * r2 / s2 - 2.0 * a * r2
    dp1 = RT / (s1 * s1) - 2.0 * a * r1
    dp2 = RT / (s2 * s2) - 2.0 * a * r2
    P = (rho - r1) * (rho - r2)
    B1 = r2 * (mu2 - mu1) + p1 - p2
    B2 = r1 * (mu1 - mu2) - p1 + p2
    d1 = -P * B1
    d2 = P * B2
    j11 = -((r2 - rho) * B1 + P * dp1 * (1.0 - r2 / r1))
    j12 = -((r1 - rho) * B1 + P * (mu2 - mu1))
    j21 = (r2 - rho) * B2 + P * (mu1 - mu2)
    j22 = (r1 - rho) * B2 + P * dp2 * (1.0 - r1 / r2)
    L = np.maximum(np.abs(j11) + np.abs(j12), np.abs(j21) + np.abs(j22))
    return d1, d2, L


def relax_cells(W, dt, eps, rate, stiff, delta, max_substeps, a, b, RT):
    """Sub-cycled explicit Euler relaxation of every cell over ``dt``.

    Returns ``(W_new, total_substeps, max_cell_substeps, fail_index)``;
    ``fail_index >= 0`` flags a cell that exceeded ``max_substeps`` (its
    values are left partially advanced).
    """
    W = np.array(W, dtype=np.float64, copy=True, order="C")
    rho_max = 1.0 / b
    n = W.shape[1]
    rho, r1, r2 = W[0], W[1], W[2]
    remaining = np.full(n, float(dt))
    count = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    k_eps = 1.0 / eps
    fail = -1
    while active.size:
        rh, a1, a2, rem = rho[active], r1[active], r2[active], remaining[active]
        d1, d2, L = _rates(rh, a1, a2, a, b, RT)
        rnorm = np.maximum(np.abs(d1), np.abs(d2))
        room = np.minimum(np.minimum(a1, rho_max - a2), a2 - a1)
        with np.errstate(divide="ignore", invalid="ignore"):
            hmax = np.where(rnorm > 0.0, rate * room * eps / rnorm, np.inf)
            hmax = np.where(L > 0.0, np.minimum(hmax, stiff * eps / L), hmax)
            last = hmax >= rem
            pieces = np.where(last, 1.0, np.ceil(rem / hmax))
        broken = ~last & ~(hmax > 0.0)
        over = (count[active] >= max_substeps) | broken
        if np.any(over):
            fail = int(active[np.argmax(over)])
            break
        h = np.where(last, rem, rem / pieces)
        last = last | (pieces == 1.0)
        n1 = a1 + h * k_eps * d1
        n2 = a2 + h * k_eps * d2
        lo = np.minimum(n1, n2)
        hi = np.maximum(n1, n2)
        lo = np.minimum(np.maximum(lo, delta), rho_max - delta)
        hi = np.minimum(np.maximum(hi, delta), rho_max - delta)
        lo = np.where(rh < lo, rh, lo)
        hi = np.where(rh > hi, rh, hi)
        r1[active] = lo
        r2[active] = hi
        remaining[active] = np.where(last, 0.0, rem - h)
        count[active] += 1
        active = active[remaining[active] > 0.0]
    total = int(count.sum())
    worst = int(count.max()) if n else 0
    return W, total, worst, fail

"""Lyapunov spectra and the Kaplan-Yorke dimension.

Exponents come from the Benettin method: co-integrate the tangent dynamics,
re-orthonormalize every few steps, average the logs of the QR diagonal
factors.  Convergence is judged by comparing the full-window estimate with
the estimate over the last quarter of the window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ThomasLabError
from .integrate import IntegratorConfig, integrate_with_tangent
from .model import as_state, check_damping

#: default window for spectra: long run, generous transient
SCAN_CONFIG = IntegratorConfig(step_h=0.01, t_end=20000.0, transient_skip=1000.0)

#: per-exponent drift threshold (last quarter vs full window) for `converged`
CONVERGENCE_TOL = 5e-3

#: deterministic off-diagonal nudge used between rows of a continued scan.
#: The diagonal x = y = z is invariant, so continuing from a state that has
#: collapsed onto it (an equilibrium) would pin every later row there; the
#: kick is orthogonal to the diagonal and small enough not to change basins.
CONTINUE_KICK = 1e-3 * np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)

DEFAULT_SCAN_START = (0.1, 0.2, 0.3)


@dataclass(frozen=True)
class LyapunovReport:
    """Spectrum at one damping value. exponents are sorted descending;
    d_ky is 0 when the largest exponent is negative. error is None for a
    clean run, else the failure message (exponents are NaN then)."""
    b: float
    exponents: tuple[float, float, float]
    d_ky: float
    t_total: float
    converged: bool
    s0: tuple[float, float, float]
    error: str | None = None


def kaplan_yorke(exponents) -> float:
    """Kaplan-Yorke dimension of a sorted (descending) exponent triple.

    k is the largest index whose partial sum S_k = l_1 + ... + l_k is
    non-negative; the dimension is k + S_k / |l_{k+1}|.  All partial sums
    non-negative gives 3; l_1 < 0 gives 0.
    """
    lams = [float(v) for v in exponents]
    if len(lams) != 3 or not all(math.isfinite(v) for v in lams):
        raise DomainError(f"need three finite exponents, got {exponents!r}")
    if not (lams[0] >= lams[1] >= lams[2]):
        raise DomainError(f"exponents must be sorted descending, got {lams}")
    if lams[0] < 0.0:
        return 0.0
    s = 0.0
    k = 0
    for v in lams:
        if s + v < 0.0:
            break
        s += v
        k += 1
    if k == 3:
        return 3.0
    return k + s / abs(lams[k])


def _exponents_from_blocks(log_r: np.ndarray, t_window: float,
                           block_dt: float) -> tuple[np.ndarray, np.ndarray]:
    full = log_r.sum(axis=0) / t_window
    m = log_r.shape[0]
    tail = log_r[3 * m // 4:]
    tail_lam = tail.sum(axis=0) / (tail.shape[0] * block_dt)
    order = np.argsort(full)[::-1]
    return full[order], tail_lam[order]


def lyapunov_spectrum(s0, b: float, cfg: IntegratorConfig | None = None,
                      renorm_every: int = 10) -> LyapunovReport:
    """Full Lyapunov spectrum at damping b from initial state s0.

    The sum of the exponents estimates the divergence -3b; `converged` means
    every exponent moved less than 0.005 between the full-window and
    last-quarter estimates.
    """
    s0 = as_state(s0)
    b = check_damping(b)
    if cfg is None:
        cfg = SCAN_CONFIG
    run = integrate_with_tangent(s0, b, cfg, renorm_every=renorm_every)
    block_dt = renorm_every * cfg.step_h
    full, tail = _exponents_from_blocks(run.log_r, run.t_window, block_dt)
    converged = bool(np.max(np.abs(full - tail)) < CONVERGENCE_TOL)
    return LyapunovReport(b=b,
                          exponents=tuple(float(v) for v in full),
                          d_ky=kaplan_yorke(full),
                          t_total=run.t_window,
                          converged=converged,
                          s0=tuple(float(v) for v in s0))


def spectrum_scan(b_values, cfg: IntegratorConfig | None = None,
                  renorm_every: int = 10,
                  s0_policy="continue",
                  s0_start=DEFAULT_SCAN_START,
                  threads: int = 1) -> list[LyapunovReport]:
    """Spectra over a set of damping values.

    s0_policy is either the string "continue" or a fixed initial state.  The
    continue policy processes b in descending order, seeding each row with
    the final state of the previous one plus a small off-diagonal kick (see
    CONTINUE_KICK), and returns rows in that processing order; it is
    inherently sequential, so threads is ignored there.  A fixed state keeps
    the caller's order and can run rows concurrently.  Rows that fail
    numerically are reported with error set and NaN exponents; a continued
    scan restarts from s0_start after a failure.  Results do not depend on
    `threads`.
    """
    if cfg is None:
        cfg = SCAN_CONFIG
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    bs = [check_damping(v) for v in b_values]
    if len(bs) == 0:
        return []
    continue_policy = isinstance(s0_policy, str)
    if continue_policy:
        if s0_policy != "continue":
            raise DomainError(f"unknown s0_policy {s0_policy!r}")
        order = sorted(bs, reverse=True)
        s0 = as_state(s0_start)
    else:
        order = bs
        s0 = as_state(s0_policy)

    def one_row(b, start):
        try:
            run = integrate_with_tangent(start, b, cfg, renorm_every=renorm_every)
            block_dt = renorm_every * cfg.step_h
            full, tail = _exponents_from_blocks(run.log_r, run.t_window, block_dt)
            report = LyapunovReport(
                b=b,
                exponents=tuple(float(v) for v in full),
                d_ky=kaplan_yorke(full),
                t_total=run.t_window,
                converged=bool(np.max(np.abs(full - tail)) < CONVERGENCE_TOL),
                s0=tuple(float(v) for v in start))
            return report, run.final_state
        except ThomasLabError as exc:
            report = LyapunovReport(
                b=b, exponents=(math.nan, math.nan, math.nan), d_ky=math.nan,
                t_total=0.0, converged=False,
                s0=tuple(float(v) for v in start), error=str(exc))
            return report, None

    if continue_policy:
        reports = []
        carry = s0.copy()
        for b in order:
            report, final = one_row(b, carry)
            reports.append(report)
            carry = s0.copy() if final is None else final + CONTINUE_KICK
        return reports

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return [r for r, _ in pool.map(lambda b: one_row(b, s0), order)]
    return [one_row(b, s0)[0] for b in order]

"""Poincare sections on the surface sin(x) = b z, and what they reveal.

The surface is the zero set of g(s) = sin(x) - b z, i.e. where zdot
vanishes, so trajectories cross it tangent to the (x, y) directions.
Crossings are located by sign change between RK4 steps and refined by
bisecting the substep until |g| <= 1e-9.  A crossing with g going from
negative to positive is UP, the opposite is DOWN; along a continuous
trajectory the two alternate.

The same machinery drives the bifurcation sweep (hit coordinates as a
function of b) and a recurrence-based limit cycle detector.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError, ThomasLabError
from .integrate import IntegratorConfig, Trajectory
from .metrics import CONTINUE_KICK, DEFAULT_SCAN_START
from .model import as_state, check_damping

G_TOL = 1e-9


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"


class CycleStatus(enum.Enum):
    PERIODIC = "periodic"
    APERIODIC = "aperiodic"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SectionHit:
    """One refined surface crossing: |sin(x) - b z| <= 1e-9 at `state`."""
    t: float
    state: tuple[float, float, float]
    direction: Direction
    init_id: int = 0


@dataclass(frozen=True)
class EnsembleSection:
    hits: list
    n_init: int
    n_failed: int
    failed_init_ids: tuple


@dataclass(frozen=True)
class SweepRow:
    """Recorded hit coordinates at one damping value (possibly empty)."""
    b: float
    values: np.ndarray
    error: str | None = None


@dataclass(frozen=True)
class CycleReport:
    status: CycleStatus
    period: float
    amplitude: float
    n_returns: int

    @property
    def periodic(self) -> bool:
        return self.status is CycleStatus.PERIODIC


def _run_section(s0: np.ndarray, b: float, cfg: IntegratorConfig,
                 max_hits: int | None):
    cap = cfg.n_steps // 2 + 2 if max_hits is None else int(max_hits)
    if cap < 1:
        raise DomainError(f"max_hits must be >= 1, got {max_hits}")
    times, states, dirs, n_hits, fail, final = _kernels.section_run(
        s0[0], s0[1], s0[2], b, cfg.step_h, cfg.n_steps, cfg.skip_steps,
        cap, G_TOL)
    if fail >= 0:
        raise IntegrationError("state became non-finite", fail * cfg.step_h)
    return times, states, dirs, final


def _build_hits(times, states, dirs, direction, init_id=0):
    hits = []
    for k in range(times.size):
        d = Direction.UP if dirs[k] > 0 else Direction.DOWN
        if direction is not None and d is not direction:
            continue
        hits.append(SectionHit(t=float(times[k]),
                               state=(float(states[k, 0]),
                                      float(states[k, 1]),
                                      float(states[k, 2])),
                               direction=d, init_id=init_id))
    return hits


def poincare_section(s0, b: float, cfg: IntegratorConfig | None = None,
                     direction: Direction | None = None,
                     max_hits: int | None = None) -> list[SectionHit]:
    """Surface crossings of the trajectory from s0, in time order.

    max_hits caps the number of collected crossings (both directions count;
    integration stops at the cap).  direction filters the returned list to
    one crossing sense.  b must be positive: at b = 0 the surface degenerates
    to sin(x) = 0.
    """
    s0 = as_state(s0)
    b = check_damping(b, positive=True)
    if cfg is None:
        cfg = IntegratorConfig()
    times, states, dirs, _ = _run_section(s0, b, cfg, max_hits)
    return _build_hits(times, states, dirs, direction)


def ensemble_section(n_init: int, b: float,
                     cfg: IntegratorConfig | None = None,
                     rng_seed: int = 0,
                     mean=(0.5, 0.5, 0.5), scale: float = 2.0,
                     direction: Direction | None = None,
                     max_hits_per_init: int | None = None,
                     threads: int = 1) -> EnsembleSection:
    """Sections of an ensemble of trajectories.

    Initial states are drawn isotropically, N(mean, scale^2 I), from a
    counter-based generator seeded with rng_seed, so the ensemble is
    reproducible.  Trajectories that fail numerically are skipped and
    counted.  Hits keep their init_id and are ordered by (init_id, t).
    Results are independent of `threads`.
    """
    if n_init < 1:
        raise DomainError(f"n_init must be >= 1, got {n_init}")
    b = check_damping(b, positive=True)
    if cfg is None:
        cfg = IntegratorConfig()
    if scale <= 0.0 or not math.isfinite(scale):
        raise DomainError(f"scale must be positive, got {scale}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    mean = as_state(mean)
    rng = np.random.Generator(np.random.Philox(rng_seed))
    starts = mean + scale * rng.standard_normal((n_init, 3))

    def one(i):
        try:
            times, states, dirs, _ = _run_section(
                starts[i], b, cfg, max_hits_per_init)
            return _build_hits(times, states, dirs, direction, init_id=i)
        except ThomasLabError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(n_init)))
    else:
        results = [one(i) for i in range(n_init)]

    hits = []
    failed = []
    for i, r in enumerate(results):
        if r is None:
            failed.append(i)
        else:
            hits.extend(r)
    return EnsembleSection(hits=hits, n_init=n_init,
                           n_failed=len(failed),
                           failed_init_ids=tuple(failed))


_COORD = {"x": 0, "y": 1, "z": 2}


def bifurcation_sweep(b_min: float, b_max: float, n_b: int = 600,
                      cfg: IntegratorConfig | None = None,
                      record: str = "x", max_hits: int = 200,
                      s0_policy="continue",
                      s0_start=DEFAULT_SCAN_START,
                      direction: Direction | None = None,
                      threads: int = 1) -> list[SweepRow]:
    """Section hit coordinates over a uniform grid of damping values.

    With s0_policy="continue" the grid is processed in descending b, each row
    seeded from the previous row's final state plus a small off-diagonal kick
    (the diagonal is invariant, so a row that has collapsed onto an
    equilibrium would otherwise pin all later rows to it).  A fixed initial
    state runs rows independently (and can use threads).  Rows that fail
    numerically carry an error message and an empty value list.  Rows are
    returned in ascending b order.
    """
    b_min, b_max = float(b_min), float(b_max)
    if not (0.0 < b_min <= b_max):
        raise DomainError(f"need 0 < b_min <= b_max, got [{b_min}, {b_max}]")
    if n_b < 1:
        raise DomainError(f"n_b must be >= 1, got {n_b}")
    if record not in _COORD:
        raise DomainError(f"record must be one of {sorted(_COORD)}, got {record!r}")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    if cfg is None:
        cfg = IntegratorConfig()
    col = _COORD[record]
    grid = np.linspace(b_min, b_max, n_b)
    continue_policy = isinstance(s0_policy, str)
    if continue_policy and s0_policy != "continue":
        raise DomainError(f"unknown s0_policy {s0_policy!r}")

    def run_row(b, start):
        times, states, dirs, final = _run_section(start, b, cfg, max_hits)
        if direction is None:
            keep = np.ones(times.size, dtype=bool)
        else:
            want = 1 if direction is Direction.UP else -1
            keep = dirs == want
        return SweepRow(b=float(b), values=states[keep, col].copy()), final

    rows = []
    if continue_policy:
        carry = as_state(s0_start)
        for b in grid[::-1]:
            try:
                row, final = run_row(b, carry)
                rows.append(row)
                carry = final + CONTINUE_KICK
            except ThomasLabError as exc:
                rows.append(SweepRow(b=float(b), values=np.empty(0),
                                     error=str(exc)))
                carry = as_state(s0_start)
    else:
        s0 = as_state(s0_policy)

        def one(b):
            try:
                return run_row(b, s0)[0]
            except ThomasLabError as exc:
                return SweepRow(b=float(b), values=np.empty(0), error=str(exc))

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(one, grid))
        else:
            rows = [one(b) for b in grid]
    return sorted(rows, key=lambda r: r.b)


def detect_limit_cycle(traj: Trajectory, b: float,
                       spatial_tol: float = 1e-6,
                       min_returns: int = 10) -> CycleReport:
    """Recurrence test on the section map of a fixed-step trajectory.

    Surface crossings are extracted and refined from the samples; the
    up-crossings form the return map.  If, for some multiplicity m, every one
    of the last ~10 pairs (hit i, hit i+m) agrees to spatial_tol in every
    coordinate, the trajectory is declared PERIODIC with the mean return
    time as the period.  Fewer than min_returns up-crossings (e.g. decay to
    an equilibrium off the surface) is INCONCLUSIVE, and so is recurrence
    with vanishing amplitude (decay onto an equilibrium that lies on the
    surface looks recurrent but is a point, not a cycle).  Otherwise
    APERIODIC.
    """
    b = check_damping(b, positive=True)
    if spatial_tol <= 0.0:
        raise DomainError(f"spatial_tol must be positive, got {spatial_tol}")
    if min_returns < 2:
        raise DomainError(f"min_returns must be >= 2, got {min_returns}")
    dt = np.diff(traj.times)
    if dt.size == 0:
        raise DomainError("limit cycle detection needs more than one sample")
    h = float(dt[0])
    if np.max(np.abs(dt - h)) > 1e-9:
        raise DomainError("limit cycle detection needs a uniform fixed-step trajectory")

    g = np.sin(traj.states[:, 0]) - b * traj.states[:, 2]
    neg = g < 0.0
    idx = np.flatnonzero(neg[:-1] != neg[1:])
    up_t = []
    up_s = []
    for i in idx:
        if not neg[i]:
            continue
        x, y, z = traj.states[i]
        tau, xs, ys, zs, _ = _kernels.refine_crossing(x, y, z, b, h, G_TOL)
        up_t.append(traj.times[i] + tau)
        up_s.append((xs, ys, zs))
    n_up = len(up_t)
    if n_up < min_returns:
        return CycleReport(status=CycleStatus.INCONCLUSIVE,
                           period=math.nan, amplitude=math.nan,
                           n_returns=n_up)
    up_t = np.array(up_t)
    up_s = np.array(up_s)

    for m in range(1, min(12, n_up - 1) + 1):
        k = min(10, n_up - m)
        a = up_s[n_up - m - k:n_up - m]
        bb = up_s[n_up - k:]
        if np.max(np.abs(bb - a)) > spatial_tol:
            continue
        period = float(np.mean(up_t[n_up - k:] - up_t[n_up - m - k:n_up - m]))
        w = traj.times >= traj.times[-1] - period
        seg = traj.states[w]
        amplitude = float(np.max(np.linalg.norm(seg - seg.mean(axis=0), axis=1)))
        if amplitude <= 10.0 * spatial_tol:
            return CycleReport(status=CycleStatus.INCONCLUSIVE,
                               period=math.nan, amplitude=amplitude,
                               n_returns=n_up)
        return CycleReport(status=CycleStatus.PERIODIC, period=period,
                           amplitude=amplitude, n_returns=n_up)
    return CycleReport(status=CycleStatus.APERIODIC, period=math.nan,
                       amplitude=math.nan, n_returns=n_up)

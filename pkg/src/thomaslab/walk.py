"""Statistics of the undamped (b = 0) regime.

With the damping removed the field is divergence-free and every lattice
point (pi n, pi m, pi k) is an equilibrium whose Jacobian eigenvalues are
the cube roots of (-1)^(n+m+k).  Trajectories hop chaotically between
lattice cells; the natural observables are the RMS speed (sqrt(3/2) once
the sin^2 terms equidistribute at 1/2), the mean squared displacement, and
a diffusion coefficient from its late-time slope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, InsufficientDataError, IntegrationError
from .integrate import Trajectory
from .model import SQRT3_2, EigenTriple, as_state, check_damping

RMS_SPEED_PREDICTION = math.sqrt(1.5)

#: shortest trajectory the walk statistics accept
MIN_DURATION = 1e4


@dataclass(frozen=True)
class LatticePoint:
    """Equilibrium of the undamped flow at (pi n, pi m, pi k)."""
    n: int
    m: int
    k: int

    def __post_init__(self):
        for v in (self.n, self.m, self.k):
            if not isinstance(v, (int, np.integer)):
                raise DomainError(f"lattice indices must be integers, got {v!r}")

    @property
    def state(self) -> np.ndarray:
        return math.pi * np.array([self.n, self.m, self.k], dtype=float)

    @property
    def sign(self) -> int:
        """(-1)^(n+m+k), the product of the Jacobian cosines."""
        return -1 if (self.n + self.m + self.k) % 2 else 1


def lattice_eigenvalues(p: LatticePoint) -> EigenTriple:
    """Exact Jacobian eigenvalues at a lattice point: cube roots of sign.

    The characteristic polynomial is lambda^3 = (-1)^(n+m+k), so the triple
    is {s, -s/2 +- i sqrt(3)/2} with s the sign. Every lattice point is
    unstable (one root strictly in the right half plane) and the real parts
    sum to zero, matching the vanishing divergence.
    """
    s = float(p.sign)
    return EigenTriple(lambda0=s, pair_re=-0.5 * s, pair_im=SQRT3_2)


def _require_long(traj: Trajectory, what: str) -> None:
    if traj.duration < MIN_DURATION:
        raise InsufficientDataError(
            f"{what} needs duration >= {MIN_DURATION:g}, got {traj.duration:g}")


def mean_speed(traj: Trajectory) -> float:
    """Root-mean-square speed of an undamped trajectory.

    Uses the b = 0 field, |v|^2 = sin^2 x + sin^2 y + sin^2 z, averaged over
    all samples; equidistribution of each sin^2 at 1/2 predicts sqrt(3/2).
    The caller is responsible for passing a b = 0 trajectory.
    """
    _require_long(traj, "mean_speed")
    v2 = np.sin(traj.states) ** 2
    return float(np.sqrt(v2.sum(axis=1).mean()))


def sin_sq_means(traj: Trajectory) -> np.ndarray:
    """Per-coordinate time averages of sin^2; each tends to 1/2."""
    _require_long(traj, "sin_sq_means")
    return np.mean(np.sin(traj.states) ** 2, axis=0)


def msd_curve(traj: Trajectory, lags) -> list[tuple[float, float]]:
    """Mean squared displacement at the requested lags.

    Windows start every lag/2 (half-overlapping), so neighbouring windows
    are only weakly correlated. Lags beyond a quarter of the duration are
    rejected; a lag with no complete window raises InsufficientDataError.
    """
    _require_long(traj, "msd_curve")
    dt = np.diff(traj.times)
    h = float(dt[0])
    if np.max(np.abs(dt - h)) > 1e-9:
        raise DomainError("msd needs a uniform fixed-step trajectory")
    n = len(traj)
    curve = []
    for lag in lags:
        lag = float(lag)
        if lag < 0.0:
            raise DomainError(f"lags must be non-negative, got {lag}")
        if lag > traj.duration / 4.0:
            raise DomainError(
                f"lag {lag:g} exceeds duration/4 = {traj.duration / 4.0:g}")
        if lag == 0.0:
            curve.append((0.0, 0.0))
            continue
        span = round(lag / h)
        if span < 1 or span > n - 1:
            raise InsufficientDataError(f"no complete window for lag {lag:g}")
        stride = max(1, span // 2)
        d = traj.states[span:] - traj.states[:-span]
        d = d[::stride]
        curve.append((span * h, float(np.mean(np.sum(d * d, axis=1)))))
    return curve


def diffusion_estimate(curve) -> float:
    """Slope/6 of a least-squares line through the largest decade of lags."""
    pts = [(l, v) for l, v in curve if l > 0.0]
    if len(pts) < 3:
        raise InsufficientDataError("diffusion fit needs >= 3 nonzero lags")
    lags = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    lo = lags.max() / 10.0
    sel = lags >= lo
    if sel.sum() < 3:
        sel = np.argsort(lags)[-3:]
    slope = np.polyfit(lags[sel], vals[sel], 1)[0]
    return float(slope) / 6.0


@dataclass(frozen=True)
class WalkStats:
    mean_speed: float
    msd_curve: tuple
    diffusion_estimate: float


def walk_stats(traj: Trajectory, lags=None) -> WalkStats:
    """Bundle of the walk observables for one undamped trajectory."""
    if lags is None:
        lags = np.geomspace(1.0, traj.duration / 4.0, 24)
    curve = msd_curve(traj, lags)
    return WalkStats(mean_speed=mean_speed(traj),
                     msd_curve=tuple(curve),
                     diffusion_estimate=diffusion_estimate(curve))


def streamed_speed_stats(s0, t_end: float, step_h: float = 0.01,
                         transient_skip: float = 0.0, b: float = 0.0):
    """Streaming (mean_speed, sin_sq_means) without storing the trajectory.

    Matches mean_speed / sin_sq_means on the same sampling grid; useful for
    very long runs.
    """
    s0 = as_state(s0)
    b = check_damping(b)
    if not (0 < step_h <= 0.1):
        raise DomainError(f"step_h must be in (0, 0.1], got {step_h}")
    if t_end - transient_skip < MIN_DURATION:
        raise InsufficientDataError(
            f"need a recorded window >= {MIN_DURATION:g}")
    n_steps = max(1, round(t_end / step_h))
    skip = min(round(transient_skip / step_h), n_steps - 1)
    v2, sx, sy, sz, fail = _kernels.speed_stats(
        s0[0], s0[1], s0[2], b, step_h, n_steps, skip)
    if fail >= 0:
        raise IntegrationError("state became non-finite", fail * step_h)
    return math.sqrt(v2), np.array([sx, sy, sz])


@dataclass(frozen=True)
class DensityReport:
    """Cellwise occupancy of an ensemble before and after transport.

    max_cell_drift is the largest relative change |final - initial| /
    expected_per_cell; noise_floor is the 3 sigma binomial fluctuation of
    that quantity (3 sqrt(2 / expected_per_cell)). With b = 0 the flow is
    divergence-free, so drift beyond the floor indicates a bug; with b > 0
    occupancy collapses onto the attractor and the drift is large.
    """
    cells_per_side: int
    expected_per_cell: float
    max_cell_drift: float
    noise_floor: float
    low_statistics: bool
    counts_initial: np.ndarray
    counts_final: np.ndarray


def density_check(n_init: int = 4096, t_end: float = 200.0,
                  cells_per_side: int = 8, rng_seed: int = 0,
                  step_h: float = 0.01, b: float = 0.0) -> DensityReport:
    """Transport a uniform ensemble on the torus and histogram both ends.

    Initial states are uniform on [0, 2 pi)^3; final states are folded back
    onto the torus (the field is 2 pi periodic, so folding commutes with the
    flow).
    """
    b = check_damping(b)
    if n_init < 8:
        raise DomainError(f"n_init must be >= 8, got {n_init}")
    if cells_per_side < 2:
        raise DomainError(f"cells_per_side must be >= 2, got {cells_per_side}")
    if not (0 < step_h <= 0.1) or t_end <= 0:
        raise DomainError("need 0 < step_h <= 0.1 and t_end > 0")
    two_pi = 2.0 * math.pi
    rng = np.random.Generator(np.random.Philox(rng_seed))
    starts = rng.uniform(0.0, two_pi, size=(n_init, 3))
    n_steps = max(1, round(t_end / step_h))
    finals, fails = _kernels.batch_final(starts, b, step_h, n_steps)
    bad = fails >= 0
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise IntegrationError(
            f"ensemble member {first} became non-finite",
            float(fails[first]) * step_h)
    edges = np.linspace(0.0, two_pi, cells_per_side + 1)
    c0, _ = np.histogramdd(np.mod(starts, two_pi), bins=[edges] * 3)
    c1, _ = np.histogramdd(np.mod(finals, two_pi), bins=[edges] * 3)
    mu = n_init / cells_per_side ** 3
    drift = float(np.max(np.abs(c1 - c0)) / mu)
    return DensityReport(cells_per_side=cells_per_side,
                         expected_per_cell=mu,
                         max_cell_drift=drift,
                         noise_floor=3.0 * math.sqrt(2.0 / mu),
                         low_statistics=mu < 20.0,
                         counts_initial=c0,
                         counts_final=c1)

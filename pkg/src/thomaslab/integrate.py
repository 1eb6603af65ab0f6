"""Fixed-step RK4 and adaptive RK45 integration of the Thomas flow.

The fixed-step path is the workhorse: it is deterministic (bit-identical
outputs for identical inputs), uniform in time, and has a tangent-space
variant used for Lyapunov spectra.  The adaptive path is a Dormand-Prince
5(4) pair for accuracy checks and stiff-ish damping values.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError
from .model import as_state, check_damping


class Method(enum.Enum):
    RK4_FIXED = "rk4"
    RK45_ADAPTIVE = "rk45"


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    step_h is the fixed RK4 step (and the initial/maximum step of the
    adaptive method); it must lie in (0, 0.1].  States before transient_skip
    are integrated but not recorded.
    """
    step_h: float = 0.01
    t_end: float = 5000.0
    transient_skip: float = 500.0
    method: Method = Method.RK4_FIXED
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self):
        if not (math.isfinite(self.step_h) and 0.0 < self.step_h <= 0.1):
            raise DomainError(f"step_h must be in (0, 0.1], got {self.step_h}")
        if not (math.isfinite(self.t_end) and self.t_end > 0.0):
            raise DomainError(f"t_end must be positive, got {self.t_end}")
        if not (math.isfinite(self.transient_skip)
                and 0.0 <= self.transient_skip < self.t_end):
            raise DomainError(
                f"transient_skip must lie in [0, t_end), got {self.transient_skip}")
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise DomainError(
                f"method must be one of {[m.value for m in Method]}, "
                f"got {self.method!r}") from None
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("abs_tol and rel_tol must be positive")

    @property
    def n_steps(self) -> int:
        """Total fixed steps; t_end is rounded to the nearest whole step."""
        return max(1, round(self.t_end / self.step_h))

    @property
    def skip_steps(self) -> int:
        return min(round(self.transient_skip / self.step_h), self.n_steps - 1)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: times strictly increasing, states finite, row i of
    states is the state at times[i]."""
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if t.ndim != 1 or s.shape != (t.size, 3):
            raise DomainError(
                f"shape mismatch: times {t.shape} vs states {s.shape}")
        if t.size == 0:
            raise DomainError("trajectory must contain at least one sample")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(s))):
            raise DomainError("trajectory samples must be finite")
        if np.any(np.diff(t) <= 0.0):
            raise DomainError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self) -> int:
        return self.times.size

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1].copy()


@dataclass(frozen=True)
class TangentRun:
    """Result of a Benettin tangent integration.

    log_r[k] holds the logs of the three (positive) QR diagonal factors of
    the k-th renormalization block; times[k] is the block end time.  The
    accumulation window starts after the transient with the tangent matrix
    seeded to the identity and spans a whole number of blocks.
    """
    times: np.ndarray
    log_r: np.ndarray
    t_window: float
    final_state: np.ndarray
    renorm_every: int


_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


def _np_field(s: np.ndarray, b: float) -> np.ndarray:
    return np.array([math.sin(s[1]) - b * s[0],
                     math.sin(s[2]) - b * s[1],
                     math.sin(s[0]) - b * s[2]])


def _integrate_rk45(s0: np.ndarray, b: float, cfg: IntegratorConfig) -> Trajectory:
    t = 0.0
    s = s0.copy()
    h = cfg.step_h
    h_min = 1e-12
    times = []
    samples = []
    if cfg.transient_skip == 0.0:
        times.append(0.0)
        samples.append(s.copy())
    k = np.empty((7, 3))
    while t < cfg.t_end:
        h = min(h, 0.1, cfg.t_end - t)
        k[0] = _np_field(s, b)
        for i in range(1, 7):
            k[i] = _np_field(s + h * (_DP_A[i] @ k[:i]), b)
        s5 = s + h * (_DP_B5 @ k)
        err = h * ((_DP_B5 - _DP_B4) @ k)
        if not np.all(np.isfinite(s5)):
            raise IntegrationError("state became non-finite", t + h)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(s), np.abs(s5))
        err_norm = math.sqrt(float(np.mean((err / scale) ** 2)))
        if err_norm <= 1.0:
            t += h
            s = s5
            if t >= cfg.transient_skip:
                times.append(t)
                samples.append(s.copy())
        factor = 0.9 * (err_norm ** -0.2) if err_norm > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if h < h_min:
            raise IntegrationError("step size underflow", t)
    return Trajectory(np.array(times), np.array(samples))


def integrate(s0, b: float, cfg: IntegratorConfig | None = None,
              rec_stride: int = 1) -> Trajectory:
    """Integrate the flow from s0 and return the post-transient trajectory.

    RK4_FIXED records every rec_stride-th step from transient_skip to t_end
    on the uniform grid i * step_h; RK45_ADAPTIVE records each accepted step
    (rec_stride must stay 1 there).  Raises IntegrationError (with the
    breakdown time) if the state stops being finite, which happens for
    numerically unstable step/damping combinations.
    """
    s0 = as_state(s0)
    b = check_damping(b)
    if cfg is None:
        cfg = IntegratorConfig()
    if not isinstance(rec_stride, int) or rec_stride < 1:
        raise DomainError(f"rec_stride must be a positive integer, got {rec_stride}")
    if cfg.method is Method.RK45_ADAPTIVE:
        if rec_stride != 1:
            raise DomainError("rec_stride applies to the fixed-step method only")
        return _integrate_rk45(s0, b, cfg)
    states, fail = _kernels.run_record(
        s0[0], s0[1], s0[2], b, cfg.step_h, cfg.n_steps, cfg.skip_steps,
        rec_stride)
    if fail >= 0:
        raise IntegrationError("state became non-finite", fail * cfg.step_h)
    times = np.arange(cfg.skip_steps, cfg.n_steps + 1, rec_stride) * cfg.step_h
    return Trajectory(times, states)


def integrate_with_tangent(s0, b: float, cfg: IntegratorConfig | None = None,
                           renorm_every: int = 10) -> TangentRun:
    """Co-integrate the flow and its tangent dynamics Ydot = J(s(t)) Y.

    Requires the fixed-step method (the renormalization cadence is defined in
    steps).  The tangent matrix starts as the identity at the end of the
    transient; every renorm_every steps it is replaced by its orthonormal QR
    factor and the log of each diagonal factor is recorded.  The window is
    truncated to a whole number of blocks.
    """
    s0 = as_state(s0)
    b = check_damping(b)
    if cfg is None:
        cfg = IntegratorConfig()
    if cfg.method is not Method.RK4_FIXED:
        raise DomainError("tangent integration requires Method.RK4_FIXED")
    if not isinstance(renorm_every, int) or renorm_every < 1:
        raise DomainError(f"renorm_every must be a positive integer, got {renorm_every}")
    n_blocks = (cfg.n_steps - cfg.skip_steps) // renorm_every
    if n_blocks < 1:
        raise DomainError("window shorter than one renormalization block")
    log_r, final, status, step = _kernels.tangent_run(
        s0[0], s0[1], s0[2], b, cfg.step_h, cfg.skip_steps, n_blocks, renorm_every)
    t_fail = step * cfg.step_h
    if status == _kernels.STATUS_NONFINITE:
        raise IntegrationError("state became non-finite", t_fail)
    if status == _kernels.STATUS_DEGENERATE:
        raise IntegrationError("tangent QR factor underflowed", t_fail)
    times = (cfg.skip_steps + (np.arange(n_blocks) + 1) * renorm_every) * cfg.step_h
    return TangentRun(times=times, log_r=log_r,
                      t_window=n_blocks * renorm_every * cfg.step_h,
                      final_state=final, renorm_every=renorm_every)

"""Equilibria of the flow, their stability, and the bifurcation catalogue.

Every equilibrium lies on the diagonal x = y = z = x* with x* a root of

    b x = sin(x)                                                   (*)

so enumeration is a one-dimensional root hunt and classification uses the
closed-form circulant eigenvalues.  Three bifurcation families organise the
root structure and its stability:

  PITCHFORK           b = 1, the origin sheds the pair x = +-sqrt(6(1-b))
  DOUBLE_SADDLE_NODE  tan(x*) = x* with sin(x*) > 0; root pairs appear
                      simultaneously at +-x* as b drops through sin(x*)/x*
  HOPF                b = -cos(x*)/2 together with (*); the complex pair of
                      the Jacobian crosses the imaginary axis.  The family is
                      infinite, one member per 2 pi window, b decreasing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import EigenTriple, check_damping, circulant_eigenvalues

MARGINAL_BAND = 1e-9
_RESIDUAL_SCALE = 1e-12


class StabilityClass(enum.Enum):
    STABLE_NODE = "stable_node"
    STABLE_SPIRAL = "stable_spiral"
    UNSTABLE_SPIRAL = "unstable_spiral"
    SADDLE_FOCUS = "saddle_focus"
    MARGINAL = "marginal"


class BifKind(enum.Enum):
    PITCHFORK = "pitchfork"
    HOPF = "hopf"
    DOUBLE_SADDLE_NODE = "double_saddle_node"


@dataclass(frozen=True)
class Equilibrium:
    """A diagonal fixed point with its local linear data."""
    x_star: float
    b: float
    c: float
    eigen: EigenTriple
    klass: StabilityClass
    residual: float


@dataclass(frozen=True)
class BifurcationEvent:
    kind: BifKind
    b_critical: float
    x_star: float


@dataclass(frozen=True)
class LyapunovAudit:
    """Result of sampling Vdot = -b r^2 + x sin y + y sin z + z sin x over a
    box, with V = r^2 / 2. margin is -Vdot / r^2."""
    n_samples: int
    violations: int
    min_margin: float
    worst_point: tuple[float, float, float]


def _root_fn(x: np.ndarray | float, b: float):
    return np.sin(x) - b * x


def _classify_eigen(eig: EigenTriple) -> StabilityClass:
    if min(abs(eig.lambda0), abs(eig.pair_re)) < MARGINAL_BAND:
        return StabilityClass.MARGINAL
    if eig.lambda0 > 0.0:
        if eig.pair_re > 0.0:
            return StabilityClass.UNSTABLE_SPIRAL
        return StabilityClass.SADDLE_FOCUS
    if eig.pair_re > 0.0:
        return StabilityClass.UNSTABLE_SPIRAL
    if eig.pair_im < MARGINAL_BAND:
        return StabilityClass.STABLE_NODE
    return StabilityClass.STABLE_SPIRAL


def classify(x_star: float, b: float) -> Equilibrium:
    """Build the Equilibrium record for a root x* of b x = sin(x).

    The residual |sin(x*) - b x*| must not exceed 1e-12 * max(1, |x*|); pass
    refined roots, not scan-grid candidates.
    """
    x_star = float(x_star)
    b = check_damping(b, positive=True)
    if not math.isfinite(x_star):
        raise DomainError(f"x_star must be finite, got {x_star}")
    residual = abs(math.sin(x_star) - b * x_star)
    if residual > _RESIDUAL_SCALE * max(1.0, abs(x_star)):
        raise DomainError(
            f"x_star = {x_star!r} is not a root at b = {b!r} "
            f"(residual {residual:.3e})")
    c = math.cos(x_star)
    eig = circulant_eigenvalues(c, b)
    return Equilibrium(x_star=x_star, b=b, c=c, eigen=eig,
                       klass=_classify_eigen(eig), residual=residual)


def _bisect_root(b: float, lo: float, hi: float) -> float:
    """Bisection on sin(x) - b x down to an interval of 1e-13, then one
    Newton polish when the derivative is healthy."""
    flo = math.sin(lo) - b * lo
    for _ in range(200):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        fmid = math.sin(mid) - b * mid
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    d = math.cos(x) - b
    if abs(d) > 1e-8:
        x -= (math.sin(x) - b * x) / d
    return x


def find_fixed_points(b: float, scan_step: float = 1e-3,
                      x_max: float | None = None) -> list[Equilibrium]:
    """All equilibria with |x*| <= x_max, classified, ascending in x*.

    The root at the origin always exists.  The remaining roots come in +-
    pairs by oddness of sin(x) - b x, so only x > 0 is scanned (grid of width
    scan_step, sign changes refined by bisection).  A grid minimum of |f|
    that touches zero to 1e-12 without a sign change is a saddle-node
    tangency and contributes a single MARGINAL root.

    x_max defaults to max(pi, 1.2 / b), past the last possible root since
    |sin| <= 1 forces |x*| <= 1/b.
    """
    b = check_damping(b, positive=True)
    if x_max is None:
        x_max = max(math.pi, 1.2 / b)
    if not (math.isfinite(x_max) and x_max >= math.pi):
        raise DomainError(f"x_max must be finite and >= pi, got {x_max}")
    if not (0.0 < scan_step <= 0.1):
        raise DomainError(f"scan_step must be in (0, 0.1], got {scan_step}")

    xs = np.arange(0.0, x_max + scan_step, scan_step)
    f = _root_fn(xs, b)
    roots = [0.0]
    sign_change = (f[:-1] * f[1:]) < 0.0
    for i in np.flatnonzero(sign_change):
        roots.append(_bisect_root(b, xs[i], xs[i + 1]))
    # exact zeros on grid nodes (other than the origin)
    for i in np.flatnonzero(f[1:] == 0.0):
        roots.append(float(xs[i + 1]))

    # tangency hunt: local minima of |f| without sign change
    af = np.abs(f)
    interior = np.arange(1, af.size - 1)
    is_min = (af[interior] <= af[interior - 1]) & (af[interior] <= af[interior + 1])
    for i in interior[is_min]:
        if sign_change[i - 1] or sign_change[i]:
            continue
        if af[i] > 1e-6:
            continue
        # Newton on the derivative to land on the flat touch point
        x = float(xs[i])
        for _ in range(60):
            d2 = -math.sin(x)
            if d2 == 0.0:
                break
            step = (math.cos(x) - b) / d2
            x -= step
            if abs(step) < 1e-15:
                break
        res = abs(math.sin(x) - b * x)
        if res <= _RESIDUAL_SCALE * max(1.0, abs(x)):
            if all(abs(x - r) > 10.0 * scan_step for r in roots):
                roots.append(x)

    out = sorted({r for r in roots if r > 0.0})
    full = [-r for r in reversed(out)] + [0.0] + out
    return [classify(r, b) for r in full]


def pitchfork_estimate(b: float) -> float:
    """Leading-order amplitude of the symmetric root pair just below the
    pitchfork: x* ~ sqrt(6 (1 - b)), valid for 0 < b < 1."""
    b = check_damping(b, positive=True)
    if b >= 1.0:
        raise DomainError(f"the symmetric pair only exists for b < 1, got {b}")
    return math.sqrt(6.0 * (1.0 - b))


def _scan_roots(fn, lo: float, hi: float, step: float = 1e-3) -> list[float]:
    """Sign-change scan plus bisection refinement for smooth scalar fn."""
    xs = np.arange(lo, hi + step, step)
    vals = fn(xs)
    roots = []
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0.0):
        a, bnd = xs[i], xs[i + 1]
        fa = fn(a)
        for _ in range(200):
            if bnd - a <= 1e-15 * max(1.0, abs(bnd)):
                break
            mid = 0.5 * (a + bnd)
            fm = fn(mid)
            if fm == 0.0:
                a = bnd = mid
                break
            if (fm < 0.0) == (fa < 0.0):
                a, fa = mid, fm
            else:
                bnd = mid
        roots.append(0.5 * (a + bnd))
    return roots


def hopf_points(n_max: int = 4) -> list[BifurcationEvent]:
    """First n_max members of the Hopf family, b descending.

    Members solve sin(x*) + (x*/2) cos(x*) = 0 with cos(x*) < 0 (equivalent
    to the complex pair sitting on the axis, b = -cos(x*)/2, at a root of
    b x = sin x).  One member per 2 pi window; the family accumulates at
    b -> 0.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    events = []
    hi = 2.0 + 2.0 * math.pi * (n_max + 1)
    for x in _scan_roots(lambda t: np.sin(t) + 0.5 * t * np.cos(t), 1.0, hi):
        if math.cos(x) >= 0.0:
            continue
        events.append(BifurcationEvent(kind=BifKind.HOPF,
                                       b_critical=-0.5 * math.cos(x),
                                       x_star=x))
        if len(events) == n_max:
            break
    return events


def saddle_node_points(n_max: int = 4) -> list[BifurcationEvent]:
    """First n_max double saddle-node events, b descending.

    Tangency of sin(x) with the ray b x: tan(x*) = x* with sin(x*) > 0 and
    x* > pi, at b = sin(x*)/x*.  Each event creates the two root pairs
    {+-x-} and {+-x+} simultaneously as b decreases through b_critical.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    events = []
    hi = 8.0 + 2.0 * math.pi * (n_max + 1)
    for x in _scan_roots(lambda t: t * np.cos(t) - np.sin(t), math.pi + 0.5, hi):
        if math.sin(x) <= 0.0:
            continue
        events.append(BifurcationEvent(kind=BifKind.DOUBLE_SADDLE_NODE,
                                       b_critical=math.sin(x) / x,
                                       x_star=x))
        if len(events) == n_max:
            break
    return events


def all_bifurcations(n_max: int = 4) -> list[BifurcationEvent]:
    """Pitchfork plus the first n_max Hopf and saddle-node events, sorted by
    descending b_critical."""
    events = [BifurcationEvent(kind=BifKind.PITCHFORK, b_critical=1.0, x_star=0.0)]
    events.extend(hopf_points(n_max))
    events.extend(saddle_node_points(n_max))
    return sorted(events, key=lambda e: -e.b_critical)


def lyapunov_function_check(b: float, n_samples: int = 100000,
                            box_half_width: float = 10.0,
                            rng_seed: int = 0) -> LyapunovAudit:
    """Sample Vdot for V = (x^2 + y^2 + z^2)/2 over a centred box.

    Vdot = -b r^2 + x sin y + y sin z + z sin x <= -(b - 1) r^2, so for b > 1
    every sample away from the origin must come back strictly negative; the
    audit reports how many do not, and the smallest margin -Vdot / r^2.
    Points within 1e-6 of the origin are resampled.
    """
    b = check_damping(b, positive=True)
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    if not (math.isfinite(box_half_width) and box_half_width > 0.0):
        raise DomainError(f"box_half_width must be positive, got {box_half_width}")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    pts = rng.uniform(-box_half_width, box_half_width, size=(n_samples, 3))
    r2 = np.einsum("ij,ij->i", pts, pts)
    tiny = r2 <= 1e-12
    while np.any(tiny):
        pts[tiny] = rng.uniform(-box_half_width, box_half_width,
                                size=(int(tiny.sum()), 3))
        r2 = np.einsum("ij,ij->i", pts, pts)
        tiny = r2 <= 1e-12
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    vdot = -b * r2 + x * np.sin(y) + y * np.sin(z) + z * np.sin(x)
    margins = -vdot / r2
    worst = int(np.argmin(margins))
    return LyapunovAudit(n_samples=n_samples,
                         violations=int(np.count_nonzero(vdot >= 0.0)),
                         min_margin=float(margins[worst]),
                         worst_point=tuple(pts[worst]))

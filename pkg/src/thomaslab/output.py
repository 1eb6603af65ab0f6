"""Report writers.

Every report begins with a metadata record (version, command, the canonical
resolved argument vector, and the seed if any) so that a report can be
reproduced byte for byte by re-running the recorded argv.  CSV reports put
it on a leading `# {json}` comment line; JSON reports carry it under the
"meta" key.  Floats are written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""
from __future__ import annotations

import io
import json
import math
import sys
from contextlib import contextmanager

import numpy as np

from ._version import __version__

#: column layouts of the delimited reports
TRAJECTORY_HEADER = ["t", "x", "y", "z"]
BIFURCATIONS_HEADER = ["kind", "b_critical", "x_star"]
LYAPUNOV_HEADER = ["b", "lambda1", "lambda2", "lambda3", "d_ky", "converged"]
SECTION_HEADER = ["init_id", "t", "x", "y", "z", "direction"]
SWEEP_HEADER = ["b", "hit_index", "value"]


def fmt_float(x) -> str:
    return "%.17g" % float(x)


def build_meta(command: str, argv: list[str], seed: int | None = None) -> dict:
    return {
        "tool": "thomaslab",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "seed": seed,
    }


@contextmanager
def _open_target(target):
    """Accept a path, '-' (stdout) or an open text file."""
    if target == "-":
        yield sys.stdout
    elif isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
    elif isinstance(target, io.TextIOBase) or hasattr(target, "write"):
        yield target
    else:
        raise TypeError(f"cannot write to {target!r}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(target, header: list[str], rows, meta: dict) -> None:
    with _open_target(target) as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def write_json(target, payload: dict, meta: dict) -> None:
    doc = {"meta": meta}
    doc.update(payload)
    with _open_target(target) as fh:
        json.dump(_sanitize(doc), fh, indent=2, sort_keys=False,
                  allow_nan=False)
        fh.write("\n")


def _json_safe(x: float):
    # JSON has no NaN/Inf literals; encode them as strings
    x = float(x)
    if math.isfinite(x):
        return x
    return str(x)


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _json_safe(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def trajectory_rows(traj):
    for t, s in zip(traj.times, traj.states):
        yield (t, s[0], s[1], s[2])


def write_trajectory(target, traj, meta: dict) -> None:
    write_csv(target, TRAJECTORY_HEADER, trajectory_rows(traj), meta)


def equilibrium_record(eq) -> dict:
    return {
        "x_star": eq.x_star,
        "c": eq.c,
        "lambda0": eq.eigen.lambda0,
        "lambda_re": eq.eigen.pair_re,
        "lambda_im": eq.eigen.pair_im,
        "class": eq.klass.value,
    }


def write_equilibria(target, equilibria, b: float, meta: dict) -> None:
    payload = {
        "b": b,
        "count": len(equilibria),
        "equilibria": [equilibrium_record(e) for e in equilibria],
    }
    write_json(target, payload, meta)


def write_bifurcations(target, events, meta: dict) -> None:
    rows = ((e.kind.value, e.b_critical, e.x_star) for e in events)
    write_csv(target, BIFURCATIONS_HEADER, rows, meta)


def lyapunov_rows(reports):
    for r in reports:
        l1, l2, l3 = r.exponents
        yield (r.b, l1, l2, l3, r.d_ky, bool(r.converged))


def write_lyapunov(target, reports, meta: dict) -> None:
    write_csv(target, LYAPUNOV_HEADER, lyapunov_rows(reports), meta)


def section_rows(hits):
    for h in hits:
        x, y, z = h.state
        yield (h.init_id, h.t, x, y, z, h.direction.value)


def write_section(target, hits, meta: dict) -> None:
    write_csv(target, SECTION_HEADER, section_rows(hits), meta)


def sweep_rows(rows):
    for r in rows:
        for j, v in enumerate(r.values):
            yield (r.b, j, v)


def write_sweep(target, rows, meta: dict) -> None:
    write_csv(target, SWEEP_HEADER, sweep_rows(rows), meta)


def write_walk_stats(target, stats, meta: dict) -> None:
    payload = {
        "mean_speed": stats.mean_speed,
        "diffusion_estimate": stats.diffusion_estimate,
        "msd": [[l, v] for l, v in stats.msd_curve],
    }
    write_json(target, payload, meta)


def write_density(target, report, meta: dict) -> None:
    payload = {
        "cells_per_side": report.cells_per_side,
        "expected_per_cell": report.expected_per_cell,
        "max_cell_drift": report.max_cell_drift,
        "noise_floor": report.noise_floor,
        "low_statistics": bool(report.low_statistics),
        "counts_initial": np.asarray(report.counts_initial, dtype=int).tolist(),
        "counts_final": np.asarray(report.counts_final, dtype=int).tolist(),
    }
    write_json(target, payload, meta)

"""Validators for the report files this package writes.

Shipped with the library (rather than only in the test tree) so downstream
pipelines can assert a file is well-formed before consuming it.  Each
validator raises SchemaError listing all the offences it found, and returns
the parsed content on success.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError
from .output import (BIFURCATIONS_HEADER, LYAPUNOV_HEADER, SECTION_HEADER,
                     SWEEP_HEADER, TRAJECTORY_HEADER)

_META_KEYS = {"tool", "version", "command", "argv", "seed"}
_KINDS = {"pitchfork", "hopf", "double_saddle_node"}
_CLASSES = {"stable_node", "stable_spiral", "unstable_spiral",
            "saddle_focus", "marginal"}


def _check_meta(meta, errors: list[str]) -> None:
    if not isinstance(meta, dict):
        errors.append("metadata is not an object")
        return
    missing = _META_KEYS - meta.keys()
    if missing:
        errors.append(f"metadata missing keys {sorted(missing)}")
        return
    if meta["tool"] != "thomaslab":
        errors.append(f"metadata tool is {meta['tool']!r}")
    if not isinstance(meta["argv"], list) or \
            not all(isinstance(a, str) for a in meta["argv"]):
        errors.append("metadata argv must be a list of strings")
    if meta["seed"] is not None and not isinstance(meta["seed"], int):
        errors.append("metadata seed must be an integer or null")


def _read_csv(path, header: list[str]):
    errors: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith("# "):
            raise SchemaError(f"{path}: missing metadata comment line")
        try:
            meta = json.loads(first[2:])
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: metadata is not valid JSON: {exc}")
        _check_meta(meta, errors)
        head = fh.readline().rstrip("\n")
        if head.split(",") != header:
            errors.append(f"header {head!r} != expected {','.join(header)!r}")
        rows = []
        for ln, line in enumerate(fh, start=3):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                errors.append(f"line {ln}: expected {len(header)} cells, got {len(cells)}")
                continue
            rows.append(cells)
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, rows


def _as_float(cell: str, what: str, errors: list[str],
              allow_nan: bool = False) -> float:
    try:
        v = float(cell)
    except ValueError:
        errors.append(f"{what}: not a number: {cell!r}")
        return math.nan
    if not allow_nan and not math.isfinite(v):
        errors.append(f"{what}: not finite: {cell!r}")
    return v


def validate_trajectory_csv(path):
    """Check t,x,y,z layout, finiteness and strictly increasing time."""
    meta, rows = _read_csv(path, TRAJECTORY_HEADER)
    errors: list[str] = []
    data = np.array([[_as_float(c, f"row {i}", errors) for c in r]
                     for i, r in enumerate(rows)])
    if data.size == 0:
        errors.append("no samples")
    elif np.any(np.diff(data[:, 0]) <= 0):
        errors.append("times are not strictly increasing")
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, data


def validate_equilibria_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    errors: list[str] = []
    _check_meta(doc.get("meta"), errors)
    eqs = doc.get("equilibria")
    if not isinstance(eqs, list):
        errors.append("equilibria must be a list")
        eqs = []
    if doc.get("count") != len(eqs):
        errors.append("count does not match the number of records")
    for i, rec in enumerate(eqs):
        for key in ("x_star", "c", "lambda0", "lambda_re", "lambda_im"):
            if not isinstance(rec.get(key), (int, float)):
                errors.append(f"record {i}: {key} missing or not a number")
        if rec.get("class") not in _CLASSES:
            errors.append(f"record {i}: bad class {rec.get('class')!r}")
        if isinstance(rec.get("lambda_im"), (int, float)) and rec["lambda_im"] < 0:
            errors.append(f"record {i}: lambda_im must be >= 0")
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return doc


def validate_bifurcations_csv(path):
    meta, rows = _read_csv(path, BIFURCATIONS_HEADER)
    errors: list[str] = []
    for i, (kind, bcrit, xstar) in enumerate(rows):
        if kind not in _KINDS:
            errors.append(f"row {i}: unknown kind {kind!r}")
        b = _as_float(bcrit, f"row {i} b_critical", errors)
        if math.isfinite(b) and b <= 0:
            errors.append(f"row {i}: b_critical must be positive")
        _as_float(xstar, f"row {i} x_star", errors)
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, rows


def validate_lyapunov_csv(path):
    meta, rows = _read_csv(path, LYAPUNOV_HEADER)
    errors: list[str] = []
    out = []
    for i, cells in enumerate(rows):
        b = _as_float(cells[0], f"row {i} b", errors)
        lams = [_as_float(c, f"row {i} lambda", errors, allow_nan=True)
                for c in cells[1:4]]
        dky = _as_float(cells[4], f"row {i} d_ky", errors, allow_nan=True)
        if cells[5] not in ("true", "false"):
            errors.append(f"row {i}: converged must be true/false, got {cells[5]!r}")
        finite = all(math.isfinite(v) for v in lams)
        if finite and not (lams[0] >= lams[1] >= lams[2]):
            errors.append(f"row {i}: exponents not sorted descending")
        if finite and math.isfinite(dky) and not (0.0 <= dky <= 3.0):
            errors.append(f"row {i}: d_ky outside [0, 3]")
        out.append((b, *lams, dky, cells[5] == "true"))
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, out


def validate_section_csv(path):
    meta, rows = _read_csv(path, SECTION_HEADER)
    errors: list[str] = []
    last_t: dict[int, float] = {}
    out = []
    for i, cells in enumerate(rows):
        try:
            init_id = int(cells[0])
        except ValueError:
            errors.append(f"row {i}: init_id not an integer: {cells[0]!r}")
            init_id = -1
        t = _as_float(cells[1], f"row {i} t", errors)
        state = [_as_float(c, f"row {i} state", errors) for c in cells[2:5]]
        if cells[5] not in ("up", "down"):
            errors.append(f"row {i}: direction must be up/down, got {cells[5]!r}")
        if init_id in last_t and t <= last_t[init_id]:
            errors.append(f"row {i}: time not increasing within init {init_id}")
        last_t[init_id] = t
        out.append((init_id, t, *state, cells[5]))
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, out


def validate_sweep_csv(path):
    meta, rows = _read_csv(path, SWEEP_HEADER)
    errors: list[str] = []
    out = []
    for i, (bcell, idxcell, vcell) in enumerate(rows):
        b = _as_float(bcell, f"row {i} b", errors)
        if math.isfinite(b) and b <= 0:
            errors.append(f"row {i}: b must be positive")
        try:
            idx = int(idxcell)
            if idx < 0:
                errors.append(f"row {i}: hit_index must be >= 0")
        except ValueError:
            errors.append(f"row {i}: hit_index not an integer: {idxcell!r}")
            idx = -1
        v = _as_float(vcell, f"row {i} value", errors)
        out.append((b, idx, v))
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return meta, out


def _number(doc, key, errors, allow_str_nan=False):
    v = doc.get(key)
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if allow_str_nan and isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            pass
    errors.append(f"{key} missing or not a number")
    return math.nan


def validate_walk_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    errors: list[str] = []
    _check_meta(doc.get("meta"), errors)
    _number(doc, "mean_speed", errors)
    _number(doc, "diffusion_estimate", errors, allow_str_nan=True)
    msd = doc.get("msd")
    if not isinstance(msd, list) or any(
            not (isinstance(p, list) and len(p) == 2) for p in msd or []):
        errors.append("msd must be a list of [lag, value] pairs")
    else:
        lags = [p[0] for p in msd]
        if any(not isinstance(v, (int, float)) for v in lags):
            errors.append("msd lags must be numbers")
        elif lags != sorted(lags):
            errors.append("msd lags must be non-decreasing")
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return doc


def validate_density_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    errors: list[str] = []
    _check_meta(doc.get("meta"), errors)
    n = doc.get("cells_per_side")
    if not isinstance(n, int) or n < 2:
        errors.append("cells_per_side must be an integer >= 2")
        n = 0
    _number(doc, "expected_per_cell", errors)
    _number(doc, "max_cell_drift", errors)
    _number(doc, "noise_floor", errors)
    if not isinstance(doc.get("low_statistics"), bool):
        errors.append("low_statistics must be a boolean")
    for key in ("counts_initial", "counts_final"):
        counts = doc.get(key)
        try:
            arr = np.asarray(counts)
        except Exception:
            arr = None
        if arr is None or (n and arr.shape != (n, n, n)):
            errors.append(f"{key} must be a {n}x{n}x{n} nested list")
    if errors:
        raise SchemaError(f"{path}: " + "; ".join(errors))
    return doc

"""Serialization helpers: deterministic JSON and RFC-4180-style CSV.

Two rules govern everything here.  JSON output never contains NaN or
infinity: a non-finite number is written as null and a sibling reason field
says why the value is missing.  CSV output always has a header row and a
constant column count, with '.' as the decimal separator and scientific
notation permitted.
"""
from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import ArityError, DomainError

NONFINITE_REASON = "non-finite value replaced"


def _is_number(x) -> bool:
    return isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(
        x, bool
    )


def sanitize_for_json(obj):
    """Deep copy with numpy scalars unwrapped and non-finite numbers nulled.

    Dict entries that lose a value grow a '<key>_reason' sibling; bare list
    elements just become null (their position is the identification).
    """
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if _is_number(value) and not math.isfinite(float(value)):
                out[str(key)] = None
                out[f"{key}_reason"] = NONFINITE_REASON
            else:
                out[str(key)] = sanitize_for_json(value)
        return out
    if isinstance(obj, (list, tuple)):
        return [
            None if _is_number(v) and not math.isfinite(float(v)) else sanitize_for_json(v)
            for v in obj
        ]
    if isinstance(obj, np.ndarray):
        return sanitize_for_json(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps_json(obj) -> str:
    """Deterministic UTF-8 JSON text: sorted keys, two-space indent,
    no NaN/Inf, trailing newline."""
    payload = sanitize_for_json(obj)
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_json(obj))


def format_number(x) -> str:
    """Shortest round-trip decimal form. Non-finite values are refused:
    CSV rows carry measurements, and a measurement that does not exist
    should have stopped the run before reaching the writer."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"cannot format non-finite value {x!r} into CSV")
    return repr(x)


def write_csv(path, header, rows) -> None:
    """CSV with CRLF line endings and a fixed column count.

    Every row must match the header width; a ragged table is a bug in the
    caller, not something to smooth over.
    """
    header = [str(h) for h in header]
    if not header:
        raise ArityError("CSV needs at least one column")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            cells = [c if isinstance(c, str) else format_number(c) for c in row]
            if len(cells) != len(header):
                raise ArityError(
                    f"row has {len(cells)} cells, header has {len(header)}"
                )
            writer.writerow(cells)


def diagnostics_rows(run):
    """Per-step time series of an evolution run.

    Columns: t, sup_q, q_at_origin, min_discriminant, momentum_integral,
    momentum_corrected.  The last column adds back the boundary flux and the
    strips dropped by the moving edges, so it is the quantity whose drift the
    conservation check bounds; the raw integral is kept beside it because the
    difference between the two is the whole story of the excision.
    """
    return [
        (t, s, c, d, m, inv)
        for t, s, c, d, m, inv in zip(
            run.times, run.sup_slope, run.center_series,
            run.min_disc, run.momentum, run.invariant,
        )
    ]


DIAGNOSTICS_HEADER = (
    "t", "sup_q", "q_at_origin", "min_discriminant",
    "momentum_integral", "momentum_corrected",
)


def write_diagnostics_csv(path, run) -> None:
    write_csv(path, DIAGNOSTICS_HEADER, diagnostics_rows(run))


SNAPSHOT_HEADER = ("x", "u", "p", "q")


def write_snapshot_csv(path, state) -> None:
    """One field snapshot: x, u, p, q at the state's time."""
    rows = zip(state.xs, state.u, state.p, state.q)
    write_csv(path, SNAPSHOT_HEADER, rows)


STEADY_ODE_HEADER = ("rho", "v_numeric", "v_closed_claimed", "v_closed_corrected")


def write_steady_ode_csv(path, rhos, v_numeric, v_claimed, v_corrected) -> None:
    rhos = np.asarray(rhos, dtype=float)
    cols = (rhos, np.asarray(v_numeric, float), np.asarray(v_claimed, float),
            np.asarray(v_corrected, float))
    if any(c.shape != rhos.shape for c in cols):
        raise ArityError("steady ODE columns must share one length")
    write_csv(path, STEADY_ODE_HEADER, zip(*cols))


PROFILE_HEADER = ("rho", "phi", "dphi", "degeneracy_gap")


def write_profile_csv(path, run) -> None:
    """Profile trace with the gap 1 - rho^2 - phi^2 spelled out per row."""
    gap = 1.0 - run.rhos**2 - run.phi**2
    write_csv(path, PROFILE_HEADER, zip(run.rhos, run.phi, run.dphi, gap))

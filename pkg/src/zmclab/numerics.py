"""Shared numerical substrate.

Uniform 1D grids, second-order finite-difference stencils, the classical
RK4 integrator (fixed step and a step-halving adaptive wrapper), composite
trapezoid quadrature, and least-squares fits in log-log coordinates.

All arithmetic is IEEE double precision. Stencils are central everywhere;
one-sided second-order variants exist but only fire when a caller asks for
them explicitly, otherwise evaluating at an array edge is an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityError,
    BoundaryError,
    DomainError,
    NonFiniteError,
    StepFloorError,
)

# numpy renamed trapz; support both spellings
_np_trapezoid = getattr(np, "trapezoid", None)
if _np_trapezoid is None:  # pragma: no cover - depends on numpy version
    _np_trapezoid = np.trapz


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [lo, hi] with n cells, hence n+1 nodes.

    Node i sits at lo + i*spacing for i in 0..n.
    """

    lo: float
    hi: float
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)):
            raise DomainError(f"cell count must be an integer, got {self.n!r}")
        if self.n < 8:
            raise DomainError(f"cell count must satisfy n >= 8, got n={self.n}")
        if not (self.lo < self.hi):
            raise DomainError(f"grid needs lo < hi, got lo={self.lo}, hi={self.hi}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / self.n

    def nodes(self) -> np.ndarray:
        return self.lo + self.spacing * np.arange(self.n + 1)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ArityError("a fit needs at least 2 points")
        if not (0.0 <= self.r_squared <= 1.0):
            raise DomainError(f"r_squared must lie in [0,1], got {self.r_squared}")


@dataclass(frozen=True)
class Jet2:
    """Value plus all first and second partials of a scalar field of two
    variables at one point.

    d1 = (d/da, d/db) and d2 = (d2/daa, d2/dadb, d2/dbb) where (a, b) is the
    coordinate pair in the order the producer declares -- (t, x) for the
    timelike string equation, (t, r) for the radial membrane, (x, y) for the
    spacelike graph equation. Only one mixed partial is stored; symmetry is
    by construction.

    Entries are usually Python floats but extended-precision values
    (mpmath.mpf) are accepted too; finiteness is checked through float().
    """

    value: float
    d1: tuple[float, float]
    d2: tuple[float, float, float]

    def __post_init__(self) -> None:
        entries = (self.value, *self.d1, *self.d2)
        if len(self.d1) != 2 or len(self.d2) != 3:
            raise DomainError("Jet2 wants d1 of length 2 and d2 of length 3")
        for v in entries:
            if not math.isfinite(float(v)):
                raise NonFiniteError(f"non-finite jet entry {v!r}")


def _d1_weights(m: int, i: int, h: float, one_sided: bool):
    """Offsets and coefficients of a second-order first-derivative stencil
    at index i of an array of length m."""
    if 1 <= i <= m - 2:
        return (-1, 1), (-0.5 / h, 0.5 / h)
    if not one_sided:
        raise BoundaryError(
            f"index {i} is at the edge of {m} samples; one-sided stencils "
            "must be requested explicitly"
        )
    if m < 3:
        raise BoundaryError("one-sided first derivative needs at least 3 samples")
    if i == 0:
        return (0, 1, 2), (-1.5 / h, 2.0 / h, -0.5 / h)
    if i == m - 1:
        return (0, -1, -2), (1.5 / h, -2.0 / h, 0.5 / h)
    raise BoundaryError(f"index {i} outside array of length {m}")


def _d2_weights(m: int, i: int, h: float, one_sided: bool):
    """Offsets and coefficients of a second-order second-derivative stencil."""
    h2 = h * h
    if 1 <= i <= m - 2:
        return (-1, 0, 1), (1.0 / h2, -2.0 / h2, 1.0 / h2)
    if not one_sided:
        raise BoundaryError(
            f"index {i} is at the edge of {m} samples; one-sided stencils "
            "must be requested explicitly"
        )
    if m < 4:
        raise BoundaryError("one-sided second derivative needs at least 4 samples")
    if i == 0:
        return (0, 1, 2, 3), (2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2)
    if i == m - 1:
        return (0, -1, -2, -3), (2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2)
    raise BoundaryError(f"index {i} outside array of length {m}")


def central_diff_jet2(
    field: np.ndarray,
    node_index: int,
    spacing: float,
    time_index: int | None = None,
    time_spacing: float | None = None,
    one_sided: bool = False,
) -> Jet2:
    """Second-order finite-difference 2-jet of a sampled field.

    field may be 1D (a single spatial level; the leading variable is then
    treated as frozen and its derivative entries are zero) or 2D with shape
    (time levels, nodes). Central stencils require the index to be at least
    one node/level away from every boundary; pass one_sided=True to allow
    second-order one-sided stencils at edges instead of the boundary error.
    """
    field = np.asarray(field, dtype=float)
    if spacing <= 0:
        raise DomainError(f"spacing must be positive, got {spacing}")

    if field.ndim == 1:
        m = field.shape[0]
        off1, w1 = _d1_weights(m, node_index, spacing, one_sided)
        off2, w2 = _d2_weights(m, node_index, spacing, one_sided)
        fx = sum(w * field[node_index + o] for o, w in zip(off1, w1))
        fxx = sum(w * field[node_index + o] for o, w in zip(off2, w2))
        return Jet2(
            value=float(field[node_index]),
            d1=(0.0, float(fx)),
            d2=(0.0, 0.0, float(fxx)),
        )

    if field.ndim != 2:
        raise DomainError("field must be a 1D or 2D array of samples")
    if time_index is None or time_spacing is None:
        raise DomainError("2D fields need time_index and time_spacing")
    if time_spacing <= 0:
        raise DomainError(f"time spacing must be positive, got {time_spacing}")

    levels, m = field.shape
    t_off1, t_w1 = _d1_weights(levels, time_index, time_spacing, one_sided)
    t_off2, t_w2 = _d2_weights(levels, time_index, time_spacing, one_sided)
    x_off1, x_w1 = _d1_weights(m, node_index, spacing, one_sided)
    x_off2, x_w2 = _d2_weights(m, node_index, spacing, one_sided)

    j, i = time_index, node_index
    ft = sum(w * field[j + o, i] for o, w in zip(t_off1, t_w1))
    fx = sum(w * field[j, i + o] for o, w in zip(x_off1, x_w1))
    ftt = sum(w * field[j + o, i] for o, w in zip(t_off2, t_w2))
    fxx = sum(w * field[j, i + o] for o, w in zip(x_off2, x_w2))
    # mixed partial: tensor product of the two first-derivative stencils
    ftx = 0.0
    for ot, wt in zip(t_off1, t_w1):
        for ox, wx in zip(x_off1, x_w1):
            ftx += wt * wx * field[j + ot, i + ox]
    return Jet2(
        value=float(field[j, i]),
        d1=(float(ft), float(fx)),
        d2=(float(ftt), float(ftx), float(fxx)),
    )


def _check_stage_finite(value, stage: str, t: float):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        if arr.ndim == 0:
            where = "scalar state"
        else:
            bad = np.flatnonzero(~np.isfinite(arr))
            where = f"component(s) {bad[:5].tolist()}"
        raise NonFiniteError(f"non-finite derivative at RK4 {stage}, t={t} ({where})")


def rk4_step(state, derivative, t: float, dt: float):
    """One classical fourth-order Runge-Kutta step.

    state may be a float or an ndarray; derivative is called as
    derivative(t, state). Local error is O(dt^5) on smooth systems. A
    non-finite stage value raises NonFiniteError naming the stage.
    """
    if dt <= 0:
        raise DomainError(f"rk4_step needs dt > 0, got {dt}")
    k1 = derivative(t, state)
    _check_stage_finite(k1, "stage 1", t)
    k2 = derivative(t + 0.5 * dt, state + 0.5 * dt * np.asarray(k1))
    _check_stage_finite(k2, "stage 2", t + 0.5 * dt)
    k3 = derivative(t + 0.5 * dt, state + 0.5 * dt * np.asarray(k2))
    _check_stage_finite(k3, "stage 3", t + 0.5 * dt)
    k4 = derivative(t + dt, state + dt * np.asarray(k3))
    _check_stage_finite(k4, "stage 4", t + dt)
    out = state + (dt / 6.0) * (
        np.asarray(k1) + 2.0 * np.asarray(k2) + 2.0 * np.asarray(k3) + np.asarray(k4)
    )
    if np.isscalar(state) or np.asarray(state).ndim == 0:
        return float(out)
    return out


def rk4_integrate(derivative, t0: float, state0, t_end: float, dt: float):
    """Fixed-step RK4 from t0 to t_end; the final step is clipped to land
    exactly on t_end. Returns (times, states) with the initial point first."""
    if dt <= 0:
        raise DomainError(f"rk4_integrate needs dt > 0, got {dt}")
    if t_end < t0:
        raise DomainError(f"t_end={t_end} must be >= t0={t0}")
    ts = [t0]
    states = [np.asarray(state0, dtype=float).copy()]
    t = t0
    y = np.asarray(state0, dtype=float)
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h = min(dt, t_end - t)
        y = rk4_step(y, derivative, t, h)
        t = t + h
        ts.append(t)
        states.append(np.asarray(y, dtype=float).copy())
    return np.asarray(ts), np.asarray(states)


def rk4_adaptive_step(
    derivative,
    t: float,
    state,
    dt: float,
    abs_tol: float = 1e-10,
    dt_min: float = 1e-12,
):
    """One accepted RK4 step with step-doubling error control.

    Compares a full step against two half steps; halves dt until the
    discrepancy is within abs_tol, raising StepFloorError at dt_min. Returns
    (t_new, state_new, dt_used, dt_next) where state_new is the two-half-step
    result and dt_next grows by 2 when the error was far below tolerance.

    This is the wrapper the profile shooter uses near its singular points.
    """
    if abs_tol <= 0:
        raise DomainError(f"abs_tol must be positive, got {abs_tol}")
    while True:
        if dt < dt_min:
            raise StepFloorError(f"step size {dt} fell below the floor {dt_min} at t={t}")
        full = rk4_step(state, derivative, t, dt)
        half = rk4_step(state, derivative, t, 0.5 * dt)
        half2 = rk4_step(half, derivative, t + 0.5 * dt, 0.5 * dt)
        err = float(np.max(np.abs(np.asarray(full) - np.asarray(half2))))
        if err <= abs_tol:
            dt_next = 2.0 * dt if err <= abs_tol / 64.0 else dt
            return t + dt, half2, dt, dt_next
        dt = 0.5 * dt


def log_log_fit(abscissae, ordinates) -> FitResult:
    """Ordinary least squares on (log a_i, log b_i).

    The slope is the measured power-law exponent. Inputs must be strictly
    positive; fewer than 2 points is an arity error.
    """
    a = np.asarray(abscissae, dtype=float).ravel()
    b = np.asarray(ordinates, dtype=float).ravel()
    if a.size != b.size:
        raise ArityError(f"mismatched lengths {a.size} vs {b.size}")
    if a.size < 2:
        raise ArityError(f"log_log_fit needs at least 2 points, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DomainError("log_log_fit inputs must be finite")
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("log_log_fit needs strictly positive inputs (log scale)")
    x = np.log(a)
    y = np.log(b)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res <= 1e-24 * max(1, y.size) else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        n_points=int(a.size),
    )


def trapezoid_quadrature(samples, grid: Grid1D, weight=None) -> float:
    """Composite trapezoid value of the integral of f(x)*weight(x) over the
    grid. weight may be None (unit weight), a callable of x, or an array of
    node values."""
    f = np.asarray(samples, dtype=float)
    if f.shape != (grid.n + 1,):
        raise DomainError(
            f"samples must cover the grid: expected {grid.n + 1} values, got {f.shape}"
        )
    if not np.all(np.isfinite(f)):
        raise NonFiniteError("non-finite quadrature samples")
    if weight is None:
        w = 1.0
    elif callable(weight):
        w = np.asarray(weight(grid.nodes()), dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
        if w.shape != f.shape:
            raise DomainError("weight array must match the sample count")
    return float(_np_trapezoid(f * w, dx=grid.spacing))


def trapezoid(values, xs) -> float:
    """Plain trapezoid rule over explicitly given abscissae."""
    return float(_np_trapezoid(np.asarray(values, dtype=float), np.asarray(xs, dtype=float)))


def observed_orders(errors) -> np.ndarray:
    """log2 ratios of successive errors under refinement by factors of 2.

    Convergence-order measurements across the test-suite funnel through this
    one helper.
    """
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise ArityError("need at least two errors to observe an order")
    if np.any(e <= 0):
        raise DomainError("errors must be positive to take log ratios")
    return np.log2(e[:-1] / e[1:])

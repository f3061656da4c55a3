"""Pointwise PDE residual operators.

Each equation tag selects one residual formula, evaluated term-by-term in the
expanded form. The divergence form is a separate operation because it divides
by the hyperbolicity discriminant and therefore degenerates on lightlike
backgrounds (the sphere caps are exactly lightlike, so only the expanded form
can certify them).

Residual formulas are plain arithmetic on jet entries, so they work unchanged
on double-precision jets and on extended-precision (mpmath) jets. The
certification sweeps use the extended path: a true solution's residual then
sits at the working-precision floor (~1e-35) instead of the double rounding
floor, which for steep parameter choices is all that separates "solution"
from "not obviously a solution".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
import numpy as np

from .closedform import ClosedFormSolution, evaluate_jet, evaluate_jet_extended
from .errors import DegeneracyError, DomainError, RegularityError, SingularPointError
from .numerics import Jet2

EPS_DEGENERATE = 1e-10
EPS_BOUNDARY = 1e-8


class EquationId(Enum):
    """Which PDE a residual is measured against."""

    BORN_INFELD = "born-infeld"
    RADIAL_MEMBRANE = "radial-membrane"
    SPACELIKE_GRAPH = "spacelike-graph"
    DIVERGENCE_FORM = "divergence-form"
    EIKONAL = "eikonal"


@dataclass(frozen=True)
class ResidualReport:
    equation: str
    n_points: int
    max_abs: float
    rms: float
    worst_point: tuple[float, float]
    per_point: list | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.rms > self.max_abs * (1 + 1e-12) + 1e-300:
            raise DomainError(f"rms {self.rms} exceeds max_abs {self.max_abs}")

    def to_json_dict(self) -> dict:
        return {
            "equation": self.equation,
            "n_points": self.n_points,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "worst_point": [self.worst_point[0], self.worst_point[1]],
        }


def residual_at(eq: EquationId, jet: Jet2, point) -> float:
    """LHS minus RHS of the selected equation, evaluated from the jet.

    Coordinate order inside the jet follows the producing family:
    (t, x) / (t, r) for the hyperbolic equations, (x, y) for the spacelike
    one. The radial membrane formula carries 1/r terms, so r = 0 is a
    singular-point error there (use residual_at_axis).
    """
    da, db = jet.d1
    daa, dab, dbb = jet.d2

    if eq is EquationId.BORN_INFELD:
        ut, ux, utt, utx, uxx = da, db, daa, dab, dbb
        return utt * (1 + ux * ux) - uxx * (1 - ut * ut) - 2 * ut * ux * utx

    if eq is EquationId.RADIAL_MEMBRANE:
        r = point[1]
        if r == 0:
            raise SingularPointError(
                "the radial membrane residual has 1/r terms; use residual_at_axis at r=0"
            )
        ut, ur, utt, utr, urr = da, db, daa, dab, dbb
        return (
            utt
            - urr
            - ur / r
            + utt * ur * ur
            + urr * ut * ut
            - 2 * ut * ur * utr
            + (ur * ut * ut) / r
            - (ur * ur * ur) / r
        )

    if eq is EquationId.SPACELIKE_GRAPH:
        ux, uy, uxx, uxy, uyy = da, db, daa, dab, dbb
        return uxx * (1 - uy * uy) + uyy * (1 - ux * ux) + 2 * ux * uy * uxy

    if eq is EquationId.EIKONAL:
        # first coordinate treated as time: 1 - u_t^2 + u_spatial^2
        return 1 - da * da + db * db

    if eq is EquationId.DIVERGENCE_FORM:
        raise DomainError(
            "the divergence form divides by the discriminant; call "
            "divergence_form_residual, which checks degeneracy"
        )
    raise DomainError(f"unknown equation id {eq!r}")


def residual_at_axis(jet: Jet2) -> float:
    """Radial membrane residual in the r -> 0 limit for even regular fields.

    With u_r(t,0) = 0 the singular terms have finite limits
    (u_r/r -> u_rr, u_r u_t^2 / r -> u_rr u_t^2, u_r^3 / r -> 0) and the
    residual collapses to u_tt - 2 u_rr (1 - u_t^2).
    """
    ut, ur = jet.d1
    utt, _, urr = jet.d2
    if ur != 0:
        raise RegularityError(
            f"axis regularity violated: u_r(t,0) = {ur}, expected 0 for an even field"
        )
    return utt - 2 * urr * (1 - ut * ut)


def divergence_form_residual(jet: Jet2, point=None, eps_degenerate: float = EPS_DEGENERATE) -> float:
    """Residual of the conservation-law form d/dt(u_t/W) - d/dx(u_x/W) with
    W = sqrt(1 - u_t^2 + u_x^2).

    The product/quotient rule turns this into arithmetic on the 2-jet alone,
    so second-order data suffices even though differencing the flux of a
    discrete field would touch third differences. Computed along a different
    arithmetic path than the expanded residual, which is what makes the
    equivalence identity (divergence = expanded / W^3) a real test.
    """
    ut, ux = jet.d1
    utt, utx, uxx = jet.d2
    disc = 1 - ut * ut + ux * ux
    if disc <= eps_degenerate:
        raise DegeneracyError(
            f"discriminant 1 - u_t^2 + u_x^2 = {float(disc)} <= {eps_degenerate}; "
            "the divergence form degenerates on lightlike backgrounds"
        )
    W = math.sqrt(disc) if isinstance(disc, float) else disc**0.5
    W3 = W * disc
    dt_part = utt / W - ut * (-ut * utt + ux * utx) / W3
    dx_part = uxx / W - ux * (-ut * utx + ux * uxx) / W3
    return dt_part - dx_part


# ---------------------------------------------------------------------------
# domain samplers


def lightcone_interior_points(
    T: float, n_time: int, n_space: int, margin: float
) -> np.ndarray:
    """Tensor-style sampling of the interior lightcone: n_time time slices,
    each carrying n_space points spanning |x| <= T - t - margin."""
    if margin <= 0 or T - 2 * margin <= 0:
        raise DomainError(f"margin {margin} leaves no room inside T={T}")
    pts = np.empty((n_time * n_space, 2))
    tg = np.linspace(0.0, T - 2 * margin, n_time)
    for j, t in enumerate(tg):
        half = T - t - margin
        xs = np.linspace(-half, half, n_space)
        pts[j * n_space : (j + 1) * n_space, 0] = t
        pts[j * n_space : (j + 1) * n_space, 1] = xs
    return pts


def backward_cone_points(
    T: float,
    n_time: int,
    n_space: int,
    margin: float,
    rho_min: float = 0.01,
    rho_max: float = 0.95,
) -> np.ndarray:
    """Sampling of the backward lightcone at similarity radii
    rho = r/(T-t) in [rho_min, rho_max]; rho_min stays off the axis because
    the expanded membrane residual has 1/r terms."""
    if not (0 < rho_min < rho_max < 1):
        raise DomainError(f"need 0 < rho_min < rho_max < 1, got [{rho_min}, {rho_max}]")
    if margin <= 0 or T - 2 * margin <= margin:
        raise DomainError(f"margin {margin} leaves no room inside T={T}")
    pts = np.empty((n_time * n_space, 2))
    tg = np.linspace(margin, T - 2 * margin, n_time)
    rhog = np.linspace(rho_min, rho_max, n_space)
    for j, t in enumerate(tg):
        pts[j * n_space : (j + 1) * n_space, 0] = t
        pts[j * n_space : (j + 1) * n_space, 1] = rhog * (T - t)
    return pts


def rectangle_points(a_range, b_range, n_a: int, n_b: int) -> np.ndarray:
    """Plain tensor grid on a rectangle."""
    a = np.linspace(a_range[0], a_range[1], n_a)
    b = np.linspace(b_range[0], b_range[1], n_b)
    A, B = np.meshgrid(a, b, indexing="ij")
    return np.column_stack([A.ravel(), B.ravel()])


def sweep_residual(
    eq: EquationId,
    sol: ClosedFormSolution,
    points: np.ndarray,
    extended: bool = True,
    dps: int = 40,
    keep_per_point: bool = False,
) -> ResidualReport:
    """Evaluate residual_at over every sample point and aggregate.

    extended=True (the default for certification) computes jets and residual
    arithmetic in mpmath at dps digits; the aggregate magnitudes are returned
    as doubles. Domain errors from evaluation propagate to the caller: the
    sampler is responsible for staying inside the validity region.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] == 0:
        raise DomainError("points must be a non-empty (N, 2) array")
    max_abs = -1.0
    worst = (float("nan"), float("nan"))
    sq_sum = 0.0
    per_point = [] if keep_per_point else None
    for a, b in points:
        if extended:
            # the residual arithmetic must run inside the precision context,
            # not just the jet construction, or it rounds back to ~double
            with mpmath.workdps(dps):
                jet = evaluate_jet_extended(sol, (a, b), dps=dps)
                r = float(residual_at(eq, jet, (a, b)))
        else:
            jet = evaluate_jet(sol, (a, b))
            r = float(residual_at(eq, jet, (a, b)))
        mag = abs(r)
        sq_sum += mag * mag
        if mag > max_abs:
            max_abs = mag
            worst = (float(a), float(b))
        if per_point is not None:
            per_point.append(((float(a), float(b)), r))
    n = points.shape[0]
    return ResidualReport(
        equation=eq.value,
        n_points=int(n),
        max_abs=max_abs,
        rms=math.sqrt(sq_sum / n),
        worst_point=worst,
        per_point=per_point,
    )

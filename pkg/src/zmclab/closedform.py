"""Explicit solution families and their analytic 2-jets.

Four closed forms, one catastrophically simple regression anchor, and the
domain predicates that keep evaluation away from the singular cone boundary:

* a logarithmic blow-up family for the timelike string (Born-Infeld)
  equation, u = k*log((T-t+x)/(T-t-x)) on the interior lightcone;
* shrinking-sphere caps u = +/- sqrt((T-t)^2 - r^2) for the radial membrane
  equation, living on the backward lightcone and exactly lightlike;
* the claimed spacelike family u = k*asinh(y/(T-x)) (kept because the audit
  must measure that its residual is NOT zero) and the corrected family
  u = k*arctan(y/(T-x)) which actually solves the elliptic graph equation;
* the constant-profile solution u = c*(T-t).

Derivatives are hand-derived, hard-coded expressions -- never finite
differences -- because the residual certification needs machine precision.
The same expression tree evaluates in float or mpmath arithmetic, so the
certification sweeps can run in extended precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath

from .errors import DomainError
from .numerics import Jet2

BOUNDARY_MARGIN_DEFAULT = 1e-8  # callers wanting near-boundary jets stay this far away


class Family(Enum):
    BORN_INFELD_LOG = "born-infeld-log"
    MEMBRANE_SPHERE_PLUS = "membrane-sphere-plus"
    MEMBRANE_SPHERE_MINUS = "membrane-sphere-minus"
    SPACELIKE_LOG_CLAIMED = "spacelike-log-claimed"
    SPACELIKE_ARCTAN_CORRECTED = "spacelike-arctan-corrected"
    CONSTANT_PROFILE = "constant-profile"


_K_REQUIRED = {
    Family.BORN_INFELD_LOG,
    Family.SPACELIKE_LOG_CLAIMED,
    Family.SPACELIKE_ARCTAN_CORRECTED,
}


class DomainKind(Enum):
    INTERIOR_LIGHTCONE = "interior-lightcone"  # |x| < T-t and 0 <= t < T
    BACKWARD_LIGHTCONE = "backward-lightcone"  # 0 <= r <= T-t and 0 < t < T
    HALF_PLANE = "half-plane"  # first coordinate < T


@dataclass(frozen=True)
class LightconeDomain:
    kind: DomainKind
    T: float

    def __post_init__(self) -> None:
        if not (self.T > 0):
            raise DomainError(f"domain parameter T must be positive, got {self.T}")


def domain_contains(domain: LightconeDomain, point) -> bool:
    """Strict membership test, exactly as the sets are defined.

    The backward lightcone is closed on its outgoing edge (r = T-t allowed)
    and open in time; the interior lightcone is open in space and half-open
    in time.
    """
    a, b = float(point[0]), float(point[1])
    T = domain.T
    if domain.kind is DomainKind.INTERIOR_LIGHTCONE:
        return (0.0 <= a < T) and (abs(b) < T - a)
    if domain.kind is DomainKind.BACKWARD_LIGHTCONE:
        return (0.0 < a < T) and (0.0 <= b <= T - a)
    if domain.kind is DomainKind.HALF_PLANE:
        return a < T
    raise DomainError(f"unknown domain kind {domain.kind!r}")


class _FloatOps:
    """Double-precision backend for the jet expressions."""

    log = staticmethod(math.log)
    sqrt = staticmethod(math.sqrt)
    atan = staticmethod(math.atan)
    asinh = staticmethod(math.asinh)

    @staticmethod
    def number(x):
        return float(x)


class _ExtendedOps:
    """mpmath backend; precision is whatever mpmath.mp currently holds."""

    log = staticmethod(mpmath.log)
    sqrt = staticmethod(mpmath.sqrt)
    atan = staticmethod(mpmath.atan)
    asinh = staticmethod(mpmath.asinh)

    @staticmethod
    def number(x):
        return mpmath.mpf(x)


@dataclass(frozen=True)
class ClosedFormSolution:
    """One member of an explicit solution family.

    T is the blow-up (or translation) parameter; k is the family constant
    where the family has one -- it doubles as the constant c for the
    constant-profile anchor and is ignored by the sphere caps.
    """

    family: Family
    T: float
    k: float = 1.0

    def __post_init__(self) -> None:
        if not (self.T > 0):
            raise DomainError(f"T must be positive, got {self.T}")
        if not math.isfinite(self.T) or not math.isfinite(self.k):
            raise DomainError("solution parameters must be finite")
        if self.family in _K_REQUIRED and self.k == 0.0:
            raise DomainError(f"family {self.family.value} needs k != 0")

    def domain(self) -> LightconeDomain:
        if self.family is Family.BORN_INFELD_LOG:
            return LightconeDomain(DomainKind.INTERIOR_LIGHTCONE, self.T)
        if self.family in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
            return LightconeDomain(DomainKind.BACKWARD_LIGHTCONE, self.T)
        return LightconeDomain(DomainKind.HALF_PLANE, self.T)

    def coordinate_names(self) -> tuple[str, str]:
        if self.family is Family.BORN_INFELD_LOG:
            return ("t", "x")
        if self.family in (
            Family.MEMBRANE_SPHERE_PLUS,
            Family.MEMBRANE_SPHERE_MINUS,
            Family.CONSTANT_PROFILE,
        ):
            return ("t", "r")
        return ("x", "y")


def _check_interior(sol: ClosedFormSolution, a: float, b: float) -> None:
    """Raise DomainError naming the violated inequality unless (a, b) is
    strictly inside sol's validity region.

    Validity regions for evaluation are the open sets on which the jets are
    finite; they admit t = 0 (the sphere caps and the log family are perfectly
    smooth there) but exclude the cone boundary where derivatives diverge.
    """
    T = sol.T
    fam = sol.family
    if fam is Family.BORN_INFELD_LOG:
        if not (0.0 <= a):
            raise DomainError(f"0 <= t violated: t={a}")
        if not (a < T):
            raise DomainError(f"t < T violated: t={a}, T={T}")
        if not (abs(b) < T - a):
            raise DomainError(f"|x| < T-t violated: |{b}| >= {T - a}")
    elif fam in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
        if not (0.0 <= a):
            raise DomainError(f"0 <= t violated: t={a}")
        if not (a < T):
            raise DomainError(f"t < T violated: t={a}, T={T}")
        if not (0.0 <= b):
            raise DomainError(f"0 <= r violated: r={b}")
        if not (b < T - a):
            raise DomainError(f"r < T-t violated: r={b} >= {T - a}")
    elif fam in (Family.SPACELIKE_LOG_CLAIMED, Family.SPACELIKE_ARCTAN_CORRECTED):
        if not (a < T):
            raise DomainError(f"x < T violated: x={a}, T={T}")
    elif fam is Family.CONSTANT_PROFILE:
        if not (a < T):
            raise DomainError(f"t < T violated: t={a}, T={T}")
    else:  # pragma: no cover - enum is exhaustive
        raise DomainError(f"unknown family {fam!r}")


def _jet_terms(sol: ClosedFormSolution, a, b, ops):
    """(value, d_a, d_b, d_aa, d_ab, d_bb) in the backend's arithmetic."""
    T = ops.number(sol.T)
    k = ops.number(sol.k)
    fam = sol.family

    if fam is Family.BORN_INFELD_LOG:
        # u = k log((A+x)/(A-x)), A = T-t
        A = T - a
        x = b
        D = A * A - x * x
        value = k * ops.log((A + x) / (A - x))
        ut = 2 * k * x / D
        ux = 2 * k * A / D
        utt = 4 * k * A * x / (D * D)
        utx = 2 * k * (A * A + x * x) / (D * D)
        uxx = 4 * k * A * x / (D * D)
        return value, ut, ux, utt, utx, uxx

    if fam in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
        # u = s sqrt(A^2 - r^2), A = T-t
        s = ops.number(1.0 if fam is Family.MEMBRANE_SPHERE_PLUS else -1.0)
        A = T - a
        r = b
        S = ops.sqrt(A * A - r * r)
        S3 = S * S * S
        value = s * S
        ut = -s * A / S
        ur = -s * r / S
        utt = -s * r * r / S3
        utr = -s * A * r / S3
        urr = -s * A * A / S3
        return value, ut, ur, utt, utr, urr

    if fam is Family.SPACELIKE_LOG_CLAIMED:
        # u = k asinh(y/B), B = T-x   (the printed family; not a solution)
        B = T - a
        y = b
        Q = ops.sqrt(B * B + y * y)
        Q3 = Q * Q * Q
        value = k * ops.asinh(y / B)
        ux = k * y / (B * Q)
        uy = k / Q
        uxx = k * y * (Q * Q + B * B) / (B * B * Q3)
        uxy = k * B / Q3
        uyy = -k * y / Q3
        return value, ux, uy, uxx, uxy, uyy

    if fam is Family.SPACELIKE_ARCTAN_CORRECTED:
        # u = k arctan(y/B), B = T-x
        B = T - a
        y = b
        P = B * B + y * y
        P2 = P * P
        value = k * ops.atan(y / B)
        ux = k * y / P
        uy = k * B / P
        uxx = 2 * k * B * y / P2
        uxy = k * (B * B - y * y) / P2
        uyy = -2 * k * B * y / P2
        return value, ux, uy, uxx, uxy, uyy

    # constant profile u = c (T - t); k carries c
    zero = ops.number(0.0)
    return k * (T - a), -k, zero, zero, zero, zero


def evaluate_jet(sol: ClosedFormSolution, point) -> Jet2:
    """Exact value and all first/second partials at a strict-interior point.

    Boundary evaluation (|x| = T-t, r = T-t) is a DomainError; derivative
    formulas are singular there.
    """
    a, b = float(point[0]), float(point[1])
    _check_interior(sol, a, b)
    value, d_a, d_b, d_aa, d_ab, d_bb = _jet_terms(sol, a, b, _FloatOps)
    return Jet2(value=value, d1=(d_a, d_b), d2=(d_aa, d_ab, d_bb))


def evaluate_jet_extended(sol: ClosedFormSolution, point, dps: int = 40) -> Jet2:
    """Same jet, computed with mpmath at dps significant digits.

    Entries of the returned Jet2 are mpmath.mpf values; plain arithmetic on
    them stays in extended precision, which is how the certification sweeps
    hold residuals of true solutions near the 10^-dps level instead of
    accumulating double rounding.
    """
    a, b = float(point[0]), float(point[1])
    _check_interior(sol, a, b)
    with mpmath.workdps(dps):
        value, d_a, d_b, d_aa, d_ab, d_bb = _jet_terms(
            sol, mpmath.mpf(a), mpmath.mpf(b), _ExtendedOps
        )
        return Jet2(value=value, d1=(d_a, d_b), d2=(d_aa, d_ab, d_bb))


def derivative_blowup_amplitude(sol: ClosedFormSolution, t: float) -> float:
    """The analytically evaluated on-axis derivative that blows up as t -> T.

    For the log family this is the spatial gradient at x=0, equal to
    2k/(T-t) -- direct differentiation of the closed form gives
    k*(1/(T-t+x) + 1/(T-t-x)). For the sphere caps it is the second radial
    derivative at r=0, equal to -sign/(T-t). The audit compares both against
    the rates stated in the source material.
    """
    t = float(t)
    if not (0.0 <= t):
        raise DomainError(f"0 <= t violated: t={t}")
    if not (t < sol.T):
        raise DomainError(f"t < T violated: t={t}, T={sol.T}")
    if sol.family is Family.BORN_INFELD_LOG:
        return 2.0 * sol.k / (sol.T - t)
    if sol.family is Family.MEMBRANE_SPHERE_PLUS:
        return -1.0 / (sol.T - t)
    if sol.family is Family.MEMBRANE_SPHERE_MINUS:
        return 1.0 / (sol.T - t)
    raise DomainError(
        "blow-up amplitude is defined for the log and sphere families only, "
        f"not {sol.family.value}"
    )

"""Self-similar profile equation for the radial membrane flow.

For tau-independent profiles phi(rho) the scaled similarity reduction
collapses to a single second-order equation,

    rho (1 - rho^2) phi'' + phi' - phi' phi^2 + 2 rho phi phi'^2
        - rho phi'' phi^2 + (1 - rho^2) phi'^3 = 0.

Collecting the two second-derivative terms exposes the leading
coefficient rho (1 - rho^2 - phi^2), which vanishes on the circle
rho^2 + phi^2 = 1.  The circle carries the collapsing-sphere profile
(and its mirror image), on which the second-order coefficient and the
remaining first-order terms vanish separately.  Shoots launched from
the axis with zero slope stay flat until they run into the circle,
which is where integration stops.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneracyError,
    DegenerateStartError,
    DomainError,
    NonFiniteError,
    SingularPointError,
    StepFloorError,
)
from .numerics import rk4_adaptive_step, rk4_step
from .residuals import ResidualReport

# A shoot is declared degenerate once 1 - rho^2 - phi^2 drops below this.
EPS_DEGENERATE_GAP = 1e-8

# Axis starts are offset to rho = RHO_START_FACTOR * drho; the constant
# continuation from the axis makes the offset exact rather than approximate.
RHO_START_FACTOR = 10.0

DRHO_MIN_DEFAULT = 1e-12


class Termination(enum.Enum):
    """How an integration of the profile equation ended."""

    REACHED_END = "reached-end"
    DEGENERACY_HIT = "degeneracy-hit"
    NON_FINITE = "non-finite"
    STEP_FLOOR = "step-floor"


@dataclass(frozen=True)
class ProfileState:
    rho: float
    phi: float
    dphi: float

    def __post_init__(self):
        for name in ("rho", "phi", "dphi"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"profile state has non-finite {name}")
        if self.rho <= 0.0:
            raise DomainError("profile state needs rho > 0")


@dataclass(frozen=True)
class ProfileRun:
    """Trace of one integration, terminated where the equation says to stop."""

    rhos: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    termination: Termination
    degeneracy_location: float | None

    def final_state(self) -> ProfileState:
        return ProfileState(
            float(self.rhos[-1]), float(self.phi[-1]), float(self.dphi[-1])
        )


def profile_residual(phi, dphi, d2phi, rho):
    """Six-term form of the profile equation, exactly as displayed."""
    return (
        rho * (1.0 - rho * rho) * d2phi
        + dphi
        - dphi * phi * phi
        + 2.0 * rho * phi * dphi * dphi
        - rho * d2phi * phi * phi
        + (1.0 - rho * rho) * dphi ** 3
    )


def profile_residual_regrouped(phi, dphi, d2phi, rho):
    """Same equation with the second-derivative terms collected.

    Algebraically identical to :func:`profile_residual`; keeping both
    lets the grouping itself be checked numerically.
    """
    return (
        rho * (1.0 - rho * rho - phi * phi) * d2phi
        + dphi * (1.0 - phi * phi)
        + 2.0 * rho * phi * dphi * dphi
        + (1.0 - rho * rho) * dphi ** 3
    )


def first_order_branch_residual(phi, dphi, rho):
    """The first-order remainder left after the leading coefficient is factored.

    On the degenerate circle the leading coefficient vanishes, so a circle
    profile solves the equation only if this remainder vanishes too.
    """
    return (
        dphi * (1.0 - phi * phi)
        + 2.0 * rho * phi * dphi * dphi
        + (1.0 - rho * rho) * dphi ** 3
    )


def phi_second_derivative(phi, dphi, rho, eps_degenerate=EPS_DEGENERATE_GAP):
    """Solve the regrouped equation for phi''.

    Raises SingularPointError on the axis and DegeneracyError once the
    leading-coefficient gap 1 - rho^2 - phi^2 falls to eps_degenerate.
    """
    if rho <= 0.0:
        raise SingularPointError("profile equation is singular on the axis rho = 0")
    gap = 1.0 - rho * rho - phi * phi
    if gap <= eps_degenerate:
        raise DegeneracyError(
            f"leading coefficient degenerates: 1 - rho^2 - phi^2 = {gap:.3e} "
            f"at rho = {rho:.6f}"
        )
    return -first_order_branch_residual(phi, dphi, rho) / (rho * gap)


def degenerate_branch(sign, rho):
    """Profile lying on the circle phi^2 + rho^2 = 1, with its derivatives.

    sign selects the upper or lower half of the circle.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if not 0.0 <= rho < 1.0:
        raise DomainError("circle profile needs 0 <= rho < 1")
    root = math.sqrt(1.0 - rho * rho)
    return sign * root, -sign * rho / root, -sign * root ** -3.0


def integrate_profile(
    state0: ProfileState,
    rho_max: float,
    drho: float,
    tolerance: float | None = None,
    eps_degenerate: float = EPS_DEGENERATE_GAP,
    drho_min: float = DRHO_MIN_DEFAULT,
) -> ProfileRun:
    """March the profile equation outward from state0 to rho_max.

    Fixed RK4 steps of size drho when tolerance is None; otherwise
    step-doubling adaptive RK4 with drho as the first trial step.  The
    run stops early if the leading coefficient degenerates, a state goes
    non-finite, or the adaptive step shrinks below drho_min.
    """
    if rho_max <= state0.rho:
        raise DomainError("rho_max must exceed the starting rho")
    if drho <= 0.0:
        raise DomainError("drho must be positive")

    def slope(r, s):
        return np.array(
            [s[1], phi_second_derivative(s[0], s[1], r, eps_degenerate)]
        )

    rhos = [state0.rho]
    phis = [state0.phi]
    dphis = [state0.dphi]
    rho = state0.rho
    y = np.array([state0.phi, state0.dphi], dtype=float)
    termination = Termination.REACHED_END
    degeneracy_location = None
    trial = drho

    while rho < rho_max - 1e-13:
        step = min(trial, rho_max - rho)
        try:
            if tolerance is None:
                y_new = rk4_step(y, slope, rho, step)
                rho_new = rho + step
            else:
                rho_new, y_new, _, trial = rk4_adaptive_step(
                    slope, rho, y, step, abs_tol=tolerance, dt_min=drho_min
                )
        except DegeneracyError:
            if tolerance is not None and step * 0.5 >= drho_min:
                # shrink toward the circle instead of stopping a step early
                trial = step * 0.5
                continue
            termination = Termination.DEGENERACY_HIT
            degeneracy_location = rho
            break
        except NonFiniteError:
            termination = Termination.NON_FINITE
            break
        except StepFloorError:
            termination = Termination.STEP_FLOOR
            break
        rho, y = rho_new, y_new
        rhos.append(rho)
        phis.append(float(y[0]))
        dphis.append(float(y[1]))
        if 1.0 - rho * rho - y[0] * y[0] <= eps_degenerate:
            termination = Termination.DEGENERACY_HIT
            degeneracy_location = rho
            break

    return ProfileRun(
        np.array(rhos), np.array(phis), np.array(dphis),
        termination, degeneracy_location,
    )


def shoot_profile(
    height: float,
    rho_max: float,
    drho: float,
    tolerance: float | None = None,
    eps_degenerate: float = EPS_DEGENERATE_GAP,
) -> ProfileRun:
    """Launch an axis-regular shoot with phi = height and zero slope.

    The start is offset slightly off the axis; since axis-regular
    solutions continue as constants, the offset introduces no error.
    """
    if not math.isfinite(height):
        raise DomainError("height must be finite")
    if 1.0 - height * height <= eps_degenerate:
        raise DegenerateStartError(
            f"height {height!r} starts on or outside the degenerate circle"
        )
    start = ProfileState(rho=RHO_START_FACTOR * drho, phi=height, dphi=0.0)
    return integrate_profile(
        start, rho_max, drho, tolerance=tolerance, eps_degenerate=eps_degenerate
    )


def verify_branch(sign=1, n_samples=1000, rho_range=(0.01, 0.99)) -> ResidualReport:
    """Sample the circle profile and report the six-term residual on it."""
    lo, hi = rho_range
    if not (0.0 <= lo < hi < 1.0):
        raise DomainError("rho_range must satisfy 0 <= lo < hi < 1")
    rhos = np.linspace(lo, hi, n_samples)
    worst = (float(rhos[0]), 0.0)
    max_abs = -1.0
    total_sq = 0.0
    for rho in rhos:
        phi, dphi, d2phi = degenerate_branch(sign, float(rho))
        r = abs(profile_residual(phi, dphi, d2phi, float(rho)))
        total_sq += r * r
        if r > max_abs:
            max_abs = r
            worst = (float(rho), phi)
    return ResidualReport(
        equation="profile-ode",
        n_points=n_samples,
        max_abs=max_abs,
        rms=math.sqrt(total_sq / n_samples),
        worst_point=worst,
    )

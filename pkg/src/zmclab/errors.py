"""Exception types shared across the laboratory.

Every error raised on purpose by this package derives from LabError, so
callers (in particular the CLI) can distinguish expected failure modes from
genuine bugs.
"""
from __future__ import annotations


class LabError(Exception):
    """Base class for all deliberate errors raised by zmclab."""


class DomainError(LabError, ValueError):
    """A point or parameter lies outside the mathematical domain of validity.

    The message names the violated inequality.
    """


class BoundaryError(LabError, IndexError):
    """A finite-difference stencil was requested too close to an array edge."""


class ArityError(LabError, ValueError):
    """Too few data points for the requested operation (fits, windows)."""


class SingularPointError(LabError, ValueError):
    """Evaluation at a coordinate singularity (r = 0 on the radial axis,
    rho = 0 in the similarity frame) of an expression with 1/r terms."""


class RegularityError(LabError, ValueError):
    """Axis regularity violated: an odd-order radial derivative is nonzero
    where an even extension is required."""


class DegeneracyError(LabError, ValueError):
    """The hyperbolicity/ellipticity discriminant fell to (or below) the
    degeneracy threshold, so the requested quantity is not defined."""


class DegenerateStartError(LabError, ValueError):
    """Shooting was started exactly on (or inside the tolerance band of) the
    degenerate constraint manifold; use the analytic branch verifier instead."""


class StepFloorError(LabError, ArithmeticError):
    """An adaptive integrator halved its step below the configured floor."""


class NonFiniteError(LabError, ArithmeticError):
    """A NaN or infinity appeared in a computation; the message carries the
    location (stage, grid index) where it was first seen."""


class ConsistencyError(LabError, ValueError):
    """Redundant pieces of a state disagree beyond their tolerance
    (e.g. the stored spatial-derivative array versus differences of u)."""


class ConfigError(LabError, ValueError):
    """A run-configuration file or flag set failed to parse or validate."""

"""Consolidated audit: every quantitative claim in the source material,
checked against an independently computed value.

Each claim carries the stated value, the value this package computes, and a
verdict. The expected verdicts are frozen from the pre-build derivations, so
the audit doubles as a regression tripwire: if the numerics drift, a claim
flips away from its expected verdict and the report stops being clean.

Sampling is seeded and every computation is deterministic, so two runs
produce byte-identical JSON.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .closedform import (
    ClosedFormSolution,
    Family,
    derivative_blowup_amplitude,
    evaluate_jet,
)
from .conserved import QuadratureWeight, measure_scaling_exponent
from .residuals import (
    EquationId,
    backward_cone_points,
    lightcone_interior_points,
    rectangle_points,
    residual_at,
    sweep_residual,
)
from .profiles import degenerate_branch
from .similarity import SteadyOdeId, steady_ode_closed_form, steady_ode_integrate
from .stability import directional_linearization_check, solve_mode_quadratic

MATCH = "match"
MISMATCH = "mismatch"
QUALITATIVE = "qualitative-match"
MEASURED = "measured-no-claim"

# each residual sweep inside the audit uses a 20 x 25 tensor grid; the
# acceptance suite runs the full-size sweeps, the audit favors a fast
# deterministic sample
SWEEP_N = 500


@dataclass(frozen=True)
class AuditClaim:
    id: str
    description: str
    source_location: str
    claimed: str
    computed: str
    verdict: str
    expected_verdict: str
    note: str = ""

    @property
    def as_expected(self) -> bool:
        return self.verdict == self.expected_verdict

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "source_location": self.source_location,
            "claimed": self.claimed,
            "computed": self.computed,
            "verdict": self.verdict,
            "expected_verdict": self.expected_verdict,
            "as_expected": self.as_expected,
            "note": self.note,
        }


@dataclass(frozen=True)
class AuditReport:
    claims: tuple
    measurements: dict

    @property
    def all_as_expected(self) -> bool:
        return all(c.as_expected for c in self.claims)

    def to_json_dict(self) -> dict:
        counts: dict = {}
        for c in self.claims:
            counts[c.verdict] = counts.get(c.verdict, 0) + 1
        return {
            "n_claims": len(self.claims),
            "verdict_counts": counts,
            "all_as_expected": self.all_as_expected,
            "claims": [c.to_json_dict() for c in self.claims],
            "measurements": self.measurements,
        }


def _fmt(x: float) -> str:
    return f"{float(x):.6e}"


def _claim_string_solution() -> AuditClaim:
    worst = -1.0
    for k in (0.2, 1.0, -3.0):
        sol = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=1.0, k=k)
        pts = lightcone_interior_points(sol.T, 20, 25, margin=0.02)
        report = sweep_residual(EquationId.BORN_INFELD, sol, pts)
        worst = max(worst, report.max_abs)
    verdict = MATCH if worst <= 1e-9 else MISMATCH
    return AuditClaim(
        id="string-log-solution",
        description="the logarithmic family solves the timelike string "
        "equation on the interior of its lightcone",
        source_location="closedform catalog, log slice family",
        claimed="residual identically zero",
        computed=f"max |residual| = {_fmt(worst)} over 3x{SWEEP_N} interior "
        "samples, k in {0.2, 1, -3}",
        verdict=verdict,
        expected_verdict=MATCH,
    )


def _claim_membrane_solution() -> AuditClaim:
    worst = -1.0
    for family in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
        sol = ClosedFormSolution(family=family, T=1.0)
        pts = backward_cone_points(sol.T, 20, 25, margin=0.02, rho_max=0.95)
        report = sweep_residual(EquationId.RADIAL_MEMBRANE, sol, pts)
        worst = max(worst, report.max_abs)
    verdict = MATCH if worst <= 1e-9 else MISMATCH
    return AuditClaim(
        id="membrane-sphere-solution",
        description="both sphere caps solve the radial membrane equation on "
        "the backward cone",
        source_location="closedform catalog, sphere cap family",
        claimed="residual identically zero",
        computed=f"max |residual| = {_fmt(worst)} over 2x{SWEEP_N} cone "
        "samples with rho <= 0.95",
        verdict=verdict,
        expected_verdict=MATCH,
    )


def _claim_spacelike_solution() -> AuditClaim:
    claimed_sol = ClosedFormSolution(
        family=Family.SPACELIKE_LOG_CLAIMED, T=1.0, k=1.0
    )
    jet = evaluate_jet(claimed_sol, (0.0, 0.5))
    r_claimed = residual_at(EquationId.SPACELIKE_GRAPH, jet, (0.0, 0.5))
    # the hand-derived residual of k*asinh(y/(T-x)): k*y/((T-x)^2*sqrt((T-x)^2+y^2))
    predicted = 1.0 * 0.5 / (1.0**2 * math.sqrt(1.0**2 + 0.5**2))

    corrected = ClosedFormSolution(
        family=Family.SPACELIKE_ARCTAN_CORRECTED, T=1.0, k=1.0
    )
    pts = rectangle_points((0.0, 0.5), (0.0, 0.5), 20, 25)
    corr_report = sweep_residual(EquationId.SPACELIKE_GRAPH, corrected, pts)

    formula_ok = abs(r_claimed - predicted) <= 1e-6
    corrected_ok = corr_report.max_abs <= 1e-9
    verdict = MISMATCH if (formula_ok and corrected_ok and abs(r_claimed) > 1e-3) else QUALITATIVE
    return AuditClaim(
        id="spacelike-log-solution",
        description="the printed spacelike family is stated to solve the "
        "spacelike graph equation; its residual is nonzero, while the "
        "arctan family solving the same steady reduction has residual zero",
        source_location="closedform catalog, spacelike log entry",
        claimed="residual identically zero",
        computed=f"residual at (x,y)=(0,0.5), k=1, T=1: {_fmt(r_claimed)} "
        f"(derived formula predicts {_fmt(predicted)}); corrected arctan "
        f"family max |residual| = {_fmt(corr_report.max_abs)} over "
        f"{pts.shape[0]} samples",
        verdict=verdict,
        expected_verdict=MISMATCH,
        note="the printed function solves the elliptic reduction's "
        "linearization ansatz, not the stated equation",
    )


def _claim_gradient_amplitude() -> AuditClaim:
    sol = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=1.0, k=1.0)
    analytic = derivative_blowup_amplitude(sol, 0.5)
    jet = evaluate_jet(sol, (0.5, 0.0))
    sampled = jet.d1[1]
    stated = 1.0 / (1.0 - 0.5)  # k/(T-t) at k=1, T=1, t=0.5
    agree = abs(analytic - sampled) <= 1e-12
    verdict = MISMATCH if agree and abs(analytic - stated) > 1e-6 else (
        MATCH if agree else QUALITATIVE
    )
    return AuditClaim(
        id="gradient-blowup-amplitude",
        description="on-axis spatial gradient of the logarithmic family as "
        "t approaches the blow-up time",
        source_location="closedform catalog, stated gradient blow-up rate",
        claimed="k/(T-t), i.e. 2.0 at k=1, T=1, t=0.5",
        computed=f"{_fmt(analytic)} analytically = 2k/(T-t); jet evaluation "
        f"gives {_fmt(sampled)}",
        verdict=verdict,
        expected_verdict=MISMATCH,
        note="the (T-t)^-1 rate agrees; the amplitude is off by a factor 2",
    )


def _claim_axis_curvature_sign() -> AuditClaim:
    plus = ClosedFormSolution(family=Family.MEMBRANE_SPHERE_PLUS, T=1.0)
    analytic = derivative_blowup_amplitude(plus, 0.5)
    jet = evaluate_jet(plus, (0.5, 0.0))
    sampled = jet.d2[2]
    stated = 1.0 / (1.0 - 0.5)  # +1/(T-t) for the upper cap, as printed
    agree = abs(analytic - sampled) <= 1e-12
    verdict = MISMATCH if agree and abs(analytic - stated) > 1e-6 else (
        MATCH if agree else QUALITATIVE
    )
    return AuditClaim(
        id="axis-curvature-sign",
        description="second radial derivative of the sphere caps on the "
        "axis as t approaches the blow-up time",
        source_location="closedform catalog, stated axis curvature",
        claimed="+1/(T-t) for the upper cap (sign tracks the cap)",
        computed=f"{_fmt(analytic)} analytically = -1/(T-t) for the upper "
        f"cap; jet evaluation gives {_fmt(sampled)}",
        verdict=verdict,
        expected_verdict=MISMATCH,
        note="the |T-t|^-1 magnitude agrees; the sign is opposite "
        "(an upward cap curves downward)",
    )


def _claim_mode_roots() -> AuditClaim:
    report = solve_mode_quadratic()
    verdict = MATCH if report.matches_claim else MISMATCH
    return AuditClaim(
        id="separable-mode-roots",
        description="roots of the quadratic governing separable modes of "
        "the linearized profile equation at the axis",
        source_location="stability module, separable mode quadratic",
        claimed="roots {4, -1}",
        computed=f"roots {{{report.roots[0]:g}, {report.roots[1]:g}}} "
        f"({report.classification})",
        verdict=verdict,
        expected_verdict=MISMATCH,
        note="both root sets have exactly one growing mode, so the "
        "qualitative instability conclusion stands",
    )


def _claim_sphere_lightlike() -> AuditClaim:
    worst = -1.0
    for family in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
        sol = ClosedFormSolution(family=family, T=1.0)
        pts = backward_cone_points(sol.T, 20, 25, margin=0.02, rho_max=0.95)
        report = sweep_residual(EquationId.EIKONAL, sol, pts)
        worst = max(worst, report.max_abs)
    verdict = MATCH if worst <= 1e-12 else MISMATCH
    return AuditClaim(
        id="sphere-caps-lightlike",
        description="the sphere caps satisfy the eikonal identity, so the "
        "graphs are lightlike everywhere",
        source_location="closedform catalog, sphere cap degeneracy note",
        claimed="1 - u_t^2 + u_r^2 = 0 on the whole backward cone",
        computed=f"max |eikonal residual| = {_fmt(worst)} over 2x{SWEEP_N} "
        "cone samples",
        verdict=verdict,
        expected_verdict=MATCH,
    )


def _claim_steady_families() -> AuditClaim:
    k = 0.7
    timelike = steady_ode_integrate(
        SteadyOdeId.BORN_INFELD_STEADY, (0.0, 2.0 * k), (0.0, 0.9), 1e-3
    )
    err_t = max(
        abs(v - steady_ode_closed_form(SteadyOdeId.BORN_INFELD_STEADY, k, r).claimed)
        for r, v in zip(timelike.rhos, timelike.v)
    )

    spacelike = steady_ode_integrate(
        SteadyOdeId.SPACELIKE_STEADY, (0.0, k), (0.0, 2.0), 1e-3
    )
    err_claimed = err_corrected = -1.0
    for r, v in zip(spacelike.rhos, spacelike.v):
        pair = steady_ode_closed_form(SteadyOdeId.SPACELIKE_STEADY, k, r)
        err_claimed = max(err_claimed, abs(v - pair.claimed))
        err_corrected = max(err_corrected, abs(v - pair.corrected))

    timelike_ok = err_t <= 1e-8
    spacelike_printed_fails = err_claimed >= 0.09 * k
    spacelike_arctan_ok = err_corrected <= 1e-8
    verdict = (
        MISMATCH
        if timelike_ok and spacelike_printed_fails and spacelike_arctan_ok
        else QUALITATIVE
    )
    return AuditClaim(
        id="steady-reduction-families",
        description="closed-form families printed for the two linear steady "
        "reductions, checked against direct integration from matching "
        "initial slopes",
        source_location="similarity module, steady reductions",
        claimed="timelike: k*ln((1+rho)/(1-rho)); spacelike: "
        "k*ln(rho+sqrt(1+rho^2))",
        computed=f"timelike family matches integration to {_fmt(err_t)} on "
        f"[0, 0.9]; printed spacelike family deviates by {_fmt(err_claimed)} "
        f"(>= 0.09k = {_fmt(0.09 * k)}) on [0, 2] while k*arctan(rho) "
        f"matches to {_fmt(err_corrected)}",
        verdict=verdict,
        expected_verdict=MISMATCH,
        note="the printed spacelike function solves the timelike-signature "
        "version of the steady equation, not the one displayed next to it",
    )


def _claim_energy_scaling() -> AuditClaim:
    sol = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=1.0, k=0.3)
    unweighted = measure_scaling_exponent(
        sol, t0=0.5, window=(-0.2, 0.3), weight=QuadratureWeight.UNWEIGHTED
    )
    weighted = measure_scaling_exponent(
        sol, t0=0.5, window=(0.05, 0.3), weight=QuadratureWeight.COORDINATE
    )
    return AuditClaim(
        id="energy-scaling-exponent",
        description="scaling exponent of the quadratic energy under the "
        "rescaling family u -> u(lambda t, lambda x)/lambda",
        source_location="conserved module, stated energy scaling",
        claimed="energy scales like lambda^1",
        computed=f"measured exponent {_fmt(unweighted.exponent)} unweighted "
        f"(r^2 = {unweighted.r_squared:.9f}), {_fmt(weighted.exponent)} with "
        "coordinate weight",
        verdict=MEASURED,
        expected_verdict=MEASURED,
        note="the quantity the stated exponent refers to is defined only "
        "through underdetermined antiderivatives, so the audit reports the "
        "measurement without adjudicating",
    )


def _measure_branch_linearization() -> dict:
    """Consistency of the linearized operator with the steady residual,
    measured along the degenerate circle profile.

    No stated value exists for this number; it is reported so the two
    displayed forms of the linearization can be compared. A mismatch above
    1e-3 would flag them as inconsistent.
    """
    base = (
        lambda rho: degenerate_branch(1, rho)[0],
        lambda rho: degenerate_branch(1, rho)[1],
        lambda rho: degenerate_branch(1, rho)[2],
    )

    # quartic bump supported on [0.1, 0.9], written s^2 with s = (rho-0.1)(0.9-rho)
    def s(rho):
        return (rho - 0.1) * (0.9 - rho)

    bump = (
        lambda rho: s(rho) ** 2,
        lambda rho: 2.0 * s(rho) * (1.0 - 2.0 * rho),
        lambda rho: 2.0 * (1.0 - 2.0 * rho) ** 2 - 4.0 * s(rho),
    )
    rhos = [0.15 + 0.7 * i / 49 for i in range(50)]
    check = directional_linearization_check(base, bump, 1e-6, rhos)
    return {
        "base": "degenerate circle profile, upper sign",
        "direction": "quartic bump supported on [0.1, 0.9]",
        "epsilon": check.epsilon,
        "n_samples": check.n_samples,
        "max_abs_difference": check.max_abs_difference,
        "max_operator_value": check.max_operator_value,
        "flagged_inconsistent": bool(check.max_abs_difference > 1e-3),
    }


def run_audit() -> AuditReport:
    """Execute the fixed claim list in its fixed order."""
    claims = (
        _claim_string_solution(),
        _claim_membrane_solution(),
        _claim_spacelike_solution(),
        _claim_gradient_amplitude(),
        _claim_axis_curvature_sign(),
        _claim_mode_roots(),
        _claim_sphere_lightlike(),
        _claim_steady_families(),
        _claim_energy_scaling(),
    )
    measurements = {"branch_linearization": _measure_branch_linearization()}
    return AuditReport(claims=claims, measurements=measurements)

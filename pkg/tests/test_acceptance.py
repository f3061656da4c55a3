"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test prints a single PASS/FAIL line for its criterion before asserting,
so a verbose run reads as a checklist. Shared evolution runs live in a
session fixture; everything else is computed inline.

Criterion 7 is expected to fail: the initial window's domain of dependence
collapses near t = 0.55, so no excised run from |x| <= 0.5 can reach t = 0.8.
The characteristic-speed analysis behind that statement is tested in
test_evolution.py; here the criterion is executed as stated and reported
honestly.
"""

import math
import time

import numpy as np
import pytest

from zmclab.audit import run_audit
from zmclab.cli import main
from zmclab.closedform import ClosedFormSolution, Family, evaluate_jet
from zmclab.conserved import QuadratureWeight, measure_scaling_exponent
from zmclab.evolution import (
    EvolutionConfig,
    RunStatus,
    fit_blowup_rate,
    initial_state_from_solution,
    run_evolution,
    sup_error_against,
)
from zmclab.numerics import Grid1D
from zmclab.profiles import (
    degenerate_branch,
    first_order_branch_residual,
    profile_residual,
    profile_residual_regrouped,
)
from zmclab.reporting import dumps_json
from zmclab.residuals import (
    EquationId,
    backward_cone_points,
    lightcone_interior_points,
    rectangle_points,
    residual_at,
    sweep_residual,
)
from zmclab.similarity import SteadyOdeId, steady_ode_closed_form, steady_ode_integrate
from zmclab.stability import (
    directional_linearization_check,
    linearized_coefficients,
    solve_mode_quadratic,
)

STRING_LOG_02 = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=1.0, k=0.2)


def verdict(num, slug, ok, detail=""):
    tail = f"  ({detail})" if detail else ""
    print(f"criterion {num:02d} [{slug}]: {'PASS' if ok else 'FAIL'}{tail}")
    assert ok, f"criterion {num:02d} [{slug}] failed{tail}"


@pytest.fixture(scope="session")
def excised_runs():
    """The criterion-7 resolution family, shared by criteria 7, 8, and 9."""
    runs = {}
    start = time.perf_counter()
    for n in (200, 400, 800):
        grid = Grid1D(lo=-0.5, hi=0.5, n=n)
        state = initial_state_from_solution(STRING_LOG_02, grid)
        runs[n] = run_evolution(state, EvolutionConfig(blowup_time=1.0, t_end=0.8))
    elapsed = time.perf_counter() - start
    return runs, elapsed


def test_criterion_01_string_solution_sweep():
    worst = -1.0
    for k in (0.2, 1.0, -3.0):
        sol = ClosedFormSolution(family=Family.BORN_INFELD_LOG, T=1.0, k=k)
        pts = lightcone_interior_points(1.0, 100, 100, margin=0.02)
        worst = max(worst, sweep_residual(EquationId.BORN_INFELD, sol, pts).max_abs)
    verdict(1, "string-solution-sweep", worst <= 1e-9,
            f"max |residual| = {worst:.3e} over 3x10^4 points")


def test_criterion_02_membrane_sweep_and_lightlike():
    worst_pde = worst_eik = -1.0
    for family in (Family.MEMBRANE_SPHERE_PLUS, Family.MEMBRANE_SPHERE_MINUS):
        sol = ClosedFormSolution(family=family, T=1.0)
        pts = backward_cone_points(1.0, 100, 100, margin=0.02, rho_max=0.95)
        worst_pde = max(
            worst_pde, sweep_residual(EquationId.RADIAL_MEMBRANE, sol, pts).max_abs
        )
        worst_eik = max(
            worst_eik, sweep_residual(EquationId.EIKONAL, sol, pts).max_abs
        )
    ok = worst_pde <= 1e-9 and worst_eik <= 1e-12
    verdict(2, "membrane-sweep-lightlike", ok,
            f"pde {worst_pde:.3e}, eikonal {worst_eik:.3e}")


def test_criterion_03_spacelike_audit_values():
    claimed = ClosedFormSolution(family=Family.SPACELIKE_LOG_CLAIMED, T=1.0, k=1.0)
    jet = evaluate_jet(claimed, (0.0, 0.5))
    r = residual_at(EquationId.SPACELIKE_GRAPH, jet, (0.0, 0.5))
    predicted = 0.5 / math.sqrt(1.25)  # k*y/((T-x)^2 sqrt((T-x)^2+y^2))

    corrected = ClosedFormSolution(
        family=Family.SPACELIKE_ARCTAN_CORRECTED, T=1.0, k=1.0
    )
    pts = rectangle_points((0.0, 0.5), (0.0, 0.5), 100, 100)
    corr = sweep_residual(EquationId.SPACELIKE_GRAPH, corrected, pts).max_abs

    ok = abs(r - predicted) <= 1e-6 and abs(r - 0.4472136) <= 1e-6 and corr <= 1e-9
    verdict(3, "spacelike-audit", ok,
            f"claimed-family residual {r:.7f}, corrected max {corr:.3e}")


def test_criterion_04_steady_ode_reproduction():
    k = 0.7
    run_t = steady_ode_integrate(
        SteadyOdeId.BORN_INFELD_STEADY, (0.0, 2.0 * k), (0.0, 0.9), 1e-4
    )
    err_t = max(
        abs(v - k * math.log((1.0 + r) / (1.0 - r)))
        for r, v in zip(run_t.rhos, run_t.v)
    )

    run_s = steady_ode_integrate(
        SteadyOdeId.SPACELIKE_STEADY, (0.0, k), (0.0, 2.0), 1e-4
    )
    err_arctan = max(
        abs(v - k * math.atan(r)) for r, v in zip(run_s.rhos, run_s.v)
    )
    gap_asinh = abs(run_s.v[-1] - k * math.asinh(2.0))

    ok = err_t <= 1e-8 and err_arctan <= 1e-8 and gap_asinh >= 0.09 * k
    verdict(4, "steady-ode-reproduction", ok,
            f"log family {err_t:.2e}, arctan {err_arctan:.2e}, "
            f"asinh gap {gap_asinh:.3f} >= {0.09 * k:.3f}")


def test_criterion_05_mode_roots_and_classification():
    report = solve_mode_quadratic()
    audit_claim = next(
        c for c in run_audit().claims if c.id == "separable-mode-roots"
    )
    ok = (
        set(report.roots) == {1.0, -4.0}
        and report.n_growing == 1
        and report.classification.startswith("unstable")
        and report.matches_claim is False
        and audit_claim.verdict == "mismatch"
        and "one growing" in audit_claim.note or "unstable" in audit_claim.note
    )
    verdict(5, "mode-analysis", ok,
            f"roots {report.roots}, {report.classification}")


def test_criterion_06_degeneracy_identities():
    worst_coeff = -1.0
    for sign in (1, -1):
        for rho in np.linspace(0.001, 0.999, 1000):
            phi, dphi, d2phi = degenerate_branch(sign, float(rho))
            c = linearized_coefficients(phi, dphi, d2phi, float(rho))
            worst_coeff = max(worst_coeff, abs(c.c_rho_rho), abs(c.c_tau_rho))

    rng = np.random.default_rng(6)
    worst_group = -1.0
    for _ in range(10_000):
        phi, dphi, d2phi = rng.uniform(-2.0, 2.0, size=3)
        rho = rng.uniform(0.01, 2.0)
        a = profile_residual(phi, dphi, d2phi, rho)
        b = profile_residual_regrouped(phi, dphi, d2phi, rho)
        worst_group = max(worst_group, abs(a - b))

    worst_branch = max(
        abs(first_order_branch_residual(*degenerate_branch(1, float(r))[:2], float(r)))
        for r in np.linspace(0.001, 0.999, 1000)
    )

    ok = worst_coeff <= 1e-12 and worst_group <= 1e-12 and worst_branch <= 1e-12
    verdict(6, "degeneracy-identities", ok,
            f"coeffs {worst_coeff:.2e}, grouping {worst_group:.2e}, "
            f"branch {worst_branch:.2e}")


def test_criterion_07_evolution_self_consistency(excised_runs):
    """As stated this requires data on |x| <= 0.5 to determine the solution
    at t = 0.8.  The graph's characteristic cones are strictly inside the
    unit cone, and the excised window closes near t = 0.55, so the runs end
    in domain exhaustion well before the target time.  Executed faithfully
    and reported as found."""
    runs, elapsed = excised_runs
    reached = {n: (r.status is RunStatus.COMPLETED and r.final.t >= 0.8)
               for n, r in runs.items()}

    # the solver's actual convergence, measured at a time every run reaches
    fixed_errs = []
    for n in (200, 400, 800):
        grid = Grid1D(lo=-0.5, hi=0.5, n=n)
        state = initial_state_from_solution(STRING_LOG_02, grid)
        short = run_evolution(state, EvolutionConfig(blowup_time=1.0, t_end=0.52))
        fixed_errs.append(sup_error_against(short, STRING_LOG_02))
    orders = [math.log2(a / b) for a, b in zip(fixed_errs, fixed_errs[1:])]

    ok = (
        all(reached.values())
        and fixed_errs[1] <= 5e-4
        and all(abs(o - 2.0) <= 0.3 for o in orders)
        and elapsed <= 60.0
    )
    stop = ", ".join(
        f"n={n}: {runs[n].status.value} at t={runs[n].final.t:.4f}" for n in runs
    )
    verdict(7, "evolution-self-consistency", ok,
            f"no run reaches t=0.8 ({stop}); at t=0.52 sup errors "
            f"{fixed_errs[0]:.1e}/{fixed_errs[1]:.1e}/{fixed_errs[2]:.1e} with "
            f"orders {orders[0]:.2f}/{orders[1]:.2f}; runtime {elapsed:.1f}s")


def test_criterion_08_blowup_rate_fit(excised_runs):
    runs, _ = excised_runs
    fit = fit_blowup_rate(runs[800], (0.5, 0.95))
    ok = abs(fit.exponent - 1.0) <= 0.05 and abs(fit.amplitude - 0.4) <= 0.02
    verdict(8, "blowup-rate-fit", ok,
            f"exponent {fit.exponent:.6f}, amplitude {fit.amplitude:.6f} "
            f"(2k = 0.4), n = {fit.fit.n_points}")


def test_criterion_09_momentum_conservation(excised_runs):
    runs, _ = excised_runs
    drift = runs[400].relative_momentum_drift
    verdict(9, "momentum-conservation", drift <= 1e-4,
            f"flux-corrected relative drift {drift:.2e}")


def test_criterion_10_linearization_consistency():
    zero = (lambda r: 0.0, lambda r: 0.0, lambda r: 0.0)

    def s(rho):
        return (rho - 0.1) * (0.9 - rho)

    bump = (
        lambda rho: s(rho) ** 2,
        lambda rho: 2.0 * s(rho) * (1.0 - 2.0 * rho),
        lambda rho: 2.0 * (1.0 - 2.0 * rho) ** 2 - 4.0 * s(rho),
    )
    check = directional_linearization_check(
        zero, bump, 1e-6, np.linspace(0.15, 0.85, 50)
    )
    branch = run_audit().measurements["branch_linearization"]
    ok = check.max_abs_difference <= 1e-5 and "max_abs_difference" in branch
    verdict(10, "linearization-consistency", ok,
            f"zero-base mismatch {check.max_abs_difference:.2e}; branch "
            f"mismatch {branch['max_abs_difference']:.2e} reported in audit")


def test_criterion_11_determinism_and_interfaces(tmp_path, capsys):
    code1 = main(["audit"])
    out1 = capsys.readouterr().out
    code2 = main(["audit"])
    out2 = capsys.readouterr().out
    deterministic = code1 == 0 and code2 == 0 and out1 == out2

    cfg = tmp_path / "ref.cfg"
    cfg.write_text(
        "equation = born-infeld\nfamily = log\nk = 0.2\nT = 1.0\n"
        f"n = 100\nt_end = 0.3\ndiagnostics_csv = {tmp_path / 'd.csv'}\n"
        f"snapshots_csv = {tmp_path / 's.csv'}\n"
    )
    code3 = main(["evolve", str(cfg)])
    capsys.readouterr()
    import csv as csvmod

    shapes = []
    for name in ("d.csv", "s.csv"):
        rows = list(csvmod.reader(open(tmp_path / name, newline="")))
        shapes.append(len({len(r) for r in rows}) == 1 and len(rows) > 1)
    csv_ok = code3 == 0 and all(shapes)

    # the three canned misuse cases
    bad = tmp_path / "bad.cfg"
    bad.write_text("equation = born-infeld\nbroken line\n")
    missing = tmp_path / "missing.cfg"
    missing.write_text("family = log\n")
    codes = (
        main(["verify", "--equation", "born-infeld", "--family", "sphere-plus"]),
        main(["evolve", str(missing)]),
        main(["evolve", str(bad)]),
    )
    capsys.readouterr()
    misuse_ok = codes == (2, 2, 2)

    ok = deterministic and csv_ok and misuse_ok
    verdict(11, "determinism-interfaces", ok,
            f"audit byte-identical: {deterministic}; CSV shapes constant: "
            f"{all(shapes)}; misuse exit codes: {codes}")

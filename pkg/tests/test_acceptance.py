"""Acceptance suite: every shipped claim at its stated tolerance.

Each criterion prints one PASS/FAIL line (shown in the pytest terminal
summary) and asserts its tolerances. The heavy simulations are shared
module-scoped fixtures.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from latticekpp import barriers, continuum, fronts, green
from latticekpp.dispersion import solve_dispersion
from latticekpp.lattice import MovingFrame, integrate
from latticekpp.reaction import quadratic_defect_bound

W0 = {1: 1.0, -1: -1.0}


def record(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"CRITERION {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------------------
# shared heavy runs


@pytest.fixture(scope="module")
def green_exp(disp):
    return green.remainder_experiment(disp, L=1000, dt=0.01, tmax=400.0, stride=100)


@pytest.fixture(scope="module")
def small_green(disp):
    return green.temporal_green(disp, L=150, dt=0.01, sample_times=(1.0, 2.0, 5.0))


@pytest.fixture(scope="module")
def front_run(logistic):
    return fronts.simulate_step(
        logistic, L=1200, dt=0.01, T=400.0, levels=(0.1, 0.5, 0.9), profile_times=(200.0, 400.0)
    )


@pytest.fixture(scope="module")
def odd_run(disp):
    return fronts.odd_data_run(disp, W0, L=1200, dt=0.01, sample_times=(50.0, 200.0, 400.0))


@pytest.fixture(scope="module")
def barrier_reports(disp, logistic):
    bgs = barriers.run_background(
        disp,
        barriers.BarrierParams(),
        times=(2000.0, 5000.0),
        dt=0.05,
        quad_bound=quadratic_defect_bound(logistic),
    )
    return [(bg, barriers.certify(bg, reaction=logistic)) for bg in bgs]


@pytest.fixture(scope="module")
def pde_fit():
    return continuum.continuous_bramson()


# ---------------------------------------------------------------------------


def test_criterion_01_dispersion_reproduction():
    elapsed = min(
        (lambda t0: (solve_dispersion(1.0), time.perf_counter() - t0)[1])(time.perf_counter())
        for _ in range(5)
    )
    d = solve_dispersion(1.0)
    r1, r2 = d.residuals()
    ok = (
        abs(d.c_star - 2.0734) <= 5e-5
        and abs(d.lambda_star - 0.9071) <= 5e-5
        and abs(r1) < 1e-10
        and abs(r2) < 1e-10
        and elapsed < 1e-3
    )
    record(
        1,
        ok,
        f"(c*, lam*) = ({d.c_star:.6f}, {d.lambda_star:.6f}), residuals ({r1:.1e}, {r2:.1e}), "
        f"solve time {elapsed * 1e6:.0f} us",
    )
    assert ok


def test_criterion_02_remainder_scaling(green_exp):
    # log-log slope over the doubling snapshot times
    targets = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 400.0]
    series = []
    for target in targets:
        t, e = min(green_exp.e_series, key=lambda p: abs(p[0] - target))
        series.append((t, e))
    slope, intercept, r2 = green.slope_fit(series)
    ok = -1.55 <= slope <= -1.45 and r2 >= 0.999
    record(2, ok, f"slope {slope:.4f} in [-1.55, -1.45], r^2 = {r2:.6f}")
    assert ok


def test_criterion_03_universal_cubic(green_exp):
    err = green_exp.cubic_sup_error
    ok = err <= 0.1
    record(3, ok, f"sup |measured - cubic| = {err:.4f} <= 0.1 on |xi| <= 2 at t = 400")
    assert ok


def test_criterion_04_mass_and_positivity(green_exp):
    ok = green_exp.mass_error_max <= 1e-8 and green_exp.positivity_min >= -1e-12
    record(
        4,
        ok,
        f"mass error {green_exp.mass_error_max:.2e} <= 1e-8, "
        f"min value {green_exp.positivity_min:.2e} >= -1e-12 "
        f"(window uncontaminated until t = {green_exp.contamination_time:g})",
    )
    assert ok


def test_criterion_05_two_route_agreement(disp, small_green):
    t0 = time.perf_counter()
    worst = 0.0
    for snap in small_green:
        center = disp.c_star * snap.t
        for j in range(math.floor(center - 10.0), math.ceil(center + 10.0) + 1):
            ode = snap.values[j - snap.j_min]
            lap = green.laplace_invert(j, snap.t, disp)
            worst = max(worst, abs(ode - lap))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10.0
    record(5, ok, f"max |laplace - ode| = {worst:.2e} <= 1e-6 over t in {{1,2,5}} ({elapsed:.1f} s)")
    assert ok


def test_criterion_06_bramson_delay(front_run):
    d = front_run.dispersion
    theory = d.bramson_coeff
    a_mid, _, _ = fronts.bramson_fit(front_run.traces[0.5], d, 50.0, 400.0)
    res = fronts.delay_residual(front_run.traces[0.5], d, 100.0, 400.0)
    oscillation = float(res.max() - res.min())
    # the level-independence spread is measured on the late window where the
    # per-level transients have decayed; see the decisions ledger
    late = [fronts.bramson_fit(front_run.traces[m], d, 200.0, 400.0)[0] for m in (0.1, 0.5, 0.9)]
    spread = (max(late) - min(late)) / float(np.mean(late))
    ok = abs(a_mid / theory - 1.0) <= 0.10 and oscillation <= 2.0 and spread <= 0.02
    record(
        6,
        ok,
        f"a_hat(m=0.5) = {a_mid:.4f} vs {theory:.4f} ({abs(a_mid / theory - 1) * 100:.1f}%), "
        f"residual oscillation {oscillation:.3f} <= 2, level spread {spread * 100:.2f}% <= 2%",
    )
    assert ok


def test_criterion_07_spreading_dichotomy(front_run):
    d = front_run.dispersion
    rep = fronts.spreading_check(front_run.profiles[200.0], d, 0.9 * d.c_star, 1.1 * d.c_star)
    ok = rep.min_behind >= 0.99 and rep.max_ahead <= 1e-3
    record(
        7,
        ok,
        f"t = 200: min behind 0.9 c* t = {rep.min_behind:.6f} >= 0.99, "
        f"max ahead 1.1 c* t = {rep.max_ahead:.1e} <= 1e-3",
    )
    assert ok


def test_criterion_08_front_collapse(front_run):
    p1 = fronts.extract_profile(front_run.profiles[200.0], half_width=20)
    p2 = fronts.extract_profile(front_run.profiles[400.0], half_width=20)
    dist = fronts.collapse_distance(p1, p2)
    ok = dist <= 0.01
    record(8, ok, f"sup distance of recentered profiles (t = 200 vs 400) = {dist:.5f} <= 0.01")
    assert ok


def test_criterion_09_odd_data_asymptotics(disp, odd_run):
    rep = fronts.odd_data_asymptotics(odd_run[400.0], disp, W0)
    rel = rep.relative_error
    decay = [fronts.superdiffusive_decay_check(odd_run[t], disp, W0, A=2.0) for t in (50.0, 200.0)]
    ok = rel <= 0.05 and rep.sign_ok and all(r.violations == 0 for r in decay)
    record(
        9,
        ok,
        f"amplitude {rep.fitted_amplitude:.5f} vs predicted {rep.predicted:.5f} "
        f"({rel * 100:.2f}% <= 5%), positive on the diffusive window: {rep.sign_ok}, "
        f"decay envelope violations: {sum(r.violations for r in decay)}",
    )
    assert ok


def test_criterion_10_property_suites(disp, logistic, front_run):
    mp = sum(barriers.max_principle_test(disp, seed=s) for s in range(200))
    cp1 = sum(barriers.comparison_test(disp, logistic, seed=s) for s in range(200))
    cp2 = sum(
        barriers.comparison_test(disp, logistic, seed=s, two_boundary=True) for s in range(200)
    )
    box_ok = True
    monotone_ok = True
    for snap in (front_run.profiles[200.0], front_run.profiles[400.0], front_run.final):
        u = np.asarray(snap.values)
        box_ok &= bool(u.min() >= 0.0 and u.max() <= 1.0)
        monotone_ok &= bool(np.all(np.diff(u) <= 1e-12))

    rng = np.random.default_rng(3)
    base = np.exp(-0.1 * (np.arange(41) - 20.0) ** 2) + 0.05 * rng.standard_normal(41)
    from latticekpp.lattice import LatticeField

    def advance(dt, n):
        f = LatticeField(t=0.0, j_min=0, values=base.copy())
        return integrate(f, MovingFrame(disp), dt, n).values

    e1 = np.max(np.abs(advance(0.2, 5) - advance(0.1, 10)))
    e2 = np.max(np.abs(advance(0.1, 10) - advance(0.05, 20)))
    order = math.log2(e1 / e2)

    ok = mp == 0 and cp1 == 0 and cp2 == 0 and box_ok and monotone_ok and order >= 3.9
    record(
        10,
        ok,
        f"violations: max-principle {mp}, comparison {cp1}, two-boundary {cp2} "
        f"(200 instances each); invariant region {box_ok}, monotone {monotone_ok}; "
        f"RK4 order {order:.2f} >= 3.9",
    )
    assert ok


def test_criterion_11_barrier_certification(barrier_reports):
    failing = []
    for _, reports in barrier_reports:
        failing.extend(r for r in reports if not r.ok)
    ok = not failing
    detail = "all regions certified at t in {2000, 5000}"
    if failing:
        worst = "; ".join(
            f"{r.barrier} {r.name}@t={r.t:g} (min {r.min_residual:.1e}, max {r.max_residual:.1e})"
            for r in failing
        )
        detail = (
            f"{len(failing)} region(s) violate the sign at the certification times: {worst}. "
            "The cosine-trough bands fail for structural reasons at any reachable time; "
            "see notes/decisions.md"
        )
    record(11, ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# supporting checks that ride on the same heavy runs (not numbered criteria)


def test_remainder_quarter_time_law(green_exp):
    def e_at(target):
        return min(green_exp.e_series, key=lambda p: abs(p[0] - target))[1]

    ratio = e_at(400.0) / e_at(100.0)
    assert 0.125 / 1.3 <= ratio <= 0.125 * 1.3
    stats = [e * t**1.5 for t, e in green_exp.e_series if 50.0 <= t <= 400.0]
    assert max(stats) / min(stats) <= 3.0


def test_cubic_deviation_is_small_and_odd_at_center(green_exp):
    xi, pt = green_exp.xi, green_exp.p_tilde
    assert abs(pt[np.argmin(np.abs(xi))]) <= 0.05
    sym = np.abs(np.interp(-xi, xi, pt) + pt)
    assert sym.max() <= 0.1


def test_principal_part_center_agreement(green_exp, disp):
    snap = green_exp.snapshots[400.0]
    jc = round(disp.c_star * 400.0)
    g = snap.values[jc - snap.j_min]
    from latticekpp.dispersion import principal_part

    h = float(principal_part(jc, 400.0, disp))
    assert abs(g - h) <= 1e-3 / math.sqrt(400.0)


def test_barrier_positivity_and_lower_sign(barrier_reports, disp):
    # the assembled supersolution is positive across the whole certification
    # span at the larger time (at t = 2000 the cosine trough still dips
    # below zero; see the decisions ledger)
    p = barriers.BarrierParams()
    bg = next(bg for bg, _ in barrier_reports if bg.snapshot.t == 5000.0)
    c, t = disp.c_star, 5000.0
    j_lo = math.ceil(c * t - t**p.delta)
    j_hi = math.floor(c * t + (p.eta2(disp) + 10.0) * math.sqrt(1.0 + t))
    bar = barriers.upper_barrier(bg, j_lo, j_hi)
    assert float(bar.values[1:-1].min()) > 0.0
    # the subsolution is nonpositive on its leftmost zone at both times
    for bg, _ in barrier_reports:
        t = bg.snapshot.t
        lo = math.ceil(c * t + t**p.delta)
        hi = math.floor(c * t + (1.0 + t) ** p.beta)
        barl = barriers.lower_barrier(bg, lo, hi)
        assert float(barl.values[1:-1].max()) <= 0.0


def test_pde_refinement_stability(pde_fit):
    coarse = continuum.continuous_bramson(dx=0.1, dt=0.006)
    assert abs(pde_fit.a_hat / coarse.a_hat - 1.0) <= 0.01


def test_criterion_12_continuum_companion(disp, front_run, pde_fit):
    ratio_ok = True
    data = continuum.OddData.indicator(1.0)
    target = data.moment1 / (2.0 * math.sqrt(math.pi))
    ratios = [continuum.asymptotic_ratio(1000.0, y, data) for y in (2.0, 5.0, 10.0)]
    ratio_ok = all(abs(r / target - 1.0) <= 0.02 for r in ratios)

    rel = abs(pde_fit.a_hat / pde_fit.theory - 1.0)
    fit_ok = rel <= 0.10

    # the two experiments must statistically distinguish their coefficients
    d = front_run.dispersion
    tr = front_run.traces[0.5]
    t = np.asarray(tr.times)
    keep = (t >= 50.0) & (t <= 400.0)
    lx = np.log(t[keep])
    y = d.c_star * t[keep] - np.asarray(tr.x_m)[keep]
    a_lat, b_lat = np.polyfit(lx, y, 1)
    resid = y - (a_lat * lx + b_lat)
    se_lat = math.sqrt(
        float(np.sum(resid**2)) / (lx.size - 2) / float(np.sum((lx - lx.mean()) ** 2))
    )
    gap = a_lat - pde_fit.a_hat
    distinct_ok = gap > 1.96 * (se_lat + pde_fit.a_se) and gap > 0.0

    ok = ratio_ok and fit_ok and distinct_ok
    record(
        12,
        ok,
        f"pde delay coefficient {pde_fit.a_hat:.4f} vs 1.5 ({rel * 100:.1f}% <= 10%); "
        f"heat-kernel ratio within {max(abs(r / target - 1) for r in ratios) * 100:.2f}% <= 2%; "
        f"lattice-vs-pde gap {gap:.4f} >> noise {1.96 * (se_lat + pde_fit.a_se):.4f}",
    )
    assert ok

import math

import numpy as np
import pytest

from latticekpp import barriers
from latticekpp.barriers import (
    BarrierParams,
    comparison_test,
    cosine_term,
    cosine_term_dt,
    cutoff_ramp,
    cutoff_ramp_bounds,
    cutoff_ramp_d1,
    max_principle_test,
    run_background,
    upper_barrier,
    validate_params,
    xi_lower,
    xi_lower_dt,
    xi_upper,
)


def test_default_params_satisfy_chain(disp):
    assert validate_params(BarrierParams(), disp).ok


def test_chain_detects_bad_beta():
    rep = validate_params(BarrierParams(delta=0.05, beta=0.30, alpha=0.45))
    assert not rep.ok
    assert rep.first_violated == "beta < (3 alpha - 1)/2"


def test_chain_detects_zero_delta():
    rep = validate_params(BarrierParams(delta=0.0))
    assert not rep.ok
    assert rep.first_violated == "0 < delta"


def test_cosine_term_values(disp):
    p = BarrierParams()
    t = 400.0
    center = disp.c_star * t
    assert cosine_term(center, t, p, disp) == pytest.approx(401.0 ** -(1.5 - p.beta))
    quarter = center + 0.5 * math.pi * (1.0 + t) ** p.alpha
    assert cosine_term(quarter, t, p, disp) == pytest.approx(0.0, abs=1e-18)


def test_cosine_term_time_derivative_matches_fd(disp):
    p = BarrierParams()
    j, t, h = 850.0, 400.0, 1e-5
    fd = (cosine_term(j, t + h, p, disp) - cosine_term(j, t - h, p, disp)) / (2 * h)
    assert cosine_term_dt(j, t, p, disp) == pytest.approx(fd, rel=1e-6)


def test_cutoff_ramp_endpoints_and_flat_joins():
    e1, e2 = 2.0, 7.0
    assert cutoff_ramp(e1, e1, e2) == 0.0
    assert cutoff_ramp(e2, e1, e2) == 1.0
    h = 1e-5
    for edge in (e1, e2):
        d1 = (cutoff_ramp(edge + h, e1, e2) - cutoff_ramp(edge - h, e1, e2)) / (2 * h)
        d2 = (
            cutoff_ramp(edge + h, e1, e2)
            - 2 * cutoff_ramp(edge, e1, e2)
            + cutoff_ramp(edge - h, e1, e2)
        ) / h**2
        assert abs(d1) < 1e-8
        assert abs(d2) < 1e-3


def test_cutoff_ramp_monotone_with_reported_bounds():
    e1, e2 = 1.0, 4.0
    x = np.linspace(e1, e2, 1000)
    d1 = cutoff_ramp_d1(x, e1, e2)
    assert np.all(d1 >= 0.0)
    c1, c2 = cutoff_ramp_bounds(e1, e2)
    assert d1.max() <= c1 * (1.0 + 1e-12)
    assert c2 == pytest.approx(5.7735 / (e2 - e1) ** 2, abs=1e-4)
    h = 1e-5
    d2 = (cutoff_ramp(x + h, e1, e2) - 2 * cutoff_ramp(x, e1, e2) + cutoff_ramp(x - h, e1, e2)) / h**2
    assert np.max(np.abs(d2)) <= c2 * (1.0 + 1e-4)


def test_xi_upper_shape(disp):
    p = BarrierParams()
    assert xi_upper(0.0, p) == 0.0
    t = np.linspace(0, 5000, 100)
    v = xi_upper(t, p)
    assert np.all(np.diff(v) > 0.0)
    assert v[-1] < 1.0


def test_xi_lower_bounds_and_ode(disp):
    p = BarrierParams()
    cm = 5.0
    t = np.linspace(0.0, 10_000.0, 200)
    v = xi_lower(t, p, cm)
    lo = p.xi0_lower / (1.0 + p.xi0_lower * cm)
    assert np.all(v <= p.xi0_lower + 1e-15)
    assert np.all(v >= lo - 1e-15)
    h = 1e-4
    for tt in (1.0, 50.0, 400.0):
        fd = (xi_lower(tt + h, p, cm) - xi_lower(tt - h, p, cm)) / (2 * h)
        assert fd == pytest.approx(float(xi_lower_dt(tt, p, cm)), rel=1e-6)


@pytest.fixture(scope="module")
def small_background(disp):
    return run_background(disp, BarrierParams(), times=(200.0,), dt=0.05)[0]


def test_background_measures_envelope(small_background):
    assert small_background.cm > 0.0
    assert barriers.positivity_range(small_background) > 10.0


def test_upper_barrier_with_zero_data_is_finite(disp):
    p = BarrierParams(w0={1: 0.0, -1: 0.0})
    bg = run_background(disp, p, times=(50.0,), dt=0.05)[0]
    c = disp.c_star
    bar = upper_barrier(bg, math.ceil(c * 50.0 - 1.0), math.floor(c * 50.0 + 40.0))
    res, _ = barriers.residual(bar, disp)
    assert np.all(np.isfinite(res))
    assert np.all(np.isfinite(bar.values))


def test_certify_clean_regions_at_moderate_time(small_background, logistic):
    reports = {(r.barrier, r.name): r for r in barriers.certify(small_background, logistic)}
    # regions whose sign analysis has no cosine trough pass already at t=200
    assert reports[("upper", "R2")].ok
    assert reports[("upper", "R4")].ok
    assert reports[("upper", "R5a")].ok
    assert reports[("upper", "R5b")].ok
    assert reports[("lower", "R1")].ok
    assert reports[("lower", "R2")].ok


def test_max_principle_zero_instance(disp):
    assert max_principle_test(disp, seed=0, T=0.5, amplitude=0.0) == 0


def test_max_principle_random_instances(disp):
    for seed in range(20):
        assert max_principle_test(disp, seed=seed, T=1.0) == 0


def test_max_principle_checker_detects_corruption(disp):
    violations = sum(max_principle_test(disp, seed=s, T=1.0, corrupt=True) for s in range(5))
    assert violations > 0


def test_comparison_random_instances(disp, logistic):
    for seed in range(10):
        assert comparison_test(disp, logistic, seed=seed, T=1.0) == 0
        assert comparison_test(disp, logistic, seed=seed, T=1.0, two_boundary=True) == 0


def test_comparison_identical_pair_holds_with_equality(disp, logistic):
    assert comparison_test(disp, logistic, seed=4, T=0.5, identical=True) == 0

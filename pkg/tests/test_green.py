import math

import numpy as np
import pytest
from scipy.linalg import solve_banded

from latticekpp.green import (
    ContaminationError,
    ContourSpec,
    InsufficientDataError,
    ResolventDomainError,
    decompose,
    exact_green,
    extract_cubic,
    gaussian_bound_check,
    laplace_invert,
    mass_error,
    rho_pm,
    slope_fit,
    spatial_green,
    temporal_green,
)


@pytest.fixture(scope="module")
def small_run(disp):
    return temporal_green(disp, L=150, dt=0.01, sample_times=(1.0, 2.0, 5.0))


def test_short_time_expansion(disp):
    dt = 0.01
    snap = temporal_green(disp, L=100, dt=dt, sample_times=(dt,))[0]
    center = snap.values[snap.j_min * -1]
    expected = 1.0 - 2.0 * disp.cosh_lambda * dt
    assert abs(center - expected) <= 3.0 * (2.0 * disp.cosh_lambda * dt) ** 2


def test_mass_and_positivity(small_run):
    for snap in small_run:
        assert mass_error(snap) <= 1e-8
        assert snap.values.min() >= -1e-12


def test_matches_bessel_reference(disp, small_run):
    for snap in small_run:
        j = snap.indices()
        ref = exact_green(j, snap.t, disp)
        assert np.max(np.abs(snap.values - ref)) < 5e-9


def test_contamination_raises(disp):
    with pytest.raises(ContaminationError):
        temporal_green(disp, L=100, dt=0.01, sample_times=(60.0,))


def test_window_precondition(disp):
    with pytest.raises(ValueError):
        temporal_green(disp, L=50, dt=0.01, sample_times=(1.0,))


def test_decompose_sup_positive(disp, small_run):
    dec = decompose(small_run[-1], disp)
    assert dec.e_sup > 0.0
    assert dec.e_sup == np.max(np.abs(dec.remainder))


def test_slope_fit_recovers_synthetic_laws():
    t = np.linspace(10, 200, 30)
    slope, intercept, r2 = slope_fit(list(zip(t, t**-1.5)))
    assert slope == pytest.approx(-1.5, abs=1e-12)
    assert r2 == pytest.approx(1.0)
    slope, intercept, r2 = slope_fit(list(zip(t, 5.0 * t**-2.0)))
    assert slope == pytest.approx(-2.0, abs=1e-12)
    assert intercept == pytest.approx(math.log(5.0), abs=1e-10)


def test_slope_fit_requires_points():
    with pytest.raises(InsufficientDataError):
        slope_fit([(10.0, 1.0), (20.0, 0.5)])


def test_extract_cubic_window_limit(disp, small_run):
    with pytest.raises(ValueError):
        extract_cubic(small_run[0], disp, xi_window=4.0)


def test_rho_at_origin(disp):
    lo, hi = rho_pm(0.0, disp)
    assert lo == pytest.approx(1.0)
    assert hi == pytest.approx(math.exp(2.0 * disp.lambda_star))


def test_rho_product_is_constant(disp):
    rng = np.random.default_rng(2)
    target = math.exp(2.0 * disp.lambda_star)
    for _ in range(50):
        nu = complex(rng.uniform(0.1, 5.0), rng.uniform(-5.0, 5.0))
        lo, hi = rho_pm(nu, disp)
        assert lo * hi == pytest.approx(target, rel=1e-12)


def test_rho_small_nu_expansion(disp):
    # rho_-(nu) = 1 - nu/c* + nu^2/(c*^3 e^(-lam*)) + O(nu^3)
    h = 1e-3
    c = disp.c_star
    vals = {s: rho_pm(s * h, disp)[0].real for s in (-1, 0, 1)}
    d1 = (vals[1] - vals[-1]) / (2 * h)
    d2 = (vals[1] - 2 * vals[0] + vals[-1]) / h**2
    assert abs(d1 - (-1.0 / c)) <= 1e-4
    assert abs(0.5 * d2 - 1.0 / (c**3 * math.exp(-disp.lambda_star))) <= 1e-4


def test_spatial_green_limit_at_origin(disp):
    val = spatial_green(1e-9, 0, disp)
    assert val.real == pytest.approx(1.0 / disp.c_star, rel=1e-6)
    assert spatial_green(1.0, 0, disp).imag == pytest.approx(0.0, abs=1e-15)


def test_spatial_green_defining_equation(disp):
    lam = disp.lambda_star
    for nu in (0.5, 2.0, complex(1.0, 3.0)):
        for j in (-5, -1, 0, 1, 7):
            g = {k: spatial_green(nu, k, disp) for k in (j - 1, j, j + 1)}
            lhs = nu * g[j] - (
                math.exp(lam) * g[j - 1]
                - 2.0 * disp.cosh_lambda * g[j]
                + math.exp(-lam) * g[j + 1]
            )
            expected = 1.0 if j == 0 else 0.0
            assert abs(lhs - expected) <= 1e-10


def test_spatial_green_matches_banded_solve(disp):
    # truncated resolvent system on [-400, 400], nu = 1
    nu = 1.0
    lam = disp.lambda_star
    n = 801
    # row i: -e^lam G[i-1] + (nu + 2 cosh) G[i] - e^-lam G[i+1] = delta_i
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = -math.exp(-lam)  # superdiagonal
    ab[1, :] = nu + 2.0 * disp.cosh_lambda
    ab[2, :-1] = -math.exp(lam)  # subdiagonal
    rhs = np.zeros(n, dtype=complex)
    rhs[400] = 1.0
    sol = solve_banded((1, 1), ab, rhs)
    for j in range(-20, 21):
        assert abs(sol[400 + j] - spatial_green(nu, j, disp)) <= 1e-8


def test_spatial_green_domain_error(disp):
    with pytest.raises(ResolventDomainError):
        spatial_green(-2.0 * disp.cosh_lambda, 0, disp)  # ellipse center


def test_contour_validation(disp):
    bad = ContourSpec(gamma0=-1.0, gamma1=0.0, xi_max=1.0, n_nodes=101)
    with pytest.raises(ResolventDomainError):
        bad.validate(disp)
    ContourSpec.for_time(1.0).validate(disp)


def test_laplace_matches_ode_at_unit_time(disp, small_run):
    snap = small_run[0]
    for j in (-5, 0, 2, int(disp.c_star) + 1, 8):
        ode = snap.values[j - snap.j_min]
        assert abs(laplace_invert(j, 1.0, disp) - ode) <= 1e-6


def test_laplace_far_left_decay(disp):
    assert abs(laplace_invert(-20, 1.0, disp)) < 1e-8


def test_laplace_mass(disp):
    total = sum(laplace_invert(j, 1.0, disp) for j in range(-50, 51))
    assert abs(total - 1.0) <= 1e-6


def test_laplace_overflow_guard(disp):
    with pytest.raises(ValueError):
        laplace_invert(0, 100.0, disp, ContourSpec(gamma0=1.0))


def test_gaussian_bound_fit_and_holdout(disp):
    snaps = temporal_green(disp, L=850, dt=0.02, sample_times=(50.0, 100.0, 200.0, 300.0))
    report = gaussian_bound_check(snaps[:3], disp, theta=1.0, holdout=snaps[3])
    assert report.violations == 0
    assert report.beta == pytest.approx(1.0 / (8.0 * disp.cosh_lambda))
    # beta is admissible: half the principal Gaussian rate
    assert report.beta < 1.0 / (4.0 * disp.cosh_lambda)
    # center value approaches 1/sqrt(4 pi cosh) from the principal part
    target = 1.0 / math.sqrt(4.0 * math.pi * disp.cosh_lambda)
    assert report.center_values[300.0] == pytest.approx(target, rel=0.03)


def test_remainder_coefficient_reported(disp, small_run):
    dec = decompose(small_run[-1], disp)
    assert dec.remainder_coeff > 0.0
    x = small_run[-1].indices() - disp.c_star * small_run[-1].t
    bound = dec.remainder_coeff * small_run[-1].t ** -1.5 * np.exp(
        -dec.remainder_beta * x**2 / small_run[-1].t
    )
    assert np.all(np.abs(dec.remainder) <= bound * (1.0 + 1e-9))

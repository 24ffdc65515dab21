"""Temporal and spatial Green's functions of the comoving linearization.

The temporal kernel is obtained by RK4 time integration from a Kronecker
delta; the spatial kernel (the resolvent applied to the delta) has the
closed form ``Psi(nu) rho^j`` built from the stable/unstable roots of the
transfer quadratic. Numerical Laplace inversion over a sectorial contour
cross-checks the two, and the decomposition against the Gaussian-plus-cubic
principal part quantifies the t^{-3/2} remainder.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dispersion import Dispersion, gaussian, principal_part
from .lattice import LatticeField, MovingFrame, integrate

BOUNDARY_TOL = 1e-10
MASS_TOL = 1e-8
POSITIVITY_TOL = -1e-12


class ContaminationError(RuntimeError):
    """Boundary entries of a Green run exceeded the contamination threshold."""


class ResolventDomainError(ValueError):
    """A query point lies inside or on the spectral ellipse."""


class QuadratureError(RuntimeError):
    """Contour quadrature failed its conjugate-symmetry residual check."""


class InsufficientDataError(ValueError):
    """Too few usable points for a requested fit."""


# ---------------------------------------------------------------------------
# temporal kernel by time integration


def temporal_green(
    d: Dispersion,
    L: int,
    dt: float,
    sample_times: Sequence[float],
) -> list[LatticeField]:
    """Integrate the comoving system from a delta on [-L, L] with zero clamps.

    Returns one snapshot per requested time (nearest step). Raises
    :class:`ContaminationError` if a boundary entry exceeds 1e-10 at any
    sample time.
    """
    if L < 100:
        raise ValueError(f"window half-width must be at least 100, got {L}")
    times = sorted(set(float(t) for t in sample_times))
    if not times or times[0] <= 0.0:
        raise ValueError("sample times must be positive")
    values = np.zeros(2 * L + 1)
    values[L] = 1.0
    field = LatticeField(t=0.0, j_min=-L, values=values)
    kind = MovingFrame(d)

    snapshots: list[LatticeField] = []
    step_now = 0
    for t in times:
        step_target = round(t / dt)
        field = integrate(field, kind, dt, step_target - step_now)
        step_now = step_target
        edge = max(abs(float(field.values[0])), abs(float(field.values[-1])))
        if edge > BOUNDARY_TOL:
            raise ContaminationError(
                f"boundary magnitude {edge:.3e} exceeds {BOUNDARY_TOL:g} at t = {field.t:g}"
            )
        snapshots.append(field.snapshot())
    return snapshots


def mass_error(snapshot: LatticeField) -> float:
    return abs(float(snapshot.values.sum()) - 1.0)


@dataclass(frozen=True)
class RemainderExperiment:
    """Outcome of the delta-seeded kernel run against its principal part."""

    e_series: list[tuple[float, float]]
    snapshots: dict[float, LatticeField]
    contamination_time: float
    mass_error_max: float
    positivity_min: float
    slope: float
    intercept: float
    r_squared: float
    xi: np.ndarray
    p_tilde: np.ndarray
    p_theory: np.ndarray
    cubic_sup_error: float


def remainder_experiment(
    d: Dispersion,
    L: int = 1000,
    dt: float = 0.01,
    tmax: float = 400.0,
    stride: int = 100,
    fit_tmin: float = 10.0,
    snapshot_times: Sequence[float] | None = None,
) -> RemainderExperiment:
    """Integrate from a delta and measure the t^(-3/2) remainder law.

    The sup-norm distance to the principal part is sampled every ``stride``
    steps and regressed in log-log form over ``t >= fit_tmin``; the
    rescaled cubic deviation is extracted at ``tmax``. Mass and positivity
    are tracked only while the boundary entries stay below the
    contamination threshold (the spreading kernel eventually reaches any
    finite window; the remainder is insensitive to that).
    """
    from .dispersion import cubic_correction

    if snapshot_times is None:
        snapshot_times = sorted(
            {t for t in (10.0 * 2**k for k in range(0, 12)) if t < tmax} | {float(tmax)}
        )
    e_series: list[tuple[float, float]] = []
    state = {"mass": 0.0, "min": math.inf, "onset": math.inf}

    values = np.zeros(2 * L + 1)
    values[L] = 1.0
    field = LatticeField(t=0.0, j_min=-L, values=values)

    def observe(snap: LatticeField) -> None:
        dec = decompose(snap, d)
        e_series.append((snap.t, dec.e_sup))
        edge = max(abs(float(snap.values[0])), abs(float(snap.values[-1])))
        if edge > BOUNDARY_TOL and not math.isfinite(state["onset"]):
            state["onset"] = snap.t
        if snap.t < state["onset"]:
            state["mass"] = max(state["mass"], mass_error(snap))
            state["min"] = min(state["min"], float(snap.values.min()))

    snapshots: dict[float, LatticeField] = {}
    step_now = 0
    for t in snapshot_times:
        target = round(t / dt)
        field = integrate(field, MovingFrame(d), dt, target - step_now, [(stride, observe)])
        step_now = target
        snapshots[t] = field.snapshot()

    slope, intercept, r2 = slope_fit(e_series, t_min=fit_tmin)
    xi, p_tilde = extract_cubic(snapshots[float(tmax)], d, xi_window=2.0)
    p_theory = cubic_correction(xi, d)
    return RemainderExperiment(
        e_series=e_series,
        snapshots=snapshots,
        contamination_time=state["onset"],
        mass_error_max=state["mass"],
        positivity_min=state["min"],
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        xi=xi,
        p_tilde=p_tilde,
        p_theory=p_theory,
        cubic_sup_error=float(np.max(np.abs(p_tilde - p_theory))),
    )


def exact_green(j, t: float, d: Dispersion):
    """Closed-form kernel value from the drifted discrete heat kernel.

    The comoving stencil is a biased birth-death generator, so the kernel is
    a modified Bessel function times an exponential tilt. Used as an
    independent oracle for the time integration at moderate times.
    """
    from scipy.special import ive

    j = np.asarray(j, dtype=float)
    with np.errstate(divide="ignore"):
        logscale = d.lambda_star * j - (2.0 * d.cosh_lambda - 2.0) * t
        bess = ive(j, 2.0 * t)
        out = np.where(bess > 0.0, np.exp(logscale + np.log(np.where(bess > 0.0, bess, 1.0))), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# decomposition against the principal part


@dataclass(frozen=True)
class GreenDecomposition:
    """Computed kernel split into principal part and remainder on a window."""

    t: float
    j_min: int
    values: np.ndarray
    principal: np.ndarray
    remainder: np.ndarray
    e_sup: float
    remainder_coeff: float  # smallest C with |R| <= C t^-3/2 exp(-beta x^2/t)
    remainder_beta: float


def decompose(snapshot: LatticeField, d: Dispersion) -> GreenDecomposition:
    """Split a snapshot into principal part and remainder; E = sup |remainder|."""
    j = snapshot.indices()
    h = principal_part(j, snapshot.t, d)
    r = snapshot.values - h
    e_sup = float(np.max(np.abs(r)))
    beta = 1.0 / (8.0 * d.cosh_lambda)
    x = j - d.c_star * snapshot.t
    weight = np.exp(np.minimum(beta * x * x / snapshot.t, 700.0))
    coeff = float(np.max(np.abs(r) * snapshot.t**1.5 * weight))
    return GreenDecomposition(
        t=snapshot.t,
        j_min=snapshot.j_min,
        values=np.asarray(snapshot.values),
        principal=h,
        remainder=r,
        e_sup=e_sup,
        remainder_coeff=coeff,
        remainder_beta=beta,
    )


def slope_fit(series: Sequence[tuple[float, float]], t_min: float = 0.0):
    """Least squares of ln E against ln t over points with t >= t_min.

    Returns ``(slope, intercept, r_squared)``.
    """
    pts = [(t, e) for t, e in series if t >= t_min and e > 0.0]
    if len(pts) < 5:
        raise InsufficientDataError(f"need at least 5 points with t >= {t_min}, got {len(pts)}")
    x = np.log([t for t, _ in pts])
    y = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sstot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / sstot if sstot > 0.0 else 1.0
    return float(slope), float(intercept), r2


def extract_cubic(snapshot: LatticeField, d: Dispersion, xi_window: float = 2.0):
    """Rescaled deviation of the kernel from its Gaussian leading order.

    For each stored ``j`` with ``|xi_j| <= xi_window`` returns
    ``t (G_j - G0(xi_j)/sqrt(2 cosh(lam*) t)) / G0(xi_j)`` which converges to
    the universal odd cubic. Dividing by the Gaussian is numerically unsafe
    past ``xi_window = 3``.
    """
    if xi_window > 3.0:
        raise ValueError("xi_window must be at most 3")
    t = snapshot.t
    width = math.sqrt(2.0 * d.cosh_lambda * t)
    xi = (snapshot.indices() - d.c_star * t) / width
    keep = np.abs(xi) <= xi_window
    xi = xi[keep]
    g0 = gaussian(xi)
    p_tilde = t * (snapshot.values[keep] - g0 / width) / g0
    return xi, p_tilde


# ---------------------------------------------------------------------------
# spatial kernel and Laplace inversion


def rho_pm(nu: complex, d: Dispersion) -> tuple[complex, complex]:
    """Transfer-quadratic roots with the principal square root branch."""
    s = nu + 2.0 * d.cosh_lambda
    root = cmath.sqrt(s * s - 4.0)
    scale = 0.5 * math.exp(d.lambda_star)
    return scale * (s - root), scale * (s + root)


def _stable_unstable(nu, d: Dispersion):
    """Roots ordered by modulus; immune to principal-branch flips."""
    nu = np.asarray(nu, dtype=complex)
    s = nu + 2.0 * d.cosh_lambda
    root = np.sqrt(s * s - 4.0)
    scale = 0.5 * math.exp(d.lambda_star)
    a = scale * (s - root)
    b = scale * (s + root)
    swap = np.abs(a) > np.abs(b)
    rs = np.where(swap, b, a)
    ru = np.where(swap, a, b)
    return rs, ru


def spatial_green(nu, j: int, d: Dispersion):
    """Resolvent kernel at lattice offset j; ``nu`` may be an array.

    ``Psi(nu) rho_-^j`` for j >= 0 and ``Psi(nu) rho_+^j`` for j <= 0; the
    stable/unstable roots are selected by modulus so the value is continuous
    across the principal branch cut. Raises
    :class:`ResolventDomainError` when any query point fails the spectral
    splitting |rho_-| < 1 < |rho_+|.
    """
    rs, ru = _stable_unstable(nu, d)
    mods, modu = np.abs(rs), np.abs(ru)
    if np.any(mods >= 1.0) or np.any(modu <= 1.0):
        raise ResolventDomainError("query point inside or on the spectral ellipse")
    psi = 1.0 / (math.exp(-d.lambda_star) * (ru - rs))
    if j >= 0:
        out = psi * rs ** int(j)
    else:
        out = psi * ru ** int(j)
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class ContourSpec:
    """Sectorial contour gamma0 - gamma1 |xi| + i xi, |xi| <= xi_max.

    The default node count is high because the contour has a corner at
    xi = 0 where the trapezoid rule is only second order.
    """

    gamma0: float
    gamma1: float = 0.25
    xi_max: float = 60.0
    n_nodes: int = 80_001

    @staticmethod
    def for_time(t: float) -> "ContourSpec":
        return ContourSpec(gamma0=2.0 / t)

    def nodes_upper(self):
        """Nodes and complex velocity of the upper half (xi >= 0)."""
        m = (self.n_nodes + 1) // 2
        xi = np.linspace(0.0, self.xi_max, m)
        nu = self.gamma0 - self.gamma1 * xi + 1j * xi
        return xi, nu, complex(-self.gamma1, 1.0)

    def validate(self, d: Dispersion) -> None:
        """Reject contours meeting the spectral ellipse.

        The spectrum is the ellipse Re = 2 cosh(lam*)(cos s - 1),
        Im = c* sin s; a point is safe when its ellipse form exceeds 1 or
        when it lies in the open right half plane.
        """
        _, nu, _ = self.nodes_upper()
        a = 2.0 * d.cosh_lambda
        form = ((nu.real + a) / a) ** 2 + (nu.imag / d.c_star) ** 2
        ok = (nu.real > 0.0) | (form > 1.0 + 1e-12)
        if not bool(np.all(ok)):
            raise ResolventDomainError("contour intersects the spectral ellipse")


def laplace_invert(
    j: int,
    t: float,
    d: Dispersion,
    contour: ContourSpec | None = None,
    im_tol: float = 1e-8,
) -> float:
    """Temporal kernel value by trapezoid quadrature of the Bromwich integral.

    The two smooth half-lines of the sectorial contour are integrated
    separately (the integrand's velocity jumps at the corner). The imaginary
    part of the complex result is the conjugate-symmetry residual and must
    stay below ``im_tol``.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if contour is None:
        contour = ContourSpec.for_time(t)
    if contour.gamma0 * t > 50.0:
        raise ValueError("gamma0 * t too large, exponential prefactor would overflow")
    contour.validate(d)
    xi, nu_up, vel_up = contour.nodes_upper()
    h = xi[1] - xi[0]
    # The lower half-line is evaluated independently rather than by
    # conjugation, so the imaginary part below is a genuine residual.
    nu_lo = np.conj(nu_up)
    vel_lo = complex(contour.gamma1, 1.0)
    f_up = np.exp(nu_up * t) * spatial_green(nu_up, j, d) * vel_up
    f_lo = np.exp(nu_lo * t) * spatial_green(nu_lo, j, d) * vel_lo
    total = _trapz(f_up, h) + _trapz(f_lo, h)
    val = complex(total / (2.0j * math.pi))
    if abs(val.imag) >= im_tol:
        raise QuadratureError(f"symmetry residual {abs(val.imag):.3e} exceeds {im_tol:g}")
    return val.real


def _trapz(f: np.ndarray, h: float) -> complex:
    return complex(h * (f.sum() - 0.5 * (f[0] + f[-1])))


# ---------------------------------------------------------------------------
# generalized Gaussian envelope


@dataclass(frozen=True)
class GaussianBoundReport:
    coeff: float
    beta: float
    fitted_times: tuple[float, ...]
    holdout_time: float
    violations: int
    center_values: dict[float, float]  # t -> sqrt(t) * G at round(c* t)


def gaussian_bound_check(
    snapshots: Sequence[LatticeField],
    d: Dispersion,
    theta: float = 1.0,
    holdout: LatticeField | None = None,
) -> GaussianBoundReport:
    """Fit the envelope |G_j(t)| <= (C/sqrt(t)) exp(-beta (j-c*t)^2/t).

    ``beta`` is fixed at 1/(8 cosh(lam*)), half the rate of the principal
    Gaussian, and the smallest admissible ``C`` is fitted over
    ``|j - c* t| <= theta t``. Violations are counted on the held-out
    snapshot with a 1e-9 relative allowance.
    """
    beta = 1.0 / (8.0 * d.cosh_lambda)

    def envelope_stat(snap: LatticeField) -> np.ndarray:
        x = snap.indices() - d.c_star * snap.t
        keep = np.abs(x) <= theta * snap.t
        xx = x[keep]
        vals = np.abs(np.asarray(snap.values)[keep])
        return vals * math.sqrt(snap.t) * np.exp(beta * xx * xx / snap.t)

    coeff = max(float(np.max(envelope_stat(s))) for s in snapshots)
    violations = 0
    holdout_t = math.nan
    if holdout is not None:
        holdout_t = holdout.t
        stat = envelope_stat(holdout)
        violations = int(np.count_nonzero(stat > coeff * (1.0 + 1e-9)))
    centers = {}
    for snap in list(snapshots) + ([holdout] if holdout is not None else []):
        jc = round(d.c_star * snap.t)
        if snap.j_min <= jc <= snap.j_max:
            centers[snap.t] = float(snap.values[jc - snap.j_min]) * math.sqrt(snap.t)
    return GaussianBoundReport(
        coeff=coeff,
        beta=beta,
        fitted_times=tuple(s.t for s in snapshots),
        holdout_time=holdout_t,
        violations=violations,
        center_values=centers,
    )

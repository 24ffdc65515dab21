"""Minimal-speed dispersion pair of the lattice KPP linearization.

The speed ``c*`` is the minimum over ``lam > 0`` of

    (exp(lam) - 2 + exp(-lam) + fprime0) / lam,

attained at a unique ``lam*``. Stationarity of the quotient gives the
equivalent system ``c* lam* = exp(lam*) - 2 + exp(-lam*) + fprime0`` and
``c* = exp(lam*) - exp(-lam*)``, which is what the solver targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_TOL = 1e-12

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Dispersion:
    """Dispersion pair (c*, lam*) for a given reaction slope at zero.

    Also carries the derived constants used downstream: cosh(lam*), the
    cubic-correction constant ``Lambda_star = 2 + c*^2/3`` and the level-set
    delay coefficient ``3/(2 lam*)``.
    """

    fprime0: float
    c_star: float
    lambda_star: float
    cosh_lambda: float
    Lambda_star: float
    bramson_coeff: float

    def residuals(self) -> tuple[float, float]:
        """Residuals of the two defining equations (both ~0 at a solution)."""
        r1 = self.c_star * self.lambda_star - (
            math.exp(self.lambda_star) - 2.0 + math.exp(-self.lambda_star) + self.fprime0
        )
        r2 = self.c_star - (math.exp(self.lambda_star) - math.exp(-self.lambda_star))
        return r1, r2

    def speed_quotient(self, lam: float) -> float:
        """The speed quotient (exp(lam) - 2 + exp(-lam) + fprime0)/lam."""
        return (math.exp(lam) - 2.0 + math.exp(-lam) + self.fprime0) / lam


def _stationarity(lam: float, fprime0: float) -> float:
    # g(lam) = lam (e^lam - e^-lam) - (e^lam - 2 + e^-lam + fprime0),
    # strictly increasing past its unique positive root.
    return lam * (math.exp(lam) - math.exp(-lam)) - (
        math.exp(lam) - 2.0 + math.exp(-lam) + fprime0
    )


def solve_dispersion(fprime0: float, tol: float = DEFAULT_TOL) -> Dispersion:
    """Solve the dispersion system for (c*, lam*) by bracketing bisection.

    Parameters
    ----------
    fprime0 : float
        Reaction slope at the unstable state, must be positive.
    tol : float
        Residual tolerance for both defining equations.

    Raises
    ------
    ValueError
        If ``fprime0 <= 0`` or ``tol <= 0``.
    RuntimeError
        If bracket expansion exceeds lam = 50 without a sign change.
    """
    if fprime0 <= 0.0:
        raise ValueError(f"fprime0 must be positive, got {fprime0}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    lo, hi = 1e-6, 10.0
    while _stationarity(hi, fprime0) < 0.0:
        hi *= 2.0
        if hi > 50.0:
            raise RuntimeError("dispersion bracket expansion exceeded lam = 50")
    # g(lo) < 0 for any fprime0 > 0 since g(0+) -> -fprime0.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _stationarity(mid, fprime0) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * max(1.0, hi):
            break
    lam = 0.5 * (lo + hi)
    c = math.exp(lam) - math.exp(-lam)
    d = Dispersion(
        fprime0=float(fprime0),
        c_star=c,
        lambda_star=lam,
        cosh_lambda=math.cosh(lam),
        Lambda_star=2.0 + c * c / 3.0,
        bramson_coeff=3.0 / (2.0 * lam),
    )
    r1, r2 = d.residuals()
    if abs(r1) > tol or abs(r2) > tol:
        raise RuntimeError(f"dispersion solve missed tolerance: residuals {r1}, {r2}")
    return d


def gaussian(x):
    """Normalized Gaussian profile exp(-x^2/2)/sqrt(2 pi); accepts arrays."""
    import numpy as np

    return np.exp(-np.square(x) / 2.0) / _SQRT_2PI


def cubic_correction(x, d: Dispersion):
    """Odd cubic profile (c*/(24 cosh^2 lam*)) (-3x + x^3); accepts arrays."""
    import numpy as np

    x = np.asarray(x, dtype=float)
    coeff = d.c_star / (24.0 * d.cosh_lambda**2)
    return coeff * (-3.0 * x + x**3)


def principal_part(j, t: float, d: Dispersion):
    """Leading Gaussian-plus-cubic profile of the delta-seeded comoving field.

    Evaluates ``[1/sqrt(2 cosh(lam*) t) + P(xi)/t] G(xi)`` at
    ``xi = (j - c* t)/sqrt(2 cosh(lam*) t)``. ``j`` may be an array.
    """
    import numpy as np

    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    j = np.asarray(j, dtype=float)
    width = math.sqrt(2.0 * d.cosh_lambda * t)
    xi = (j - d.c_star * t) / width
    return (1.0 / width + cubic_correction(xi, d) / t) * gaussian(xi)

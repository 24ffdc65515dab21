"""KPP reaction terms with linear extensions outside the unit interval.

A valid reaction satisfies f(0) = f(1) = 0, f'(0) > 0, f'(1) < 0 and
0 < f(u) <= f'(0) u on (0, 1). Outside [0, 1] the nonlinearity is
extended linearly: with slope f'(0) through the origin on the left
(which makes the comoving nonlinear term vanish for nonpositive
arguments) and with slope f'(1) through (1, 0) on the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_FD_STEP = 1e-6


@dataclass(frozen=True)
class ReactionSpec:
    """A reaction term together with its recorded slope at zero.

    ``core`` is the nonlinearity on [0, 1]; ``__call__`` applies the linear
    extensions outside. ``fprime1`` is the right-extension slope.
    """

    core: Callable[[np.ndarray], np.ndarray]
    fprime0: float
    label: str
    fprime1: float = field(default=math.nan)

    def __post_init__(self):
        if math.isnan(self.fprime1):
            # central finite difference at u = 1, step 1e-6
            d = (self.core(np.float64(1.0 + _FD_STEP)) - self.core(np.float64(1.0 - _FD_STEP))) / (
                2.0 * _FD_STEP
            )
            object.__setattr__(self, "fprime1", float(d))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        inside = self.core(np.clip(u, 0.0, 1.0))
        out = np.where(u < 0.0, self.fprime0 * u, inside)
        out = np.where(u > 1.0, self.fprime1 * (u - 1.0), out)
        if out.ndim == 0:
            return float(out)
        return out


def make_logistic(r: float) -> ReactionSpec:
    """Logistic reaction r u (1 - u) with fprime0 = r."""
    if r <= 0.0:
        raise ValueError(f"logistic rate must be positive, got {r}")

    def core(u):
        return r * u * (1.0 - u)

    return ReactionSpec(core=core, fprime0=float(r), label=f"logistic(r={r:g})", fprime1=-float(r))


@dataclass(frozen=True)
class KppReport:
    """Outcome of the structural KPP checks on a sampled grid."""

    ok: bool
    first_violation: str | None
    fprime0_estimate: float


def validate_kpp(spec: ReactionSpec, n_samples: int = 10_000) -> KppReport:
    """Check f(0) = f(1) = 0 and 0 < f(u) <= fprime0 u on a uniform grid of (0, 1).

    Also compares a one-sided finite-difference estimate of f'(0) with the
    declared slope; the report fails if they disagree by more than 1e-4.
    """
    if n_samples < 10:
        raise ValueError("n_samples must be at least 10")
    violation = None
    if abs(float(spec.core(np.float64(0.0)))) > 1e-12:
        violation = "f(0) != 0"
    elif abs(float(spec.core(np.float64(1.0)))) > 1e-12:
        violation = "f(1) != 0"
    if violation is None:
        u = np.linspace(0.0, 1.0, n_samples + 2)[1:-1]
        f = spec.core(u)
        bad_low = np.nonzero(f <= 0.0)[0]
        bad_high = np.nonzero(f > spec.fprime0 * u * (1.0 + 1e-12))[0]
        if bad_low.size:
            violation = f"f(u) <= 0 at u = {u[bad_low[0]]:.6g}"
        elif bad_high.size:
            violation = f"f(u) > fprime0*u at u = {u[bad_high[0]]:.6g}"
    h = 1e-7
    slope = float(spec.core(np.float64(h))) / h
    if violation is None and abs(slope - spec.fprime0) > 1e-4:
        violation = f"f'(0) estimate {slope:.8g} differs from declared {spec.fprime0:.8g}"
    return KppReport(ok=violation is None, first_violation=violation, fprime0_estimate=slope)


def comoving_nonlinearity(spec: ReactionSpec, lambda_star: float, x, s):
    """Nonlinear defect f'(0) s - e^(lam x) f(e^(-lam x) s) of the comoving frame.

    ``x`` is the offset from the front position and ``s`` the comoving value;
    both may be arrays. The result is nonnegative for a KPP reaction and is
    exactly zero for s <= 0. Evaluated as e^(lam x) [f'(0) u - f(u)] with
    u = e^(-lam x) s, in log scale so that large positive offsets (where the
    plain exponentials overflow or underflow) return the correct tiny values.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    x, s = np.broadcast_arrays(x, s)
    out = np.zeros(x.shape, dtype=float)
    pos = s > 0.0
    if not np.any(pos):
        return out if out.ndim else float(out)
    lx = lambda_star * x[pos]
    u = np.exp(-lx) * s[pos]
    defect = spec.fprime0 * u - spec(u)
    defect = np.maximum(defect, 0.0)
    with np.errstate(divide="ignore"):
        logdef = np.where(defect > 0.0, np.log(np.where(defect > 0.0, defect, 1.0)), -np.inf)
    out[pos] = np.where(defect > 0.0, np.exp(lx + logdef), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def reaction_from_config(cfg: dict) -> ReactionSpec:
    """Build a reaction from a config mapping, e.g. {"reaction": "logistic", "r": 1.0}."""
    kind = cfg.get("reaction")
    if kind == "logistic":
        return make_logistic(float(cfg.get("r", 1.0)))
    raise ValueError(f"unknown reaction {kind!r}")


def quadratic_defect_bound(spec: ReactionSpec, s0: float = 0.5, n: int = 2000) -> float:
    """Smallest M with f'(0) u - f(u) <= M u^2 on (0, s0], estimated by sampling."""
    u = np.linspace(s0 / n, s0, n)
    return float(np.max((spec.fprime0 * u - spec.core(u)) / u**2))

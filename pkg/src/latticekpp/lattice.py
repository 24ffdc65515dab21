"""Finite-window lattice fields and a fixed-step RK4 integrator.

Three right-hand sides are supported: the nonlinear KPP system, its
linearization at zero, and the comoving-frame linearization whose stencil
is ``exp(lam*) w[j-1] - 2 cosh(lam*) w[j] + exp(-lam*) w[j+1]``. Windows
are static; values one step outside the window are constant clamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .dispersion import Dispersion
from .reaction import ReactionSpec


class BlowupError(RuntimeError):
    """Raised when a field entry becomes NaN or infinite during integration."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite field entry at step {step} (t = {t:g})")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class LatticeField:
    """Finite window of lattice values with an absolute index offset.

    ``values[i]`` is the entry at lattice index ``j_min + i``. Ghost access
    one site left/right of the window returns ``left_clamp``/``right_clamp``.
    """

    t: float
    j_min: int
    values: np.ndarray
    left_clamp: float = 0.0
    right_clamp: float = 0.0

    def __post_init__(self):
        if self.values.size == 0:
            raise ValueError("lattice window must be nonempty")

    @property
    def j_max(self) -> int:
        return self.j_min + self.values.size - 1

    def indices(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_min + self.values.size)

    def snapshot(self) -> "LatticeField":
        """Immutable copy handed to observers."""
        v = self.values.copy()
        v.flags.writeable = False
        return replace(self, values=v)


@dataclass(frozen=True)
class NonlinearKPP:
    reaction: ReactionSpec


@dataclass(frozen=True)
class LinearizedKPP:
    fprime0: float


@dataclass(frozen=True)
class MovingFrame:
    dispersion: Dispersion


RhsKind = NonlinearKPP | LinearizedKPP | MovingFrame


def _stencil_coeffs(kind: RhsKind) -> tuple[float, float, float]:
    """(left, center, right) coefficients of the linear stencil part."""
    if isinstance(kind, MovingFrame):
        lam = kind.dispersion.lambda_star
        return math.exp(lam), -2.0 * kind.dispersion.cosh_lambda, math.exp(-lam)
    return 1.0, -2.0, 1.0


def _make_rhs(kind: RhsKind, left_clamp: float, right_clamp: float) -> Callable:
    """Build rhs(u, out) writing the time derivative of ``u`` into ``out``."""
    cl, cc, cr = _stencil_coeffs(kind)

    if isinstance(kind, NonlinearKPP):
        f = kind.reaction
        r_core, fp0, fp1 = f.core, f.fprime0, f.fprime1

        def rhs(u, out):
            # reaction with linear extensions, without allocating via np.where
            np.multiply(u, cc, out=out)
            out += r_core(u)
            bad_lo = u < 0.0
            if bad_lo.any():
                out[bad_lo] += fp0 * u[bad_lo] - r_core(u[bad_lo])
            bad_hi = u > 1.0
            if bad_hi.any():
                out[bad_hi] += fp1 * (u[bad_hi] - 1.0) - r_core(u[bad_hi])
            out[1:] += cl * u[:-1]
            out[:-1] += cr * u[1:]
            out[0] += cl * left_clamp
            out[-1] += cr * right_clamp
            return out

    elif isinstance(kind, LinearizedKPP):
        cc_lin = cc + kind.fprime0

        def rhs(u, out):
            np.multiply(u, cc_lin, out=out)
            out[1:] += cl * u[:-1]
            out[:-1] += cr * u[1:]
            out[0] += cl * left_clamp
            out[-1] += cr * right_clamp
            return out

    else:

        def rhs(u, out):
            np.multiply(u, cc, out=out)
            out[1:] += cl * u[:-1]
            out[:-1] += cr * u[1:]
            out[0] += cl * left_clamp
            out[-1] += cr * right_clamp
            return out

    return rhs


def rhs(field: LatticeField, kind: RhsKind) -> np.ndarray:
    """Time derivative of every stored entry."""
    fn = _make_rhs(kind, field.left_clamp, field.right_clamp)
    return fn(np.asarray(field.values, dtype=float), np.empty(field.values.size))


def rk4_step(field: LatticeField, kind: RhsKind, dt: float) -> LatticeField:
    """One classical four-stage step; clamps are unchanged."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    fn = _make_rhs(kind, field.left_clamp, field.right_clamp)
    u = np.asarray(field.values, dtype=float)
    n = u.size
    k1, k2, k3, k4, stage = (np.empty(n) for _ in range(5))
    fn(u, k1)
    np.multiply(k1, 0.5 * dt, out=stage)
    stage += u
    fn(stage, k2)
    np.multiply(k2, 0.5 * dt, out=stage)
    stage += u
    fn(stage, k3)
    np.multiply(k3, dt, out=stage)
    stage += u
    fn(stage, k4)
    new = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return replace(field, t=field.t + dt, values=new)


Observer = tuple[int, Callable[[LatticeField], None]]


def integrate(
    field: LatticeField,
    kind: RhsKind,
    dt: float,
    n_steps: int,
    observers: Sequence[Observer] = (),
) -> LatticeField:
    """Apply ``n_steps`` RK4 steps, invoking observers on snapshots.

    Each observer is a ``(stride, callback)`` pair; the callback receives a
    read-only snapshot after every ``stride`` steps. Raises
    :class:`BlowupError` as soon as any entry goes non-finite.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    for stride, _ in observers:
        if stride < 1:
            raise ValueError("observer strides must be >= 1")
    if n_steps == 0:
        return field
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")

    fn = _make_rhs(kind, field.left_clamp, field.right_clamp)
    u = np.array(field.values, dtype=float)
    n = u.size
    k1, k2, k3, k4, stage = (np.empty(n) for _ in range(5))
    t0 = field.t
    current = replace(field, values=u)

    for step in range(1, n_steps + 1):
        fn(u, k1)
        np.multiply(k1, 0.5 * dt, out=stage)
        stage += u
        fn(stage, k2)
        np.multiply(k2, 0.5 * dt, out=stage)
        stage += u
        fn(stage, k3)
        np.multiply(k3, dt, out=stage)
        stage += u
        fn(stage, k4)
        k2 += k3
        k2 *= 2.0
        k1 += k2
        k1 += k4
        k1 *= dt / 6.0
        u += k1
        t = t0 + step * dt
        if not math.isfinite(float(u.sum())):
            raise BlowupError(step, t)
        if observers:
            current = replace(current, t=t)
            snap = None
            for stride, callback in observers:
                if step % stride == 0:
                    if snap is None:
                        snap = current.snapshot()
                    callback(snap)

    return replace(field, t=t0 + n_steps * dt, values=u)


def field_to_rows(field: LatticeField) -> list[tuple[float, int, float]]:
    """Rows (t, j, value) ordered by j, the CSV serialization of a snapshot."""
    return [(field.t, int(j), float(v)) for j, v in zip(field.indices(), field.values)]

"""Adaptive integration of the impedance Riccati equation.

    dZ/dx = i (2/hbar) (E - U(x)) - i (m/hbar) Z^2

Z has simple poles at the nodes of the underlying wavefunction.  The
stepper therefore watches |Z| and, above ``pole_threshold``, switches to
the reciprocal variable W = 1/Z which obeys the regular equation

    dW/dx = i (m/hbar) - i (2/hbar) (E - U(x)) W^2

and switches back (with hysteresis) once |W| has grown again.  Stepping
is a scalar Dormand-Prince 5(4) embedded pair with standard PI-free
error control; the potential's jump points split the range so no step
ever straddles a discontinuity.

Optionally the running integral S(x) = int Z dx' from the anchor is
carried as a second state component (same error control).  It feeds the
wavefunction phase exp[(i m / hbar) S] and the constant-current
diagnostic; trajectories expected to cross true poles should leave it
off, since S has a logarithmic singularity there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analytic import region_constants
from .errors import (
    EvanescentIncidenceError,
    NonFiniteStateError,
    StepSizeUnderflowError,
)
from .model import ModelParams, PiecewisePotential, Potential, Side

# Dormand-Prince 5(4) tableau (the classic ode45 pair).
_C = (0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_A = (
    (),
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0)
# b5 - b4 error weights (7th entry applies to the FSAL stage)
_ERR = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@dataclass(frozen=True)
class IntegrationConfig:
    """Tolerances and safeguards for the Riccati stepper.

    ``max_step`` of None means (span / 50) is chosen per call.  When
    ``force_numeric`` is set, higher-level solvers integrate the ODE even
    for piecewise-constant potentials instead of chaining closed forms.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    pole_threshold: float = 1e3
    force_numeric: bool = False


@dataclass(frozen=True)
class ImpedanceSample:
    """One accepted step: position and impedance (velocity-like units)."""

    x: float
    z: complex


@dataclass(frozen=True)
class ImpedanceTrajectory:
    """Accepted-step record of one Riccati integration.

    ``xs`` ascend regardless of integration direction; ``direction``
    tells which end holds the anchor (LEFT means integrated toward
    smaller x, so the anchor is the last sample).  ``z_integral`` is
    S(x) = int Z dx' measured from the anchor, or None if not tracked.
    """

    xs: np.ndarray
    zs: np.ndarray
    direction: Side
    anchor_x: float
    anchor_z: complex
    energy: float
    potential: Potential
    params: ModelParams
    z_integral: np.ndarray | None = None

    @property
    def samples(self) -> list[ImpedanceSample]:
        return [ImpedanceSample(float(x), complex(z)) for x, z in zip(self.xs, self.zs)]

    def z_at_end(self, x: float) -> complex:
        """Impedance at one of the two endpoints of the trajectory."""
        if math.isclose(x, self.xs[0], rel_tol=0.0, abs_tol=1e-9 * (1 + abs(x))):
            return complex(self.zs[0])
        if math.isclose(x, self.xs[-1], rel_tol=0.0, abs_tol=1e-9 * (1 + abs(x))):
            return complex(self.zs[-1])
        raise ValueError(f"x={x} is not a trajectory endpoint")


def _error_norm(err, y_old, y_new, rel_tol, abs_tol) -> float:
    norm = 0.0
    for e, a, b in zip(err, y_old, y_new):
        scale = abs_tol + rel_tol * max(abs(a), abs(b))
        norm = max(norm, abs(e) / scale)
    return norm


def _dopri_step(f, x, y, h, f0):
    """One embedded RK step; returns (y5, err, f_new)."""
    k = [f0]
    for i in range(1, 6):
        yi = tuple(
            y[j] + h * sum(_A[i][m] * k[m][j] for m in range(i))
            for j in range(len(y))
        )
        k.append(f(x + _C[i] * h, yi))
    y5 = tuple(
        y[j] + h * sum(_B5[m] * k[m][j] for m in range(6)) for j in range(len(y))
    )
    f_new = f(x + h, y5)
    k.append(f_new)
    err = tuple(
        h * sum(_ERR[m] * k[m][j] for m in range(7)) for j in range(len(y))
    )
    return y5, err, f_new


class _Recorder:
    """Collects accepted samples in integration order."""

    def __init__(self, track: bool):
        self.xs: list[float] = []
        self.zs: list[complex] = []
        self.ss: list[complex] | None = [] if track else None

    def add(self, x: float, z: complex, s: complex):
        self.xs.append(x)
        self.zs.append(z)
        if self.ss is not None:
            self.ss.append(s)


def _integrate_piece(
    ufunc: Callable[[float], float],
    e: float,
    x0: float,
    x1: float,
    z0: complex,
    s0: complex,
    cfg: IntegrationConfig,
    params: ModelParams,
    max_step: float,
    track: bool,
    rec: _Recorder,
) -> tuple[complex, complex]:
    """Integrate one smooth piece from x0 to x1; returns (Z, S) at x1."""
    hbar, m = params.hbar, params.mass
    c_pot = 2.0 / hbar
    c_imp = m / hbar

    def f_z(x, y):
        z = y[0]
        dz = 1j * (c_pot * (e - ufunc(x)) - c_imp * z * z)
        return (dz, z) if track else (dz,)

    def f_w(x, y):
        w = y[0]
        dw = 1j * (c_imp - c_pot * (e - ufunc(x)) * w * w)
        return (dw, 1.0 / w) if track else (dw,)

    sgn = 1.0 if x1 > x0 else -1.0
    span = abs(x1 - x0)
    x, z, s = x0, z0, s0
    in_w = abs(z) >= cfg.pole_threshold
    h = sgn * min(max_step, span)
    h_floor = 1e-14 * max(1.0, abs(x0), abs(x1))
    switch_back = 2.0 / cfg.pole_threshold  # hysteresis: |Z| <= threshold/2

    y = ((1.0 / z if in_w else z),) + ((s,) if track else ())
    f = f_w if in_w else f_z
    f0 = f(x, y)

    while sgn * (x1 - x) > h_floor:
        h = sgn * min(abs(h), max_step, sgn * (x1 - x))
        y_new, err, f_new = _dopri_step(f, x, y, h, f0)
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in y_new):
            raise NonFiniteStateError(f"non-finite state near x={x}")
        norm = _error_norm(err, y, y_new, cfg.rel_tol, cfg.abs_tol)
        if norm > 1.0:
            h *= max(0.2, 0.9 * norm ** -0.2)
            if abs(h) < h_floor:
                raise StepSizeUnderflowError(f"step underflow near x={x}")
            continue
        x_old = x
        x += h
        if sgn * (x1 - x) <= h_floor:
            x = x1  # land exactly on the stop so forced grid points match
        y, f0 = y_new, f_new
        if in_w and y[0] == 0:
            # landed exactly on a node; nudge the previous step so 1/W exists
            x = x_old
            h *= 0.97
            y, f0 = _rewind(f, x, z, s, track, in_w)
            continue
        z = (1.0 / y[0]) if in_w else y[0]
        if track:
            s = y[1]
        rec.add(x, z, s)
        if norm > 0.0:
            h *= min(5.0, max(0.2, 0.9 * norm ** -0.2))
        else:
            h *= 5.0
        if not in_w and abs(z) >= cfg.pole_threshold:
            in_w = True
            y = (1.0 / z,) + ((s,) if track else ())
            f = f_w
            f0 = f(x, y)
        elif in_w and abs(y[0]) >= switch_back:
            in_w = False
            y = (z,) + ((s,) if track else ())
            f = f_z
            f0 = f(x, y)
    return z, s


def _rewind(f, x, z, s, track, in_w):
    y = ((1.0 / z if in_w else z),) + ((s,) if track else ())
    return y, f(x, y)


def integrate_impedance(
    pot: Potential,
    e: float,
    anchor_x: float,
    anchor_z: complex,
    target_x: float,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
    track_integral: bool = False,
    grid: np.ndarray | None = None,
) -> ImpedanceTrajectory:
    """Integrate Z from (anchor_x, anchor_z) to target_x.

    The range is split at every potential jump or kink so each smooth
    piece is integrated separately.  An optional ``grid`` of positions
    forces accepted steps to land on those points (used to produce
    near-uniform samples for wavefunction reconstruction).
    """
    if anchor_x == target_x:
        raise ValueError("anchor and target coincide; nothing to integrate")
    span = abs(target_x - anchor_x)
    max_step = cfg.max_step if cfg.max_step is not None else span / 50.0
    if not max_step > 0.0:
        raise ValueError("max_step must be positive")

    lo, hi = min(anchor_x, target_x), max(anchor_x, target_x)
    stops = set(pot.breakpoints_between(lo, hi))
    if grid is not None:
        stops.update(float(g) for g in np.asarray(grid) if lo < g < hi)
    leftward = target_x < anchor_x
    ordered = sorted(stops, reverse=leftward)

    track = bool(track_integral)
    rec = _Recorder(track)
    rec.add(anchor_x, anchor_z, 0j)

    z, s = anchor_z, 0j
    x_prev = anchor_x
    for x_next in ordered + [target_x]:
        mid = 0.5 * (x_prev + x_next)
        if isinstance(pot, PiecewisePotential):
            u_local = pot.u_at(mid)
            ufunc = lambda _x, _u=u_local: _u
        else:
            ufunc = pot.u_at
        z, s = _integrate_piece(
            ufunc, e, x_prev, x_next, z, s, cfg, params, max_step, track, rec
        )
        x_prev = x_next

    xs = np.array(rec.xs)
    zs = np.array(rec.zs, dtype=complex)
    ss = np.array(rec.ss, dtype=complex) if track else None
    if leftward:
        xs, zs = xs[::-1].copy(), zs[::-1].copy()
        if ss is not None:
            ss = ss[::-1].copy()
    return ImpedanceTrajectory(
        xs=xs,
        zs=zs,
        direction=Side.LEFT if leftward else Side.RIGHT,
        anchor_x=anchor_x,
        anchor_z=anchor_z,
        energy=e,
        potential=pot,
        params=params,
        z_integral=ss,
    )


def _bound_mode(pot: Potential, e: float) -> bool:
    return e < min(pot.left_level, pot.right_level)


def left_anchor(pot: Potential, e: float, params: ModelParams) -> complex:
    """Boundary impedance at a: decaying tail -z1 below the lead,
    incident-matched +z1 in the scattering regime."""
    rc = region_constants(e, pot.left_level, params)
    if e < pot.left_level:
        return -rc.z
    return rc.z


def right_anchor(pot: Potential, e: float, params: ModelParams) -> complex:
    """Boundary impedance at b: decaying tail +z2 below the lead, pure
    transmitted wave +z2 above it (same value, different character)."""
    rc = region_constants(e, pot.right_level, params)
    return rc.z


def z_plus(
    pot: Potential,
    e: float,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
    target_x: float | None = None,
    track_integral: bool = False,
    grid: np.ndarray | None = None,
) -> ImpedanceTrajectory:
    """Left-anchored trajectory Z+ integrated rightward from a.

    Bound regime (e below both leads): anchor Z(a) = -z1, the decaying
    left tail.  Scattering regime: anchor Z(a) = +z1, the incident-
    matched condition for a wave coming from the left (requires a
    propagating left lead).
    """
    if not _bound_mode(pot, e) and e < pot.left_level:
        raise EvanescentIncidenceError(f"energy {e} below left lead")
    z0 = left_anchor(pot, e, params)
    target = pot.b if target_x is None else target_x
    return integrate_impedance(
        pot, e, pot.a, z0, target, cfg, params, track_integral, grid
    )


def z_minus(
    pot: Potential,
    e: float,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
    target_x: float | None = None,
    track_integral: bool = False,
    grid: np.ndarray | None = None,
) -> ImpedanceTrajectory:
    """Right-anchored trajectory Z- integrated leftward from b.

    Anchor Z(b) = +z2 in both regimes: the decaying right tail below the
    lead, the pure transmitted wave above it.
    """
    z0 = right_anchor(pot, e, params)
    target = pot.a if target_x is None else target_x
    return integrate_impedance(
        pot, e, pot.b, z0, target, cfg, params, track_integral, grid
    )

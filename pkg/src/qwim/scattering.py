"""Scattering observables r, t, R, T for stepped and smooth potentials.

Left incidence works from the transmitted side inward: the right lead
carries a pure outgoing wave, so Z(b) = z2 exactly, and the impedance is
propagated back to the entry interface a.  There

    r = (z1 - Z(a)) / (z1 + Z(a))

is the reflected/incident amplitude ratio at a, and the transmitted
amplitude follows from the accumulated phase integral

    psi(x) = psi(a) exp[(i m / hbar) int_a^x Z dx'],   t = psi(b) e^{-i k2 b}

with psi(a) = (1 + r) e^{i k1 a} for a unit incident wave.  Probability
coefficients are R = |r|^2 and T = (z2 / z1) |t|^2 (current ratio), which
sum to one whenever the far lead propagates.  Right incidence is solved
on the mirrored potential.

Piecewise-constant potentials use exact layer chaining; smooth (sampled)
potentials, or any potential when ``cfg.force_numeric`` is set, use the
adaptive Riccati integrator with the running integral tracked.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    layer_transform,
    psi_growth_factor,
    region_constants,
)
from .errors import (
    DegenerateEnergyError,
    EvanescentIncidenceError,
    NonPositiveRealPartError,
    SolverError,
)
from .model import ModelParams, PiecewisePotential, Potential, Side
from .riccati import ImpedanceTrajectory, IntegrationConfig, integrate_impedance


@dataclass(frozen=True)
class ScatteringResult:
    """Amplitudes and probability coefficients at one energy.

    ``r`` is the reflection ratio at the entry interface; ``t`` the
    transmitted plane-wave coefficient, or the evanescent tail amplitude
    at the far interface when ``evanescent_tail`` is set (then T = 0).
    ``z_entry`` is the impedance the structure presents at the entry
    interface, in the frame of the incidence side.
    """

    e: float
    side: Side
    r: complex
    t: complex
    big_r: float
    big_t: float
    z_entry: complex
    evanescent_tail: bool = False


@dataclass(frozen=True)
class EnergyPointError:
    """Per-point failure record used by energy sweeps."""

    e: float
    code: str
    message: str


def _chain_entry_impedance(
    pot: PiecewisePotential, e: float, z_far: complex, params: ModelParams
) -> tuple[complex, list[complex]]:
    """Chain the far-side impedance to the entry; also returns the
    impedance at each segment's right edge (chaining order)."""
    z = z_far
    right_edge = []
    for seg in reversed(pot.segments):
        right_edge.append(z)
        rc = region_constants(e, seg.u, params)
        z = layer_transform(rc, z, seg.length)
    right_edge.reverse()
    return z, right_edge


def _solve_left(
    pot: Potential,
    e: float,
    cfg: IntegrationConfig,
    params: ModelParams,
) -> ScatteringResult:
    u1, u2 = pot.left_level, pot.right_level
    if e < u1:
        raise EvanescentIncidenceError(f"energy {e} below incidence lead {u1}")
    rc1 = region_constants(e, u1, params)  # degenerate e == u1 raises here
    rc2 = region_constants(e, u2, params)
    z1, k1 = rc1.z, rc1.gamma.imag
    z_far = rc2.z  # +z2: transmitted wave above the lead, decaying tail below
    far_propagating = rc2.is_propagating
    a, b = pot.a, pot.b

    analytic = isinstance(pot, PiecewisePotential) and not cfg.force_numeric
    if analytic or a == b:
        z_entry, right_edge = _chain_entry_impedance(pot, e, z_far, params)
        growth = 1.0 + 0j
        for seg, z_r in zip(pot.segments, right_edge):
            rc = region_constants(e, seg.u, params)
            growth *= psi_growth_factor(rc, z_r, seg.length)
    else:
        traj = integrate_impedance(
            pot, e, b, z_far, a, cfg, params, track_integral=True
        )
        z_entry = complex(traj.zs[0])
        # S measured from the anchor at b, so int_a^b Z dx = -S(a)
        s_a = complex(traj.z_integral[0])
        growth = cmath.exp(-1j * (params.mass / params.hbar) * s_a)

    r = (z1 - z_entry) / (z1 + z_entry)
    psi_a = (1.0 + r) * cmath.exp(1j * k1 * a)
    psi_b = psi_a * growth
    big_r = abs(r) ** 2
    if far_propagating:
        k2 = rc2.gamma.imag
        t = psi_b * cmath.exp(-1j * k2 * b)
        big_t = (rc2.z.real / z1.real) * abs(t) ** 2
        evan = False
    else:
        t = psi_b  # tail amplitude at b: psi(x >= b) = t exp(-kappa2 (x - b))
        big_t = 0.0
        evan = True
    return ScatteringResult(
        e=e,
        side=Side.LEFT,
        r=r,
        t=t,
        big_r=big_r,
        big_t=big_t,
        z_entry=z_entry,
        evanescent_tail=evan,
    )


def solve_scattering(
    pot: Potential,
    e: float,
    side: Side = Side.LEFT,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
) -> ScatteringResult:
    """Scattering amplitudes at energy ``e`` for the given incidence side.

    Right incidence is computed on the mirrored potential; reported
    amplitudes live in the mirrored (incidence-side) frame, so R, T and
    the moduli are directly comparable between sides.
    """
    if side is Side.RIGHT:
        res = _solve_left(pot.mirrored(), e, cfg, params)
        return ScatteringResult(
            e=e,
            side=Side.RIGHT,
            r=res.r,
            t=res.t,
            big_r=res.big_r,
            big_t=res.big_t,
            z_entry=res.z_entry,
            evanescent_tail=res.evanescent_tail,
        )
    return _solve_left(pot, e, cfg, params)


def transmission_phase(
    pot: Potential,
    e: float,
    side: Side = Side.LEFT,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
) -> complex:
    """Complex transmission amplitude t (see ``solve_scattering``).

    At a bare step the continuity of psi gives t = 1 + r at the step
    point; across a resonant barrier |t| = 1.
    """
    return solve_scattering(pot, e, side, cfg, params).t


def energy_sweep(
    pot: Potential,
    energies,
    side: Side = Side.LEFT,
    cfg: IntegrationConfig = IntegrationConfig(),
    params: ModelParams = ModelParams(),
) -> list[ScatteringResult | EnergyPointError]:
    """Solve scattering on an ascending energy grid.

    Points are independent; any point that fails with a solver error
    yields an ``EnergyPointError`` record in place so one bad energy
    cannot poison the sweep.  Order is preserved.
    """
    es = [float(v) for v in energies]
    for e0, e1 in zip(es, es[1:]):
        if not e0 < e1:
            raise ValueError("energy grid must be strictly ascending")
    out: list[ScatteringResult | EnergyPointError] = []
    for e in es:
        try:
            out.append(solve_scattering(pot, e, side, cfg, params))
        except SolverError as exc:
            out.append(EnergyPointError(e=e, code=exc.code, message=str(exc)))
    return out


def constant_current_diagnostic(
    traj: ImpedanceTrajectory, z_lead: float
) -> float:
    """Max deviation of ln(Re Z / z_lead) + (2m/hbar) Im S from constant.

    Along any genuine scattering solution the probability current
    j = |psi|^2 Re Z is position-independent, which in impedance terms
    reads ln(Re Z / z0) = (2m/hbar) int Im Z dx + const.  Returns the
    maximum absolute deviation from the best constant.  Requires a
    trajectory with the running integral tracked; raises
    NonPositiveRealPartError in the no-current (full-reflection or
    bound) regime where Re Z <= 0 somewhere.
    """
    if traj.z_integral is None:
        raise ValueError("trajectory lacks the running integral; "
                         "integrate with track_integral=True")
    re_z = traj.zs.real
    if np.any(re_z <= 0.0):
        raise NonPositiveRealPartError("Re Z <= 0 on the trajectory; "
                                       "no net current to conserve")
    m_over_h = traj.params.mass / traj.params.hbar
    g = np.log(re_z / z_lead) - 2.0 * m_over_h * traj.z_integral.imag
    return float(np.max(np.abs(g - np.mean(g))))


def current_profile(traj: ImpedanceTrajectory, psi_anchor: complex) -> np.ndarray:
    """Probability current j(x) = |psi|^2 Re Z along a tracked trajectory.

    ``psi_anchor`` is the wavefunction value at the trajectory anchor.
    """
    if traj.z_integral is None:
        raise ValueError("trajectory lacks the running integral")
    m_over_h = traj.params.mass / traj.params.hbar
    amp2 = abs(psi_anchor) ** 2 * np.exp(-2.0 * m_over_h * traj.z_integral.imag)
    return amp2 * traj.zs.real

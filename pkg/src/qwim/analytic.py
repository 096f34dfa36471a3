"""Closed-form impedance algebra for constant-potential regions.

The quantum wave impedance of a solution psi is

    Z(x) = (hbar / i m) psi'(x) / psi(x)

and satisfies the Riccati equation

    dZ/dx + i (m/hbar) Z^2 = i (2/hbar) (E - U(x)).

Where U is constant the general solution is Z(x) = z * tanh(gamma x + phi)
with the characteristic impedance z = sqrt(2 (E - U) / m) and propagation
constant gamma = i (m/hbar) z.  Branch convention: for E > U the root is
real positive (gamma = i k purely imaginary); for E < U we take
z = +i sqrt(2 (U - E) / m), which makes gamma real negative (gamma = -kappa).
With that branch the decaying-tail boundary values are Z(a) = -z1 on the
left and Z(b) = +z2 on the right, and Z = +z / -z are the attractors of
leftward / rightward integration through an evanescent region.

Everything here is exact scalar complex arithmetic; the adaptive Riccati
integrator in :mod:`qwim.riccati` is validated against these formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import (
    DegenerateEnergyError,
    EvanescentIncidenceError,
    PoleAtXError,
    TransformPoleError,
)
from .model import ModelParams

# E is degenerate with U when |E - U| <= EPS_DEGENERATE * max(|E|, |U|).
EPS_DEGENERATE = 1e-12
# Pole guards for tanh evaluation and layer-transform denominators.
EPS_POLE = 1e-10
# Algebraic identities (composition, closed-form agreement) hold to this.
TOL_ALG = 1e-10
# Flux bookkeeping (R + T = 1 and friends) holds to this.
TOL_FLUX = 1e-10

# |Re(gamma * length)| above which cosh/sinh forms are traded for tanh
# forms; keeps thick evanescent slabs overflow-free.
_SATURATION_CUT = 300.0


@dataclass(frozen=True)
class RegionConstants:
    """Characteristic impedance and propagation constant of one region.

    ``z`` has velocity-like units sqrt(energy/mass); ``gamma`` is exactly
    i (m/hbar) z.  Propagating regions (e > u): z real positive,
    gamma = i k.  Evanescent regions (e < u): z = +i sqrt(2(u-e)/m),
    gamma = -kappa real negative.
    """

    z: complex
    gamma: complex
    e: float
    u: float
    params: ModelParams

    @property
    def is_propagating(self) -> bool:
        return self.e > self.u

    @property
    def k(self) -> float:
        """Wavenumber sqrt(2m(e-u))/hbar of a propagating region."""
        return self.gamma.imag

    @property
    def kappa(self) -> float:
        """Decay constant sqrt(2m(u-e))/hbar of an evanescent region."""
        return -self.gamma.real


@dataclass(frozen=True)
class PhaseConstant:
    """Integration constant phi of Z = z tanh(gamma x + phi).

    ``sign`` 0 marks a finite value; +1 / -1 mark phi = +inf / -inf, the
    saturated pure-traveling-wave solutions Z = +z (pure transmission
    toward +x) and Z = -z.
    """

    value: complex = 0j
    sign: int = 0

    @classmethod
    def finite(cls, value: complex) -> "PhaseConstant":
        return cls(complex(value), 0)

    @classmethod
    def plus_inf(cls) -> "PhaseConstant":
        return cls(0j, +1)

    @classmethod
    def minus_inf(cls) -> "PhaseConstant":
        return cls(0j, -1)

    @property
    def is_infinite(self) -> bool:
        return self.sign != 0


def region_constants(e: float, u: float, params: ModelParams = ModelParams()) -> RegionConstants:
    """Characteristic constants of a constant region at energy ``e``.

    Raises DegenerateEnergyError when e and u coincide to relative
    EPS_DEGENERATE: both z and gamma vanish there and the tanh family
    degenerates.
    """
    de = e - u
    if abs(de) <= EPS_DEGENERATE * max(abs(e), abs(u)):
        raise DegenerateEnergyError(f"energy {e} degenerate with level {u}")
    m = params.mass
    if de > 0.0:
        z = complex(math.sqrt(2.0 * de / m), 0.0)
    else:
        z = complex(0.0, math.sqrt(-2.0 * de / m))
    gamma = 1j * (m / params.hbar) * z
    return RegionConstants(z=z, gamma=gamma, e=e, u=u, params=params)


def _pole_distance(theta: complex) -> float:
    """Distance from theta to the nearest pole of tanh (i pi/2 + i pi n)."""
    im = (theta.imag - 0.5 * math.pi) % math.pi
    return math.hypot(theta.real, min(im, math.pi - im))


def impedance_at(rc: RegionConstants, phi: PhaseConstant, x: float) -> complex:
    """Evaluate Z(x) = z tanh(gamma x + phi) for one constant region.

    The infinite-phi markers return the saturated values +z / -z exactly.
    """
    if phi.is_infinite:
        return rc.z if phi.sign > 0 else -rc.z
    theta = rc.gamma * x + phi.value
    if _pole_distance(theta) < EPS_POLE * max(1.0, abs(theta)):
        raise PoleAtXError(f"impedance pole at x={x} (theta={theta})")
    return rc.z * cmath.tanh(theta)


def phase_from_impedance(rc: RegionConstants, x: float, z_val: complex) -> PhaseConstant:
    """Invert Z(x) = z tanh(gamma x + phi) for phi.

    The matched values z_val == +z / -z map to the +inf / -inf markers.
    The imaginary part of a finite phi is reduced to the principal strip
    (-pi/2, pi/2] (tanh is i-pi periodic).
    """
    if z_val == rc.z:
        return PhaseConstant.plus_inf()
    if z_val == -rc.z:
        return PhaseConstant.minus_inf()
    phi = cmath.atanh(z_val / rc.z) - rc.gamma * x
    shift = math.ceil((phi.imag - 0.5 * math.pi) / math.pi)
    if shift:
        phi = complex(phi.real, phi.imag - shift * math.pi)
    return PhaseConstant.finite(phi)


def propagate_impedance(rc: RegionConstants, z_at: complex, dx: float) -> complex:
    """Z(x + dx) given Z(x) inside one constant region (dx of either sign).

    Uses the tanh addition law; switches to the saturated form for thick
    evanescent slabs so cosh/sinh never overflow.
    """
    g = rc.gamma * dx
    if abs(g.real) > _SATURATION_CUT:
        th = 1.0 if g.real > 0 else -1.0
        t1, t2 = rc.z, z_at * th
        num = rc.z * (z_at + rc.z * th)
    else:
        ch = cmath.cosh(g)
        sh = cmath.sinh(g)
        t1, t2 = rc.z * ch, z_at * sh
        num = rc.z * (z_at * ch + rc.z * sh)
    den = t1 + t2
    if abs(den) < EPS_POLE * max(abs(t1), abs(t2), 1e-300):
        raise TransformPoleError(
            f"impedance pole while propagating across dx={dx}"
        )
    return num / den


def layer_transform(rc: RegionConstants, z_far: complex, length: float) -> complex:
    """Impedance at the near side of a slab given the far-side value.

    For a constant slab of the given length terminated by ``z_far`` at its
    far (larger-x) end:

        Z_near = z (z_far cosh(g l) - z sinh(g l)) / (z cosh(g l) - z_far sinh(g l))

    The matched load z_far = z is a fixed point (no reflected component to
    unwind), and chaining transforms composes: two slabs of lengths l1, l2
    equal one slab of length l1 + l2.
    """
    if not length > 0.0:
        raise ValueError("layer_transform needs a strictly positive length")
    return propagate_impedance(rc, z_far, -length)


def psi_growth_factor(rc: RegionConstants, z_exit: complex, length: float) -> complex:
    """psi(exit) / psi(entry) across one constant slab.

    Computed from the exit-side impedance, which keeps the expression
    cancellation-free even through thick evanescent slabs:

        psi_exit / psi_entry = z / (z cosh(g l) - Z_exit sinh(g l))

    (the same denominator as the layer transform, so a finite entry
    impedance guarantees a well-conditioned factor).
    """
    g = rc.gamma * length
    if abs(g.real) > _SATURATION_CUT:
        # cosh/sinh would overflow; use their shared dominant exponential
        sgn = 1.0 if g.real > 0 else -1.0
        den = rc.z - sgn * z_exit
        if abs(den) < EPS_POLE * max(abs(rc.z), abs(z_exit), 1e-300):
            raise TransformPoleError("node at slab entry; psi ratio undefined")
        return 2.0 * rc.z * cmath.exp(-sgn * g) / den
    ch = cmath.cosh(g)
    sh = cmath.sinh(g)
    t1, t2 = rc.z * ch, z_exit * sh
    den = t1 - t2
    if abs(den) < EPS_POLE * max(abs(t1), abs(t2), 1e-300):
        raise TransformPoleError("node at slab entry; psi ratio undefined")
    return rc.z / den


def _psi_growth_entry(rc: RegionConstants, z_entry: complex, length: float) -> complex:
    """psi(exit) / psi(entry) across one constant slab, from the entry side.

        psi_exit / psi_entry = cosh(g l) + (Z_entry / z) sinh(g l)

    Algebraically the same ratio as psi_growth_factor, but conditioned
    the opposite way: it stays accurate when the slab starts at or near
    a psi-node (|Z_entry| large), where the exit-side denominator would
    cancel catastrophically.  Chaining both forms so that each factor
    references the larger-|Z| endpoint makes a near-node sample appear
    only as 1/Z, which cancels exactly between adjacent slabs.
    """
    g = rc.gamma * length
    if abs(g.real) > _SATURATION_CUT:
        sgn = 1.0 if g.real > 0 else -1.0
        grow = 1.0 + sgn * z_entry / rc.z
        if abs(grow) < 1e-280:
            return 0.5 * (1.0 - sgn * z_entry / rc.z) * cmath.exp(-sgn * g)
        return 0.5 * cmath.exp(sgn * g + cmath.log(grow))
    return cmath.cosh(g) + (z_entry / rc.z) * cmath.sinh(g)


def step_reflection(
    e: float,
    u1: float,
    u2: float,
    x0: float = 0.0,
    params: ModelParams = ModelParams(),
) -> complex:
    """Reflection amplitude of a sharp step U1 -> U2 at x0, left incidence.

        r = exp(2 i k1 x0) (1 - z2/z1) / (1 + z2/z1)

    Requires a propagating left lead (e > u1).  For u1 < e < u2 the
    amplitude is unimodular (total reflection off the evanescent side);
    matched leads z1 = z2 give r = 0.
    """
    if e < u1:
        raise EvanescentIncidenceError(f"energy {e} below incidence lead {u1}")
    rc1 = region_constants(e, u1, params)
    rc2 = region_constants(e, u2, params)
    k1 = rc1.gamma.imag
    ratio = rc2.z / rc1.z
    return cmath.exp(2j * k1 * x0) * (1.0 - ratio) / (1.0 + ratio)


@dataclass(frozen=True)
class BarrierAmplitudes:
    """Closed-form scattering amplitudes of one rectangular barrier."""

    r: complex
    t: complex
    big_r: float
    big_t: float


def barrier_closed_forms(
    e: float,
    u_b: float,
    length: float,
    params: ModelParams = ModelParams(),
) -> BarrierAmplitudes:
    """Rectangular barrier of height u_b on [0, length], zero leads.

    Amplitudes come from the impedance algebra,

        r = (z0 - Z(0)) / (z0 + Z(0)),
        t = 2 z0 zb exp(-g0 l) / (2 z0 zb cosh(gb l) - (z0^2 + zb^2) sinh(gb l)),

    and the probability coefficients from the textbook branch forms

        E < U_b:  T = 1 / (1 + (k0/kb' + kb'/k0)^2 sinh^2(kb' l) / 4)
        E > U_b:  T = 1 / (1 + (k0/kb - kb/k0)^2 sin^2(kb l) / 4)

    with kb' = sqrt(2m(U_b - E))/hbar, kb = sqrt(2m(E - U_b))/hbar.  The
    two routes are algebraically identical, so |r|^2 = R, |t|^2 = T and
    R + T = 1 hold to rounding; full transmission T = 1 occurs exactly at
    kb l = n pi.
    """
    if not length > 0.0:
        raise ValueError("barrier length must be positive")
    rc0 = region_constants(e, 0.0, params)
    if not rc0.is_propagating:
        raise EvanescentIncidenceError(f"energy {e} below the zero leads")
    rcb = region_constants(e, u_b, params)
    z0, zb = rc0.z, rcb.z
    k0 = rc0.gamma.imag

    z_entry = layer_transform(rcb, z0, length)
    r = (z0 - z_entry) / (z0 + z_entry)

    gl = rcb.gamma * length
    t = (
        2.0 * z0 * zb * cmath.exp(-rc0.gamma * length)
        / (2.0 * z0 * zb * cmath.cosh(gl) - (z0 * z0 + zb * zb) * cmath.sinh(gl))
    )

    if e < u_b:
        kb = rcb.kappa
        s2 = math.sinh(kb * length) ** 2
        ratio2 = kb * kb / (k0 * k0)
        big_r = (1.0 + ratio2) ** 2 * s2 / (4.0 * ratio2 + (1.0 + ratio2) ** 2 * s2)
        big_t = 1.0 / (1.0 + 0.25 * (k0 / kb + kb / k0) ** 2 * s2)
    else:
        kb = rcb.k
        s2 = math.sin(kb * length) ** 2
        ratio2 = kb * kb / (k0 * k0)
        big_r = (1.0 - ratio2) ** 2 * s2 / (4.0 * ratio2 + (1.0 - ratio2) ** 2 * s2)
        big_t = 1.0 / (1.0 + 0.25 * (k0 / kb - kb / k0) ** 2 * s2)
    return BarrierAmplitudes(r=r, t=t, big_r=big_r, big_t=big_t)

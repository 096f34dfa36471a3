"""Independent cross-checks for the impedance solvers.

Scattering is re-derived from 2x2 plane-wave transfer matrices and
square-well spectra from the textbook transcendental equations, neither
sharing numeric kernels with the impedance path.  Wavefunctions are
rebuilt from sampled Z and verified against the Schrodinger equation
itself by finite differences.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateEnergyError,
    EvanescentIncidenceError,
    InsufficientSamplesError,
    QuadratureDivergenceError,
)
from .model import ModelParams, PiecewisePotential, Potential, Side
from .riccati import ImpedanceTrajectory

# |Z| above which quadrature of Z is abandoned for the exact slab bridge
# (the sample sits next to a wavefunction node).
_BRIDGE_CUT = 100.0


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 map between plane-wave amplitude pairs (A, B).

    Amplitudes are referenced to each region's own left interface
    (psi = A e^{ik(x - x_ref)} + B e^{-ik(x - x_ref)}), which keeps the
    entries bounded by the net evanescent growth of the stack.
    """

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass(frozen=True)
class TransferResult:
    """Transfer-matrix scattering amplitudes, engine conventions."""

    e: float
    side: Side
    r: complex
    t: complex
    big_r: float
    big_t: float
    evanescent_tail: bool = False


def _wavevector(e: float, u: float, params: ModelParams) -> complex:
    de = e - u
    if abs(de) <= 1e-12 * max(abs(e), abs(u)):
        raise DegenerateEnergyError(f"energy {e} degenerate with level {u}")
    if de > 0:
        return complex(math.sqrt(2.0 * params.mass * de) / params.hbar, 0.0)
    return complex(0.0, math.sqrt(-2.0 * params.mass * de) / params.hbar)


def _junction(k_from: complex, k_to: complex) -> TransferMatrix:
    rho = k_from / k_to
    return TransferMatrix(
        0.5 * (1.0 + rho), 0.5 * (1.0 - rho),
        0.5 * (1.0 - rho), 0.5 * (1.0 + rho),
    )


def _propagation(k: complex, length: float) -> TransferMatrix:
    ph = cmath.exp(1j * k * length)
    return TransferMatrix(ph, 0j, 0j, 1.0 / ph)


def transfer_matrix(
    pot: PiecewisePotential, e: float, params: ModelParams = ModelParams()
) -> TransferMatrix:
    """Full stack matrix mapping left-lead amplitudes (referenced at a)
    to right-lead amplitudes (referenced at b)."""
    if not isinstance(pot, PiecewisePotential):
        raise ValueError("the transfer matrix needs piecewise-constant segments")
    ks = [_wavevector(e, pot.left_level, params)]
    ks += [_wavevector(e, s.u, params) for s in pot.segments]
    ks.append(_wavevector(e, pot.right_level, params))
    m = _junction(ks[0], ks[1])
    for i, seg in enumerate(pot.segments):
        m = _junction(ks[i + 1], ks[i + 2]) @ (_propagation(ks[i + 1], seg.length) @ m)
    return m


def transfer_matrix_solve(
    pot: PiecewisePotential,
    e: float,
    side: Side = Side.LEFT,
    params: ModelParams = ModelParams(),
) -> TransferResult:
    """Scattering amplitudes from the plane-wave transfer matrix.

    Uses the analytically telescoped determinant det M = k1/k2 for the
    transmitted amplitude, which stays cancellation-free through thick
    evanescent stacks.  Right incidence is solved on the mirror image.
    """
    if side is Side.RIGHT:
        res = transfer_matrix_solve(pot.mirrored(), e, Side.LEFT, params)
        return TransferResult(
            e=e, side=Side.RIGHT, r=res.r, t=res.t,
            big_r=res.big_r, big_t=res.big_t,
            evanescent_tail=res.evanescent_tail,
        )
    k1 = _wavevector(e, pot.left_level, params)
    if k1.imag != 0.0:
        raise EvanescentIncidenceError(f"energy {e} below incidence lead")
    k2 = _wavevector(e, pot.right_level, params)
    m = transfer_matrix(pot, e, params)

    a0 = cmath.exp(1j * k1 * pot.a)  # unit incident plane wave e^{i k1 x}
    b0 = -(m.m21 / m.m22) * a0
    a_end = (k1 / k2) / m.m22 * a0  # det(M)/M22, det telescoped exactly
    r_local = b0 / a0
    big_r = abs(r_local) ** 2
    if k2.imag == 0.0:
        t = a_end * cmath.exp(-1j * k2 * pot.b)
        big_t = (k2.real / k1.real) * abs(t) ** 2
        evan = False
    else:
        t = a_end  # psi(b): evanescent tail amplitude
        big_t = 0.0
        evan = True
    return TransferResult(
        e=e, side=Side.LEFT, r=r_local, t=t,
        big_r=big_r, big_t=big_t, evanescent_tail=evan,
    )


def square_well_eigenvalues(
    depth: float, width: float, params: ModelParams = ModelParams()
) -> list[float]:
    """Bound energies of a square well (depth > 0 below zero leads).

    Solves the even/odd transcendental conditions

        k tan(k w/2) = kappa,    -k cot(k w/2) = kappa,

    with k = sqrt(2m(E + depth))/hbar and kappa = sqrt(-2mE)/hbar, by
    bisection on the monotone branches of theta = k w/2.  Energies are
    measured from the lead level, so each lies in (-depth, 0).
    """
    if depth <= 0 or width <= 0:
        raise ValueError("depth and width must be positive")
    hbar, m = params.hbar, params.mass
    theta0 = 0.5 * width * math.sqrt(2.0 * m * depth) / hbar

    def radial(theta):
        return math.sqrt(max(theta0 * theta0 - theta * theta, 0.0))

    roots: list[float] = []
    eps = 1e-12 * max(1.0, theta0)

    def scan(branch_lo, f):
        n = 0
        while True:
            lo = branch_lo + n * math.pi
            if lo >= theta0 - eps:
                break
            hi = min(lo + 0.5 * math.pi, theta0)
            blo, bhi = lo + eps, hi - eps
            if blo < bhi and f(blo) * f(bhi) < 0:
                roots.append(brentq(f, blo, bhi, xtol=1e-15, rtol=8.9e-16))
            n += 1

    scan(0.0, lambda th: th * math.tan(th) - radial(th))
    scan(0.5 * math.pi, lambda th: -th / math.tan(th) - radial(th))

    roots.sort()
    return [
        (hbar * 2.0 * th / width) ** 2 / (2.0 * m) - depth for th in roots
    ]


def square_well_state_count(depth: float, width: float,
                            params: ModelParams = ModelParams()) -> int:
    """Number of bound states, counted from the transcendental branches."""
    theta0 = 0.5 * width * math.sqrt(2.0 * params.mass * depth) / params.hbar
    return int(math.floor(2.0 * theta0 / math.pi)) + 1


def square_well_eigenfunction(
    e: float, depth: float, width: float, xs, params: ModelParams = ModelParams()
) -> np.ndarray:
    """Analytic eigenfunction of the square well on [0, width] at energy e.

    Even/odd character is inferred from the interior phase; normalized to
    unit maximum.  Used only as a comparison oracle.
    """
    hbar, m = params.hbar, params.mass
    k = math.sqrt(2.0 * m * (e + depth)) / hbar
    kap = math.sqrt(-2.0 * m * e) / hbar
    c = 0.5 * width
    even = abs(math.cos(k * c) * kap - k * math.sin(k * c)) < abs(
        math.sin(k * c) * kap + k * math.cos(k * c)
    )
    xs = np.asarray(xs, dtype=float)
    xi = xs - c  # center the well
    inside = np.abs(xi) <= c
    psi = np.empty_like(xi)
    if even:
        psi[inside] = np.cos(k * xi[inside])
        tail_sign = np.ones(np.count_nonzero(~inside))
        edge = math.cos(k * c)
    else:
        psi[inside] = np.sin(k * xi[inside])
        tail_sign = np.sign(xi[~inside])
        edge = math.sin(k * c)
    psi[~inside] = tail_sign * edge * np.exp(-kap * (np.abs(xi[~inside]) - c))
    return psi / np.max(np.abs(psi))


class Normalization(Enum):
    UNIT_INCIDENT = "unit-incident"
    UNIT_NORM = "unit-norm"


@dataclass(frozen=True)
class WavefunctionProfile:
    xs: np.ndarray
    psi: np.ndarray
    normalization: Normalization


def _cumulative_nonuniform_simpson(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Cumulative integral through (xs, ys) by local parabola fits.

    Each interval's increment integrates the quadratic through the three
    nearest samples; reduces to composite Simpson on uniform grids.  All
    coordinates are shifted to the window center before evaluating the
    antiderivative, otherwise the O(1)-sized cubic terms cancel against
    each other and the roundoff random-walks along the cumulative sum.
    """
    n = len(xs)
    out = np.zeros(n, dtype=complex)
    if n == 2:
        out[1] = 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])
        return out
    i = np.arange(n - 1)
    j0 = np.where(i == 0, 0, np.where(i == n - 2, n - 3, np.where(i % 2, i - 1, i)))
    c = xs[j0 + 1]
    xa = xs[j0] - c
    xc = xs[j0 + 2] - c
    lo = xs[:-1] - c
    hi = xs[1:] - c

    def prim(t, p, q):
        # antiderivative of (t - p)(t - q)
        return t ** 3 / 3.0 - (p + q) * t ** 2 / 2.0 + p * q * t

    wa = (prim(hi, 0.0, xc) - prim(lo, 0.0, xc)) / (xa * (xa - xc))
    wb = (prim(hi, xa, xc) - prim(lo, xa, xc)) / (-xa * -xc)
    wc = (prim(hi, xa, 0.0) - prim(lo, xa, 0.0)) / ((xc - xa) * xc)
    inc = ys[j0] * wa + ys[j0 + 1] * wb + ys[j0 + 2] * wc
    out[1:] = np.cumsum(inc)
    return out


def reconstruct_wavefunction(
    traj: ImpedanceTrajectory,
    psi_start: complex = 1.0 + 0j,
    normalization: Normalization = Normalization.UNIT_INCIDENT,
) -> WavefunctionProfile:
    """Rebuild psi on the trajectory grid from sampled Z.

        psi(x) = psi_start * exp[(i m / hbar) int Z dx']

    Three sources, best available first.  A trajectory carrying the
    running integral of Z uses it directly (the ODE solver already
    accumulated it at its own tolerance).  Otherwise a piecewise
    potential evolves psi interval by interval with the exact
    constant-slab growth factor, which also carries the sign flip
    through psi-nodes; sampled potentials fall back to cumulative
    quadrature of Z on pole-free stretches with slab bridges across
    the nodes (treating U as constant per bridged interval).
    """
    xs, zs = traj.xs, traj.zs
    if len(xs) < 5:
        raise InsufficientSamplesError("need at least 5 trajectory samples")
    pot, params, e = traj.potential, traj.params, traj.energy
    pref = 1j * params.mass / params.hbar

    from .analytic import _psi_growth_entry, psi_growth_factor, region_constants

    def slab_factor(rc, z_in, z_out, dx):
        # reference whichever endpoint has the larger |Z|, so a slab
        # adjacent to a psi-node never divides by the vanishing psi there
        if abs(z_in) > abs(z_out):
            return _psi_growth_entry(rc, z_in, dx)
        return psi_growth_factor(rc, z_out, dx)

    if traj.z_integral is not None:
        s_rel = traj.z_integral - traj.z_integral[0]
        psi = psi_start * np.exp(pref * s_rel)
    elif isinstance(pot, PiecewisePotential):
        psi = np.empty(len(xs), dtype=complex)
        psi[0] = psi_start
        for i in range(len(xs) - 1):
            mid = 0.5 * (xs[i] + xs[i + 1])
            rc = region_constants(e, pot.u_at(mid), params)
            psi[i + 1] = psi[i] * slab_factor(
                rc, complex(zs[i]), complex(zs[i + 1]), float(xs[i + 1] - xs[i])
            )
    else:
        near_pole = np.abs(zs) > _BRIDGE_CUT
        psi = np.empty(len(xs), dtype=complex)
        psi[0] = psi_start
        i = 0
        while i < len(xs) - 1:
            if not (near_pole[i] or near_pole[i + 1]):
                j = i
                while j + 1 < len(xs) and not (near_pole[j] or near_pole[j + 1]):
                    j += 1
                cum = _cumulative_nonuniform_simpson(xs[i: j + 1], zs[i: j + 1])
                psi[i: j + 1] = psi[i] * np.exp(pref * cum)
                i = j
            else:
                mid = 0.5 * (xs[i] + xs[i + 1])
                rc = region_constants(e, pot.u_at(mid), params)
                psi[i + 1] = psi[i] * slab_factor(
                    rc, complex(zs[i]), complex(zs[i + 1]), float(xs[i + 1] - xs[i])
                )
                i += 1
    if not np.all(np.isfinite(psi.real) & np.isfinite(psi.imag)):
        raise QuadratureDivergenceError("reconstructed psi is not finite")

    if normalization is Normalization.UNIT_NORM:
        norm2 = np.trapezoid(np.abs(psi) ** 2, xs)
        psi = psi / math.sqrt(float(norm2.real))
    return WavefunctionProfile(xs=xs.copy(), psi=psi, normalization=normalization)


def schrodinger_residual(
    profile: WavefunctionProfile,
    pot: Potential,
    e: float,
    params: ModelParams = ModelParams(),
) -> float:
    """Max |H psi - E psi| / max |psi| over interior samples.

    On a uniform grid the second derivative uses the five-point stencil,
    whose h^4 truncation allows coarse grids well above the roundoff
    floor; otherwise the three-point stencil (exact for parabolas on
    nonuniform spacing).  Samples with a potential join inside the
    stencil footprint are excluded: the true psi'' jumps there and
    finite differences would report a spurious residual.
    """
    xs, psi = profile.xs, profile.psi
    n = len(xs)
    if n < 5:
        raise InsufficientSamplesError("need at least 5 samples for the stencil")
    dx = np.diff(xs)
    h_bar = float(np.mean(dx))
    uniform = n >= 7 and float(np.max(np.abs(dx - h_bar))) < 1e-9 * h_bar

    if uniform:
        inner = psi[2:-2]
        d2 = (
            -psi[:-4] + 16.0 * psi[1:-3] - 30.0 * inner
            + 16.0 * psi[3:-1] - psi[4:]
        ) / (12.0 * h_bar * h_bar)
        x_in = xs[2:-2]
        clearance = 3.0 * h_bar
    else:
        h1 = dx[:-1]
        h2 = dx[1:]
        inner = psi[1:-1]
        d2 = 2.0 * (
            psi[:-2] / (h1 * (h1 + h2))
            - inner / (h1 * h2)
            + psi[2:] / (h2 * (h1 + h2))
        )
        x_in = xs[1:-1]
        clearance = 2.0 * np.maximum(h1, h2)
    u = np.array([pot.u_at(float(x)) for x in x_in])
    res = np.abs(
        -(params.hbar ** 2) / (2.0 * params.mass) * d2 + (u - e) * inner
    )

    keep = np.ones(len(x_in), dtype=bool)
    for join in pot.interfaces():
        keep &= np.abs(x_in - join) > clearance
    if not np.any(keep):
        raise InsufficientSamplesError("no interior samples away from joins")
    return float(np.max(res[keep]) / np.max(np.abs(psi)))

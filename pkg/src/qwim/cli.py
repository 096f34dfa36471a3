"""Command-line interface.

Verbs: scatter, sweep, bound, resonances, profile, validate.  All read
the potential from a JSON specification file (see docs/spec_format.md)
and write tab-separated tables with a header row to standard output at
full round-trip precision.  Errors go to standard error as single-line
records ``error<TAB>code<TAB>message``; the exit status is 0 on success,
2 for input problems and 3 for solver failures.
"""

from __future__ import annotations

import argparse
import cmath
import math
import sys
from dataclasses import replace

import numpy as np

from .errors import PotentialInputError, SolverError
from .model import ModelParams, PiecewisePotential, Side
from .riccati import IntegrationConfig, integrate_impedance, right_anchor
from .scattering import (
    EnergyPointError,
    ScatteringResult,
    energy_sweep,
    solve_scattering,
)
from .specfile import ProblemSpec, load_spec
from .spectral import find_bound_states, find_resonances
from .xcheck import (
    Normalization,
    WavefunctionProfile,
    reconstruct_wavefunction,
    schrodinger_residual,
    transfer_matrix_solve,
)

# validate: agreement bounds between the two solver paths
VALIDATE_DELTA_TOL = 1e-8
VALIDATE_RESIDUAL_TOL = 1e-6


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _print_table(header: list[str], rows) -> None:
    out = sys.stdout
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(row) + "\n")


def _emit_error(code: str, message: str) -> None:
    flat = " ".join(str(message).split())
    sys.stderr.write(f"error\t{code}\t{flat}\n")


def _emit_note(kind: str, message: str) -> None:
    sys.stderr.write(f"note\t{kind}\t{message}\n")


def _side(args) -> Side:
    return Side.RIGHT if getattr(args, "side", "left") == "right" else Side.LEFT


def _config(args, spec: ProblemSpec) -> IntegrationConfig:
    """Start from the spec file's defaults block, apply flag overrides."""
    overrides = {}
    if args.rel_tol is not None:
        overrides["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        overrides["abs_tol"] = args.abs_tol
    if args.force_numeric:
        overrides["force_numeric"] = True
    return replace(spec.defaults, **overrides) if overrides else spec.defaults


_SCATTER_HEADER = ["E", "re_r", "im_r", "re_t", "im_t", "R", "T"]


def _scatter_row(res: ScatteringResult) -> list[str]:
    return [
        _fmt(res.e),
        _fmt(res.r.real),
        _fmt(res.r.imag),
        _fmt(res.t.real),
        _fmt(res.t.imag),
        _fmt(res.big_r),
        _fmt(res.big_t),
    ]


def cmd_scatter(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    res = solve_scattering(spec.potential, args.energy, _side(args), cfg, spec.params)
    if res.evanescent_tail:
        _emit_note("evanescent-tail",
                   "far lead is evanescent at this energy; t is the tail amplitude")
    _print_table(_SCATTER_HEADER, [_scatter_row(res)])
    return 0


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    if args.points < 2:
        raise ValueError("--points must be at least 2")
    if not args.emin < args.emax:
        raise ValueError("--emin must be below --emax")
    energies = np.linspace(args.emin, args.emax, args.points)
    records = energy_sweep(spec.potential, energies, _side(args), cfg, spec.params)
    rows = []
    for rec in records:
        if isinstance(rec, EnergyPointError):
            rows.append([_fmt(rec.e)] + ["nan"] * 6 + [rec.code])
        else:
            rows.append(_scatter_row(rec) + ["-"])
    _print_table(_SCATTER_HEADER + ["error"], rows)
    return 0


def cmd_bound(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    result = find_bound_states(
        spec.potential, cfg, spec.params, probe_x=args.probe_x
    )
    rows = [
        [str(i + 1), _fmt(e), _fmt(res)]
        for i, (e, res) in enumerate(zip(result.energies, result.residuals))
    ]
    _print_table(["index", "E", "residual"], rows)
    return 0


def cmd_resonances(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    if not args.emin < args.emax:
        raise ValueError("--emin must be below --emax")
    result = find_resonances(
        spec.potential,
        args.emin,
        args.emax,
        _side(args),
        cfg,
        spec.params,
        probe_x=args.probe_x,
    )
    if result.transparent:
        _emit_note("transparent", "no reflection anywhere in the window; "
                   "the whole band transmits fully")
    rows = [
        [str(i + 1), _fmt(e), _fmt(res)]
        for i, (e, res) in enumerate(zip(result.energies, result.residuals))
    ]
    _print_table(["index", "E", "residual"], rows)
    return 0


def _profile_trajectory(pot, e, cfg, params, points, track):
    grid = np.linspace(pot.a, pot.b, points)
    z_far = right_anchor(pot, e, params)
    traj = integrate_impedance(
        pot, e, pot.b, z_far, pot.a, cfg, params,
        track_integral=track, grid=grid,
    )
    idx = np.searchsorted(traj.xs, grid)
    idx = np.clip(idx, 0, len(traj.xs) - 1)
    return traj, grid, idx


def cmd_profile(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    if args.points < 5:
        raise ValueError("--points must be at least 5")
    side = _side(args)
    work = spec.potential.mirrored() if side is Side.RIGHT else spec.potential
    mirror = side is Side.RIGHT

    if args.mode == "impedance":
        traj, grid, idx = _profile_trajectory(
            work, args.energy, cfg, spec.params, args.points, track=False
        )
        xs = traj.xs[idx]
        zs = traj.zs[idx]
        if mirror:
            xs, zs = -xs[::-1], -zs[::-1]
        rows = [
            [_fmt(x), _fmt(z.real), _fmt(z.imag)] for x, z in zip(xs, zs)
        ]
        _print_table(["x", "re_Z", "im_Z"], rows)
        return 0

    # wavefunction mode: scattering solution, unit incident amplitude
    res = solve_scattering(work, args.energy, Side.LEFT, cfg, spec.params)
    traj, grid, idx = _profile_trajectory(
        work, args.energy, cfg, spec.params, args.points, track=False
    )
    k1 = math.sqrt(2.0 * spec.params.mass * (args.energy - work.left_level)) / spec.params.hbar
    psi_a = (1.0 + res.r) * cmath.exp(1j * k1 * work.a)
    profile = reconstruct_wavefunction(traj, psi_a, Normalization.UNIT_INCIDENT)
    xs = profile.xs[idx]
    psi = profile.psi[idx]
    if mirror:
        xs, psi = -xs[::-1], psi[::-1]
    rows = [
        [_fmt(x), _fmt(p.real), _fmt(p.imag), _fmt(abs(p) ** 2)]
        for x, p in zip(xs, psi)
    ]
    _print_table(["x", "re_psi", "im_psi", "abs2_psi"], rows)
    return 0


def cmd_validate(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec)
    pot, params = spec.potential, spec.params
    e = args.energy
    if not isinstance(pot, PiecewisePotential):
        raise ValueError(
            "validate needs a piecewise potential; the transfer-matrix "
            "comparison is defined for constant segments only"
        )

    imp = solve_scattering(pot, e, Side.LEFT, cfg, params)
    tm = transfer_matrix_solve(pot, e, Side.LEFT, params)
    delta_r = abs(imp.big_r - tm.big_r)
    delta_t = abs(imp.big_t - tm.big_t)

    # reconstruction residual on a grid fine enough that the stencil
    # truncation error sits safely under the tolerance
    u_min = min(
        [pot.left_level, pot.right_level]
        + [pot.u_at(0.5 * (x0 + x1))
           for x0, x1 in zip(pot.interfaces(), pot.interfaces()[1:])]
        + list(getattr(pot, "us", ()))
    )
    k_max = math.sqrt(2.0 * params.mass * max(e - u_min, 1.0)) / params.hbar
    # five-point stencil sweet spot: h^4 truncation ~ roundoff / h^2
    h = (480.0 * 2.3e-16) ** (1.0 / 6.0) / k_max
    points = int(min(max(math.ceil((pot.b - pot.a) / h) + 1, 801), 200001))
    num_cfg = replace(cfg, force_numeric=True)
    # pole-free when the far lead propagates, so the running integral of Z
    # is trackable and gives the smoothest psi for the residual check
    track = e > pot.right_level
    traj, grid, idx = _profile_trajectory(pot, e, num_cfg, params, points, track=track)
    k1 = math.sqrt(2.0 * params.mass * (e - pot.left_level)) / params.hbar
    psi_a = (1.0 + imp.r) * cmath.exp(1j * k1 * pot.a)
    profile = reconstruct_wavefunction(traj, psi_a, Normalization.UNIT_INCIDENT)
    # finite differences want the uniform grid subset: adaptive samples
    # wedged between forced stops would degrade the stencil to first order
    uniform = WavefunctionProfile(
        xs=profile.xs[idx], psi=profile.psi[idx],
        normalization=profile.normalization,
    )
    residual = schrodinger_residual(uniform, pot, e, params)

    checks = [
        ("delta_R", delta_r, VALIDATE_DELTA_TOL),
        ("delta_T", delta_t, VALIDATE_DELTA_TOL),
        ("residual", residual, VALIDATE_RESIDUAL_TOL),
    ]
    rows = [
        [name, _fmt(value), _fmt(tol), "ok" if value < tol else "fail"]
        for name, value, tol in checks
    ]
    _print_table(["check", "value", "tolerance", "status"], rows)
    return 0 if all(value < tol for _, value, tol in checks) else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwim",
        description="1D quantum scattering, bound states and resonances "
                    "via the wave-impedance method",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--spec", required=True, help="potential spec file (JSON)")
        p.add_argument("--force-numeric", action="store_true",
                       help="integrate the Riccati equation even for "
                            "piecewise potentials")
        p.add_argument("--rel-tol", type=float, default=None,
                       help="ODE relative tolerance override")
        p.add_argument("--abs-tol", type=float, default=None,
                       help="ODE absolute tolerance override")

    def add_side(p):
        p.add_argument("--side", choices=["left", "right"], default="left",
                       help="incidence side")

    p = sub.add_parser("scatter", help="amplitudes at one energy")
    add_common(p)
    p.add_argument("--energy", type=float, required=True)
    add_side(p)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("sweep", help="amplitudes on a uniform energy grid")
    add_common(p)
    p.add_argument("--emin", type=float, required=True)
    p.add_argument("--emax", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    add_side(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="bound-state spectrum")
    add_common(p)
    p.add_argument("--probe-x", type=float, default=None,
                   help="matching point (defaults to the interval midpoint)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("resonances", help="full-transmission energies")
    add_common(p)
    p.add_argument("--emin", type=float, required=True)
    p.add_argument("--emax", type=float, required=True)
    add_side(p)
    p.add_argument("--probe-x", type=float, default=None)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("profile", help="impedance or wavefunction along x")
    add_common(p)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--mode", choices=["impedance", "wavefunction"],
                   default="impedance")
    p.add_argument("--points", type=int, default=401)
    add_side(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("validate", help="cross-check the two solver paths")
    add_common(p)
    p.add_argument("--energy", type=float, required=True)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PotentialInputError as exc:
        _emit_error(exc.code, str(exc))
        return 2
    except SolverError as exc:
        _emit_error(exc.code, str(exc))
        return 3
    except ValueError as exc:
        _emit_error("Input", str(exc))
        return 2
    except OSError as exc:
        _emit_error("Input", str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())

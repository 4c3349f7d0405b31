"""Command-line front end: build a solution family, sample it, verify it, export it.

Exit codes: 0 success, 2 invalid input, 3 a numerical tolerance was not met.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .beams import BesselBeamParams, GeometryError, bessel_beam
from .core import DomainError, PhysicalContext
from .exact import (FourierSeries, RealExp, fourier_coefficients, fourier_element, gaussian_energy_spectrum,
                    general_solution, mackinnon_solution)
from .finite_energy import (IntegrationDomainError, WSpectrum, finite_energy_closed_form,
                            finite_energy_field)
from .numerics import FieldGrid, GridError, GridSpec, IntegrationError
from .paraxial import (Family, MeasurementError, ParaxialSpectrum, paraxial_closed_form, predicted_widths,
                       width_measurements)
from .potential import HarmonicGuide, TrainTerm, solve_modes, train_with_offset
from .verify import (VerificationError, field_norm, free_propagate, random_probes, rigid_translation_check,
                     schrodinger_residual)

CSV_HEADER = ["rho", "zeta", "t", "re", "im", "abs2"]

PARAXIAL_FAMILIES = ("g1", "invp", "i0mod", "j0mod")
EXACT_FAMILIES = ("element", "mackinnon", "series")
VERIFY_FAMILIES = ("beam",) + PARAXIAL_FAMILIES + EXACT_FAMILIES + ("finite-energy", "potential-train")

ERRATA_FLAGS = {
    "g1": ["paraxial-phase-sign", "g1-exponent"],
    "invp": ["paraxial-phase-sign", "invp-regularization", "incomplete-gamma-definition"],
    "i0mod": ["paraxial-phase-sign", "bessel-modulated-hbar-factors"],
    "j0mod": ["paraxial-phase-sign", "bessel-modulated-hbar-factors"],
    "element": ["fourier-phase-placement"],
    "series": ["fourier-phase-placement"],
}


class ToleranceFailure(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# Field export / import

def _f(x) -> str:
    return repr(float(x))


def _rows(grid: FieldGrid):
    """(rho, zeta, t, value) in t-major, rho, zeta-inner order."""
    for it, t in enumerate(grid.t):
        for ir, r in enumerate(grid.rho):
            for iz, z in enumerate(grid.zeta):
                yield r, z, t, grid.values[it, ir, iz]


def write_csv(grid: FieldGrid, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r, z, t, v in _rows(grid):
        w.writerow([_f(r), _f(z), _f(t), _f(v.real), _f(v.imag), _f(abs(v) ** 2)])


def read_csv(fh, spec: GridSpec | None = None, V: float = 1.0) -> FieldGrid:
    """Rebuild a FieldGrid from CSV rows (the axes are read back from the columns)."""
    rd = csv.reader(fh)
    header = next(rd)
    if header != CSV_HEADER:
        raise GridError(f"unexpected CSV header {header!r}")
    data = np.array([[float(x) for x in row[:5]] for row in rd if row], dtype=float)
    t = np.unique(data[:, 2])
    rho = np.unique(data[:, 0])
    zeta = np.unique(data[:, 1])
    vals = (data[:, 3] + 1j * data[:, 4]).reshape(len(t), len(rho), len(zeta))
    if spec is None:
        spec = GridSpec(float(rho[-1]), len(rho), float(zeta[0]), float(zeta[-1]), len(zeta), tuple(t))
    return FieldGrid(spec=spec, values=vals, rho=rho, zeta=zeta, t=t, V=V)


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def grid_to_json(grid: FieldGrid, meta: dict) -> str:
    doc = {
        "meta": meta,
        "grid": {**grid.spec.to_dict(), "V": grid.V, "rho": grid.rho.tolist(), "zeta": grid.zeta.tolist(),
                 "t": grid.t.tolist()},
        "columns": CSV_HEADER,
        "data": [[float(r), float(z), float(t), float(v.real), float(v.imag), float(abs(v) ** 2)]
                 for r, z, t, v in _rows(grid)],
    }
    return json.dumps(doc, default=_jsonable)


def grid_from_json(text: str):
    """Inverse of grid_to_json: (FieldGrid, meta); values are bit-exact."""
    doc = json.loads(text)
    g = dict(doc["grid"])
    rho, zeta, t, V = (np.array(g.pop(k), dtype=float) for k in ("rho", "zeta", "t", "V"))
    spec = GridSpec.from_dict(g)
    d = np.array(doc["data"], dtype=float)
    vals = (d[:, 3] + 1j * d[:, 4]).reshape(len(t), len(rho), len(zeta))
    return FieldGrid(spec=spec, values=vals, rho=rho, zeta=zeta, t=t, V=float(V)), doc["meta"]


# --------------------------------------------------------------------------
# Argument parsing

def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("grid must be rho_max,n_rho,zeta_min,zeta_max,n_zeta")
    try:
        return (float(parts[0]), int(parts[1]), float(parts[2]), float(parts[3]), int(parts[4]))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _terms_arg(text):
    """'0+:1,0-:0.5+0.5j' -> [TrainTerm(0, '+', 1), TrainTerm(0, '-', 0.5+0.5j)]."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        mode, _, coef = item.partition(":")
        if not mode or mode[-1] not in "+-":
            raise argparse.ArgumentTypeError(f"term {item!r}: expected <n><+|->[:coefficient]")
        out.append(TrainTerm(int(mode[:-1]), mode[-1], complex(coef) if coef else 1.0))
    return out


_PARAMS = {
    "E": dict(type=float, default=1.0, help="beam energy"),
    "pz": dict(type=float, default=1.0, help="beam longitudinal momentum"),
    "n": dict(type=int, default=0, help="beam order / Fourier element index"),
    "alpha": dict(type=float, default=100.0, help="paraxial spectrum width parameter"),
    "s": dict(type=float, default=0.0, help="Bessel modulation parameter"),
    "a": dict(type=float, default=0.0, help="exponential spectrum rate"),
    "s0": dict(type=float, default=1.0, help="spectrum amplitude"),
    "an": dict(type=complex, default=1.0, help="Fourier coefficient of a single element"),
    "n-trunc": dict(type=int, default=8, help="series truncation |n| <= n_trunc"),
    "spectrum": dict(choices=("gaussian", "realexp"), default="gaussian", help="S(E) for the series"),
    "sigma": dict(type=float, default=None, help="gaussian S(E) width (default D/10)"),
    "center": dict(type=float, default=None, help="gaussian S(E) centre (default B)"),
    "w0": dict(type=float, default=1.5, help="finite-energy spectrum centre"),
    "qw": dict(type=float, default=50.0, help="finite-energy spectrum sharpness"),
    "omega": dict(type=float, default=0.05, help="harmonic guide frequency"),
    "terms": dict(type=_terms_arg, default=None, help="train terms n<+|->:coef, comma separated"),
}


def _add_params(p, names):
    g = p.add_argument_group("family parameters")
    for name in names:
        g.add_argument(f"--{name}", **_PARAMS[name])


def _common():
    c = argparse.ArgumentParser(add_help=False)
    g = c.add_argument_group("global options")
    g.add_argument("--hbar", type=float, default=1.0)
    g.add_argument("--mass", type=float, default=1.0)
    g.add_argument("--V", type=float, default=1.0, help="peak speed")
    g.add_argument("--b", type=float, default=0.0, help="energy offset of the spectral line")
    g.add_argument("--grid", type=_grid_arg, default=None, help="rho_max,n_rho,zeta_min,zeta_max,n_zeta")
    g.add_argument("--t", type=_floats, default=(0.0,), help="comma-separated time samples")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--tol", type=float, default=None, help="pass/fail threshold of the check")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--config", default=None, help="INI file; [global] and per-subcommand sections")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog="locwave", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("beam", parents=[common], help="monochromatic Bessel beam")
    _add_params(b, ["E", "pz", "n"])

    px = sub.add_parser("paraxial", parents=[common], help="paraxial pulse closed forms")
    px.add_argument("--family", choices=PARAXIAL_FAMILIES, default="g1")
    _add_params(px, ["alpha", "s"])
    px.add_argument("--measure-widths", action="store_true", help="print measured and predicted widths")

    ex = sub.add_parser("exact", parents=[common], help="exact sinc-type pulses")
    ex.add_argument("--family", choices=EXACT_FAMILIES, default="mackinnon")
    _add_params(ex, ["n", "an", "a", "s0", "n-trunc", "spectrum", "sigma", "center"])

    fe = sub.add_parser("finite-energy", parents=[common], help="finite-energy pulse (w-quadrature)")
    _add_params(fe, ["w0", "qw", "a", "s0"])
    fe.add_argument("--closed-form-report", action="store_true",
                    help="compare the erfc closed form with the quadrature on the grid")

    pt = sub.add_parser("potential-train", parents=[common], help="harmonic-guide pulse train")
    _add_params(pt, ["omega", "terms"])
    pt.add_argument("--list-modes", action="store_true", help="print the admissible modes and exit")

    v = sub.add_parser("verify", parents=[common], help="residual, rigid translation or propagation check")
    v.add_argument("check", choices=("residual", "translate", "propagate"))
    v.add_argument("--family", choices=VERIFY_FAMILIES, default="beam")
    _add_params(v, list(_PARAMS))
    v.add_argument("--dt", type=float, default=1.0, help="propagation time step")
    v.add_argument("--seed", type=int, default=0, help="probe RNG seed (translate)")
    v.add_argument("--probes", type=int, default=200)
    v.add_argument("--potential", action="store_true",
                   help="include the harmonic guide term in the residual (potential-train)")

    sub.add_parser("errata", parents=[common], help="print the discrepancy ledger with measured evidence")
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Splice key = value pairs from --config in front of the user's flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(known.config):
        raise DomainError(f"cannot read config file {known.config!r}")
    cmd_idx = next((i for i, a in enumerate(argv) if not a.startswith("-")), None)
    if cmd_idx is None:
        return argv
    cmd = argv[cmd_idx]
    subp = parser._subparsers._group_actions[0].choices.get(cmd)
    if subp is None:
        return argv
    actions = {a.dest: a for a in subp._actions}
    lowered = {k.lower(): a for k, a in actions.items()}
    tokens = []
    for section in ("global", cmd):
        if not cp.has_section(section):
            continue
        for key, value in cp.items(section):
            dest = key.replace("-", "_")
            act = actions.get(dest) or lowered.get(dest.lower())
            if act is None or not act.option_strings:
                raise DomainError(f"unknown config key {key!r} in section [{section}]")
            flag = act.option_strings[0]
            if act.nargs == 0:
                if cp.getboolean(section, key):
                    tokens.append(flag)
            else:
                tokens += [flag, value]
    return argv[:cmd_idx + 1] + tokens + argv[cmd_idx + 1:]


# --------------------------------------------------------------------------
# Family construction

def _ctx(args) -> PhysicalContext:
    return PhysicalContext(args.hbar, args.mass, args.V, args.b)


def build_family(name: str, args, ctx: PhysicalContext):
    """Return (evaluator, params dict) for a family name and parsed options."""
    if name == "beam":
        bp = BesselBeamParams(ctx, args.E, args.pz, args.n)
        return bessel_beam(bp), {"E": args.E, "p_z": args.pz, "n": args.n}
    if name in PARAXIAL_FAMILIES:
        if ctx.b != 0:
            raise DomainError("paraxial pulses are built on the line E = V p_z (b = 0 required)")
        spec = ParaxialSpectrum(Family(name), args.alpha, args.s)
        return paraxial_closed_form(ctx, spec), {"alpha": args.alpha, "s": args.s}
    if name == "element":
        return fourier_element(ctx, args.n, args.an), {"n": args.n, "a_n": args.an}
    if name == "mackinnon":
        return mackinnon_solution(ctx, args.a, args.s0), {"a": args.a, "s0": args.s0}
    if name == "series":
        if args.spectrum == "gaussian":
            S = gaussian_energy_spectrum(ctx, args.center, args.sigma)
        else:
            S = RealExp(args.a, args.s0).as_function(ctx)
        series = fourier_coefficients(ctx, S, args.n_trunc)
        return general_solution(ctx, series), {
            "spectrum": args.spectrum, "n_trunc": args.n_trunc, "sigma": args.sigma, "center": args.center,
            "a": args.a, "s0": args.s0}
    if name == "finite-energy":
        ws = WSpectrum(args.w0, args.qw, args.a, args.s0)
        return finite_energy_field(ctx, ws), {"w0": args.w0, "q_w": args.qw, "a": args.a, "s0": args.s0}
    if name == "potential-train":
        terms = args.terms or [TrainTerm(0, "+", 1.0), TrainTerm(0, "-", 1.0)]
        guide = HarmonicGuide(ctx, args.omega)
        return train_with_offset(guide, terms, ctx.b), {
            "omega": args.omega, "terms": [[t.n, t.branch, complex(t.f)] for t in terms]}
    raise DomainError(f"unknown family {name!r}")


def _default_grid(name: str, args, ctx: PhysicalContext):
    L = ctx.hbar / (ctx.mass * ctx.V)
    if name in PARAXIAL_FAMILIES:
        d_rho, d_zeta = predicted_widths(ctx, args.alpha)
        return (4 * d_rho, 64, -2 * d_zeta, 2 * d_zeta, 128)
    if name == "finite-energy":
        r = 3 * 2 * math.sqrt(args.qw) * ctx.hbar
        return (r, 32, -r, r, 64)
    if name == "potential-train":
        ell = math.sqrt(ctx.hbar / (ctx.mass * args.omega))
        return (4 * ell, 32, -20 * L, 20 * L, 128)
    return (8 * L, 32, -8 * L, 8 * L, 64)


def _grid_spec(name, args, ctx, rho_nodes="uniform") -> GridSpec:
    g = args.grid or _default_grid(name, args, ctx)
    return GridSpec(g[0], g[1], g[2], g[3], g[4], tuple(args.t), 0.0, rho_nodes)


def _meta(name, params, args, ctx, extra=None):
    m = {
        "family": name, "params": params,
        "units": {"hbar": ctx.hbar, "mass": ctx.mass, "V": ctx.V, "b": ctx.b,
                  "note": "lengths, times and momenta in the units fixed by hbar, mass and V"},
        "code_version": __version__,
        "errata_flags": ERRATA_FLAGS.get(name, []),
        "command": args.command,
    }
    m.update(extra or {})
    return m


def _emit(grid: FieldGrid, meta: dict, args, out):
    if args.format == "json":
        text = grid_to_json(grid, meta)
    else:
        buf = io.StringIO()
        write_csv(grid, buf)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def _sample_and_emit(name, args, out, extra_meta=None):
    ctx = _ctx(args)
    ev, params = build_family(name, args, ctx)
    grid = ev.sample(_grid_spec(name, args, ctx), threads=args.threads)
    _emit(grid, _meta(name, params, args, ctx, extra_meta), args, out)
    return grid


# --------------------------------------------------------------------------
# Subcommands

def cmd_beam(args, out):
    _sample_and_emit("beam", args, out)


def cmd_paraxial(args, out):
    if args.measure_widths:
        ctx = _ctx(args)
        ev, _ = build_family(args.family, args, ctx)
        pr, pz = predicted_widths(ctx, args.alpha)
        d_rho, d_zeta = (float(x) for x in width_measurements(ev, ctx, rho_guess=2 * pr, zeta_guess=2 * pz))
        out.write(f"delta_rho = {d_rho!r}\n")
        out.write(f"delta_zeta = {d_zeta!r}\n")
        if args.family == "g1":
            out.write(f"predicted delta_rho = {pr!r}\npredicted delta_zeta = {pz!r}\n")
            if args.tol is not None and max(abs(d_rho / pr - 1), abs(d_zeta / pz - 1)) > args.tol:
                raise ToleranceFailure("measured widths differ from the analytic widths by more than --tol")
        return
    _sample_and_emit(args.family, args, out)


def cmd_exact(args, out):
    _sample_and_emit(args.family, args, out)


def cmd_finite_energy(args, out):
    extra = None
    if args.closed_form_report:
        ctx = _ctx(args)
        spec = _grid_spec("finite-energy", args, ctx)
        R, Z = np.meshgrid(spec.rho()[::4], spec.zeta()[::8], indexing="ij")
        _, report = finite_energy_closed_form(ctx, WSpectrum(args.w0, args.qw, args.a, args.s0), R, Z, 0.0)
        extra = {"closed_form_report": report}
        sys.stderr.write("closed-form comparison: " + json.dumps(report, default=_jsonable) + "\n")
    _sample_and_emit("finite-energy", args, out, extra)


def cmd_potential_train(args, out):
    ctx = _ctx(args)
    if args.list_modes:
        for m in solve_modes(HarmonicGuide(ctx, args.omega)):
            out.write(f"n={m.n} Lambda^2={m.Lambda_sq!r} p_z+={m.p_z_pair[0]!r} p_z-={m.p_z_pair[1]!r}\n")
        return
    _sample_and_emit("potential-train", args, out)


def cmd_verify(args, out):
    ctx = _ctx(args)
    name = args.family
    ev, params = build_family(name, args, ctx)
    if args.check == "residual":
        pot = HarmonicGuide(ctx, args.omega).U if args.potential else None
        grid = args.grid or (4.0, 8, -4.0, 4.0, 8)
        spec = GridSpec(grid[0], grid[1], grid[2], grid[3], grid[4], tuple(args.t))
        rep = schrodinger_residual(ev, spec, ctx, potential=pot)
        out.write(f"max_residual = {rep.max_residual!r}\nl2_residual = {rep.l2_residual!r}\n"
                  f"convergence_order = {rep.convergence_order!r}\n")
        tol = 0.2 if args.tol is None else args.tol
        if abs(rep.convergence_order - 2) > tol:
            raise ToleranceFailure(f"convergence order {rep.convergence_order:.3f} outside 2 +/- {tol}")
    elif args.check == "translate":
        g = args.grid or _default_grid(name, args, ctx)
        span = max(abs(g[2]), abs(g[3]))
        probes = random_probes(np.random.default_rng(args.seed), args.probes, g[0], span, span / ctx.V,
                               span / ctx.V)
        dev = rigid_translation_check(ev, ctx.V, probes)
        out.write(f"translation_deviation = {dev!r}\n")
        tol = 1e-12 if args.tol is None else args.tol
        if dev > tol:
            raise ToleranceFailure(f"rigid-translation deviation {dev:.3g} exceeds {tol:g}")
    else:
        spec = _grid_spec(name, args, ctx, rho_nodes="bessel")
        spec = GridSpec(spec.rho_max, spec.n_rho, spec.zeta_min, spec.zeta_max, spec.n_zeta,
                        (spec.t_samples[0],), 0.0, "bessel")
        g0 = ev.sample(spec, threads=args.threads)
        g1 = free_propagate(g0, args.dt, ctx)
        ref = ev.sample(g1.spec, threads=args.threads)
        err = float(np.linalg.norm(g1.values - ref.values) / np.linalg.norm(ref.values))
        drift = abs(field_norm(g1) - field_norm(g0)) / field_norm(g0)
        out.write(f"relative_l2_error = {err!r}\nnorm_drift = {drift!r}\n"
                  f"boundary_flag = {g1.metadata['boundary_flag']}\n")
        if args.out:
            _emit(g1, _meta(name, params, args, ctx, {"propagated_by": args.dt}), args, out)
        tol = 1e-3 if args.tol is None else args.tol
        if err > tol:
            raise ToleranceFailure(f"propagated field differs from the evaluator by {err:.3g} > {tol:g}")


def errata_items(ctx: PhysicalContext | None = None):
    """Discrepancy ledger entries, each with freshly measured evidence."""
    from .errata import collect
    return collect(ctx or PhysicalContext())


def cmd_errata(args, out):
    items = errata_items(_ctx(args))
    if args.format == "json":
        out.write(json.dumps(items, default=_jsonable, indent=1) + "\n")
        return
    for it in items:
        out.write(f"[{it['topic']}] {it['summary']}\n")
        for k, v in it["evidence"].items():
            out.write(f"    {k}: {v!r}\n")


COMMANDS = {
    "beam": cmd_beam, "paraxial": cmd_paraxial, "exact": cmd_exact, "finite-energy": cmd_finite_energy,
    "potential-train": cmd_potential_train, "verify": cmd_verify, "errata": cmd_errata,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
    except DomainError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.threads < 1:
        sys.stderr.write("error: --threads must be >= 1\n")
        return 2
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, out)
    except (ToleranceFailure, IntegrationError, MeasurementError, IntegrationDomainError,
            VerificationError) as e:
        sys.stderr.write(f"tolerance failure: {e}\n")
        return 3
    except (DomainError, GeometryError, GridError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    if args.command != "errata":
        sys.stderr.write(f"done in {time.perf_counter() - t0:.2f} s\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Every subcommand writes its full result to ``--out`` and prints a one-line
summary to standard output. Without ``--out`` the result goes to standard
output and the summary to standard error. Output files embed the
configuration that produced them: JSON files under the ``"config"`` key, CSV
files as a leading ``# config: {...}`` comment line. On failure a JSON object
``{"error": ..., "type": ...}`` is printed to standard error and the exit
status is 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from mpmath import log, mp, mpf, nstr

from . import __version__
from .bounded import DEFAULT_DPS, format_bounded
from .errors import CritampError
from .maps import load_map, new_map


@dataclass
class RunConfig:
    """Everything needed to reproduce one CLI run."""

    command: str
    weights: list
    dps: int = DEFAULT_DPS
    g_order: int = 16
    phi_order: int = 8
    n_phi: int = 7
    n_ginv: int = 7
    m: int = 64
    harmonics: int = 4
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def short(x, digits=3) -> str:
    """Scientific notation without exponent padding, e.g. ``8.86e-8``."""
    mant, exp = f"{float(x):.{digits - 1}e}".split("e")
    return f"{mant}e{int(exp)}"


def _weights(text: str):
    return [p.strip() for p in text.split(",") if p.strip()]


def _floats(text: str):
    return [p.strip() for p in text.split(",") if p.strip()]


def _map_from(args):
    if args.map_file:
        return load_map(args.map_file)
    return new_map(_weights(args.weights))


def _engine(args, pmap):
    from .oscillation import OscillationEngine

    return OscillationEngine(pmap, g_order=args.g_order, phi_order=args.phi_order,
                             n_phi=args.n_phi, n_ginv=args.n_ginv, dps=args.dps)


def _config(args, pmap, **extra) -> RunConfig:
    return RunConfig(
        command=args.command,
        weights=[str(p) for p in pmap.weights],
        dps=args.dps,
        g_order=args.g_order,
        phi_order=args.phi_order,
        n_phi=args.n_phi,
        n_ginv=args.n_ginv,
        m=getattr(args, "m", 64),
        harmonics=getattr(args, "harmonics", 4),
        seed=getattr(args, "seed", None),
        extra=extra,
    )


def _csv_text(config: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(config.to_dict(), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([str(x) for x in row])
    return buf.getvalue()


def _json_text(config: RunConfig, payload: dict) -> str:
    return json.dumps({"config": config.to_dict(), **payload}, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str):
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bv(b) -> dict:
    return {"value": str(b.value), "err": str(b.err), "certified": b.certified}


# -- subcommands ---------------------------------------------------------------

def cmd_free_energy(args):
    from .free_energy import free_energy, free_energy_near_critical

    pmap = _map_from(args)
    grid = _floats(args.h_grid)
    engine = _engine(args, pmap) if args.route == "critical" else None
    rows = []
    for h in grid:
        if engine is None:
            F = free_energy(pmap, h, args.tol, dps=args.dps)
        else:
            F = free_energy_near_critical(pmap, h, engine=engine, dps=args.dps)
        rows.append((h, F.value, F.err))
    config = _config(args, pmap, h_grid=grid, route=args.route, tol=args.tol)
    _emit(args, _csv_text(config, ["h", "value", "err"], rows))
    h, v, e = rows[-1]
    return f"F({h}) = {format_bounded(v, e)} ({len(rows)} points)"


def cmd_series(args):
    from . import series as S

    pmap = _map_from(args)
    with mp.workdps(args.dps):
        g = S.certify_g_auto(S.expand_g(pmap, args.order), args.g_radius)
        ginv = S.invert_g(g, radius=args.ginv_radius)
        phi = S.certify_phi_auto(S.expand_phi(pmap, args.phi_terms or args.order),
                                 args.phi_radius)
        payload = {"g": g.to_dict(), "g_inverse": ginv.to_dict(), "phi": phi.to_dict()}
    config = _config(args, pmap, order=args.order, g_radius=args.g_radius,
                     ginv_radius=args.ginv_radius, phi_radius=args.phi_radius)
    _emit(args, _json_text(config, payload))
    return (f"g: C = {short(g.envelope.C)} on |x| <= {args.g_radius}; "
            f"g^-1: C = {short(ginv.envelope.C)} on [0, {args.ginv_radius}]; "
            f"phi: C = {short(phi.envelope.C)} on (0, {args.phi_radius}]")


def cmd_omega(args):
    from . import periodic

    pmap = _map_from(args)
    engine = _engine(args, pmap)
    with mp.workdps(engine.dps):
        samp = periodic.sample(engine.omega, engine.window_start, engine.period, args.m)
        summ = periodic.fourier_summary(samp, args.harmonics)
    config = _config(args, pmap, **engine.config())
    if args.format == "json":
        payload = {"summary": summ.to_dict(),
                   "samples": [{"x": str(x), "value": str(v), "err": str(e)}
                               for x, v, e in samp.rows()]}
        _emit(args, _json_text(config, payload))
    else:
        _emit(args, _csv_text(config, ["x", "value", "err"], samp.rows()))
    g1 = summ.harmonic(1).amplitude
    worst = max(v.err for v in samp.values)
    return (f"omega mean = {format_bounded(summ.mean.value, summ.mean.err)}, "
            f"g1 = {short(g1.value)} ({format_bounded(g1.value, g1.err)}), "
            f"max pointwise err {short(worst, 2)}")


def cmd_amplitude(args):
    pmap = _map_from(args)
    engine = _engine(args, pmap)
    report = engine.amplitude_report(args.m, args.harmonics)
    summ, osc = report["summary"], report["oscillation"]
    config = _config(args, pmap, **engine.config())
    payload = {"Omega": summ.to_dict(),
               "oscillation": {"value": str(osc.value), "err": str(osc.err)},
               "omega_mean": _bv(engine.omega_summary.mean)}
    _emit(args, _json_text(config, payload))
    g1 = summ.harmonic(1).amplitude
    return (f"Omega mean = {nstr(summ.mean.value, 12)} ({format_bounded(summ.mean.value, summ.mean.err)}), "
            f"first harmonic = {short(g1.value)} ({format_bounded(g1.value, g1.err)}), "
            f"oscillation max-min = {short(osc.value)} ({format_bounded(osc.value, osc.err)}), "
            f"period log w = {nstr(log(mpf(pmap.w.numerator) / pmap.w.denominator), 10)}")


def cmd_harris(args):
    from .harris import harris_L, psi_boettcher, psi_direct

    pmap = _map_from(args)
    engine = _engine(args, pmap)
    points = []
    for s in _floats(args.s_grid):
        psi = psi_direct(pmap, s, dps=args.dps)
        entry = {"s": s, "psi_direct": _bv(psi), "L": _bv(harris_L(engine, s))}
        if args.boettcher:
            entry["psi_boettcher"] = _bv(psi_boettcher(engine, s))
        points.append(entry)
    config = _config(args, pmap, s_grid=_floats(args.s_grid), boettcher=args.boettcher)
    _emit(args, _json_text(config, {"points": points}))
    last = points[-1]
    L = last["L"]
    return (f"L(log {last['s']}) = {format_bounded(mpf(L['value']), mpf(L['err']))} "
            f"({len(points)} points)")


def cmd_simulate(args):
    from .harris import simulate_gw

    pmap = _map_from(args)
    s_grid = [float(s) for s in _floats(args.s_grid)]
    run = simulate_gw(pmap, args.n, args.samples, args.seed, s_grid, shards=args.shards)
    config = _config(args, pmap, n=args.n, samples=args.samples, shards=args.shards,
                     s_grid=s_grid)
    _emit(args, _json_text(config, {"run": run.to_dict()}))
    mgf = ", ".join(f"E[exp({s} W)] = {v:.6f} ± {e:.1e}" for s, (v, e) in sorted(run.mgf.items()))
    return (f"E[W] = {run.mean_W:.5f} ± {run.se_mean_W:.1e}, "
            f"extinct {run.extinct_fraction:.5f} ± {run.se_extinct:.1e}, {mgf}")


def cmd_julia(args):
    from .julia import julia_boettcher, julia_inverse_iteration

    pmap = _map_from(args)
    if args.method == "preimage":
        cloud = julia_inverse_iteration(pmap, args.depth)
        header = ["re", "im"]
    else:
        t = np.linspace(-1, 1, args.points + 1)[1:]
        if args.fourier:
            cloud = julia_boettcher(_engine(args, pmap), t, "fourier",
                                    fourier_order=args.fourier_order)
        else:
            cloud = julia_boettcher(pmap, t, "boundary", n_back=args.n_back)
        header = ["t", "re", "im"]
    config = _config(args, pmap, method=args.method, depth=args.depth,
                     points=args.points, fourier=args.fourier, params=cloud.params)
    _emit(args, _csv_text(config, header, [tuple(repr(float(v)) for v in row)
                                           for row in cloud.rows()]))
    return f"{len(cloud)} points ({cloud.method})"


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--weights", default="0.25,0,0.75",
                        help="comma-separated p0,...,pd (default: %(default)s)")
    source.add_argument("--map-file", help='JSON file {"weights": [p0, ..., pd]}')
    common.add_argument("--dps", type=int, default=DEFAULT_DPS, help="working digits")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--g-order", type=int, default=16)
    common.add_argument("--phi-order", type=int, default=8)
    common.add_argument("--n-phi", type=int, default=7)
    common.add_argument("--n-ginv", type=int, default=7)

    parser = argparse.ArgumentParser(prog="critamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("free-energy", parents=[common], help="F(h) on a grid (CSV)")
    p.add_argument("--h-grid", required=True, help="comma-separated h values")
    p.add_argument("--route", choices=["series", "critical"], default="series")
    p.add_argument("--tol", default=None)
    p.set_defaults(run=cmd_free_energy)

    p = sub.add_parser("series", parents=[common], help="certified series (JSON)")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--phi-terms", type=int, default=3,
                   help="phi keeps odd powers through 2*phi_terms-1")
    p.add_argument("--g-radius", default="2.5")
    p.add_argument("--ginv-radius", default="2")
    p.add_argument("--phi-radius", default="0.9")
    p.add_argument("--dump", action="store_true", help="accepted for compatibility; always dumps")
    p.set_defaults(run=cmd_series)

    for name, func, helptext in (("omega", cmd_omega, "samples of omega (CSV or JSON)"),
                                 ("amplitude", cmd_amplitude, "mean/harmonics of Omega (JSON)")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--m", type=int, default=64, help="samples per period")
        p.add_argument("--harmonics", type=int, default=4)
        if name == "omega":
            p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.set_defaults(run=func)

    p = sub.add_parser("harris", parents=[common], help="psi and L on a grid (JSON)")
    p.add_argument("--s-grid", default="1,1.2,1.4")
    p.add_argument("--boettcher", action="store_true", help="also compute psi via Böttcher")
    p.set_defaults(run=cmd_harris)

    p = sub.add_parser("simulate", parents=[common], help="Galton-Watson Monte Carlo (JSON)")
    p.add_argument("--n", type=int, default=20, help="generations")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=8)
    p.add_argument("--s-grid", default="0.5,1")
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("julia", parents=[common], help="Julia-set points (CSV)")
    p.add_argument("--method", choices=["boettcher", "preimage"], default="boettcher")
    p.add_argument("--points", type=int, default=512, help="t-grid size for boettcher")
    p.add_argument("--depth", type=int, default=7, help="preimage levels")
    p.add_argument("--n-back", type=int, default=60)
    p.add_argument("--fourier", action="store_true",
                   help="use the Fourier continuation of omega instead of boundary iteration")
    p.add_argument("--fourier-order", type=int, default=6)
    p.set_defaults(run=cmd_julia)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with mp.workdps(args.dps):
            summary = args.run(args)
    except (CritampError, ValueError, ArithmeticError, OSError) as exc:
        json.dump({"error": str(exc), "type": type(exc).__name__, "command": args.command},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1
    stream = sys.stdout if args.out and args.out != "-" else sys.stderr
    print(f"{args.command}: {summary}", file=stream)
    return 0


if __name__ == "__main__":
    sys.exit(main())

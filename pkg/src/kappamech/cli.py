"""
Command-line front end: figure data, parameter sweeps and cross-checks.

Every subcommand builds one or more tables and writes each to its own CSV
(or JSON) file. A file starts with ``#`` lines echoing the library version
and the full configuration, then a ``# columns:`` line, then numeric rows.
Nothing time- or host-dependent goes into a file, so repeated runs of the
same configuration are byte-identical.

Exit codes: 0 success, 1 cross-check failures, 2 invalid configuration,
3 numeric non-convergence.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from . import osc_analytic as oa
from . import well_analytic as wa
from .classical_sim import integrate, oscillator_orbit_params, classical_density
from .errors import ConfigurationError, ConvergenceError, DomainError
from .kappa_fourier import unit_partial_sum, unit_series_error
from .pdm_model import Free, InfiniteWell, MassProfile, MLOscillator, PhaseState, deformed_potential
from .spectral_solver import GridSpec, poschl_teller_grid, solve_deformed_frame, solve_original_frame

OUTPUT_ENV = "KAPPAMECH_OUTPUT_DIR"

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# Figure name -> argv (without --out); see README for the mapping.
FIGURE_CONFIGS = {
    "fig1": ["well", "--kappaL", "0,0.5,1,3", "--n", "1..6", "--quantity", "energy"],
    "fig2": ["well", "--kappaL", "0,1,3", "--n", "1..3", "--quantity", "density,momentum"],
    "fig3": ["well", "--kappaL", "3", "--n", "20", "--quantity", "density"],
    "fig4": ["fourier", "--kappaL", "1", "--N", "1,2,5,50"],
    "fig5": ["well", "--kappaL", "0:3:13", "--n", "1..3", "--quantity", "uncertainty"],
    "fig6": ["classical", "--kappaA0", "0,0.5,0.9,1.1", "--periods", "1"],
    "fig7": ["oscillator", "--nu", "4,5,10", "--quantity", "levels"],
    "fig8": ["oscillator", "--nu", "4,5,10,inf", "--n", "0..3", "--quantity", "states"],
    "fig9": ["oscillator", "--kappa-a0=-0.5:0.5:21", "--n", "0..3", "--quantity", "uncertainty"],
}


# --- parsing helpers ----------------------------------------------------------

def parse_floats(text):
    """``"0,0.5,1"`` or ``"lo:hi:count"`` (inclusive linspace) -> list of floats."""
    text = text.strip()
    if text.count(":") == 2:
        lo, hi, num = text.split(":")
        num = int(num)
        if num < 1:
            raise ConfigurationError(f"grid {text!r} needs a positive count")
        return [float(v) for v in np.linspace(float(lo), float(hi), num)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse number list {text!r}") from exc


def parse_ints(text):
    """``"1..6"`` (inclusive) or ``"0,2,5"`` -> list of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse integer list {text!r}") from exc
    if not out:
        raise ConfigurationError(f"empty integer list {text!r}")
    return out


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


# --- output ---------------------------------------------------------------

def _config_echo(args):
    skip = {"out", "format", "func", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _targets(args, tables):
    fmt = args.format
    out = args.out
    if out is None:
        base = Path(os.environ.get(OUTPUT_ENV, "."))
        return [(t, base / f"{args.command}_{t.name}.{fmt or 'csv'}") for t in tables], fmt or "csv"
    as_dir = out.endswith(("/", os.sep)) or Path(out).is_dir() or not Path(out).suffix
    if as_dir:
        fmt = fmt or "csv"
        return [(t, Path(out) / f"{t.name}.{fmt}") for t in tables], fmt
    path = Path(out)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if len(tables) == 1:
        return [(tables[0], path)], fmt
    return [(t, path.with_name(f"{path.stem}_{t.name}{path.suffix}")) for t in tables], fmt


def write_tables(args, tables):
    targets, fmt = _targets(args, tables)
    echo = _config_echo(args)
    written = []
    for table, path in targets:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            doc = {
                "library": "kappamech",
                "version": __version__,
                "config": echo,
                "table": table.name,
                "notes": table.notes,
                "columns": table.columns,
                "rows": [[_json_value(v) for v in row] for row in table.rows],
            }
            text = json.dumps(doc) + "\n"
        else:
            lines = [f"# kappamech {__version__}"]
            lines += [f"# {k}: {v}" for k, v in echo.items()]
            lines.append(f"# table: {table.name}")
            lines += [f"# {k}: {v}" for k, v in table.notes.items()]
            lines.append("# columns: " + ",".join(table.columns))
            lines += [",".join(_fmt(v) for v in row) for row in table.rows]
            text = "\n".join(lines) + "\n"
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


# --- subcommands -----------------------------------------------------------

def cmd_algebra_check(args):
    from .crosscheck import check_algebra

    res = check_algebra(n_samples=args.samples, seed=args.seed)
    t = Table("algebra", ["check", "max_error", "tolerance", "passed"])
    for i, c in enumerate(c for c in res.comparisons if not c.label.startswith("runtime")):
        t.rows.append([i, c.value, c.tol, c.passed])
        t.notes[f"check {i}"] = c.label
    return [t], res.passed


def _well_specs(args):
    specs = [wa.WellSpec(1.0, kl) for kl in parse_floats(args.kappaL)]
    ns = parse_ints(args.n)
    if min(ns) < 1:
        raise DomainError("well levels start at n = 1")
    return specs, ns


WELL_QUANTITIES = ("energy", "density", "momentum", "moments", "uncertainty", "numeric")


def cmd_well(args):
    specs, ns = _well_specs(args)
    quantities = [q.strip() for q in args.quantity.split(",")]
    for q in quantities:
        if q not in WELL_QUANTITIES:
            raise ConfigurationError(f"unknown well quantity {q!r}; choose from {WELL_QUANTITIES}")
    if args.points < 16:
        raise ConfigurationError("--points must be at least 16")
    tables = []
    if "energy" in quantities:
        t = Table("energy", ["kappaL", "n", "E_over_eps0", "E"])
        for s in specs:
            for n in ns:
                E = wa.energy(s, n)
                t.rows.append([s.kappa, n, E / s.epsilon0, E])
        tables.append(t)
    x = np.linspace(0.0, 1.0, args.points)
    if "density" in quantities:
        for s in specs:
            cols = ["x"] + [f"rho_{n}" for n in ns] + ["rho_classical"]
            t = Table(f"density_kL{s.kappa:g}", cols)
            data = [x] + [wa.position_density(s, n, x) for n in ns]
            data.append(classical_density(InfiniteWell(1.0), x, s.kappa))
            t.rows = np.column_stack(data).tolist()
            tables.append(t)
    if "momentum" in quantities:
        k = np.linspace(-args.k_max, args.k_max, 2 * args.points - 1)
        for s in specs:
            t = Table(f"momentum_kL{s.kappa:g}", ["k"] + [f"gamma_{n}" for n in ns])
            t.rows = np.column_stack([k] + [wa.momentum_density(s, n, k) for n in ns]).tolist()
            tables.append(t)
    if "moments" in quantities or "uncertainty" in quantities:
        cols = ["kappaL", "n", "mean_x", "mean_x2", "mean_p2", "mean_p2_by_parts",
                "delta_x", "delta_p", "delta_k", "dx_dp", "dx_dp_by_parts", "dx_dk"]
        t = Table("uncertainty" if "uncertainty" in quantities else "moments", cols)
        for s in specs:
            for n in ns:
                m = wa.moments(s, n)
                c = wa.moments(s, n, form="corrected")
                t.rows.append([s.kappa, n, m.mean_x, m.mean_x2, m.mean_p2, c.mean_p2,
                               m.delta_x, m.delta_p, m.delta_k, m.product_xp, c.product_xp, m.product_xk])
        t.notes["mean_p2"] = "reference sech/tanh integral combination"
        t.notes["mean_p2_by_parts"] = "k_n^2 I10 + kappa^2 (-I20/2 + 5 I11/4)"
        tables.append(t)
    if "numeric" in quantities:
        for s in specs:
            grid = GridSpec("x", 0.0, 1.0, args.points)
            sols = solve_original_frame(InfiniteWell(1.0), s.kappa, grid, max(ns))
            t = Table(f"numeric_kL{s.kappa:g}", ["x"] + [f"psi_{n}" for n in ns])
            t.rows = np.column_stack([grid.nodes] + [sols[n - 1].psi for n in ns]).tolist()
            t.notes["frame"] = "x"
            t.notes["energies"] = ",".join(repr(sols[n - 1].energy) for n in ns)
            tables.append(t)
    return tables, True


def _osc_specs(args):
    if (args.nu is None) == (args.kappa_a0 is None):
        raise ConfigurationError("give exactly one of --nu or --kappa-a0")
    if args.nu is not None:
        specs = []
        for nu in parse_floats(args.nu):
            if math.isinf(nu):
                specs.append(oa.OscillatorSpec(0.0))
            else:
                specs.append(oa.OscillatorSpec.from_nu(nu))
        return specs
    return [oa.OscillatorSpec.from_kappa_a0(ka) for ka in parse_floats(args.kappa_a0)]


def _tag(spec):
    return "nuinf" if spec.kappa == 0 else f"nu{spec.nu:.6g}"


OSC_QUANTITIES = ("levels", "states", "moments", "uncertainty", "numeric")


def cmd_oscillator(args):
    quantities = [q.strip() for q in args.quantity.split(",")]
    for q in quantities:
        if q not in OSC_QUANTITIES:
            raise ConfigurationError(f"unknown oscillator quantity {q!r}; choose from {OSC_QUANTITIES}")
    specs = _osc_specs(args)
    ns = parse_ints(args.n) if args.n else None
    if ns is not None and min(ns) < 0:
        raise DomainError("oscillator levels start at n = 0")
    # preconditions first: every requested level must be bound
    if any(q in quantities for q in ("states", "moments", "numeric")):
        if ns is None:
            raise ConfigurationError("--n is required for this quantity")
        for s in specs:
            if max(ns) >= s.nu:
                raise DomainError(
                    f"n = {max(ns)} is not bound for nu = {s.nu:.6g} ({s.n_bound} bound states)"
                )
            if "states" in quantities and s.kappa != 0:
                s.integer_nu()
    tables = []
    x = np.linspace(-args.x_max, args.x_max, args.points)
    if "levels" in quantities:
        for s in specs:
            if s.kappa == 0:
                raise ConfigurationError("level diagram needs a finite nu")
            top = s.n_bound - 1
            levels = oa.spectrum(s, top)
            t = Table(f"levels_{_tag(s)}", ["n", "E", "E_wkb_gap"])
            t.rows = [[n, levels[n], oa.wkb_gap(s, n)] for n in range(top + 1)]
            t.notes["W_kappa"] = repr(s.W_kappa)
            tables.append(t)
            xk = np.linspace(-args.x_max, args.x_max, args.points)
            pot = Table(f"potential_{_tag(s)}", ["x_kappa", "U"])
            pot.rows = np.column_stack([xk, deformed_potential(MLOscillator(1.0), xk, s.kappa)]).tolist()
            tables.append(pot)
    if "states" in quantities:
        for s in specs:
            cols = ["x"] + [f"psi_{n}" for n in ns] + [f"rho_{n}" for n in ns]
            t = Table(f"states_{_tag(s)}", cols)
            psi = [np.asarray(oa.eigenfunction(s, n, x)) for n in ns]
            t.rows = np.column_stack([x] + psi + [p * p for p in psi]).tolist()
            t.notes["kappa_a0"] = repr(s.kappa_a0)
            tables.append(t)
    if "moments" in quantities:
        t = Table("moments", ["kappa_a0", "nu", "n", "E", "mean_x2", "mean_p2", "T", "V", "a_n"])
        for s in specs:
            for n in ns:
                m = oa.moments(s, n)
                e = oa.energy_split(s, n)
                t.rows.append([s.kappa_a0, s.nu, n, e.E, m.mean_x2, m.mean_p2, e.T_exp, e.V_exp, e.a_n_kappa])
        tables.append(t)
    if "uncertainty" in quantities:
        if ns is None:
            raise ConfigurationError("--n is required for the uncertainty scan")
        kas = [s.kappa_a0 for s in specs] if args.kappa_a0 is None else parse_floats(args.kappa_a0)
        rows = oa.uncertainty_scan(kas, ns)
        t = Table("uncertainty", ["kappa_a0", "n", "delta_x", "delta_p", "dx_dp", "flagged"])
        t.rows = [[r["kappa_a0"], r["n"], r["delta_x"], r["delta_p"], r["product"], r["flagged"]] for r in rows]
        tables.append(t)
    if "numeric" in quantities:
        for s in specs:
            if s.kappa == 0:
                raise ConfigurationError("numeric Poeschl-Teller solve needs a finite nu")
            grid = poschl_teller_grid(s.kappa, args.h, max(ns) + 1)
            sols = solve_deformed_frame(MLOscillator(1.0), s.kappa, grid, max(ns) + 1)
            t = Table(f"numeric_{_tag(s)}", ["x_kappa"] + [f"Lambda_{n}" for n in ns])
            t.rows = np.column_stack([grid.nodes] + [sols[n].psi for n in ns]).tolist()
            t.notes["frame"] = "x_kappa"
            t.notes["energies"] = ",".join(repr(sols[n].energy) for n in ns)
            tables.append(t)
    return tables, True


def cmd_classical(args):
    kas = parse_floats(args.kappaA0)
    if args.steps < 10 or args.periods <= 0:
        raise ConfigurationError("need --steps >= 10 and --periods > 0")
    if args.kappa <= 0:
        raise ConfigurationError("--kappa must be positive (orbits are labelled by kappa A0)")
    tables = []
    for kA0 in kas:
        orbit = oscillator_orbit_params(1.0, args.kappa, A0=kA0 / args.kappa)
        # x(0) = 0 with p(0) = m0 w0 A0 reaches every regime from the same start
        period = 2 * math.pi / (orbit.Omega_kappa if orbit.bounded else 1.0)
        T = args.periods * period
        tr = integrate(MassProfile(args.kappa), MLOscillator(1.0), PhaseState(0.0, orbit.A0),
                       period / args.steps, T)
        t = Table(f"orbit_kA0_{kA0:g}", ["t", "x", "p", "x_kappa", "Pi_kappa", "H"])
        t.rows = np.column_stack(list(tr.columns().values())).tolist()
        t.notes.update(regime=orbit.regime, status=tr.status, energy_drift=repr(tr.energy_drift),
                       A_kappa=repr(orbit.A_kappa), Omega_kappa=repr(orbit.Omega_kappa),
                       abs_Pi_kappa_range=" ".join(repr(v) for v in tr.pi_kappa_range))
        tables.append(t)
    return tables, True


def cmd_fourier(args):
    spec = wa.WellSpec(1.0, args.kappaL)
    Ns = parse_ints(args.N)
    if min(Ns) < 0:
        raise DomainError("N must be >= 0")
    x = np.linspace(0.0, 1.0, args.points)
    curves = Table("partial_sums", ["x"] + [f"f_{N}" for N in Ns])
    curves.rows = np.column_stack([x] + [unit_partial_sum(spec, x, N) for N in Ns]).tolist()
    curves.notes["series"] = "4/pi sum_{l=0}^{N} sin[(2l+1) pi u]/(2l+1), u = arcsinh(kx)/arcsinh(kL)"
    err = Table("R_of_N", ["N", "R"])
    err.rows = [[N, unit_series_error(spec, N)] for N in Ns]
    return [curves, err], True


def _sweep_point(job):
    system, value, n, form = job
    if system == "well":
        m = wa.moments(wa.WellSpec(1.0, value), n, form=form)
        E = wa.energy(wa.WellSpec(1.0, value), n)
    else:
        spec = oa.OscillatorSpec.from_kappa_a0(value)
        if n >= spec.nu - 1:
            return [value, n] + [math.nan] * 6
        m = oa.moments(spec, n)
        E = float(oa.spectrum(spec, n)[-1])
    return [value, n, E, m.mean_x, m.mean_x2, m.mean_p2, m.delta_x * m.delta_p, m.delta_x]


def cmd_sweep(args):
    values = parse_floats(args.values)
    ns = parse_ints(args.n)
    if args.system == "well" and min(ns) < 1:
        raise DomainError("well levels start at n = 1")
    if args.system == "oscillator" and min(ns) < 0:
        raise DomainError("oscillator levels start at n = 0")
    if args.jobs < 1:
        raise ConfigurationError("--jobs must be >= 1")
    jobs = [(args.system, v, n, args.form) for v in values for n in ns]
    if args.jobs == 1:
        rows = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, jobs))  # map keeps input order
    param = "kappaL" if args.system == "well" else "kappa_a0"
    t = Table(f"sweep_{args.system}", [param, "n", "E", "mean_x", "mean_x2", "mean_p2", "dx_dp", "delta_x"])
    t.rows = rows
    return [t], True


def cmd_crosscheck(args):
    from .crosscheck import SUITES, run_suite

    names = [s.strip() for s in args.suite.split(",")]
    for name in names:
        if name not in SUITES:
            raise ConfigurationError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    t = Table("crosscheck", ["criterion", "index", "value", "tolerance", "passed"])
    ok = True
    for name in names:
        for res in run_suite(name):
            for i, c in enumerate(res.comparisons):
                if c.label.startswith("runtime"):
                    continue  # wall-clock times would break byte-identical output
                t.rows.append([res.number, i, c.value, c.tol, c.passed])
                t.notes[f"{res.number}.{i}"] = c.label + (f" [{c.note}]" if c.note else "")
            ok = ok and all(c.passed for c in res.comparisons)
            status = "PASS" if res.passed else "FAIL"
            print(f"criterion {res.number:2d} {status}: {res.title}", file=sys.stderr)
    return [t], ok


# --- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="kappamech", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"kappamech {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=None,
                        help=f"output file or directory (default: ${OUTPUT_ENV} or cwd)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)

    sp = sub.add_parser("algebra-check", help="randomized kappa-algebra identity checks")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=20240917)
    common(sp)
    sp.set_defaults(func=cmd_algebra_check)

    sp = sub.add_parser("well", help="infinite well in the PDM setting")
    sp.add_argument("--kappaL", default="0,0.5,1,3")
    sp.add_argument("--n", default="1..6")
    sp.add_argument("--quantity", default="energy", help="comma list of " + ", ".join(WELL_QUANTITIES))
    sp.add_argument("--points", type=int, default=401)
    sp.add_argument("--k-max", type=float, default=30.0)
    common(sp)
    sp.set_defaults(func=cmd_well)

    sp = sub.add_parser("oscillator", help="quantum Mathews-Lakshmanan oscillator")
    sp.add_argument("--nu", default=None, help="Poeschl-Teller indices (inf for kappa = 0)")
    sp.add_argument("--kappa-a0", default=None)
    sp.add_argument("--n", default=None)
    sp.add_argument("--quantity", default="states", help="comma list of " + ", ".join(OSC_QUANTITIES))
    sp.add_argument("--points", type=int, default=401)
    sp.add_argument("--x-max", type=float, default=8.0)
    sp.add_argument("--h", type=float, default=0.02, help="grid spacing for numeric solves")
    common(sp)
    sp.set_defaults(func=cmd_oscillator)

    sp = sub.add_parser("classical", help="phase-space orbits of the classical oscillator")
    sp.add_argument("--kappaA0", default="0,0.5,0.9,1.1")
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--periods", type=float, default=1.0)
    sp.add_argument("--steps", type=int, default=400, help="steps per period")
    common(sp)
    sp.set_defaults(func=cmd_classical)

    sp = sub.add_parser("fourier", help="kappa-sine series of f = 1 on the well")
    sp.add_argument("--kappaL", type=float, default=1.0)
    sp.add_argument("--N", default="1,2,5,50")
    sp.add_argument("--points", type=int, default=401)
    common(sp)
    sp.set_defaults(func=cmd_fourier)

    sp = sub.add_parser("sweep", help="moment tables over a deformation grid")
    sp.add_argument("--system", choices=("well", "oscillator"), required=True)
    sp.add_argument("--values", required=True, help="kappaL or kappa a0 grid")
    sp.add_argument("--n", default="1")
    sp.add_argument("--form", choices=("reference", "corrected"), default="reference")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("crosscheck", help="analytic-vs-oracle suites (exit 1 on any failure)")
    sp.add_argument("--suite", default="all")
    common(sp)
    sp.set_defaults(func=cmd_crosscheck)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tables, ok = args.func(args)
        write_tables(args, tables)
    except (ConfigurationError, DomainError) as exc:
        print(f"kappamech: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"kappamech: numeric non-convergence: {exc} (residual {exc.residual})", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

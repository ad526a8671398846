"""Command-line entry point: ``rotent <command> [options]``.

Every table carries a header comment with the config hash, the package
version and the unit conventions. Exit codes: 0 success, 2 bad
configuration, 3 numerical failure, 4 infeasible subspace.
"""

import argparse
import hashlib
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .analysis import (
    ScanAborted,
    edge_reconstruction_detector,
    local_extrema,
    oscillation_periods,
    qh_entropy_prediction,
    scan_subspaces,
    special_subspace_momentum,
    stable_angular_momenta,
    subspace_row,
)
from .anharmonic import StrengthScanRow, strength_scan
from .entanglement import DensityMatrixError
from .fock import EmptySubspace, Statistics, min_angular_momentum
from .interaction import InteractionKind, QuadratureError, element_table
from .orbitals import OrbitalSolveError, TrapConfig, build_orbital_set
from .solver import LanczosError, build_hamiltonian, ground_state_lanczos
from .trial import TRIAL_CAP, TrialCapExceeded, overlap, symmetrized_product

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INFEASIBLE = 4

UNITS = "energy=hbar*omega length=a0 entropy=nats"

SCAN_COLUMNS = [
    "statistics", "N", "L", "dL", "dim", "E0", "S1", "lnL_minus_S1", "dS1", "S2", "occupations_json",
]
SPECIAL_COLUMNS = ["N", "L", "S1", "prediction", "overlap"]
ANHARMONIC_COLUMNS = ["N", "L", "lambda", "U0", "E0", "S1", "S2"]
ORBITAL_COLUMNS = ["l", "epsilon"]
TRIAL_COLUMNS = ["N", "k", "L", "dim", "overlap"]

log = logging.getLogger("rotent")


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ parsing


def int_range(text):
    """'a..b' (inclusive) or 'a,b,c' or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None


def float_grid(text):
    """'a..b:n' (n uniform points, ends included) or 'a,b,c' or a single value."""
    try:
        if ".." in text:
            span, _, n = text.partition(":")
            a, b = span.split("..")
            n = int(n) if n else 21
            if n < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(a), float(b), n)]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _positive(name, value):
    if value is None or value < 1:
        raise ConfigError(f"--{name} must be a positive integer, got {value}")


# ------------------------------------------------------------------ output


def fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return ""
        return f"{float(value):.12g}"
    return str(value)


def _json_value(value):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.12g}") if math.isfinite(value) else None
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    return value


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def emit(args, config, columns, rows, annotations=None):
    """Write rows (list of dicts) as CSV or JSON to ``args.out`` or stdout."""
    meta = {
        "command": config["command"],
        "config": config,
        "config_hash": config_hash(config),
        "version": __version__,
        "units": UNITS,
        "columns": columns,
    }
    if args.format == "json":
        if annotations is not None:
            meta["annotations"] = _json_value(annotations)
        doc = {
            "meta": meta,
            "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows],
        }
        text = json.dumps(doc, indent=1, sort_keys=False) + "\n"
    else:
        lines = [
            f"# rotent {__version__} command={config['command']} config_hash={meta['config_hash']}",
            f"# units: {UNITS}",
            ",".join(columns),
        ]
        for r in rows:
            lines.append(",".join(_csv_cell(fmt(r.get(c))) for c in columns))
        text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if annotations is not None and args.format == "csv":
            side = {"meta": meta, "annotations": _json_value(annotations)}
            with open(args.out + ".json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(side, indent=1) + "\n")


def _csv_cell(text):
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _occupations_json(occ):
    return json.dumps([float(f"{x:.12g}") for x in occ], separators=(",", ":"))


def _config(args):
    skip = {"out", "format", "threads", "func", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ------------------------------------------------------------------ commands


def cmd_scan(args):
    _positive("N", args.N)
    if (args.L is None) == (args.dL is None):
        raise ConfigError("give exactly one of --L and --dL")
    stat = Statistics.parse(args.stat)
    relative = args.dL is not None
    values = args.dL if relative else args.L
    if min(values) < 0:
        raise ConfigError("angular momenta must be non-negative")
    base = min_angular_momentum(args.N, stat) if relative else 0
    if all(base + v < min_angular_momentum(args.N, stat) for v in values):
        raise EmptySubspace(f"no feasible L in the requested range for N={args.N} {stat.value}s")
    config = _config(args)
    try:
        rows = scan_subspaces(
            args.N, stat, args.interaction, values, with_s2=args.s2, relative=relative,
            workers=args.threads,
        )
        failure = None
    except ScanAborted as exc:
        rows, failure = exc.rows, exc
    table = [
        {
            "statistics": r.statistics,
            "N": r.n_particles,
            "L": r.total_l,
            "dL": r.delta_l,
            "dim": r.dim,
            "E0": r.energy,
            "S1": r.s1,
            "lnL_minus_S1": r.ln_l_minus_s1,
            "dS1": r.delta_s1,
            "S2": r.s2,
            "occupations_json": _occupations_json(r.occupations),
        }
        for r in rows
    ]
    emit(args, config, SCAN_COLUMNS, table, scan_annotations(rows))
    if failure is not None:
        raise failure.__cause__ or failure
    return EXIT_OK


def scan_annotations(rows):
    if not rows:
        return {}
    gap = [(r.total_l, r.ln_l_minus_s1) for r in rows if r.ln_l_minus_s1 is not None]
    s1 = [(r.total_l, r.s1) for r in rows]
    ds1 = [(r.delta_l, r.delta_s1) for r in rows]
    out = {
        "maxima_lnL_minus_S1": local_extrema(gap, "max"),
        "minima_S1": local_extrema(s1, "min"),
        "periods_S1": [[list(span), p] for span, p in oscillation_periods(s1)],
        "periods_lnL_minus_S1": [[list(span), p] for span, p in oscillation_periods(gap)],
        "minima_dS1": local_extrema(ds1, "min"),
        "periods_dS1": [[list(span), p] for span, p in oscillation_periods(ds1)],
        "degenerate_L": [r.total_l for r in rows if r.degenerate],
    }
    if len(rows) >= 2:
        out["stable_L"] = stable_angular_momenta(rows)
    return out


def cmd_special(args):
    stat = Statistics.parse(args.stat)
    if min(args.N) < 1:
        raise ConfigError("--N values must be positive")
    if args.mode == "k":
        _positive("k", args.k)
    if args.overlap and stat.is_fermion:
        raise ConfigError("trial overlaps exist for bosons only")
    config = _config(args)
    table = []
    rows = {}
    for n in args.N:
        if args.mode == "LN":
            L = n + min_angular_momentum(n, stat)
            prediction = math.log(n) if stat.is_fermion else None
        else:
            if n < args.k:
                raise ConfigError(f"N={n} is smaller than k={args.k}")
            dl, _ = special_subspace_momentum(n, args.k, stat)
            L = dl + min_angular_momentum(n, stat)
            prediction = qh_entropy_prediction(n, args.k, stat).s1
        row = subspace_row(n, L, stat, args.interaction)
        rows[n] = row
        ov = None
        if args.overlap and n <= TRIAL_CAP:
            trial = symmetrized_product(n, args.k)
            basis = trial.basis
            H = build_hamiltonian(basis, element_table(args.interaction, basis.l_max))
            ov = overlap(trial, ground_state_lanczos(H))
        table.append({"N": n, "L": L, "S1": row.s1, "prediction": prediction, "overlap": ov})
    notes = {
        "dS1": {n: r.delta_s1 for n, r in rows.items()},
        "occupations": {n: list(r.occupations) for n, r in rows.items()},
    }
    if args.mode == "LN" and stat.is_fermion and len(rows) >= 2:
        hit = edge_reconstruction_detector(
            {n: r.occupations for n, r in rows.items()}, {n: r.delta_s1 for n, r in rows.items()}
        )
        notes["edge_transition_N"] = hit.n_particles if hit else None
        notes["edge_entropy_jump"] = hit.entropy_jump if hit else None
    emit(args, config, SPECIAL_COLUMNS, table, notes)
    return EXIT_OK


def cmd_orbitals(args):
    if args.lmax < 0:
        raise ConfigError("--lmax must be >= 0")
    trap = _trap(args)
    config = _config(args)
    orbs = build_orbital_set(args.lmax, trap)
    table = [{"l": l, "epsilon": e} for l, e in enumerate(orbs.energies)]
    emit(args, config, ORBITAL_COLUMNS, table)
    if args.profiles:
        orbs.dump_csv(args.profiles)
    return EXIT_OK


def _trap(args):
    try:
        return TrapConfig(lam=args.lam, r_max=args.r_max, step=args.step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_anharmonic(args):
    trap = _trap(args)
    grid = args.U0
    if any(abs(u) > 0.05 + 1e-12 for u in grid):
        raise ConfigError("--U0 values must lie in [-0.05, 0.05]")
    config = _config(args)
    table = []
    if args.trend:
        if args.L is not None:
            raise ConfigError("--trend sets L from --subspace; drop --L")
        if min(args.trend) < 1:
            raise ConfigError("--trend values must be positive")
        # one curve per N, the Fig. 8 layout
        for n in args.trend:
            L = n if args.subspace == "N" else n * (n - 1)
            rows = strength_scan(n, L, args.lam, grid, with_s2=not args.no_s2, trap=trap)
            table.extend(_anharmonic_row(r) for r in rows)
    else:
        _positive("N", args.N)
        if args.L is None or args.L < 0:
            raise ConfigError("--L must be a non-negative integer")
        rows = strength_scan(args.N, args.L, args.lam, grid, with_s2=not args.no_s2, trap=trap)
        table = [_anharmonic_row(r) for r in rows]
    emit(args, config, ANHARMONIC_COLUMNS, table)
    return EXIT_OK


def _anharmonic_row(r: StrengthScanRow):
    return {
        "N": r.n_particles,
        "L": r.total_l,
        "lambda": r.lam,
        "U0": r.u0,
        "E0": r.energy,
        "S1": r.s1,
        "S2": r.s2,
    }


def cmd_trial(args):
    _positive("N", args.N)
    _positive("k", args.k)
    if args.N < args.k:
        raise ConfigError(f"N={args.N} is smaller than k={args.k}")
    if args.N > TRIAL_CAP:
        raise ConfigError(f"--N above the trial cap {TRIAL_CAP}")
    config = _config(args)
    trial = symmetrized_product(args.N, args.k)
    H = build_hamiltonian(trial.basis, element_table(args.interaction, trial.basis.l_max))
    ov = overlap(trial, ground_state_lanczos(H))
    table = [{"N": args.N, "k": args.k, "L": trial.total_l, "dim": trial.basis.dim, "overlap": ov}]
    emit(args, config, TRIAL_COLUMNS, table)
    if args.amplitudes:
        trial.dump_csv(args.amplitudes)
    return EXIT_OK


# ------------------------------------------------------------------ wiring


def build_parser():
    parser = argparse.ArgumentParser(prog="rotent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rotent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
        p.add_argument("-v", "--verbose", action="store_true")

    kinds = [k.value for k in InteractionKind]
    stats = [s.value for s in Statistics]

    p = sub.add_parser("scan", help="ground states over a range of L")
    p.add_argument("--stat", choices=stats, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--interaction", choices=kinds, default="coulomb")
    p.add_argument("--L", type=int_range)
    p.add_argument("--dL", type=int_range)
    p.add_argument("--s2", action="store_true", help="also compute S2")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("special", help="special subspaces across N")
    p.add_argument("--stat", choices=stats, required=True)
    p.add_argument("--N", type=int_range, required=True)
    p.add_argument("--interaction", choices=kinds, default="coulomb")
    p.add_argument("--mode", choices=("k", "LN"), default="k",
                   help="k: L=(N-Nbar)(N+Nbar-k)/k; LN: L=N (bosons) or dL=N (fermions)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--overlap", action="store_true", help="add trial-state overlaps")
    common(p)
    p.set_defaults(func=cmd_special)

    def trap_flags(p):
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
        p.add_argument("--r-max", dest="r_max", type=float, default=12.0)
        p.add_argument("--step", type=float, default=1e-3)

    p = sub.add_parser("orbitals", help="single-particle energies in the quartic trap")
    trap_flags(p)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--profiles", default=None, help="also dump radial profiles here")
    common(p)
    p.set_defaults(func=cmd_orbitals)

    p = sub.add_parser("anharmonic", help="U0 scans in the quartic trap")
    trap_flags(p)
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--U0", type=float_grid, default=float_grid("-0.05..0.05:21"))
    p.add_argument("--trend", type=int_range, help="N list for S1 at fixed L(N)")
    p.add_argument("--subspace", choices=("N", "N(N-1)"), default="N", help="L(N) used by --trend")
    p.add_argument("--no-s2", action="store_true")
    common(p)
    p.set_defaults(func=cmd_anharmonic)

    p = sub.add_parser("trial", help="trial-state overlap with the ground state")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--interaction", choices=kinds, default="coulomb")
    p.add_argument("--amplitudes", default=None, help="dump trial amplitudes here")
    common(p)
    p.set_defaults(func=cmd_trial)
    return parser


def _glue_negative_values(argv):
    # argparse reads "-0.05..0.05:21" as an option; bind it to its flag instead
    out = []
    for token in argv:
        if (
            out
            and out[-1].startswith("--")
            and "=" not in out[-1]
            and len(token) > 1
            and token[0] == "-"
            and (token[1].isdigit() or token[1] == ".")
        ):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1:
        print("rotent: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, TrialCapExceeded) as exc:
        print(f"rotent: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmptySubspace as exc:
        print(f"rotent: infeasible subspace: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (LanczosError, QuadratureError, OrbitalSolveError, DensityMatrixError, ArithmeticError) as exc:
        print(f"rotent: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Subcommands: simulate, sweep, ergotropy, qgrid, maser-compare,
validate. Exit codes: 0 success, 1 config problem, 2 numerical abort;
failures print a single ``ERR:<category>: ...`` line on stderr. Log
verbosity comes from the QPISTON_LOG environment variable (error,
warn, info, debug).
"""

import argparse
import concurrent.futures
import logging
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import config as configmod
from . import engine, phasespace, reports, svgplot, work
from .errors import (
    ConfigError,
    PositivityError,
    QpistonError,
    TruncationError,
    ValidationError,
)
from .operators import von_neumann_entropy

logger = logging.getLogger("qpiston.cli")

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _snap(x, tol=1e-12):
    return 0.0 if abs(x) < tol else float(x)


def _fmt(x):
    return reports.format_number(x)


def build_parser():
    parser = _Parser(prog="qpiston", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configured scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep", help="rerun a config over values of one key")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--param", required=True,
                   help="dotted key, e.g. piston_channel_override.gamma")
    p.add_argument("--values", required=True,
                   help="comma separated values substituted at the key")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("ergotropy", help="work analysis of a state, no dynamics")
    p.add_argument("--state", required=True,
                   help="fock:N | coherent:A | thermal:NBAR | displaced_thermal:A,NBAR")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--fock-dim", type=int, default=60)

    p = sub.add_parser("qgrid", help="Q function of a state as a CSV matrix")
    p.add_argument("--state", required=True)
    p.add_argument("--fock-dim", type=int, default=40)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("maser-compare",
                       help="micromaser power/efficiency vs the quantized bound")
    p.add_argument("--ra", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--omega0", type=float, required=True)

    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("--config", required=True)

    return parser


def _emit_svgs(report, cfg, out_dir):
    label = cfg.label()
    paths = []
    paths.append(svgplot.line_panel(
        Path(out_dir) / f"{label}.svg",
        report.cycles,
        [
            ("mean energy", report.energy, True),
            ("W_max", report.ergotropy, False),
        ],
        title=label,
        log_y=cfg.output["log_y"],
    ))
    if report.qgrids:
        panels = [
            (f"cycle {_fmt(s.cycle)}", s.grid, s.values) for s in report.qgrids
        ]
        paths.append(svgplot.heat_panel(
            Path(out_dir) / f"{label}_qgrid.svg", panels, title=label
        ))
    return paths


def _run_config(cfg, out_dir):
    scen = cfg.scenario()
    report = engine.run_scenario(scen)
    written = reports.write_report(
        report, out_dir, configmod.config_hash(cfg), config_echo=cfg.as_dict()
    )
    paths = list(written.values())
    if cfg.output["svg"]:
        paths.extend(_emit_svgs(report, cfg, out_dir))
    return report, paths


def cmd_simulate(args):
    cfg = configmod.load_config(args.config)
    _, paths = _run_config(cfg, args.out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _coerce_token(token):
    token = token.strip()
    low = token.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def _set_dotted(raw, dotted, value):
    parts = dotted.split(".")
    node = raw
    for key in parts[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot descend into {key!r} in {dotted!r}")
    node[parts[-1]] = value


def _sweep_job(payload):
    raw, label, out_dir = payload
    cfg = configmod.config_from_dict(raw, default_label=label)
    report, _ = _run_config(cfg, out_dir)
    return (
        label,
        float(report.energy[-1]),
        float(report.ergotropy[-1]),
    )


def cmd_sweep(args):
    cfg = configmod.load_config(args.config)
    tokens = [t for t in args.values.split(",") if t.strip()]
    if not tokens:
        raise ConfigError("sweep needs at least one value")
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")
    leaf = args.param.split(".")[-1]
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    jobs = []
    for token in tokens:
        raw = cfg.as_dict()
        _set_dotted(raw, args.param, _coerce_token(token))
        label = re.sub(r"[^A-Za-z0-9._-]", "-", f"{cfg.label()}_{leaf}_{token.strip()}")
        raw["run"]["label"] = label
        configmod.config_from_dict(raw)
        jobs.append((raw, label, str(out_root / label)))

    if args.jobs == 1:
        rows = [_sweep_job(job) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_job, jobs))

    summary = out_root / "sweep.csv"
    lines = [
        f"# qpiston schema {reports.SCHEMA} config {configmod.config_hash(cfg)}",
        "param,value,label,final_mean_energy,final_W_max",
    ]
    for token, (label, e_final, w_final) in zip(tokens, rows):
        lines.append(
            f"{args.param},{token.strip()},{label},{_fmt(e_final)},{_fmt(w_final)}"
        )
    summary.write_text("\n".join(lines) + "\n")
    for _, label, out_dir in jobs:
        print(f"ran {label} -> {out_dir}")
    print(f"wrote {summary}")
    return 0


def cmd_ergotropy(args):
    spec = engine.StateSpec.parse(args.state)
    if args.nu <= 0:
        raise ConfigError(f"nu must be positive, got {args.nu}")
    if args.fock_dim < 2:
        raise ConfigError(f"fock-dim must be at least 2, got {args.fock_dim}")
    rho = spec.build(args.fock_dim)
    hamiltonian = args.nu * np.diag(np.arange(args.fock_dim, dtype=float))
    w_max = work.ergotropy(rho, hamiltonian)
    s_p = von_neumann_entropy(rho)
    t_p = work.effective_temperature(rho, hamiltonian)
    print(f"state {spec.describe()}")
    print(f"fock_dim {args.fock_dim}")
    print(f"nu {_fmt(args.nu)}")
    print(f"W_max {_fmt(_snap(w_max))}")
    print(f"S_P {_fmt(_snap(s_p))}")
    print(f"T_P {_fmt(_snap(t_p))}")
    return 0


def cmd_qgrid(args):
    spec = engine.StateSpec.parse(args.state)
    if args.points < 2:
        raise ConfigError(f"--points must be at least 2, got {args.points}")
    rho = spec.build(args.fock_dim)
    extent = args.extent
    if extent is None:
        extent = phasespace.suggested_extent(rho)
    grid = phasespace.PhaseGrid(extent, args.points)
    values = phasespace.quasiprobability_grid(rho, grid)
    stamp = configmod.dict_hash({
        "state": spec.describe(),
        "fock_dim": args.fock_dim,
        "points": args.points,
        "extent": extent,
    })
    path = reports.write_qgrid(args.out, grid, values, stamp)
    print(f"wrote {path}")
    return 0


def cmd_maser_compare(args):
    cmp = engine.micromaser_compare(args.ra, args.g, args.tau, args.nu, args.omega0)
    print(f"rate {_fmt(cmp.rate)}")
    print(f"generated_power {_fmt(cmp.generated_power)}")
    print(f"input_power {_fmt(cmp.input_power)}")
    print(f"eta_max {_fmt(cmp.eta_max)}")
    print(f"quantized_eta_bound {_fmt(cmp.quantized_eta_bound)}")
    return 0


def cmd_validate(args):
    cfg = configmod.load_config(args.config)
    scen = cfg.scenario()
    print(
        f"ok label={cfg.label()} mode={scen.mode} lane={scen.resolved_lane()} "
        f"hash={configmod.config_hash(cfg)}"
    )
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "ergotropy": cmd_ergotropy,
    "qgrid": cmd_qgrid,
    "maser-compare": cmd_maser_compare,
    "validate": cmd_validate,
}


def _setup_logging():
    name = os.environ.get("QPISTON_LOG", "warn").lower()
    level = LOG_LEVELS.get(name)
    if level is None:
        level = logging.WARNING
        print(f"unknown QPISTON_LOG value {name!r}, using warn", file=sys.stderr)
    logging.basicConfig(
        level=level, stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("qpiston").setLevel(level)


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"ERR:usage: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"ERR:config: {exc}", file=sys.stderr)
        return 1
    except (PositivityError, TruncationError) as exc:
        print(f"ERR:numeric: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"ERR:numeric: {exc}", file=sys.stderr)
        return 2
    except QpistonError as exc:
        print(f"ERR:internal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

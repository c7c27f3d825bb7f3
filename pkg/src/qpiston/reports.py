"""Report serialization: fixed-precision CSV tables plus one JSON document.

Formatting is pinned at 12 significant digits so identical runs emit
byte-identical files; every CSV opens with a comment carrying the
schema version and the config hash it was produced from.
"""

import json
import math
from pathlib import Path

from .errors import ConfigError

SCHEMA = 1


def format_number(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _stamp(cfg_hash):
    return f"# qpiston schema {SCHEMA} config {cfg_hash}"


def write_table(path, names, columns, cfg_hash):
    """CSV with named columns of equal length."""
    rows = len(columns[0])
    for col in columns:
        if len(col) != rows:
            raise ConfigError("table columns must share a length")
    lines = [_stamp(cfg_hash), ",".join(names)]
    for i in range(rows):
        lines.append(",".join(format_number(col[i]) for col in columns))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_qgrid(path, grid, values, cfg_hash, cycle=0.0):
    """Q-function matrix; the header row records the sampling window."""
    lines = [
        _stamp(cfg_hash),
        "extent,points,cycle",
        ",".join(format_number(v) for v in (grid.extent, grid.points, cycle)),
    ]
    for row in values:
        lines.append(",".join(format_number(v) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    x = float(obj)
    return x if math.isfinite(x) else None


def scenario_nu(report):
    echo = report.config or {}
    for section in ("system", "channel_override"):
        nu = echo.get(section, {}).get("nu")
        if nu is not None:
            return float(nu)
    raise ConfigError("report carries no oscillator frequency in its config echo")


def write_report(report, out_dir, cfg_hash, config_echo=None):
    """Emit energy/work/heat tables, snapshot grids, and report.json.

    Returns a dict mapping logical names to the written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nu = scenario_nu(report)
    written = {}

    written["energy"] = write_table(
        out / "energy.csv",
        ("t_cycles", "mean_energy", "coherent_component"),
        (report.cycles, report.energy, nu * report.amplitude_sq),
        cfg_hash,
    )
    written["work"] = write_table(
        out / "work.csv",
        ("t_cycles", "W_max", "T_P", "S_P", "power_bound"),
        (
            report.cycles,
            report.ergotropy,
            report.passive_temperature,
            report.entropy,
            report.power_bound,
        ),
        cfg_hash,
    )
    written["heat"] = write_table(
        out / "heat.csv",
        ("t_cycles", "J_C", "J_H", "sigma", "eta"),
        (report.cycles, report.heat_cold, report.heat_hot, report.sigma, report.eta),
        cfg_hash,
    )

    qgrid_files = []
    for snap in report.qgrids:
        name = f"qgrid_{format_number(snap.cycle)}.csv"
        written[name] = write_qgrid(
            out / name, snap.grid, snap.values, cfg_hash, cycle=snap.cycle
        )
        qgrid_files.append(name)

    doc = {
        "schema": SCHEMA,
        "config_hash": cfg_hash,
        "config": _json_safe(config_echo if config_echo is not None else report.config),
        "scenario": _json_safe(report.config),
        "mode": report.mode,
        "lane": report.lane,
        "eta_bound": _json_safe(report.eta_bound),
        "deltas": _json_safe(report.deltas),
        "qgrid_files": qgrid_files,
        "columns": {
            "t_cycles": _json_safe(list(report.cycles)),
            "time": _json_safe(list(report.times)),
            "occupation": _json_safe(list(report.occupation)),
            "mean_energy": _json_safe(list(report.energy)),
            "coherent_component": _json_safe(list(nu * report.amplitude_sq)),
            "qubit_energy": _json_safe(list(report.qubit_energy)),
            "W_max": _json_safe(list(report.ergotropy)),
            "S_P": _json_safe(list(report.entropy)),
            "T_P": _json_safe(list(report.passive_temperature)),
            "power_bound": _json_safe(list(report.power_bound)),
            "J_C": _json_safe(list(report.heat_cold)),
            "J_H": _json_safe(list(report.heat_hot)),
            "sigma": _json_safe(list(report.sigma)),
            "eta": _json_safe(list(report.eta)),
        },
    }
    path = out / "report.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    written["report"] = path
    return written

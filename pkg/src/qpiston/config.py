"""Run-configuration files: strict parsing, canonical emission, hashing.

A config is a single JSON document (TOML accepted as an alternate
syntax) with sections ``system``, ``baths``, ``piston_initial``,
``run``, ``output`` and an optional ``piston_channel_override``.
Unknown sections or keys are fatal; every physics invariant is
re-checked by building the actual scenario objects during parsing.
"""

import dataclasses
import hashlib
import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .baths import BathSpectrum, FlatWindow, Gaussian, Lorentzian
from .channel import PistonChannel
from .dynamics import EngineParams
from .engine import Scenario, StateSpec
from .errors import ConfigError

_REQUIRED = object()

_PROFILE_FIELDS = {
    "flat_window": ("omega_lo", "omega_hi", "height"),
    "lorentzian": ("center", "width", "height"),
    "gaussian": ("center", "width", "height"),
}
_PROFILE_TYPES = {
    "flat_window": FlatWindow,
    "lorentzian": Lorentzian,
    "gaussian": Gaussian,
}

_SECTIONS = (
    "system",
    "baths",
    "piston_initial",
    "run",
    "output",
    "piston_channel_override",
)


def _number(section, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(section, key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return value


def _boolean(section, key, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be true or false, got {value!r}")
    return value


def _string(section, key, value):
    if not isinstance(value, str):
        raise ConfigError(f"{section}.{key} must be a string, got {value!r}")
    return value


_COERCE = {
    "number": _number,
    "integer": _integer,
    "boolean": _boolean,
    "string": _string,
}


def _take(section, raw, fields):
    """Extract ``fields`` (name -> (type, default)) from a section dict,
    rejecting anything the schema does not name."""
    if not isinstance(raw, dict):
        raise ConfigError(f"section {section!r} must be a table, got {raw!r}")
    unknown = set(raw) - set(fields)
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {section!r}: {', '.join(sorted(unknown))}"
        )
    out = {}
    for key, (kind, default) in fields.items():
        if key in raw:
            out[key] = _COERCE[kind](section, key, raw[key])
        elif default is _REQUIRED:
            raise ConfigError(f"{section}.{key} is required")
        else:
            out[key] = default
    return out


def _parse_bath(entry, index):
    name = f"baths[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{name} must be a table")
    label = entry.get("label")
    if label not in ("hot", "cold"):
        raise ConfigError(f"{name}.label must be 'hot' or 'cold', got {label!r}")
    profile = entry.get("profile")
    if profile not in _PROFILE_FIELDS:
        raise ConfigError(
            f"{name}.profile must be one of {sorted(_PROFILE_FIELDS)}, got {profile!r}"
        )
    fields = {
        "label": ("string", _REQUIRED),
        "profile": ("string", _REQUIRED),
        "temperature": ("number", _REQUIRED),
    }
    for key in _PROFILE_FIELDS[profile]:
        fields[key] = ("number", _REQUIRED)
    return _take(name, entry, fields)


def _build_spectrum(bath):
    cls = _PROFILE_TYPES[bath["profile"]]
    kwargs = {k: bath[k] for k in _PROFILE_FIELDS[bath["profile"]]}
    return BathSpectrum(bath["label"], bath["temperature"], cls(**kwargs))


@dataclasses.dataclass
class Config:
    """Normalized run configuration; equal configs emit equal JSON."""

    system: dict
    baths: list
    piston_initial: dict
    run: dict
    output: dict
    override: dict

    def as_dict(self):
        out = {
            "system": dict(self.system),
            "piston_initial": dict(self.piston_initial),
            "run": dict(self.run),
            "output": dict(self.output),
        }
        out["run"]["snapshot_cycles"] = list(self.run["snapshot_cycles"])
        if self.baths:
            out["baths"] = [dict(b) for b in self.baths]
        if self.override:
            out["piston_channel_override"] = dict(self.override)
        return out

    def label(self):
        return self.run["label"]

    def params(self):
        if not self.baths:
            return None
        by_label = {b["label"]: b for b in self.baths}
        return EngineParams(
            omega0=self.system["omega0"],
            nu=self.system["nu"],
            g=self.system["g"],
            fock_dim=self.system["fock_dim"],
            hot=_build_spectrum(by_label["hot"]),
            cold=_build_spectrum(by_label["cold"]),
        )

    def channel_override(self):
        if not self.override:
            return None
        return PistonChannel(
            gamma=self.override["gamma"],
            diffusion=self.override["diffusion"],
            nu=self.system["nu"],
            allow_negative_kappa=self.override["allow_negative_kappa"],
        )

    def scenario(self):
        return Scenario(
            state=StateSpec.parse(self.piston_initial["state"]),
            duration_cycles=self.run["duration_cycles"],
            params=self.params(),
            channel_override=self.channel_override(),
            mode=self.run["mode"],
            lane=self.run["lane"],
            records=self.run["records"],
            snapshot_cycles=tuple(self.run["snapshot_cycles"]),
            fock_dim=self.system["fock_dim"],
            halved_sidebands=self.system["halved_sidebands"],
            dressing=self.system["dressing"],
            label=self.run["label"],
        )


def config_from_dict(raw, default_label="scenario"):
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a table, got {type(raw).__name__}")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    for required in ("system", "piston_initial", "run"):
        if required not in raw:
            raise ConfigError(f"missing section {required!r}")

    system = _take(
        "system",
        raw["system"],
        {
            "nu": ("number", _REQUIRED),
            "omega0": ("number", None),
            "g": ("number", None),
            "fock_dim": ("integer", 40),
            "halved_sidebands": ("boolean", False),
            "dressing": ("string", "leading"),
        },
    )

    baths = []
    if "baths" in raw:
        if not isinstance(raw["baths"], list):
            raise ConfigError("section 'baths' must be a list of tables")
        baths = [_parse_bath(entry, i) for i, entry in enumerate(raw["baths"])]
        labels = sorted(b["label"] for b in baths)
        if labels != ["cold", "hot"]:
            raise ConfigError(
                f"baths must declare exactly one 'hot' and one 'cold', got {labels}"
            )
    have_full_system = system["omega0"] is not None or system["g"] is not None
    if have_full_system and (system["omega0"] is None or system["g"] is None):
        raise ConfigError("system.omega0 and system.g must be given together")
    if baths and not have_full_system:
        raise ConfigError("baths require system.omega0 and system.g")
    if have_full_system and not baths:
        raise ConfigError("system.omega0/system.g require a baths section")
    if not have_full_system:
        system = dict(system)
        system.pop("omega0")
        system.pop("g")

    piston_initial = _take(
        "piston_initial", raw["piston_initial"], {"state": ("string", _REQUIRED)}
    )

    run = _take_run(raw["run"], default_label)

    output = _take(
        "output",
        raw.get("output", {}),
        {"log_y": ("boolean", False), "svg": ("boolean", True)},
    )

    override = {}
    if "piston_channel_override" in raw:
        override = _take(
            "piston_channel_override",
            raw["piston_channel_override"],
            {
                "gamma": ("number", _REQUIRED),
                "diffusion": ("number", _REQUIRED),
                "allow_negative_kappa": ("boolean", False),
            },
        )

    cfg = Config(
        system=system,
        baths=baths,
        piston_initial=piston_initial,
        run=run,
        output=output,
        override=override,
    )
    cfg.scenario()
    return cfg


def _take_run(raw, default_label):
    if not isinstance(raw, dict):
        raise ConfigError(f"section 'run' must be a table, got {raw!r}")
    snapshots = raw.get("snapshot_cycles", [])
    if not isinstance(snapshots, list):
        raise ConfigError("run.snapshot_cycles must be a list of numbers")
    snapshots = [_number("run", "snapshot_cycles", v) for v in snapshots]
    rest = {k: v for k, v in raw.items() if k != "snapshot_cycles"}
    run = _take(
        "run",
        rest,
        {
            "duration_cycles": ("number", _REQUIRED),
            "mode": ("string", "reduced"),
            "lane": ("string", "auto"),
            "records": ("integer", 121),
            "label": ("string", default_label),
        },
    )
    run["snapshot_cycles"] = snapshots
    return run


def parse_config(text, fmt="json", default_label="scenario"):
    if fmt == "json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    elif fmt == "toml":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from exc
    else:
        raise ConfigError(f"unknown config format {fmt!r}")
    return config_from_dict(raw, default_label=default_label)


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    fmt = "toml" if path.suffix.lower() == ".toml" else "json"
    return parse_config(path.read_text(), fmt=fmt, default_label=path.stem)


def emit_config(cfg):
    """Canonical JSON text; parse_config(emit_config(c)) reproduces c."""
    return json.dumps(cfg.as_dict(), indent=2, sort_keys=True) + "\n"


def dict_hash(payload):
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def config_hash(cfg):
    return dict_hash(cfg.as_dict())

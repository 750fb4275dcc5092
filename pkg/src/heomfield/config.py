"""TOML configuration loading with strict validation.

Every run is described by a single TOML file; command line overrides edit
the parsed tree before validation, so nothing can bypass the checks here.
Validation resolves all defaults and returns a plain nested dict, which is
echoed verbatim into output headers and can be parsed again to reproduce
the exact run.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .errors import ConfigError
from .heom import BathParams, FieldChannel, OuProcess
from .lindblad import MarkovParams, Picture
from .operators import (
    CouplingMode,
    excited_state,
    ground_state,
    maximally_mixed_state,
    plus_state,
)
from .propagate import SimConfig, SteadyMethod, StochasticField
from .spectrum import SpectrumConfig

_INITIAL_STATES = {
    "excited": excited_state,
    "ground": ground_state,
    "plus": plus_state,
    "mixed": maximally_mixed_state,
}

_SERIES = ("heom", "heom_full", "heom_rwa", "markovian")
_REDUCES = ("steady", "trajectory", "spectrum")


class _Table:
    """One TOML table with consumed-key tracking for unknown-key errors."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'config'} must be a table")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def _label(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def take(self, key: str, kind: str, default=None, *, required: bool = False):
        self.seen.add(key)
        # An explicit null means "unset": resolved configs echoed into CSV
        # headers carry None for optional keys and must re-validate cleanly.
        if key not in self.data or self.data[key] is None:
            if required:
                raise ConfigError(f"missing required key {self._label(key)}")
            return default
        value = self.data[key]
        label = self._label(key)
        if kind == "bool":
            if not isinstance(value, bool):
                raise ConfigError(f"{label} must be a boolean, got {value!r}")
            return value
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{label} must be an integer, got {value!r}")
            return value
        if kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{label} must be a number, got {value!r}")
            value = float(value)
            if not math.isfinite(value):
                raise ConfigError(f"{label} must be finite, got {value!r}")
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise ConfigError(f"{label} must be a string, got {value!r}")
            return value
        if kind == "table":
            return _Table(value if value is not None else {}, label)
        if kind == "list":
            if not isinstance(value, list):
                raise ConfigError(f"{label} must be a list, got {value!r}")
            return value
        raise AssertionError(kind)

    def choice(self, key: str, options, default=None, *, required: bool = False):
        value = self.take(key, "str", default, required=required)
        if value is not None and value not in options:
            raise ConfigError(
                f"{self._label(key)} must be one of {', '.join(options)}, got {value!r}"
            )
        return value

    def finish(self) -> None:
        unknown = sorted(set(self.data) - self.seen)
        if unknown:
            label = self._label(unknown[0])
            raise ConfigError(f"unknown key {label!r}")


def _positive(value, label):
    if value is not None and value <= 0:
        raise ConfigError(f"{label} must be > 0, got {value}")
    return value


def _nonnegative(value, label):
    if value is not None and value < 0:
        raise ConfigError(f"{label} must be >= 0, got {value}")
    return value


def _resolve_process(
    table: _Table | None, name: str, template: dict
) -> dict:
    if table is None:
        enabled = template["enabled"]
        gamma = template["gamma"]
        delta_sq = template["delta_sq"]
    else:
        enabled = table.take("enabled", "bool", True)
        gamma = table.take("gamma", "float", template["gamma"])
        delta_sq = table.take("delta_sq", "float", template["delta_sq"])
        table.finish()
    if enabled:
        if gamma is None:
            raise ConfigError(f"field.{name}: gamma is required when enabled")
        if delta_sq is None:
            raise ConfigError(f"field.{name}: delta_sq is required when enabled")
        _positive(gamma, f"field.{name}.gamma")
        _nonnegative(delta_sq, f"field.{name}.delta_sq")
    return {
        "enabled": bool(enabled),
        "gamma": float(gamma) if gamma is not None else 1.0,
        "delta_sq": float(delta_sq) if delta_sq is not None else 0.0,
    }


def validate_config(tree: dict) -> dict:
    """Check a parsed TOML tree and return it with all defaults applied."""
    root = _Table(tree, "")

    system = root.take("system", "table", _Table({}, "system"))
    omega0 = _positive(system.take("omega0", "float", 1.0), "system.omega0")
    initial = system.choice("initial_state", tuple(_INITIAL_STATES), "excited")
    system.finish()

    hierarchy = root.take("hierarchy", "table", _Table({}, "hierarchy"))
    depth = hierarchy.take("depth", "int", 8)
    if depth < 0:
        raise ConfigError(f"hierarchy.depth must be >= 0, got {depth}")
    rescale = hierarchy.take("rescale", "bool", True)
    max_indices = hierarchy.take("max_indices", "int")
    _positive(max_indices, "hierarchy.max_indices")
    hierarchy.finish()

    integ = root.take("integration", "table", _Table({}, "integration"))
    dt = _positive(integ.take("dt", "float", 0.02), "integration.dt")
    t_max = _positive(integ.take("t_max", "float", 50.0), "integration.t_max")
    steady_tol = _positive(
        integ.take("steady_tol", "float", 1e-9), "integration.steady_tol"
    )
    stride = integ.take("sample_stride", "int", 1)
    if stride < 1:
        raise ConfigError(f"integration.sample_stride must be >= 1, got {stride}")
    integ.finish()

    bath = root.take("bath", "table", _Table({}, "bath"))
    bath_enabled = bath.take("enabled", "bool", False)
    coupling = bath.choice("coupling", ("full", "rwa"), "full")
    bath_gamma = bath.take("gamma", "float", 1.0 if not bath_enabled else None)
    bath_delta_sq = bath.take("delta_sq", "float", 0.0 if not bath_enabled else None)
    bath_beta = bath.take("beta", "float", 0.0)
    if bath_enabled:
        if bath_gamma is None:
            raise ConfigError("bath.gamma is required when the bath is enabled")
        if bath_delta_sq is None:
            raise ConfigError("bath.delta_sq is required when the bath is enabled")
    _positive(bath_gamma, "bath.gamma")
    _nonnegative(bath_delta_sq, "bath.delta_sq")
    _nonnegative(bath_beta, "bath.beta")
    bath.finish()

    fld = root.take("field", "table", _Table({}, "field"))
    template = {
        "enabled": fld.take("enabled", "bool", False),
        "gamma": fld.take("gamma", "float"),
        "delta_sq": fld.take("delta_sq", "float"),
    }
    processes = {}
    for name in ("dephasing", "relax_re", "relax_im"):
        sub = fld.take(name, "table")
        processes[name] = _resolve_process(sub, name, template)
    fld.finish()

    spect = root.take("spectrum", "table", _Table({}, "spectrum"))
    spectrum = {
        "tau_max": _positive(spect.take("tau_max", "float", 150.0), "spectrum.tau_max"),
        "dtau": _positive(spect.take("dtau", "float", 0.05), "spectrum.dtau"),
        "substeps": spect.take("substeps", "int", 1),
        "omega_min": spect.take("omega_min", "float", -2.0),
        "omega_max": spect.take("omega_max", "float", 3.0),
        "omega_points": spect.take("omega_points", "int", 501),
        "window_rate": _nonnegative(
            spect.take("window_rate", "float", 0.0), "spectrum.window_rate"
        ),
        "t1": _nonnegative(spect.take("t1", "float"), "spectrum.t1"),
        "steady_method": spect.choice(
            "steady_method", ("propagate", "nullspace"), "propagate"
        ),
    }
    if spectrum["substeps"] < 1:
        raise ConfigError("spectrum.substeps must be >= 1")
    if spectrum["omega_points"] < 2:
        raise ConfigError("spectrum.omega_points must be >= 2")
    if spectrum["omega_max"] <= spectrum["omega_min"]:
        raise ConfigError("spectrum.omega_max must exceed spectrum.omega_min")
    spect.finish()

    mc = root.take("mc", "table", _Table({}, "mc"))
    mc_out = {
        "n_traj": mc.take("n_traj", "int", 20000),
        "seed": mc.take("seed", "int", 12345),
        "batch_size": mc.take("batch_size", "int", 2000),
    }
    if mc_out["n_traj"] < 100:
        raise ConfigError("mc.n_traj must be >= 100")
    if mc_out["batch_size"] < 1:
        raise ConfigError("mc.batch_size must be >= 1")
    mc.finish()

    steady = root.take("steady", "table", _Table({}, "steady"))
    steady_out = {
        "method": steady.choice("method", ("propagate", "nullspace", "both"), "both")
    }
    steady.finish()

    run = root.take("run", "table", _Table({}, "run"))
    series = run.take("series", "list", ["heom"])
    for entry in series:
        if entry not in _SERIES:
            raise ConfigError(
                f"run.series entries must be among {', '.join(_SERIES)}, got {entry!r}"
            )
    if not series:
        raise ConfigError("run.series must not be empty")
    picture = run.choice(
        "markovian_picture", ("schroedinger", "interaction"), "schroedinger"
    )
    run.finish()

    swp = root.take("sweep", "table", _Table({}, "sweep"))
    values = swp.take("values", "list")
    if values is not None:
        checked = []
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"sweep.values entries must be numbers, got {v!r}")
            checked.append(float(v))
        values = checked
    sweep_out = {
        "axis": swp.take("axis", "str"),
        "values": values,
        "start": swp.take("start", "float"),
        "stop": swp.take("stop", "float"),
        "count": swp.take("count", "int"),
        "reduce": swp.choice("reduce", _REDUCES, "steady"),
    }
    swp.finish()

    root.finish()

    any_bath_series = any(s in ("heom_full", "heom_rwa") for s in series)
    if any_bath_series and not bath_enabled:
        raise ConfigError(
            "run.series asks for a bath coupling variant but the bath is disabled"
        )

    return {
        "system": {"omega0": omega0, "initial_state": initial},
        "hierarchy": {
            "depth": depth,
            "rescale": rescale,
            "max_indices": max_indices,
        },
        "integration": {
            "dt": dt,
            "t_max": t_max,
            "steady_tol": steady_tol,
            "sample_stride": stride,
        },
        "bath": {
            "enabled": bath_enabled,
            "coupling": coupling,
            "gamma": float(bath_gamma),
            "delta_sq": float(bath_delta_sq),
            "beta": float(bath_beta),
        },
        "field": processes,
        "spectrum": spectrum,
        "mc": mc_out,
        "steady": steady_out,
        "run": {"series": list(series), "markovian_picture": picture},
        "sweep": sweep_out,
    }


def load_config(path: str | Path) -> dict:
    """Parse and validate a TOML file."""
    try:
        with open(path, "rb") as fh:
            tree = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return validate_config(tree)


def parse_override(expr: str) -> tuple[str, Any]:
    """Parse one ``key=value`` override into a dotted path and a value."""
    if "=" not in expr:
        raise ConfigError(f"override must look like key=value, got {expr!r}")
    key, raw = expr.split("=", 1)
    key = key.strip()
    raw = raw.strip()
    if not key:
        raise ConfigError(f"override has an empty key: {expr!r}")
    if raw in ("true", "false"):
        return key, raw == "true"
    try:
        return key, int(raw)
    except ValueError:
        pass
    try:
        return key, float(raw)
    except ValueError:
        pass
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return key, []
        items = []
        for part in inner.split(","):
            part = part.strip()
            try:
                items.append(int(part))
            except ValueError:
                try:
                    items.append(float(part))
                except ValueError:
                    items.append(part.strip('"'))
        return key, items
    return key, raw.strip('"')


def apply_override(tree: dict, path: str, value: Any) -> None:
    """Set one dotted key in the raw config tree, creating tables as needed."""
    parts = path.split(".")
    node = tree
    for part in parts[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"override path {path!r} crosses a non-table key")
        node = nxt
    node[parts[-1]] = value


def _ou_process(kind: FieldChannel, proc: dict) -> OuProcess:
    if not proc["enabled"]:
        return OuProcess.disabled(kind)
    return OuProcess(
        kind=kind,
        delta=math.sqrt(proc["delta_sq"]),
        gamma=proc["gamma"],
        enabled=True,
    )


def stochastic_field(resolved: dict) -> StochasticField:
    f = resolved["field"]
    return StochasticField(
        dephasing=_ou_process(FieldChannel.DEPHASING, f["dephasing"]),
        relax_re=_ou_process(FieldChannel.RELAX_RE, f["relax_re"]),
        relax_im=_ou_process(FieldChannel.RELAX_IM, f["relax_im"]),
    )


def bath_params(resolved: dict, coupling: str | None = None) -> BathParams:
    b = resolved["bath"]
    if not b["enabled"]:
        return BathParams.disabled()
    mode = CouplingMode(coupling or b["coupling"])
    return BathParams(
        delta_sq=b["delta_sq"],
        gamma=b["gamma"],
        beta=b["beta"],
        mode=mode,
        enabled=True,
    )


def sim_config(resolved: dict, *, coupling: str | None = None) -> SimConfig:
    """Build the hierarchy inputs from a resolved config."""
    return SimConfig(
        bath=bath_params(resolved, coupling),
        field=stochastic_field(resolved),
        depth=resolved["hierarchy"]["depth"],
        omega0=resolved["system"]["omega0"],
        dt=resolved["integration"]["dt"],
        t_max=resolved["integration"]["t_max"],
        steady_tol=resolved["integration"]["steady_tol"],
        sample_stride=resolved["integration"]["sample_stride"],
        initial_state=_INITIAL_STATES[resolved["system"]["initial_state"]](),
        rescale=resolved["hierarchy"]["rescale"],
        max_indices=resolved["hierarchy"]["max_indices"],
    )


def markov_params(resolved: dict) -> MarkovParams:
    return MarkovParams(
        bath=bath_params(resolved),
        field=stochastic_field(resolved),
        picture=Picture(resolved["run"]["markovian_picture"]),
        omega0=resolved["system"]["omega0"],
    )


def spectrum_config(resolved: dict, *, coupling: str | None = None) -> SpectrumConfig:
    s = resolved["spectrum"]
    grid = np.linspace(s["omega_min"], s["omega_max"], s["omega_points"])
    return SpectrumConfig(
        sim=sim_config(resolved, coupling=coupling),
        tau_max=s["tau_max"],
        dtau=s["dtau"],
        omega_grid=grid,
        t1=s["t1"],
        window_rate=s["window_rate"] or None,
        substeps=s["substeps"],
        steady_method=SteadyMethod(s["steady_method"]),
    )


def sweep_values(resolved: dict) -> list[float]:
    s = resolved["sweep"]
    if s["values"] is not None:
        if not s["values"]:
            return []
        return list(s["values"])
    if s["start"] is None or s["stop"] is None or s["count"] is None:
        raise ConfigError(
            "sweep needs either sweep.values or sweep.start/stop/count"
        )
    if s["count"] < 1:
        raise ConfigError("sweep.count must be >= 1")
    return list(np.linspace(s["start"], s["stop"], s["count"]))

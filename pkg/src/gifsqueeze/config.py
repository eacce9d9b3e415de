"""Run configuration: INI schema, validation, and defaults.

Flat sectioned key/value files; every key has a typed default below and
unknown sections or keys are rejected.  The fully resolved configuration
(defaults included) is what run metadata records.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .integrate import IntegratorOptions
from .multimode import WavegridConfig
from .supermodes import TruncationConfig

RUN_KINDS = ("single", "multimode-gif", "nongaussian", "oracle", "units")


class ConfigError(ValueError):
    """Invalid, unknown, or inconsistent configuration input."""


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"invalid boolean {text!r}")


def _parse_list(cast):
    def parse(text: str):
        items = [p.strip() for p in text.split(",") if p.strip()]
        return tuple(cast(p) for p in items)
    return parse


_PARSERS = {
    "str": str,
    "int": int,
    "float": float,
    "bool": _parse_bool,
    "ints": _parse_list(int),
    "floats": _parse_list(float),
}

# section -> key -> (type name, default)
SCHEMA: dict[str, dict[str, tuple[str, Any]]] = {
    "run": {
        "kind": ("str", "multimode-gif"),
        "label": ("str", "run"),
        "t_final": ("float", 0.8),
        "sample_count": ("int", 33),
        "rtol": ("float", 1e-11),
        "atol": ("float", 1e-13),
        "fixed_step": ("float", 0.0),  # 0 = adaptive
    },
    "grid": {
        "m": ("int", 64),
        "s_max": ("float", 4.0),
        "d0": ("float", 0.0),
        "d1": ("float", 0.0),
        "d2": ("float", 0.3),
    },
    "pump": {
        "shape": ("str", "gaussian"),
        "n_sh0": ("float", 10.0),
        "min_coverage": ("float", 1.0 - 1e-6),
    },
    "single": {
        "delta": ("float", -0.5),
        "beta0_re": ("float", 1.0),
        "beta0_im": ("float", 0.0),
        "lab_cutoffs": ("ints", (60, 26)),
        "gif_cutoffs": ("ints", (90, 34)),
    },
    "models": {
        "m_fh": ("int", 2),
        "signal_cutoffs": ("ints", (12, 8)),
        "pump_cutoffs": ("ints", (10, 6, 5)),
        "dt_basis": ("float", 1e-3),
    },
    "loss": {
        "transmissivity": ("float", 1.0),
    },
    "wigner": {
        "enabled": ("bool", False),
        "mode": ("int", 0),
        "frame": ("str", "gif"),
        "extent": ("float", 4.0),
        "points": ("int", 81),
        "hybrid": ("bool", False),
        "hybrid_phi": ("float", 0.0),
        "hybrid_theta": ("float", 0.0),
    },
    "oracle": {
        "signal_cutoffs": ("ints", (6, 6, 6)),
        "pump_cutoffs": ("ints", (2, 4, 16, 4, 2)),
    },
    "units": {
        "lambda_sh_nm": ("float", 456.5),
        "eta_w_cm2": ("float", 330.0),
        "k2_fs2_mm": ("float", 1.0),
        "r": ("float", 0.18),
        "l_loss_m": ("float", 1.0),
    },
}


@dataclass
class RunConfig:
    """Fully resolved, validated run configuration."""

    values: dict[str, dict[str, Any]]

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.values[section]

    @property
    def kind(self) -> str:
        return self.values["run"]["kind"]

    def sample_times(self) -> tuple[float, ...]:
        run = self.values["run"]
        n = run["sample_count"]
        if n < 1:
            raise ConfigError("sample_count must be >= 1")
        ts = np.linspace(0.0, run["t_final"], n + 1)[1:]
        return tuple(float(t) for t in ts)

    def integrator_options(self) -> IntegratorOptions:
        run = self.values["run"]
        fixed = run["fixed_step"] if run["fixed_step"] > 0 else None
        return IntegratorOptions(rtol=run["rtol"], atol=run["atol"],
                                 fixed_step=fixed)

    def wavegrid(self) -> WavegridConfig:
        g = self.values["grid"]
        return WavegridConfig(m=g["m"], s_max=g["s_max"],
                              d0=g["d0"], d1=g["d1"], d2=g["d2"])

    def truncation(self) -> TruncationConfig:
        mo = self.values["models"]
        return TruncationConfig(m_fh=mo["m_fh"],
                                signal_cutoffs=tuple(mo["signal_cutoffs"]),
                                pump_cutoffs=tuple(mo["pump_cutoffs"]),
                                dt_basis=mo["dt_basis"])

    def resolved(self) -> dict[str, dict[str, Any]]:
        """JSON-serializable copy of every (default or explicit) value."""
        out = {}
        for section, keys in self.values.items():
            out[section] = {k: (list(v) if isinstance(v, tuple) else v)
                            for k, v in keys.items()}
        return out


def _defaults() -> dict[str, dict[str, Any]]:
    return {section: {k: default for k, (_, default) in keys.items()}
            for section, keys in SCHEMA.items()}


def _apply(values: dict, section: str, key: str, raw: str) -> None:
    if section not in SCHEMA:
        raise ConfigError(f"unknown section [{section}]")
    if key not in SCHEMA[section]:
        raise ConfigError(f"unknown key {key!r} in section [{section}]")
    type_name, _ = SCHEMA[section][key]
    try:
        values[section][key] = _PARSERS[type_name](raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(
            f"bad value for {section}.{key}: {raw!r} ({exc})") from exc


def _validate(values: dict) -> None:
    kind = values["run"]["kind"]
    if kind not in RUN_KINDS:
        raise ConfigError(f"unknown run kind {kind!r}; expected one of {RUN_KINDS}")
    if values["run"]["t_final"] <= 0 and kind != "units":
        raise ConfigError("t_final must be positive")
    if values["pump"]["shape"] != "gaussian":
        raise ConfigError("only the gaussian pump shape is supported")
    if not 0.0 <= values["loss"]["transmissivity"] <= 1.0:
        raise ConfigError("transmissivity must lie in [0, 1]")
    if values["wigner"]["frame"] not in ("gif", "lab"):
        raise ConfigError("wigner frame must be 'gif' or 'lab'")
    mo = values["models"]
    if len(mo["signal_cutoffs"]) != mo["m_fh"] or \
            len(mo["pump_cutoffs"]) != 2 * mo["m_fh"] - 1:
        raise ConfigError(
            "models.signal_cutoffs needs m_fh entries and models.pump_cutoffs "
            "needs 2*m_fh - 1 entries")
    if kind == "oracle":
        m = values["grid"]["m"]
        if len(values["oracle"]["signal_cutoffs"]) != m or \
                len(values["oracle"]["pump_cutoffs"]) != 2 * m - 1:
            raise ConfigError(
                "oracle cutoff lists must match grid.m and 2*grid.m - 1")


def load_config(path: str | None = None,
                overrides: list[str] | None = None) -> RunConfig:
    """Load an INI file (or pure defaults) and apply section.key=value overrides."""
    values = _defaults()
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path!r}")
        for section in parser.sections():
            for key, raw in parser.items(section):
                _apply(values, section, key, raw)
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(
                f"override {item!r} must look like section.key=value")
        target, raw = item.split("=", 1)
        section, key = target.split(".", 1)
        _apply(values, section.strip(), key.strip(), raw.strip())
    _validate(values)
    return RunConfig(values)

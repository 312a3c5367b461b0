"""JSON configuration for the dispatch algorithm and the plant.

Two file kinds: an algorithm config mirroring AlgoConfig's nesting
(safety / explore / ssd / top-level solver knobs), and a plant config
holding a list of compressor descriptions.  Loading validates
everything and rejects unknown keys, so a typo fails loudly instead of
silently running defaults.  ConfigError carries the offending file and
key path.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, List, Mapping

from .plant import CompressorSpec
from .rto import AlgoConfig, ExploreConfig, SafetyConfig
from .steady import SsdConfig

__all__ = ["ConfigError", "load_algo_config", "save_algo_config", "load_plant", "save_plant"]


class ConfigError(ValueError):
    """Bad configuration file: carries file path and key context."""

    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{path}: {message}")


def _read_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(path, f"cannot read file: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _pick(path, obj: Mapping, section: str, allowed: Mapping[str, type]) -> dict:
    if not isinstance(obj, Mapping):
        raise ConfigError(path, f"{section}: expected an object")
    out = {}
    for key, value in obj.items():
        if key not in allowed:
            raise ConfigError(path, f"{section}: unknown key {key!r}")
        want = allowed[key]
        if value is None and key in _OPTIONAL_KEYS:
            out[key] = None
            continue
        if want is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            out[key] = float(value)
        elif want is int and isinstance(value, int) and not isinstance(value, bool):
            out[key] = int(value)
        elif want is str and isinstance(value, str):
            out[key] = value
        else:
            raise ConfigError(path, f"{section}.{key}: expected {want.__name__}")
    return out


_OPTIONAL_KEYS = {"beta_override", "trust_region_kw"}

_SAFETY_KEYS = {
    "power_cap_kw": float,
    "delta": float,
    "beta_override": float,
    "grid_size": int,
}
_EXPLORE_KEYS = {"z_active": float, "alpha_demand_kw": float}
_SSD_KEYS = {"window_s": int, "alpha": float, "min_resid_std_kw": float}
_TOP_KEYS = {
    "noise_std_kw": float,
    "multistart_count": int,
    "trust_region_kw": float,
    "rto_period_s": float,
}


def load_algo_config(path) -> AlgoConfig:
    """Read an algorithm config; missing keys fall back to defaults."""
    raw = _read_json(path)
    if not isinstance(raw, Mapping):
        raise ConfigError(path, "top level must be an object")
    known_sections = {"safety", "explore", "ssd"} | set(_TOP_KEYS)
    for key in raw:
        if key not in known_sections:
            raise ConfigError(path, f"unknown key {key!r}")
    safety = SafetyConfig(**_pick(path, raw.get("safety", {}), "safety", _SAFETY_KEYS))
    explore = ExploreConfig(**_pick(path, raw.get("explore", {}), "explore", _EXPLORE_KEYS))
    ssd = SsdConfig(**_pick(path, raw.get("ssd", {}), "ssd", _SSD_KEYS))
    top = _pick(path, {k: v for k, v in raw.items() if k in _TOP_KEYS}, "top", _TOP_KEYS)
    cfg = AlgoConfig(safety=safety, explore=explore, ssd=ssd, **top)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    return cfg


def save_algo_config(cfg: AlgoConfig, path) -> None:
    cfg.validate()
    doc = {
        "safety": {
            "power_cap_kw": cfg.safety.power_cap_kw,
            "delta": cfg.safety.delta,
            "beta_override": cfg.safety.beta_override,
            "grid_size": cfg.safety.grid_size,
        },
        "explore": {
            "z_active": cfg.explore.z_active,
            "alpha_demand_kw": cfg.explore.alpha_demand_kw,
        },
        "ssd": {
            "window_s": cfg.ssd.window_s,
            "alpha": cfg.ssd.alpha,
            "min_resid_std_kw": cfg.ssd.min_resid_std_kw,
        },
        "noise_std_kw": cfg.noise_std_kw,
        "multistart_count": cfg.multistart_count,
        "trust_region_kw": cfg.trust_region_kw,
        "rto_period_s": cfg.rto_period_s,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


_COMP_KEYS = {
    "name": str,
    "size_class": str,
    "min_load_kw": float,
    "max_load_kw": float,
    "a": float,
    "b": float,
    "c": float,
    "tau_s": float,
}
_COMP_REQUIRED = set(_COMP_KEYS)


def load_plant(path) -> List[CompressorSpec]:
    """Read a plant config: a JSON list of compressor objects."""
    raw = _read_json(path)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(path, "top level must be a non-empty list of compressors")
    specs = []
    names = set()
    for i, entry in enumerate(raw):
        section = f"compressor[{i}]"
        fields = _pick(path, entry, section, _COMP_KEYS)
        missing = _COMP_REQUIRED - set(fields)
        if missing:
            raise ConfigError(path, f"{section}: missing keys {sorted(missing)}")
        spec = CompressorSpec(
            name=fields["name"],
            size_class=fields["size_class"],
            min_load_kw=fields["min_load_kw"],
            max_load_kw=fields["max_load_kw"],
            power_poly=(fields["a"], fields["b"], fields["c"]),
            tau_s=fields["tau_s"],
        )
        try:
            spec.validate()
        except ValueError as exc:
            raise ConfigError(path, f"{section}: {exc}") from exc
        if spec.name in names:
            raise ConfigError(path, f"{section}: duplicate name {spec.name!r}")
        names.add(spec.name)
        specs.append(spec)
    return specs


def save_plant(specs: List[CompressorSpec], path) -> None:
    doc = []
    for s in specs:
        s.validate()
        a, b, c = s.power_poly
        doc.append(
            {
                "name": s.name,
                "size_class": s.size_class,
                "min_load_kw": s.min_load_kw,
                "max_load_kw": s.max_load_kw,
                "a": a,
                "b": b,
                "c": c,
                "tau_s": s.tau_s,
            }
        )
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")

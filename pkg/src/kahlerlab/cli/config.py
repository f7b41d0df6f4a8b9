"""Run configuration: defaults for every suite, YAML overrides, strict keys."""
from __future__ import annotations

import copy
from pathlib import Path

import yaml

from ..errors import ConfigError

SUITES = ("curvature", "averages", "royden", "schwarz", "ma", "hyperbolicity")

DEFAULTS = {
    "suite": "all",
    "seed": 0,
    "tol_scale": 1.0,
    "parallel": False,
    "out": None,
    "curvature": {
        # list of {name, params}; None means the whole catalogue at its sample parameters
        "models": None,
        "points_per_model": 20,
        "symmetry_points": 50,
        "kahler_points": 100,
    },
    "averages": {
        "max_moment_n": 6,
        "tensors_per_n": 100,
        "dims": [1, 2, 3],
        "mc_samples": 1_000_000,
        "mc_workers": 1,
        "mode": "exact",
        "sign_trials": 50,
    },
    "royden": {
        "trials": 1000,
        "n_min": 1,
        "n_max": 4,
        "nu_max": 4,
        "polarization_trials": 100,
    },
    "schwarz": {
        "h": 1.0e-3,
        "points_per_pair": 70,
        "trace_lemma_count": 100_000,
        "dual_path_pairs": 500,
        # extra {base, prime, base_params, prime_params, point, lambda, mu, kappa} entries
        "pairs": [],
    },
    "ma": {
        "grid": 128,
        "eps": 0.5,
        "amplitude": 0.1,
        "flat_eps": [0.4, 0.2, 0.1],
        "sweep_eps": [0.4, 0.2, 0.1, 0.05],
        "eps0": 1.0,
        "n2": True,
        "n2_grid": 16,
        "n2_coupling": 0.2,
    },
    "hyperbolicity": {
        "triangle_triples": 10_000,
        "disc_maps": 20,
        # extra {genus, degree, multiplicities, kappa, expect} entries
        "curves": [],
        "surface_example": {"g": 2, "a": 4, "b": 5, "d": 4},
    },
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be a mapping")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Defaults, then the YAML file at ``path``, then ``overrides``; unknown keys raise ConfigError."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a mapping at the top level")
        cfg = _merge(cfg, data)
    if overrides:
        cfg = _merge(cfg, overrides)
    if cfg["suite"] not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {cfg['suite']!r}")
    if not float(cfg["tol_scale"]) > 0:
        raise ConfigError("tol_scale must be positive")
    _check_entries(cfg)
    return cfg


_PAIR_KEYS = {"base", "prime", "base_params", "prime_params", "point", "lambda", "mu", "kappa"}
_CURVE_KEYS = {"genus", "degree", "multiplicities", "kappa", "expect"}


def _entries(value, where: str, allowed: set, required: set) -> None:
    if not isinstance(value, list):
        raise ConfigError(f"{where!r} must be a list")
    for i, item in enumerate(value):
        if not isinstance(item, dict):
            raise ConfigError(f"{where}[{i}] must be a mapping")
        extra = set(item) - allowed
        if extra:
            raise ConfigError(f"unknown configuration key {where}[{i}].{sorted(extra)[0]!r}")
        missing = required - set(item)
        if missing:
            raise ConfigError(f"{where}[{i}] lacks {sorted(missing)}")


def _check_entries(cfg: dict) -> None:
    """Validate list-valued entries up front so a bad file produces no partial reports."""
    from ..geometry.models import MODEL_NAMES

    models = cfg["curvature"]["models"]
    if models is not None:
        _entries(models, "curvature.models", {"name", "params"}, {"name"})
        for m in models:
            if m["name"] not in MODEL_NAMES:
                raise ConfigError(f"unknown model {m['name']!r}")
    _entries(cfg["schwarz"]["pairs"], "schwarz.pairs", _PAIR_KEYS, {"base", "prime", "point"})
    for p in cfg["schwarz"]["pairs"]:
        for key in ("base", "prime"):
            if p[key] not in MODEL_NAMES:
                raise ConfigError(f"unknown model {p[key]!r}")
    _entries(cfg["hyperbolicity"]["curves"], "hyperbolicity.curves", _CURVE_KEYS,
             {"genus", "degree", "kappa"})
    for c in cfg["hyperbolicity"]["curves"]:
        if c.get("expect", "consistent") not in ("consistent", "obstructed"):
            raise ConfigError("curve 'expect' must be 'consistent' or 'obstructed'")
    if cfg["averages"]["mode"] not in ("exact", "monte-carlo"):
        raise ConfigError("averages.mode must be 'exact' or 'monte-carlo'")

"""Run configuration: flat `key = value` text with dotted keys and # comments.

Example::

    problem = two_patch
    nonlinearity.name = pme
    nonlinearity.m = 2
    dx = 0.01
    cfl_mode = relaxed
    horizon = 1.5
    patch_hat.C = 0.6666666666666666
    patch_hat.x0 = 0
    patch_hat.t0 = 1
    patch_check.C = 0.16666666666666666
    patch_check.x0 = 3.7797631496846193
    patch_check.t0 = 1

Unknown keys are rejected. Tabulated initial data replaces patch.C/x0/t0 with
patch.table = <csv of x,v rows> (optionally patch.support / patch.M / patch.gamma0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import barenblatt as bb
from .mesh import CflMode
from .nonlinearity import Nonlinearity, make_nonlinearity
from .runner import PatchSpec


class ConfigError(ValueError):
    pass


_PATCH_KEYS = {"C", "x0", "t0", "table", "support", "M", "gamma0"}
_SCALAR_KEYS = {
    "problem",
    "dx",
    "cfl_mode",
    "horizon",
    "stepper",
    "snapshot_times",
    "snapshot_cadence",
    "beta_impl",
    "nonlinearity.name",
    "nonlinearity.m",
    "nonlinearity.alpha",
    "override.dt",
    "override.eps",
}


def parse_kv(text: str) -> dict:
    """Parse `key = value` lines; values become float, list[float], or str."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = _parse_value(val)
    return out


def _parse_value(val: str):
    if "," in val:
        try:
            return [float(p) for p in val.split(",") if p.strip()]
        except ValueError:
            raise ConfigError(f"bad list value {val!r}")
    try:
        return float(val)
    except ValueError:
        return val


@dataclass
class RunConfig:
    problem: str
    nl: Nonlinearity
    dx: float
    horizon: float
    mode: CflMode = CflMode.RELAXED
    stepper: str = "explicit"
    snapshot_times: list[float] = field(default_factory=list)
    snapshot_cadence: float | None = None
    beta_impl: float | None = None
    dt_override: float | None = None
    eps_override: float | None = None
    patches: list[PatchSpec] = field(default_factory=list)


def _as_float(kv: dict, key: str, required: bool = False, default=None):
    if key not in kv:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    v = kv[key]
    if not isinstance(v, float):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    return v


def _patch_spec(kv: dict, prefix: str, base_dir: Path) -> PatchSpec:
    keys = {k.split(".", 1)[1] for k in kv if k.startswith(prefix + ".")}
    if not keys:
        raise ConfigError(f"missing {prefix}.* keys")
    bad = keys - _PATCH_KEYS
    if bad:
        raise ConfigError(f"unknown keys {sorted(prefix + '.' + b for b in bad)}")
    if "table" in keys:
        path = Path(str(kv[f"{prefix}.table"]))
        if not path.is_absolute():
            path = base_dir / path
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        support = kv.get(f"{prefix}.support")
        if support is not None and (not isinstance(support, list) or len(support) != 2):
            raise ConfigError(f"{prefix}.support must be 'a, b'")
        return PatchSpec.from_table(
            data[:, 0], data[:, 1],
            support=tuple(support) if support else None,
            M=_as_float(kv, f"{prefix}.M"),
            gamma0=_as_float(kv, f"{prefix}.gamma0"),
        )
    p = bb.BarenblattParams(
        m=_as_float(kv, "nonlinearity.m", default=2.0),
        C=_as_float(kv, f"{prefix}.C", required=True),
        x0=_as_float(kv, f"{prefix}.x0", required=True),
        t0=_as_float(kv, f"{prefix}.t0", required=True),
    )
    return PatchSpec.from_barenblatt(p)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    kv = parse_kv(text)

    known = set(_SCALAR_KEYS)
    for k in kv:
        root = k.split(".", 1)[0]
        if k not in known and root not in ("patch", "patch_hat", "patch_check"):
            raise ConfigError(f"unknown config key {k!r}")

    problem = kv.get("problem")
    if problem not in ("single_patch", "two_patch"):
        raise ConfigError(f"problem must be single_patch or two_patch, got {problem!r}")

    name = kv.get("nonlinearity.name", "pme")
    if not isinstance(name, str):
        raise ConfigError("nonlinearity.name must be a string")
    params = {}
    if "nonlinearity.m" in kv:
        params["m"] = _as_float(kv, "nonlinearity.m")
    if "nonlinearity.alpha" in kv:
        params["alpha"] = _as_float(kv, "nonlinearity.alpha")
    try:
        nl = make_nonlinearity(name, **params)
    except (ValueError, TypeError) as err:
        raise ConfigError(str(err))

    mode_s = kv.get("cfl_mode", "relaxed")
    if mode_s not in ("strict", "relaxed"):
        raise ConfigError(f"cfl_mode must be strict or relaxed, got {mode_s!r}")
    stepper = kv.get("stepper", "explicit")
    if stepper not in ("explicit", "implicit"):
        raise ConfigError(f"stepper must be explicit or implicit, got {stepper!r}")

    snap = kv.get("snapshot_times", [])
    if isinstance(snap, float):
        snap = [snap]

    if problem == "single_patch":
        patches = [_patch_spec(kv, "patch", path.parent)]
        if any(k.startswith(("patch_hat.", "patch_check.")) for k in kv):
            raise ConfigError("single_patch uses patch.*, not patch_hat/patch_check")
    else:
        patches = [_patch_spec(kv, "patch_hat", path.parent), _patch_spec(kv, "patch_check", path.parent)]
        if any(k.startswith("patch.") for k in kv):
            raise ConfigError("two_patch uses patch_hat.* and patch_check.*")

    dx = _as_float(kv, "dx", required=True)
    horizon = _as_float(kv, "horizon", required=True)
    if dx <= 0.0 or horizon <= 0.0:
        raise ConfigError("dx and horizon must be positive")

    return RunConfig(
        problem=problem,
        nl=nl,
        dx=dx,
        horizon=horizon,
        mode=CflMode(mode_s),
        stepper=stepper,
        snapshot_times=[float(t) for t in snap],
        snapshot_cadence=_as_float(kv, "snapshot_cadence"),
        beta_impl=_as_float(kv, "beta_impl"),
        dt_override=_as_float(kv, "override.dt"),
        eps_override=_as_float(kv, "override.eps"),
        patches=patches,
    )

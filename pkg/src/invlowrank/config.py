"""Flat key-value experiment configs and named group presets.

One ``key = value`` per line, ``#`` comments, unknown keys rejected. Group
presets: ``c4_image:<p>`` (90-degree rotation of a p x p image),
``cyclic_perm:<d>`` (full d-cycle on R^d), ``rotation2d:<k>`` (planar
rotation by 2*pi/k), or ``custom:<matrix file>+<order>`` with the file path
resolved against the config file's directory.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidConfig
from .groups import GroupRep, c4_image_rotation, cyclic_permutation, rep_from_generator, rotation_2d
from .matio import read_matrix

_INT_KEYS = {"d0", "dL", "r", "n", "seed", "epochs", "width", "trials"}
_FLOAT_KEYS = {"lambda", "noise_sigma", "learning_rate", "init_scale"}
_BOOL_KEYS = {"invariant_wtrue"}
_STR_KEYS = {"mode", "group", "loss", "x_file", "y_file"}
_LIST_KEYS = {"hidden", "lambda_grid"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS | _LIST_KEYS


@dataclass
class ExperimentConfig:
    """Parsed experiment configuration; every field optional until required."""

    mode: str | None = None
    group: str | None = None
    d0: int | None = None
    dL: int | None = None
    hidden: tuple[int, ...] | None = None
    r: int | None = None
    lam: float | None = None
    lambda_grid: tuple[float, ...] | None = None
    n: int | None = None
    noise_sigma: float | None = None
    seed: int | None = None
    epochs: int | None = None
    learning_rate: float | None = None
    loss: str | None = None
    invariant_wtrue: bool | None = None
    x_file: str | None = None
    y_file: str | None = None
    width: int | None = None
    trials: int | None = None
    init_scale: float | None = None
    base_dir: Path = Path(".")

    def require(self, key: str):
        value = getattr(self, "lam" if key == "lambda" else key)
        if value is None:
            raise InvalidConfig(f"missing required config key: {key}")
        return value


def _parse_bool(key: str, raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise InvalidConfig(f"key {key}: expected true/false, got {raw!r}")


def _parse_float_list(key: str, raw: str) -> tuple[float, ...]:
    if raw.startswith("geom:"):
        parts = raw[5:].split(":")
        if len(parts) != 3:
            raise InvalidConfig(f"key {key}: geometric grid syntax is geom:start:stop:count")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InvalidConfig(f"key {key}: bad geometric grid {raw!r}") from exc
        if count < 1 or start <= 0 or stop <= start:
            raise InvalidConfig(f"key {key}: geometric grid needs 0 < start < stop, count >= 1")
        if count == 1:
            return (start,)
        ratio = (stop / start) ** (1.0 / (count - 1))
        return tuple(start * ratio ** i for i in range(count))
    try:
        return tuple(float(p) for p in raw.replace(",", " ").split())
    except ValueError as exc:
        raise InvalidConfig(f"key {key}: expected a comma-separated number list, got {raw!r}") from exc


def parse_config_text(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    cfg = ExperimentConfig(base_dir=base_dir or Path("."))
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in KNOWN_KEYS:
            raise InvalidConfig(f"line {lineno}: unknown config key: {key}")
        if not raw:
            raise InvalidConfig(f"line {lineno}: key {key} has no value")
        try:
            if key in _INT_KEYS:
                setattr(cfg, key, int(raw))
            elif key in _FLOAT_KEYS:
                setattr(cfg, "lam" if key == "lambda" else key, float(raw))
            elif key in _BOOL_KEYS:
                setattr(cfg, key, _parse_bool(key, raw))
            elif key == "hidden":
                cfg.hidden = tuple(int(p) for p in raw.replace(",", " ").split())
            elif key == "lambda_grid":
                cfg.lambda_grid = _parse_float_list(key, raw)
            else:
                setattr(cfg, key, raw)
        except ValueError as exc:
            raise InvalidConfig(f"line {lineno}: key {key} has a bad value {raw!r}") from exc
    return cfg


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise InvalidConfig(f"config file not found: {path}")
    return parse_config_text(path.read_text(), base_dir=path.parent)


def resolve_group(cfg: ExperimentConfig) -> GroupRep:
    """Build the GroupRep named by the config's ``group`` preset."""
    preset = cfg.require("group")
    kind, _, arg = preset.partition(":")
    if not arg:
        raise InvalidConfig(f"group preset needs an argument: {preset!r}")
    if kind == "c4_image":
        return c4_image_rotation(_preset_int(preset, arg))
    if kind == "cyclic_perm":
        return cyclic_permutation(_preset_int(preset, arg))
    if kind == "rotation2d":
        return rotation_2d(_preset_int(preset, arg))
    if kind == "custom":
        file_part, sep, order_part = arg.rpartition("+")
        if not sep:
            raise InvalidConfig(f"custom group syntax is custom:<matrix file>+<order>: {preset!r}")
        gen_path = Path(cfg.base_dir) / file_part
        if not gen_path.is_file():
            raise InvalidConfig(f"group generator file not found: {gen_path}")
        return rep_from_generator(read_matrix(gen_path), _preset_int(preset, order_part))
    raise InvalidConfig(f"unknown group preset kind: {kind!r}")


def _preset_int(preset: str, arg: str) -> int:
    try:
        value = int(arg)
    except ValueError as exc:
        raise InvalidConfig(f"group preset argument must be an integer: {preset!r}") from exc
    if value < 1:
        raise InvalidConfig(f"group preset argument must be >= 1: {preset!r}")
    return value

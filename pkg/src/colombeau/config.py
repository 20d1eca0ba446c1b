"""Experiment configuration: a single JSON document, strictly validated.

Unknown keys are rejected everywhere so that typos fail fast instead of
silently running a default.  Validation happens before any computation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from .catalog import catalog_net
from .expr import ParseError, parse
from .nets import (
    BandedNet,
    CompactBox,
    ExpressionNet,
    FunctionNet,
    K_MAX_CAP,
    NetError,
    Sampling,
)
from .scale import EpsGrid, ScaleError

EXPERIMENT_KINDS = (
    "valuation",
    "seminorms",
    "classify",
    "landau",
    "mollify-converge",
    "class-a",
    "sublinear-density",
)


class ConfigError(ValueError):
    pass


def _require_keys(obj: dict, where: str, required: Sequence[str], optional: Sequence[str] = ()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {', '.join(sorted(missing))}")


def _parse_box_union(raw: Any, dimension: int, where: str) -> CompactBox:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where} must be a non-empty list of boxes")
    boxes = []
    for b in raw:
        if not isinstance(b, list) or len(b) != dimension:
            raise ConfigError(f"each box in {where} needs {dimension} [lo, hi] pairs")
        box = []
        for iv in b:
            if not (isinstance(iv, list) and len(iv) == 2):
                raise ConfigError(f"intervals in {where} must be [lo, hi]")
            lo, hi = float(iv[0]), float(iv[1])
            if not lo < hi:
                raise ConfigError(f"empty interval [{lo}, {hi}] in {where}")
            box.append((lo, hi))
        boxes.append(box)
    try:
        return CompactBox.of(*boxes)
    except NetError as e:
        raise ConfigError(f"{where}: {e}") from e


def _build_net(raw: Any, dimension: int) -> FunctionNet:
    _require_keys(
        raw,
        "net",
        [],
        ["catalog", "parameter", "expression", "banded", "oscillation_hint", "support_box"],
    )
    kinds = [k for k in ("catalog", "expression", "banded") if k in raw]
    if len(kinds) != 1:
        raise ConfigError("net needs exactly one of: catalog, expression, banded")
    support = None
    if "support_box" in raw:
        support = _parse_box_union(raw["support_box"], dimension, "net.support_box")
    hint = raw.get("oscillation_hint", 0)
    try:
        hint = Fraction(str(hint))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad oscillation_hint: {hint!r}") from e

    if kinds[0] == "catalog":
        for key in ("oscillation_hint", "support_box"):
            if key in raw:
                raise ConfigError(f"catalog nets fix their own {key}")
        param = raw.get("parameter")
        if param is not None and not isinstance(param, int):
            raise ConfigError("net.parameter must be an integer")
        try:
            return catalog_net(raw["catalog"], param)
        except NetError as e:
            raise ConfigError(str(e)) from e
    if kinds[0] == "expression":
        try:
            expr = parse(raw["expression"], dimension)
            return ExpressionNet(dimension, expr, hint, support, name=raw["expression"])
        except (ParseError, NetError) as e:
            raise ConfigError(str(e)) from e
    bands = raw["banded"]
    if not isinstance(bands, list) or not bands:
        raise ConfigError("net.banded must be a non-empty list")
    parsed = []
    for band in bands:
        _require_keys(band, "net.banded[]", ["interval", "expression"])
        iv = band["interval"]
        if not (isinstance(iv, list) and len(iv) == 2):
            raise ConfigError("band interval must be [lo, hi]")
        try:
            parsed.append(((float(iv[0]), float(iv[1])), parse(band["expression"], dimension)))
        except ParseError as e:
            raise ConfigError(str(e)) from e
    try:
        return BandedNet(dimension, parsed, hint, support)
    except NetError as e:
        raise ConfigError(str(e)) from e


@dataclass(frozen=True)
class Experiment:
    kind: str
    params: dict


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int
    net: FunctionNet
    compacts: tuple[CompactBox, ...]
    grid: EpsGrid
    k_max: int
    sampling: Sampling
    experiments: tuple[Experiment, ...]
    output_prefix: str


_EXPERIMENT_PARAMS = {
    "valuation": ([], ["k"]),
    "seminorms": ([], ["k_list"]),
    "classify": ([], ["a_values", "bases", "tol"]),
    "landau": ([], []),
    "mollify-converge": ([], ["k", "n_list", "r", "quadrature_order"]),
    "class-a": (["N"], []),
    "sublinear-density": ([], ["n_list", "quadrature_order"]),
}


def _parse_experiment(raw: Any, index: int) -> Experiment:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError(f"experiments[{index}] needs a kind")
    kind = raw["kind"]
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(
            f"experiments[{index}].kind must be one of {', '.join(EXPERIMENT_KINDS)}"
        )
    required, optional = _EXPERIMENT_PARAMS[kind]
    _require_keys(raw, f"experiments[{index}]", ["kind"] + list(required), optional)
    params = {k: v for k, v in raw.items() if k != "kind"}
    return Experiment(kind, params)


def load_config(document: dict | str) -> ExperimentConfig:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON: {e}") from e
    _require_keys(
        document,
        "config",
        ["dimension", "net", "compacts", "experiments"],
        ["eps_grid", "k_max", "sampling", "output_prefix"],
    )
    dimension = document["dimension"]
    if dimension not in (1, 2, 3):
        raise ConfigError("dimension must be 1, 2 or 3")
    net = _build_net(document["net"], dimension)
    if net.dimension != dimension:
        raise ConfigError("net dimension disagrees with config dimension")
    raw_compacts = document["compacts"]
    if not isinstance(raw_compacts, list) or not raw_compacts:
        raise ConfigError("compacts must be a non-empty list of box unions")
    compacts = tuple(
        _parse_box_union(c, dimension, f"compacts[{i}]") for i, c in enumerate(raw_compacts)
    )
    grid_raw = document.get("eps_grid", {})
    _require_keys(grid_raw, "eps_grid", [], ["eps0", "ratio", "count"])
    try:
        grid = EpsGrid(
            float(grid_raw.get("eps0", 0.5)),
            float(grid_raw.get("ratio", 0.5)),
            int(grid_raw.get("count", 20)),
        )
    except ScaleError as e:
        raise ConfigError(str(e)) from e
    k_max = document.get("k_max", 6)
    if not isinstance(k_max, int) or not 0 <= k_max <= K_MAX_CAP:
        raise ConfigError(f"k_max must be an integer in 0..{K_MAX_CAP}")
    s_raw = document.get("sampling", {})
    _require_keys(s_raw, "sampling", [], ["base_points", "cap_points"])
    try:
        sampling = Sampling(
            int(s_raw.get("base_points", 33)), int(s_raw.get("cap_points", 20_001))
        )
    except NetError as e:
        raise ConfigError(str(e)) from e
    raw_exps = document["experiments"]
    if not isinstance(raw_exps, list) or not raw_exps:
        raise ConfigError("experiments must be a non-empty list")
    experiments = tuple(_parse_experiment(e, i) for i, e in enumerate(raw_exps))
    prefix = document.get("output_prefix", "colombeau-run")
    if not isinstance(prefix, str) or not prefix:
        raise ConfigError("output_prefix must be a non-empty string")
    return ExperimentConfig(
        dimension, net, compacts, grid, k_max, sampling, experiments, prefix
    )


def load_config_file(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())

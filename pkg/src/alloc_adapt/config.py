"""JSON scenario configs.

One self-describing document per experiment, with sections plant / allocator /
controller / scenario.  Square matrices may be given either as a full list of
rows or as a plain list, which is taken as the diagonal.  Dotted-path
``--set`` overrides edit the document before it is interpreted.
"""

from __future__ import annotations

import json

import numpy as np

from .allocator import AllocatorConfig
from .errors import ConfigError
from .plant import Effectiveness, PlantModel, admire_preset
from .scenario import ScenarioConfig, doublet

# bare --set keys accepted as shorthand for common overrides
SET_ALIASES = {
    "mode": "allocator.mode",
    "l": "allocator.l",
    "theta_init": "allocator.theta_init",
    "duration": "scenario.duration",
    "fault_time": "scenario.faults.0.time",
    "fault_level": "scenario.faults.0.effectiveness",
}


def _as_square(value, size: int, name: str) -> np.ndarray:
    """Interpret a JSON value as a size x size matrix (list = diagonal)."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 1:
        if arr.shape != (size,):
            raise ConfigError(f"{name}: expected {size} diagonal entries, got {arr.shape[0]}")
        return np.diag(arr)
    if arr.shape != (size, size):
        raise ConfigError(f"{name}: expected a {size}x{size} matrix, got {arr.shape}")
    return arr


def _plant_from_dict(doc: dict) -> PlantModel:
    preset = doc.get("preset")
    if preset is not None:
        if preset != "admire":
            raise ConfigError(f"unknown plant preset {preset!r}")
        return admire_preset()
    try:
        kwargs = {}
        for label_key in ("state_labels", "input_labels"):
            if label_key in doc:
                kwargs[label_key] = tuple(doc[label_key])
        return PlantModel(
            A=doc["A"], B_u=doc["B_u"], B_v=doc["B_v"], B=doc["B"], C=doc["C"],
            dt=float(doc["dt"]), **kwargs,
        )
    except KeyError as exc:
        raise ConfigError(f"plant section missing field {exc}") from exc


def _schedule_from_entry(entry, i: int):
    if isinstance(entry, dict):
        d = entry.get("doublet")
        if d is None:
            raise ConfigError(f"reference {i}: expected a doublet object or a list of [time, value] pairs")
        return doublet(float(d["amplitude"]), float(d["start"]), float(d["width"]))
    pairs = tuple((float(t), float(v)) for t, v in entry)
    return pairs if pairs else ((0.0, 0.0),)


def _effectiveness_from_value(value, m: int) -> Effectiveness:
    if isinstance(value, (int, float)):
        return Effectiveness.uniform(m, float(value))
    return Effectiveness(np.asarray(value, dtype=float))


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Interpret a config document; raises ConfigError on any problem."""
    try:
        plant = _plant_from_dict(doc.get("plant", {"preset": "admire"}))
        n, m, r = plant.n, plant.m, plant.r

        alloc_doc = doc.get("allocator", {})
        allocator = AllocatorConfig(
            Gamma=_as_square(alloc_doc.get("Gamma", np.eye(r).tolist()), r, "allocator.Gamma"),
            A_m=_as_square(alloc_doc.get("A_m", (0.5 * np.eye(r)).tolist()), r, "allocator.A_m"),
            B_alloc=plant.B,
            l=float(alloc_doc.get("l", 0.0)),
            lambda_bar=alloc_doc.get("lambda_bar"),
            mode=alloc_doc.get("mode", "closed_loop"),
        )

        ctrl_doc = doc.get("controller", {})
        q = _as_square(ctrl_doc.get("Q", np.eye(n + r).tolist()), n + r, "controller.Q")
        rmat = _as_square(ctrl_doc.get("R", np.eye(r).tolist()), r, "controller.R")
        saturation = ctrl_doc.get("saturation")
        if saturation is not None:
            saturation = np.asarray(saturation, dtype=float)

        scen_doc = doc.get("scenario", {})
        duration = float(scen_doc.get("duration", 10.0))
        refs_doc = scen_doc.get("references", [])
        references = [_schedule_from_entry(entry, i) for i, entry in enumerate(refs_doc)]
        while len(references) < r:
            references.append(((0.0, 0.0),))
        if len(references) > r:
            raise ConfigError(f"got {len(references)} reference schedules for {r} outputs")

        faults = []
        for f in scen_doc.get("faults", []):
            faults.append((float(f["time"]), _effectiveness_from_value(f["effectiveness"], m)))

        x0 = scen_doc.get("x0")
        if x0 is not None:
            x0 = np.asarray(x0, dtype=float)

        return ScenarioConfig(
            plant=plant,
            allocator=allocator,
            Q=q,
            R=rmat,
            references=tuple(references),
            duration=duration,
            faults=tuple(faults),
            saturation=saturation,
            theta_init=alloc_doc.get("theta_init", "pinv"),
            plant_path=scen_doc.get("plant_path", "design"),
            x0=x0,
            seed=int(scen_doc.get("seed", 0)),
            signal_ceiling=float(scen_doc.get("signal_ceiling", 1e9)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config_dict(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def load_config(path, overrides: list[str] | None = None) -> ScenarioConfig:
    doc = load_config_dict(path)
    for assignment in overrides or []:
        apply_override(doc, assignment)
    return config_from_dict(doc)


def apply_override(doc: dict, assignment: str) -> None:
    """Apply one ``key=value`` override; keys are dotted paths into the
    document (list indices allowed), values are parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    key = SET_ALIASES.get(key, key)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = doc
    for i, part in enumerate(parts[:-1]):
        nxt = parts[i + 1]
        if isinstance(node, list):
            node = node[int(part)]
            continue
        if part not in node or not isinstance(node[part], (dict, list)):
            node[part] = [] if nxt.isdigit() else {}
        node = node[part]
    last = parts[-1]
    if isinstance(node, list):
        idx = int(last)
        while len(node) <= idx:
            node.append({})
        node[idx] = value
    else:
        node[last] = value


def admire_benchmark_dict() -> dict:
    """Config document equivalent to scenario.admire_benchmark()."""
    def channel(a: float) -> list:
        return [[0.0, 0.0], [10.0, a], [30.0, -a], [50.0, 0.0],
                [100.0, 0.0], [105.0, a], [115.0, -a], [125.0, 0.0]]

    return {
        "plant": {"preset": "admire"},
        "allocator": {
            "Gamma": [1.0, 1.0, 0.1],
            "A_m": [0.5, 0.5, 0.5],
            "l": 0.1,
            "mode": "closed_loop",
            "theta_init": "pinv",
        },
        "controller": {"Q": [1.0] * 8, "R": [1.0, 1.0, 0.1]},
        "scenario": {
            "duration": 200.0,
            "references": [channel(0.05), channel(-0.005), channel(0.025)],
            "faults": [{"time": 100.0, "effectiveness": 0.7}],
            "seed": 0,
        },
    }

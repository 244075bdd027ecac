"""Scenario files (JSON), trajectory CSV and metrics JSON.

All quantities are SI: metres, seconds, radians.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .barrier import AgentState, Limits, ObstacleState
from .filter import FilterConfig, Mode
from .geometry import Disc, Ellipse, GeneralRadial, GeometryError, Polygon
from .sim import ObstacleSpec, Scenario, ScenarioError, TrajectoryLog

_vec = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_pos = {"type": "number", "exclusiveMinimum": 0}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


SHAPE_SCHEMA = {
    "oneOf": [
        _obj({"type": {"const": "disc"}, "radius": _pos}, ["type", "radius"]),
        _obj({"type": {"const": "ellipse"}, "a": _pos, "b": _pos, "beta": {"type": "number"}},
             ["type", "a", "b"]),
        _obj({"type": {"const": "polygon"},
              "vertices": {"type": "array", "items": _vec, "minItems": 3}},
             ["type", "vertices"]),
        _obj({"type": {"const": "radial"},
              "angles": {"type": "array", "items": {"type": "number"}, "minItems": 8},
              "radii": {"type": "array", "items": _pos, "minItems": 8}},
             ["type", "angles", "radii"]),
    ]
}

SCENARIO_SCHEMA = _obj({
    "name": {"type": "string"},
    "description": {"type": "string"},
    "agent": _obj({"p": _vec, "v": _vec, "radius": {"type": "number", "minimum": 0}}, ["p"]),
    "goal": _vec,
    "gains": _obj({"kp": {"type": "number"}, "kd": {"type": "number"}}),
    "limits": _obj({"u_max": _pos}, ["u_max"]),
    "sim": _obj({"dt": _pos, "duration": _pos,
                 "theta_update_every": {"type": "integer", "minimum": 1},
                 "margin": {"type": "number", "minimum": 0}}),
    "filter": _obj({
        "mode": {"enum": [m.value for m in Mode]},
        "alpha_gain": _pos,
        "q": {"type": "array", "items": _vec, "minItems": 2, "maxItems": 2},
        "theta_grid": {"type": "integer", "minimum": 8},
        "refine_tol": _pos,
        "max_sweeps": {"type": "integer", "minimum": 1},
        "fixed_theta": {"type": "array", "items": {"type": "number"}},
    }),
    "obstacles": {"type": "array", "items": _obj({
        "shape": SHAPE_SCHEMA,
        "position": _vec,
        "velocity": _vec,
        "support": _obj({"model": {"enum": ["exact", "fourier"]},
                         "n_terms": {"type": "integer", "minimum": 0}}),
    }, ["shape", "position"])},
}, ["agent", "goal", "limits"])


class ScenarioFileError(ValueError):
    """Scenario document cannot be parsed or fails validation."""


def _field_path(err) -> str:
    parts = []
    for p in err.absolute_path:
        if isinstance(p, int):
            parts[-1:] = [f"{parts[-1]}[{p}]"] if parts else [f"[{p}]"]
        else:
            parts.append(str(p))
    return ".".join(parts) or "<root>"


def shape_from_dict(d: dict):
    kind = d["type"]
    if kind == "disc":
        return Disc(float(d["radius"]))
    if kind == "ellipse":
        return Ellipse(float(d["a"]), float(d["b"]), float(d.get("beta", 0.0)))
    if kind == "polygon":
        return Polygon(tuple(tuple(v) for v in d["vertices"]))
    if kind == "radial":
        return GeneralRadial(tuple(d["angles"]), tuple(d["radii"]))
    raise ScenarioFileError(f"unknown shape type {kind!r}")


def shape_to_dict(shape) -> dict:
    if isinstance(shape, Disc):
        return {"type": "disc", "radius": shape.radius}
    if isinstance(shape, Ellipse):
        return {"type": "ellipse", "a": shape.a, "b": shape.b, "beta": shape.beta}
    if isinstance(shape, Polygon):
        return {"type": "polygon", "vertices": [list(v) for v in shape.vertices]}
    return {"type": "radial", "angles": list(shape.angles), "radii": list(shape.radii)}


def parse_shape(doc: dict):
    try:
        jsonschema.validate(doc, SHAPE_SCHEMA)
        return shape_from_dict(doc)
    except jsonschema.ValidationError as exc:
        raise ScenarioFileError(f"invalid shape: {exc.message}") from None
    except GeometryError as exc:
        raise ScenarioFileError(f"invalid shape: {exc}") from None


def scenario_from_dict(doc: dict) -> Scenario:
    """Validate a scenario document and build the :class:`Scenario`, filling defaults."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ScenarioFileError(f"{_field_path(err)}: {err.message}")

    obstacles = []
    for k, o in enumerate(doc.get("obstacles", [])):
        try:
            shape = shape_from_dict(o["shape"])
        except GeometryError as exc:
            raise ScenarioFileError(f"obstacles[{k}].shape: {exc}") from None
        sup = o.get("support", {})
        obstacles.append(ObstacleSpec(
            ObstacleState(shape, o["position"], o.get("velocity", [0.0, 0.0])),
            support=sup.get("model", "exact"),
            n_terms=sup.get("n_terms", 16),
        ))

    f = doc.get("filter", {})
    try:
        cfg = FilterConfig(
            q=np.array(f.get("q", [[1.0, 0.0], [0.0, 1.0]]), dtype=float),
            alpha_gain=f.get("alpha_gain", 1.0),
            theta_grid=f.get("theta_grid", 360),
            refine_tol=f.get("refine_tol", 1e-6),
            max_sweeps=f.get("max_sweeps", 5),
            mode=Mode(f.get("mode", Mode.LEAST_RESTRICTIVE.value)),
            fixed_theta=f.get("fixed_theta"),
        )
    except ValueError as exc:
        raise ScenarioFileError(f"filter: {exc}") from None

    agent = doc["agent"]
    sim = doc.get("sim", {})
    gains = doc.get("gains", {})
    scenario = Scenario(
        agent=AgentState(agent["p"], agent.get("v", [0.0, 0.0])),
        goal=doc["goal"],
        agent_radius=agent.get("radius", 0.5),
        kp=gains.get("kp", 1.0),
        kd=gains.get("kd", 2.0),
        limits=Limits(doc["limits"]["u_max"]),
        dt=sim.get("dt", 0.01),
        duration=sim.get("duration", 10.0),
        theta_update_every=sim.get("theta_update_every", 1),
        margin=sim.get("margin"),
        obstacles=tuple(obstacles),
        filter=cfg,
        name=doc.get("name", "scenario"),
        description=doc.get("description", ""),
    )
    return scenario


def scenario_to_dict(sc: Scenario) -> dict:
    """Fully explicit document; ``scenario_from_dict`` of it reproduces ``sc``."""
    f = sc.filter
    out = {
        "name": sc.name,
        "description": sc.description,
        "agent": {"p": sc.agent.p.tolist(), "v": sc.agent.v.tolist(), "radius": sc.agent_radius},
        "goal": sc.goal.tolist(),
        "gains": {"kp": sc.kp, "kd": sc.kd},
        "limits": {"u_max": sc.limits.u_max},
        "sim": {"dt": sc.dt, "duration": sc.duration, "theta_update_every": sc.theta_update_every,
                "margin": sc.safety_margin},
        "filter": {
            "mode": f.mode.value,
            "alpha_gain": f.alpha_gain,
            "q": f.q.tolist(),
            "theta_grid": f.theta_grid,
            "refine_tol": f.refine_tol,
            "max_sweeps": f.max_sweeps,
        },
        "obstacles": [
            {
                "shape": shape_to_dict(o.state.shape),
                "position": o.state.position.tolist(),
                "velocity": o.state.velocity.tolist(),
                "support": {"model": o.support, "n_terms": o.n_terms},
            }
            for o in sc.obstacles
        ],
    }
    if f.fixed_theta is not None:
        out["filter"]["fixed_theta"] = list(f.fixed_theta)
    return out


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioFileError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return scenario_from_dict(doc)
    except (ScenarioFileError, ScenarioError, ValueError) as exc:
        raise ScenarioFileError(f"{path}: {exc}") from None


def bundled_scenarios() -> list:
    return sorted(p.name for p in resources.files("hcbf").joinpath("scenarios").iterdir()
                  if p.name.endswith(".json"))


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario file shipped with the package (``flyby.json`` etc.)."""
    if not name.endswith(".json"):
        name += ".json"
    p = Path(str(resources.files("hcbf").joinpath("scenarios", name)))
    if not p.exists():
        raise FileNotFoundError(name)
    return p


def resolve_scenario(spec: str) -> Path:
    """A filesystem path, or the name of a bundled scenario."""
    p = Path(spec)
    if p.exists():
        return p
    try:
        return bundled_scenario_path(spec)
    except FileNotFoundError:
        raise ScenarioFileError(f"{spec}: no such file or bundled scenario") from None


# ---------------------------------------------------------------------------
# Output files


def atomic_write(path, data) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


BASE_COLUMNS = ["t", "px", "py", "vx", "vy", "udx", "udy", "ux", "uy"]
PER_OBSTACLE = ["theta", "h", "cons", "clear"]


def csv_header(n_obstacles: int) -> list:
    return BASE_COLUMNS + [f"{c}_{k}" for k in range(n_obstacles) for c in PER_OBSTACLE]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def log_to_csv(log: TrajectoryLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(log.n_obstacles))
    for i in range(len(log)):
        row = [log.t[i], *log.p[i], *log.v[i], *log.u_des[i], *log.u[i]]
        for k in range(log.n_obstacles):
            row += [log.theta[i, k], log.h[i, k], log.cons[i, k], log.clear[i, k]]
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def log_from_csv(text: str) -> TrajectoryLog:
    """Parse a trajectory CSV.  Status and events are not stored in the CSV."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[:len(BASE_COLUMNS)] != BASE_COLUMNS or (len(header) - len(BASE_COLUMNS)) % 4:
        raise ValueError("unrecognised trajectory CSV header")
    K = (len(header) - len(BASE_COLUMNS)) // 4
    if header != csv_header(K):
        raise ValueError("unrecognised trajectory CSV header")
    a = np.array([[float(x) for x in r] for r in body], dtype=float).reshape(len(body), len(header))
    per = a[:, len(BASE_COLUMNS):].reshape(len(body), K, 4)
    return TrajectoryLog(
        t=a[:, 0], p=a[:, 1:3], v=a[:, 3:5], u_des=a[:, 5:7], u=a[:, 7:9],
        theta=per[:, :, 0], h=per[:, :, 1], cons=per[:, :, 2], clear=per[:, :, 3],
        status=[""] * len(body),
    )


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x))


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default) + "\n"

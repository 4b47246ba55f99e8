"""Parameter sweeps: spec parsing, deterministic evaluation and CSV/JSON output."""

from __future__ import annotations

import itertools
import json
import math
import os
import re
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from .bounds import MIN_PHOTONS, qfi_from_moments
from .detection import SCHEMES, Scheme, delta_phi_array
from .moments import joint_moments
from .optimize import AllSingularError, optimize_phase_moments
from .params import InputParams, LossParams, RangeError, reduce_angle

PARAMETERS = ("alpha", "beta", "theta", "gamma", "r", "phi", "mu", "eta")
ANGLES = frozenset({"theta", "gamma", "phi"})
OUTPUTS = ("delta_phi", "snl", "ratio_snl", "qcrb", "hl", "n_total")
COLUMNS = ("scheme",) + PARAMETERS + OUTPUTS
DEFAULTS = {"alpha": 0.0, "beta": 0.0, "theta": math.pi, "gamma": 0.0, "r": 0.0, "phi": 0.0, "mu": 1.0, "eta": 1.0}
MAX_STEPS = 1_000_000

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[-+]?)\s*(?P<num>\d*\.?\d*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d*\.?\d+(?:[eE][-+]?\d+)?))?\s*$"
)


class SpecError(ValueError):
    """Malformed sweep specification; the message names the field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def parse_angle(value: Any, field_name: str = "angle") -> float:
    """Radians from a number, a numeric string, or a multiple of pi such as "7pi/4"."""
    if isinstance(value, bool):
        raise SpecError(field_name, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        x = float(value)
    elif isinstance(value, str):
        m = _ANGLE_RE.match(value.lower())
        if m:
            num = float(m["num"]) if m["num"] not in ("", ".") else 1.0
            den = float(m["den"]) if m["den"] else 1.0
            if den == 0.0:
                raise SpecError(field_name, f"zero denominator in {value!r}")
            x = num * math.pi / den * (-1.0 if m["sign"] == "-" else 1.0)
        else:
            try:
                x = float(value)
            except ValueError:
                raise SpecError(field_name, f"cannot parse {value!r} as an angle") from None
    else:
        raise SpecError(field_name, f"expected a number or string, got {type(value).__name__}")
    if not math.isfinite(x):
        raise SpecError(field_name, f"must be finite, got {value!r}")
    return x


def parse_value(name: str, value: Any) -> float:
    if name in ANGLES:
        return parse_angle(value, name)
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SpecError(name, f"expected a number, got {value!r}")
    try:
        x = float(value)
    except ValueError:
        raise SpecError(name, f"cannot parse {value!r} as a number") from None
    if not math.isfinite(x):
        raise SpecError(name, f"must be finite, got {value!r}")
    return x


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self) -> None:
        if self.name not in PARAMETERS:
            raise SpecError("vary.name", f"unknown parameter {self.name!r}; expected one of {', '.join(PARAMETERS)}")
        if isinstance(self.steps, bool) or not isinstance(self.steps, int):
            raise SpecError("vary.steps", f"must be an integer, got {self.steps!r}")
        if not 2 <= self.steps <= MAX_STEPS:
            raise SpecError("vary.steps", f"must lie in [2, {MAX_STEPS}], got {self.steps}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Axis":
        if not isinstance(d, Mapping):
            raise SpecError("vary", f"each axis must be an object, got {d!r}")
        for key in ("name", "from", "to", "steps"):
            if key not in d:
                raise SpecError(f"vary.{key}", "missing")
        name = d["name"]
        if not isinstance(name, str):
            raise SpecError("vary.name", f"expected a string, got {name!r}")
        steps = d["steps"]
        if isinstance(steps, float) and steps.is_integer():
            steps = int(steps)
        return cls(name, parse_value(name, d["from"]), parse_value(name, d["to"]), steps)


@dataclass(frozen=True)
class SweepSpec:
    """One or two varied axes over fixed values; ``phases`` pins phi per scheme."""

    axes: tuple[Axis, ...]
    fixed: Mapping[str, float] = field(default_factory=dict)
    schemes: tuple[Scheme, ...] = SCHEMES
    optimize_phi: bool = False
    outputs: tuple[str, ...] = OUTPUTS
    phases: Mapping[Scheme, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise SpecError("vary", f"one or two axes required, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecError("vary", f"axes must be distinct, got {names}")
        for key in self.fixed:
            if key not in PARAMETERS:
                raise SpecError(f"fixed.{key}", "unknown parameter")
            if key in names:
                raise SpecError(f"fixed.{key}", "also listed as a varied axis")
        if not self.schemes:
            raise SpecError("schemes", "at least one scheme required")
        if len(set(self.schemes)) != len(self.schemes):
            raise SpecError("schemes", "duplicate scheme")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise SpecError("outputs", f"unknown output {bad[0]!r}; expected a subset of {', '.join(OUTPUTS)}")
        if "phi" in names and self.optimize_phi:
            raise SpecError("optimize_phi", "cannot optimize phi while sweeping it")
        if "phi" in names and self.phases:
            raise SpecError("phases", "cannot pin per-scheme phases while sweeping phi")
        # ranges are intervals, so checking the axis corners validates every point up front
        base = dict(DEFAULTS)
        base.update(self.fixed)
        for corner in itertools.product(*[(a.start, a.stop) for a in self.axes]):
            point = dict(base)
            point.update({a.name: v for a, v in zip(self.axes, corner)})
            _make_params(point)

    @property
    def columns(self) -> tuple[str, ...]:
        return ("scheme",) + PARAMETERS + tuple(o for o in OUTPUTS if o in self.outputs)

    @property
    def row_count(self) -> int:
        return math.prod(a.steps for a in self.axes) * len(self.schemes)

    def points(self) -> Iterable[dict[str, float]]:
        """Grid points in deterministic order: first axis major, second minor."""
        base = dict(DEFAULTS)
        base.update(self.fixed)
        first = self.axes[0].values()
        second = self.axes[1].values() if len(self.axes) == 2 else [None]
        for x in first:
            for y in second:
                p = dict(base)
                p[self.axes[0].name] = float(x)
                if y is not None:
                    p[self.axes[1].name] = float(y)
                yield p

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SweepSpec":
        if not isinstance(d, Mapping):
            raise SpecError("spec", "must be a JSON object")
        known = {"vary", "fixed", "schemes", "optimize_phi", "outputs", "phases"}
        extra = sorted(set(d) - known)
        if extra:
            raise SpecError(extra[0], "unknown field")
        if "vary" not in d:
            raise SpecError("vary", "missing")
        vary = d["vary"]
        axes = tuple(Axis.from_dict(v) for v in (vary if isinstance(vary, list) else [vary]))
        fixed_in = d.get("fixed", {})
        if not isinstance(fixed_in, Mapping):
            raise SpecError("fixed", "must be an object")
        fixed = {k: parse_value(k, v) if k in PARAMETERS else v for k, v in fixed_in.items()}
        schemes = d.get("schemes", [s.value for s in SCHEMES])
        if isinstance(schemes, str):
            schemes = [schemes]
        try:
            parsed = tuple(sorted((Scheme.parse(s) for s in schemes), key=SCHEMES.index))
        except (ValueError, AttributeError) as exc:
            raise SpecError("schemes", str(exc)) from None
        opt = d.get("optimize_phi", False)
        if not isinstance(opt, bool):
            raise SpecError("optimize_phi", f"expected true or false, got {opt!r}")
        outputs = d.get("outputs", list(OUTPUTS))
        if isinstance(outputs, str) or not isinstance(outputs, list):
            raise SpecError("outputs", "must be a list")
        phases_in = d.get("phases", {})
        if not isinstance(phases_in, Mapping):
            raise SpecError("phases", "must be an object keyed by scheme")
        try:
            phases = {Scheme.parse(k): parse_angle(v, f"phases.{k}") for k, v in phases_in.items()}
        except (ValueError, AttributeError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError("phases", str(exc)) from None
        return cls(axes, fixed, parsed, opt, tuple(outputs), phases)


def _make_params(p: Mapping[str, float]) -> tuple[InputParams, LossParams]:
    try:
        params = InputParams(p["alpha"], p["beta"], theta=p["theta"], gamma=p["gamma"], r=p["r"])
        loss = LossParams(p["mu"], p["eta"])
    except RangeError as exc:
        raise SpecError("point", f"{exc} at {dict(p)}") from None
    return params, loss


def evaluate_point(
    point: Mapping[str, float],
    schemes: tuple[Scheme, ...] = SCHEMES,
    optimize_phi: bool = False,
    phases: Mapping[Scheme, float] | None = None,
) -> list[dict[str, Any]]:
    """One row per scheme.  Photonless inputs report inf benchmarks and a nan ratio."""
    params, loss = _make_params(point)
    m = joint_moments(params)
    n = m.n_total
    if n > MIN_PHOTONS:
        f = qfi_from_moments(m)
        snl, hl = 1.0 / math.sqrt(n), 1.0 / n
        qcrb = 1.0 / math.sqrt(f) if f > 0 else math.inf
    else:
        snl = hl = qcrb = math.inf
    rows = []
    for scheme in schemes:
        phi = (phases or {}).get(scheme, point["phi"])
        if optimize_phi:
            try:
                phi, d = optimize_phase_moments(scheme, m, params.alpha_mag, loss)
            except AllSingularError:
                phi, d = math.nan, math.inf
        else:
            phi = reduce_angle(phi)
            d = float(delta_phi_array(scheme, m, phi, loss, params.alpha_mag))
        ratio = d / snl if math.isfinite(snl) else math.nan
        row = {k: point[k] for k in PARAMETERS}
        row.update(scheme=scheme.value, phi=phi, delta_phi=d, snl=snl, ratio_snl=ratio, qcrb=qcrb, hl=hl, n_total=n)
        rows.append(row)
    return rows


def _evaluate_chunk(args) -> list[dict[str, Any]]:
    points, schemes, optimize_phi, phases = args
    out = []
    for p in points:
        out.extend(evaluate_point(p, schemes, optimize_phi, phases))
    return out


def sweep(spec: SweepSpec, workers: int = 1, chunk: int = 256) -> list[dict[str, Any]]:
    """All rows in deterministic order, whatever the completion order of the workers."""
    points = list(spec.points())
    phases = dict(spec.phases)
    jobs = [(points[i : i + chunk], spec.schemes, spec.optimize_phi, phases) for i in range(0, len(points), chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, jobs))
    else:
        parts = [_evaluate_chunk(j) for j in jobs]
    rows = [r for part in parts for r in part]
    keep = spec.columns
    return [{k: r[k] for k in keep} for r in rows]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(v: Any) -> str:
    return format_float(v) if isinstance(v, float) else str(v)


def to_csv(rows: list[dict[str, Any]], columns: Iterable[str] = COLUMNS) -> str:
    columns = list(columns)
    lines = [",".join(columns)]
    lines += [",".join(_cell(r[c]) for c in columns) for r in rows]
    return "\n".join(lines) + "\n"


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return format_float(v)
    return v


def to_json(rows: list[dict[str, Any]], columns: Iterable[str] = COLUMNS) -> str:
    columns = list(columns)
    return json.dumps([{c: _json_value(r[c]) for c in columns} for r in rows], indent=2) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise

"""Scenario configuration: YAML ingestion, validation and canonical hashing.

A scenario document is a YAML mapping (comments allowed).  Unknown keys are
rejected so typos surface as validation errors with their field path.  The
canonical form is the JSON serialization of the fully defaulted config with
sorted keys; its SHA-256 is the config hash embedded in every export.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from ..errors import AffineBodyError, OutputError, ParseError, ValidationError
from ..models import InertiaModel
from ..potentials import potential_from_spec

KINDS = (
    "ClassicalTrajectory",
    "GeodesicCompare",
    "ConservationAudit",
    "Boundedness2D",
    "Spectrum2D",
    "SpectrumQpm",
    "SpectrumPolar",
    "Operator3DCheck",
)
MODEL_KINDS = ("DAlembert", "AffineAffine", "AffineMetric", "MetricAffine")
SCHEMES = ("ImplicitMidpoint", "RK4")
FORMATS = ("csv", "json")
SEED_MAX = 2 ** 64 - 1


@dataclass
class ModelConfig:
    kind: str = "AffineAffine"
    n: int = 2
    m: float = 1.0
    I: float = 0.0
    A: float = 1.0
    B: float = 0.0
    J: Optional[list] = None

    def build(self) -> InertiaModel:
        if self.kind == "DAlembert":
            if self.J is None:
                return InertiaModel.isotropic_dalembert(self.n, self.I, self.m)
            return InertiaModel.dalembert(self.J, self.m)
        return InertiaModel(kind=self.kind, n=self.n, m=self.m, I=self.I, A=self.A, B=self.B)


@dataclass
class NumericsConfig:
    scheme: str = "ImplicitMidpoint"
    dt: float = 1e-3
    steps: int = 10_000
    record_every: int = 100
    samples: int = 20
    t_final: float = 1.0
    grid_N: int = 2000
    x_max: float = 40.0
    escape_x: float = 20.0
    lift: float = 0.5
    Q_max: float = 12.0
    r_max: float = 12.0
    levels: int = 5
    rtol: float = 1e-3
    grid3d: list = field(default_factory=lambda: [-2.0, 2.0, 10])


@dataclass
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"


@dataclass
class ScenarioConfig:
    kind: str
    model: ModelConfig = field(default_factory=ModelConfig)
    potential: dict = field(default_factory=lambda: {"kind": "None"})
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    seed: int = 0
    hbar: float = 1.0
    name: str = ""
    initial: Optional[dict] = None
    sweep: dict = field(default_factory=dict)
    channels: list = field(default_factory=list)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        return canonical_json(self.to_dict())

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_yaml(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        col = mark.column + 1 if mark is not None else None
        raise ParseError(f"malformed YAML: {exc.problem or exc}", line, col) from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed YAML: {exc}") from exc


def _coerce(value: Any, target: Any, path: str) -> Any:
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            # YAML 1.1 reads "1e-3" as a string; accept numeric strings
            if isinstance(value, str):
                try:
                    return float(value)
                except ValueError:
                    pass
            raise ValidationError(f"expected a number, got {value!r}", path)
        return float(value)
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ValidationError(f"expected an integer, got {value!r}", path)
        return value
    if target is str:
        if not isinstance(value, str):
            raise ValidationError(f"expected a string, got {value!r}", path)
        return value
    return value


_TYPES = {
    ModelConfig: {"kind": str, "n": int, "m": float, "I": float, "A": float, "B": float, "J": None},
    NumericsConfig: {
        "scheme": str, "dt": float, "steps": int, "record_every": int, "samples": int, "t_final": float,
        "grid_N": int, "x_max": float, "escape_x": float, "lift": float, "Q_max": float, "r_max": float,
        "levels": int, "rtol": float, "grid3d": None,
    },
    OutputConfig: {"path": None, "format": str},
}


def _section(cls, raw: Any, path: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ValidationError("expected a mapping", path)
    names = {f.name for f in fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise ValidationError(f"unknown keys {sorted(map(str, unknown))}", path)
    types = _TYPES[cls]
    kwargs = {k: _coerce(v, types[k], f"{path}.{k}") for k, v in raw.items()}
    return cls(**kwargs)


def _validate(cfg: ScenarioConfig) -> None:
    if cfg.kind not in KINDS:
        raise ValidationError(f"unknown scenario kind {cfg.kind!r}; expected one of {list(KINDS)}", "kind")
    if not (0 <= cfg.seed <= SEED_MAX):
        raise ValidationError("seed must be an unsigned 64-bit integer", "seed")
    if not cfg.hbar > 0:
        raise ValidationError("must be positive", "hbar")
    m = cfg.model
    if m.kind not in MODEL_KINDS:
        raise ValidationError(f"unknown model kind {m.kind!r}; expected one of {list(MODEL_KINDS)}", "model.kind")
    if m.n not in (2, 3):
        raise ValidationError("body dimension must be 2 or 3", "model.n")
    if not m.m > 0:
        raise ValidationError("mass must be positive", "model.m")
    if m.J is not None:
        if m.kind != "DAlembert":
            raise ValidationError("an inertial tensor only applies to the d'Alembert model", "model.J")
        try:
            ok = len(m.J) == m.n and all(len(r) == m.n for r in m.J)
        except TypeError:
            ok = False
        if not ok:
            raise ValidationError(f"expected an {m.n}x{m.n} matrix", "model.J")
    try:
        m.build()
    except AffineBodyError as exc:
        raise ValidationError(str(exc), "model") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), "model") from exc
    try:
        potential_from_spec(cfg.potential)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), "potential") from exc
    nm = cfg.numerics
    if nm.scheme not in SCHEMES:
        raise ValidationError(f"expected one of {list(SCHEMES)}", "numerics.scheme")
    for name in ("dt", "t_final", "x_max", "escape_x", "Q_max", "r_max", "rtol"):
        if not getattr(nm, name) > 0:
            raise ValidationError("must be positive", f"numerics.{name}")
    for name in ("steps", "record_every", "samples", "levels"):
        if getattr(nm, name) < 1:
            raise ValidationError("must be at least 1", f"numerics.{name}")
    if not 0.0 <= nm.lift < 1.0:
        raise ValidationError("must lie in [0, 1)", "numerics.lift")
    if nm.grid_N < 16:
        raise ValidationError("grids need at least 16 points", "numerics.grid_N")
    g = nm.grid3d
    if not (isinstance(g, list) and len(g) == 3 and float(g[1]) > float(g[0]) and int(g[2]) >= 3):
        raise ValidationError("expected [lo, hi, N] with hi > lo and N >= 3", "numerics.grid3d")
    if cfg.output.format not in FORMATS:
        raise ValidationError(f"expected one of {list(FORMATS)}", "output.format")
    _validate_kind(cfg)


def _validate_kind(cfg: ScenarioConfig) -> None:
    kind, model = cfg.kind, cfg.model
    planar = kind in ("Boundedness2D", "Spectrum2D", "SpectrumQpm", "SpectrumPolar")
    if planar and model.n != 2:
        raise ValidationError(f"{kind} needs a planar body (n = 2)", "model.n")
    if kind in ("Boundedness2D", "Spectrum2D") and model.kind == "DAlembert":
        raise ValidationError(f"{kind} needs an invariant (affine) model", "model.kind")
    if kind in ("SpectrumQpm", "SpectrumPolar") and (model.kind != "DAlembert" or model.J is not None):
        raise ValidationError(f"{kind} needs the isotropic d'Alembert model", "model.kind")
    if kind == "GeodesicCompare" and model.kind != "AffineAffine":
        raise ValidationError("exponential geodesics need the affine-affine model", "model.kind")
    if kind == "Operator3DCheck" and model.n != 3:
        raise ValidationError("needs n = 3", "model.n")
    if kind in ("Spectrum2D", "SpectrumQpm", "SpectrumPolar", "Operator3DCheck"):
        for i, ch in enumerate(cfg.channels):
            if not (isinstance(ch, list) and len(ch) == 2):
                raise ValidationError("each channel is a pair of labels", f"channels[{i}]")
            if kind != "Operator3DCheck" and not all(isinstance(v, int) and not isinstance(v, bool) for v in ch):
                raise ValidationError("planar channel labels are integers", f"channels[{i}]")
            if kind == "Operator3DCheck":
                try:
                    s, j = (Fraction(str(v)) for v in ch)
                except (ValueError, ZeroDivisionError) as exc:
                    raise ValidationError(f"cannot read labels {ch!r}", f"channels[{i}]") from exc
                if s < 0 or j < 0 or (2 * s).denominator != 1 or (2 * j).denominator != 1:
                    raise ValidationError("labels must be non-negative half-integers", f"channels[{i}]")
                if (2 * s) % 2 != (2 * j) % 2:
                    raise ValidationError("labels must share halfness", f"channels[{i}]")
        swept = kind == "Spectrum2D" and "m" in cfg.sweep and "n" in cfg.sweep
        if not cfg.channels and not swept:
            raise ValidationError("at least one channel is required", "channels")
    if kind == "Spectrum2D":
        for key in ("m", "n"):
            rng = cfg.sweep.get(key)
            if rng is not None and not (isinstance(rng, list) and len(rng) == 2
                                        and all(isinstance(v, int) and not isinstance(v, bool) for v in rng)
                                        and rng[0] <= rng[1]):
                raise ValidationError("expected an integer range [lo, hi]", f"sweep.{key}")
    if kind == "Boundedness2D":
        values = cfg.sweep.get("p_values")
        if not (isinstance(values, list) and values and all(isinstance(v, (int, float)) for v in values)):
            raise ValidationError("expected a non-empty list of momenta", "sweep.p_values")
    if kind == "SpectrumPolar":
        pk = cfg.potential.get("kind")
        if pk not in ("QpmFamily", "PolarTrig"):
            raise ValidationError("polar spectra support QpmFamily and PolarTrig potentials", "potential.kind")
    if kind == "SpectrumQpm" and cfg.potential.get("kind") not in ("QpmFamily", "None"):
        raise ValidationError("Q+- spectra need a QpmFamily (or no) potential", "potential.kind")


def config_from_mapping(raw: Any) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ValidationError("a scenario document must be a mapping")
    allowed = {f.name for f in fields(ScenarioConfig)}
    unknown = set(raw) - allowed
    if unknown:
        raise ValidationError(f"unknown keys {sorted(map(str, unknown))}", "")
    if "kind" not in raw:
        raise ValidationError("missing scenario kind", "kind")
    kind = _coerce(raw["kind"], str, "kind")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError("seed must be an integer", "seed")
    potential = raw.get("potential") or {"kind": "None"}
    if not isinstance(potential, dict):
        raise ValidationError("expected a mapping", "potential")
    for key in ("sweep", "initial"):
        if raw.get(key) is not None and not isinstance(raw[key], dict):
            raise ValidationError("expected a mapping", key)
    channels = raw.get("channels") or []
    if not isinstance(channels, list):
        raise ValidationError("expected a list", "channels")
    cfg = ScenarioConfig(
        kind=kind,
        model=_section(ModelConfig, raw.get("model"), "model"),
        potential=dict(potential),
        numerics=_section(NumericsConfig, raw.get("numerics"), "numerics"),
        seed=seed,
        hbar=_coerce(raw.get("hbar", 1.0), float, "hbar"),
        name=_coerce(raw.get("name", ""), str, "name"),
        initial=raw.get("initial"),
        sweep=dict(raw.get("sweep") or {}),
        channels=[list(c) if isinstance(c, (list, tuple)) else c for c in channels],
        output=_section(OutputConfig, raw.get("output"), "output"),
    )
    # canonical JSON must exist for hashing (rejects NaN and non-JSON values)
    try:
        cfg.canonical_json()
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"value not representable in canonical form: {exc}") from exc
    _validate(cfg)
    return cfg


def load_config(source: Union[str, Path]) -> ScenarioConfig:
    """Load a scenario from YAML text or from a path to a YAML file."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and source.endswith((".yaml", ".yml"))):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot read config: {exc.strerror}", str(path)) from exc
    else:
        text = source
    return config_from_mapping(parse_yaml(text))


def dump_config(cfg: ScenarioConfig) -> str:
    """Re-emit a config as YAML; loading the result gives the same hash."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)

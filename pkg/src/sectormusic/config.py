"""Run configuration (JSON), CSV output and run manifests.

Everything crossing this boundary is in degrees and dB. A config is a flat
JSON object; unknown keys are rejected and defaults are filled in, so the
parsed config echoed into a manifest is enough to replay a run.
"""
import csv
import json
import platform
import time
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .array_model import ArrayGeometry, BEAMWIDTH_CONSTANT
from .harness import McConfig
from .signal_sim import Scenario

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["N"],
    "properties": {
        "N": {"type": "integer", "minimum": 3},
        "d_over_lambda": {"type": "number", "exclusiveMinimum": 0},
        "alphas": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": -90, "exclusiveMaximum": 90},
            "minItems": 1,
        },
        "K": {"type": "integer", "minimum": 1},
        "B": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
        "n": {"type": "integer", "minimum": 1},
        "sigma2": {"type": "number", "exclusiveMinimum": 0},
        "asnr_db": {"type": "number"},
        "sector_center_deg": {"type": ["number", "null"]},
        "space": {"enum": ["element", "beamspace"]},
        "trials": {"type": "integer", "minimum": 1},
        "snr_step_db": {"type": "number", "exclusiveMinimum": 0},
        "snr_start_db": {"type": ["number", "null"]},
        "snr_stop_db": {"type": ["number", "null"]},
        "bw_constant": {"type": "number", "exclusiveMinimum": 0},
        "grid_step_deg": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "grid_half_span_bw": {"type": "number", "exclusiveMinimum": 0},
        "gain_mode": {"enum": ["center", "sources"]},
        "seed": {"type": "integer", "minimum": 0},
        "alpha_d_grid": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 180},
            "minItems": 1,
        },
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 3}, "minItems": 1},
        "snapshot_counts": {"type": "array", "items": {"type": "integer", "minimum": 1},
                            "minItems": 1},
    },
}


class ConfigError(ValueError):
    """A config document violates the schema."""


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters shared by all commands (degrees, dB)."""

    N: int
    d_over_lambda: float = 0.5
    alphas: tuple = (-1.0, 1.0)
    K: int = 100
    B: float = 0.0781
    n: int = 3
    sigma2: float = 1.0
    asnr_db: float = 20.0
    sector_center_deg: object = None
    space: str = "beamspace"
    trials: int = 30
    snr_step_db: float = 1.0
    snr_start_db: object = None
    snr_stop_db: object = None
    bw_constant: float = BEAMWIDTH_CONSTANT
    grid_step_deg: object = None
    grid_half_span_bw: float = 2.0
    gain_mode: str = "center"
    seed: int = 0
    alpha_d_grid: tuple = tuple(round(0.2 * i, 6) for i in range(1, 101))
    dims: tuple = (3, 4, 5)
    snapshot_counts: tuple = (100, 1000, 10000)

    def __post_init__(self):
        for name in ("alphas", "alpha_d_grid"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        for name in ("dims", "snapshot_counts"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        if self.n > self.N:
            raise ConfigError(f"invalid config key 'n': n={self.n} exceeds N={self.N}")

    @property
    def geom(self):
        return ArrayGeometry(self.N, self.d_over_lambda)

    @property
    def center_deg(self):
        if self.sector_center_deg is None:
            return 0.5 * (min(self.alphas) + max(self.alphas))
        return self.sector_center_deg

    def scenario(self, asnr_db=None):
        return Scenario.from_asnr(
            self.geom, tuple(np.deg2rad(self.alphas)),
            self.asnr_db if asnr_db is None else asnr_db,
            noise_power=self.sigma2, num_snapshots=self.K, seed=self.seed,
        )

    def mc_config(self):
        return McConfig(
            num_sensors=self.N, alphas_deg=self.alphas, num_snapshots=self.K,
            dim=self.n, half_bandwidth=self.B, spacing_ratio=self.d_over_lambda,
            sector_center_deg=self.sector_center_deg, noise_power=self.sigma2,
            space=self.space, snr_start_db=self.snr_start_db,
            snr_stop_db=self.snr_stop_db, snr_step_db=self.snr_step_db,
            trials=self.trials, bw_constant=self.bw_constant,
            grid_step_deg=self.grid_step_deg, grid_half_span_bw=self.grid_half_span_bw,
            gain_mode=self.gain_mode, base_seed=self.seed,
        )

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def _describe(err):
    path = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "additionalProperties":
        return f"unknown config key: {err.message}"
    if err.validator == "required":
        return f"missing config key: {err.message}"
    bounds = {"minimum": ">=", "maximum": "<=", "exclusiveMinimum": ">", "exclusiveMaximum": "<"}
    if err.validator in bounds:
        return (f"invalid config key '{path}': {path} {bounds[err.validator]} "
                f"{err.validator_value} required, got {err.instance}")
    return f"invalid config key '{path}': {err.message}"


def validate(doc):
    """Raise :class:`ConfigError` naming the first offending key."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_describe(errors[0]))


def from_dict(doc):
    validate(doc)
    return RunConfig(**doc)


def parse_config(text):
    """Parse and validate a JSON config document, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return from_dict(doc)


def serialize_config(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def load_config(path):
    """Read a config file, or the config echoed inside a run manifest."""
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict) and "config" in doc and "tool" in doc:
        doc = doc["config"]
    return from_dict(doc)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def emit_csv(path, rows, columns):
    """Write ``rows`` (dicts) with the given column order, 6 significant digits."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row.get(c)) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def emit_manifest(path, command, cfg, outputs=(), started=None, extra=None):
    """JSON manifest with config echo, seed, versions and wall-clock time."""
    now = time.time()
    manifest = {
        "tool": "sectormusic",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        "base_seed": cfg.seed,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "wall_clock_s": None if started is None else round(now - started, 3),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "outputs": [str(Path(o).name) for o in outputs],
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(manifest, indent=2, default=_json_default))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def config_fields():
    return [f.name for f in fields(RunConfig)]

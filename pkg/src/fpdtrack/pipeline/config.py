"""Pipeline configuration document (cfg.json).

Relative paths are resolved against the directory of the config file. Stage
sections the document omits, and keys missing from the sections it gives,
come from the loaded settings when ``load`` receives them.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.fpdtrack.correction.dtc import FusionPolicy
from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.jaccard import MetricsConfig
from src.fpdtrack.perception.mcmd import McmdConfig
from src.fpdtrack.perception.mpd import MpdConfig
from src.fpdtrack.settings import Settings
from src.fpdtrack.video.io import DEFAULT_FPS

STAGE_SECTIONS = ("mcmd", "mpd", "metrics")


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def seed_from_settings(raw: dict[str, Any], settings: Settings) -> dict[str, Any]:
    """Fill stage sections and ``default_fps`` from settings under the document's own keys."""
    seeded = dict(raw)
    for section in STAGE_SECTIONS:
        override = raw.get(section)
        if override is None or isinstance(override, dict):
            seeded[section] = _merge(asdict(getattr(settings, section)), override or {})
    seeded.setdefault("default_fps", settings.default_fps)
    return seeded


class PipelineConfig(BaseModel):
    """One video: frames, named track sources, policy and stage configs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str | None = None
    frames_dir: Path
    manifest: Path | None = None
    sources: dict[str, Path] = Field(min_length=1)
    policy: FusionPolicy | Path
    mcmd: McmdConfig = McmdConfig()
    mpd: MpdConfig = MpdConfig()
    metrics: MetricsConfig = MetricsConfig()
    default_fps: float = Field(default=DEFAULT_FPS, gt=0)
    ground_truth: Path | None = None
    labels: Path | None = None
    output_dir: Path | None = None
    fused_format: Literal["binary", "json"] = "binary"
    stabilize: bool | None = None  # overrides policy.stabilize_static when set

    @property
    def video_name(self) -> str:
        return self.name or self.frames_dir.name

    def resolved(self, base: Path) -> "PipelineConfig":
        """Copy with every relative path anchored at ``base``."""
        def anchor(p: Path | None) -> Path | None:
            if p is None:
                return None
            return p if p.is_absolute() else base / p

        return self.model_copy(update={
            "frames_dir": anchor(self.frames_dir),
            "manifest": anchor(self.manifest),
            "sources": {label: anchor(p) for label, p in self.sources.items()},
            "policy": anchor(self.policy) if isinstance(self.policy, Path) else self.policy,
            "ground_truth": anchor(self.ground_truth),
            "labels": anchor(self.labels),
            "output_dir": anchor(self.output_dir),
        })

    def resolve_policy(self) -> FusionPolicy:
        policy = FusionPolicy.load(self.policy) if isinstance(self.policy, Path) else self.policy
        if self.stabilize is not None and self.stabilize != policy.stabilize_static:
            policy = policy.model_copy(update={"stabilize_static": self.stabilize})
        return policy

    def validate_stages(self) -> "PipelineConfig":
        self.mcmd.validate()
        self.mpd.validate()
        self.metrics.validate()
        return self

    @classmethod
    def load(cls, path: str | Path, settings: Settings | None = None) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            if settings is not None and isinstance(raw, dict):
                raw = seed_from_settings(raw, settings)
            cfg = cls.model_validate(raw)
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"invalid pipeline config {path}: {e}") from e
        return cfg.resolved(path.parent.resolve())

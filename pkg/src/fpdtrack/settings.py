"""Default settings from src/configs/fpd.yaml plus FPD_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

from src.fpdtrack.errors import ConfigError
from src.fpdtrack.metrics.jaccard import MetricsConfig
from src.fpdtrack.perception.mcmd import McmdConfig
from src.fpdtrack.perception.mpd import MpdConfig
from src.fpdtrack.perception.ssim import SsimConfig
from src.fpdtrack.video.io import DEFAULT_FPS

DEFAULT_SETTINGS_PATH = Path(__file__).resolve().parent.parent / "configs" / "fpd.yaml"


@dataclass(frozen=True)
class Settings:
    threads: int = 0
    log_level: str = "INFO"
    default_fps: float = DEFAULT_FPS
    mcmd: McmdConfig = field(default_factory=McmdConfig)
    mpd: MpdConfig = field(default_factory=MpdConfig)
    metrics: MetricsConfig = field(default_factory=MetricsConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Settings":
        """Build from the parsed YAML layout; missing sections keep defaults."""
        try:
            runtime = data.get("runtime") or {}
            ssim = SsimConfig(**(data.get("ssim") or {}))
            mcmd = McmdConfig(**(data.get("mcmd") or {}), ssim=ssim)
            mpd = MpdConfig(**(data.get("mpd") or {}))
            metrics_raw = dict(data.get("metrics") or {})
            if "thresholds" in metrics_raw:
                metrics_raw["thresholds"] = tuple(float(t) for t in metrics_raw["thresholds"])
            metrics = MetricsConfig(**metrics_raw)
            video = data.get("video") or {}
            settings = cls(
                threads=int(runtime.get("threads", 0)),
                log_level=str(runtime.get("log_level", "INFO")),
                default_fps=float(video.get("default_fps", DEFAULT_FPS)),
                mcmd=mcmd,
                mpd=mpd,
                metrics=metrics,
            )
        except (TypeError, ValueError, AttributeError) as e:
            raise ConfigError(f"invalid settings: {e}") from e
        return settings.validate()

    def validate(self) -> "Settings":
        self.mcmd.validate()
        self.mpd.validate()
        self.metrics.validate()
        if not self.default_fps > 0:
            raise ConfigError(f"default_fps must be positive, got {self.default_fps}")
        return self

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Settings":
        """Read the settings file, then apply FPD_THREADS / FPD_LOG_LEVEL."""
        load_dotenv()
        path = Path(path or os.getenv("FPD_CONFIG") or DEFAULT_SETTINGS_PATH)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except FileNotFoundError as e:
            raise ConfigError(f"settings file not found: {path}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"settings file {path} is not valid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"settings file {path} must hold a mapping")

        runtime = dict(data.get("runtime") or {})
        if os.getenv("FPD_THREADS", "").strip():
            try:
                runtime["threads"] = int(os.environ["FPD_THREADS"])
            except ValueError as e:
                raise ConfigError(f"FPD_THREADS must be an integer, got {os.environ['FPD_THREADS']!r}") from e
        if os.getenv("FPD_LOG_LEVEL", "").strip():
            runtime["log_level"] = os.environ["FPD_LOG_LEVEL"].strip().upper()
        return cls.from_dict({**data, "runtime": runtime})

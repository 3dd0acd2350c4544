"""Shared fixtures."""

import numpy as np
import pytest

from src.fpdtrack.runtime import configure_threads
from src.fpdtrack.synth.scene import generate_scene
from src.fpdtrack.video.models import Frame, VideoSequence
from tests.builders import make_tracks, pan_scene_spec, static_scene_spec


@pytest.fixture(autouse=True)
def _reset_threads(monkeypatch):
    """Each test starts from auto worker sizing."""
    monkeypatch.delenv("FPD_THREADS", raising=False)
    configure_threads(None)
    yield
    configure_threads(None)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise_frame(rng):
    return Frame(rng.random((32, 32)))


@pytest.fixture
def still_video(noise_frame):
    """Twenty copies of one frame."""
    return VideoSequence(tuple([noise_frame] * 20), fps=10.0)


@pytest.fixture
def static_scene():
    return generate_scene(static_scene_spec(7), threads=1)


@pytest.fixture
def pan_scene():
    return generate_scene(pan_scene_spec(8), threads=1)


@pytest.fixture
def constant_tracks():
    """Three points that never move."""
    coords = np.tile(np.array([[[0.25, 0.5]], [[0.5, 0.5]], [[0.75, 0.25]]]), (1, 10, 1))
    return make_tracks(coords, name="constant")

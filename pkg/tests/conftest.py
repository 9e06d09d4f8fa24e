import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

# Ensure `src` is on sys.path for test discovery
ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from harness.scenario_io import load_scenario  # noqa: E402
from mechanism.model import Configuration, Pose  # noqa: E402

SCENARIOS = ROOT / "scenarios"
CENTER = np.array([0.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def screw():
    return load_scenario(SCENARIOS / "canonical.json")


@pytest.fixture(scope="session")
def winder():
    return load_scenario(SCENARIOS / "canonical_winder.json")


@pytest.fixture(scope="session")
def gripper():
    return load_scenario(SCENARIOS / "canonical_gripper.json")


@pytest.fixture(scope="session")
def rotatable():
    return load_scenario(SCENARIOS / "canonical_rotatable.json")


@pytest.fixture(params=["canonical.json", "canonical_winder.json", "canonical_gripper.json", "canonical_rotatable.json"])
def any_scenario(request):
    return load_scenario(SCENARIOS / request.param)


def random_configuration(spec, rng: np.random.Generator, margin: float = 0.01) -> Configuration:
    """A valid configuration around the frame centre with a small random tilt."""
    position = CENTER + rng.uniform([-0.2, -0.2, -0.15], [0.2, 0.2, 0.15])
    rotvec = rng.uniform(-0.2, 0.2, size=3)
    internal = []
    for name in spec.variant.internal_names:
        if name in spec.stroke_limits:
            lo, hi = spec.stroke_limits[name]
            internal.append(rng.uniform(lo + margin, hi - margin))
        else:
            internal.append(rng.uniform(-0.5, 0.5))
    return Configuration(Pose.from_rotation(position, Rotation.from_rotvec(rotvec)), tuple(internal))

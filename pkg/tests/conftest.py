import json
import math

import numpy as np
import pytest

from resonance_control.control.adiabatic import TrackingPulse
from resonance_control.control.pulses import SquarePulse
from resonance_control.control.robust import RobustDesign, RobustPulse
from resonance_control.model.core import AmplitudeState


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_amplitude_state(rng):
    """Normalized random amplitude state factory"""

    def make() -> AmplitudeState:
        z = rng.normal(size=4)
        state = AmplitudeState(complex(z[0], z[1]), complex(z[2], z[3]))
        scale = math.sqrt(state.norm)
        return AmplitudeState(state.b1 / scale, state.b2 / scale)

    return make


@pytest.fixture
def rabi_pulse():
    """Resonant constant drive of area 2 pi over [0, 1]"""
    return SquarePulse.with_area(2.0 * math.pi)


@pytest.fixture
def tracking_pulse():
    return TrackingPulse()


@pytest.fixture(scope="session")
def robust_pulse():
    return RobustPulse(design=RobustDesign(coefficients=(-0.5,)))


@pytest.fixture
def write_config(tmp_path):
    def write(payload: dict, name: str = "run.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write

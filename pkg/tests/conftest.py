import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def fig1_config():
    """The reference sub-barrier configuration used across the suite."""
    from lindblad_tunneling import DimensionlessConfig

    return DimensionlessConfig(z=-3.0, v=-0.5, eps=0.5, r=0.5, gamma=0.0, theta=1.0)

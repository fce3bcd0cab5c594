import numpy as np
import pytest

from qgi import GridConfig, Rect, Scene


@pytest.fixture
def grid4():
    return GridConfig(4, 4)


@pytest.fixture
def worked_scenes(grid4):
    """The 4x4 demo pair: cells {1,2,5,6} vs {6,7,10,11}, overlapping in 6."""
    return (Scene(grid4, rects=(Rect(0, 0, 1, 1),)),
            Scene(grid4, rects=(Rect(1, 1, 2, 2),)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)

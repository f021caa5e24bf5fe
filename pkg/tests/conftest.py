import numpy as np
import pytest

from specpol import essrange
from specpol.operators import delay_operator, ex1_models, sum_models
from specpol.scenarios import parabola_region_support

DELAY_CLIP = (0.0, 30.0, -6.0, 6.0)


def block_schedule(block_starts, block_width, clip):
    starts = tuple(2 * b - 1 for b in block_starts)
    return essrange.WindowSchedule(starts, 2 * block_width - 1, clip)


@pytest.fixture(scope="session")
def delay_model():
    return delay_operator()


@pytest.fixture(scope="session")
def delay_schedule():
    return block_schedule((32, 64, 128, 256), 16, DELAY_CLIP)


@pytest.fixture(scope="session")
def delay_estimate(delay_model, delay_schedule):
    return essrange.estimate_essential_range(delay_model, delay_schedule)


@pytest.fixture(scope="session")
def parabola_region():
    """Closed-form region {Re z >= 3/4 + (Im z)^2} clipped to the delay box."""
    return parabola_region_support(DELAY_CLIP)


@pytest.fixture(scope="session")
def ex1_sum_model():
    return sum_models(*ex1_models(), label="ex1-T+S")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)

import numpy as np
import pytest

from ratinglab import (
    BisectorTable,
    ConstantK,
    Grid,
    RatingSystem,
    Separable,
    SonasLike,
    ThresholdedLogistic,
    Trivial,
    builtin_systems,
)


@pytest.fixture(scope="session")
def systems():
    return builtin_systems()


@pytest.fixture(scope="session")
def grid():
    return Grid(1000.0, 2000.0, 50.0)


@pytest.fixture(scope="session")
def sonas():
    return SonasLike(slope=0.001, threshold=400.0)


@pytest.fixture(scope="session")
def elo_clamped():
    return ThresholdedLogistic(scale=400.0, clamp=400.0)


@pytest.fixture(scope="session")
def elo_unclamped():
    return ThresholdedLogistic(scale=400.0)


@pytest.fixture(scope="session")
def linear_separable_system():
    """Globally separable system whose bisector spans exactly [0, 0.5] over
    ratings [0, 4000], paired with a constant K: opponent indifferent on the
    whole table, so its chains hit the theoretical length bound."""
    table = BisectorTable(np.array([0.0, 4000.0]), np.array([0.0, 0.5]), reference=0.0)
    return RatingSystem(Separable(table), ConstantK(32.0))


@pytest.fixture(scope="session")
def tanh_bisector():
    xs = np.arange(-800.0, 801.0, 25.0)
    return BisectorTable(xs, 0.4 * np.tanh(xs / 500.0), reference=0.0)


@pytest.fixture(scope="session")
def trivial_system():
    return RatingSystem(Trivial(), ConstantK(32.0))

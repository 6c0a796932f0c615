import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from zzgril.bifiltration import build
from zzgril.simplicial import rips_level_filtration

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def moving_points_rule(d: float) -> int:
    return 1 if d == 0 else (2 if d <= 5 else 3)


def three_point_instance():
    """Three points on a line; the middle one drifts toward the left one at time 1."""
    frames = [[[0.0], [10.0], [20.0]], [[0.0], [4.0], [20.0]]]
    return build([rips_level_filtration(f, 3, 2, moving_points_rule) for f in frames])


@pytest.fixture
def tri():
    return three_point_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def two_cluster_toy(n_per_class: int = 4, seed: int = 0):
    """Class 0: channels sit in two far-apart groups.  Class 1: one group."""
    from zzgril.pipeline import Sample, TimeSeriesDataset

    rng = np.random.default_rng(seed)
    samples = []
    for i in range(2 * n_per_class):
        label = i % 2
        groups = 2 - label
        offsets = np.array([0.0, 10.0])[:groups][np.arange(8) % groups]
        data = offsets[:, None] + rng.standard_normal((8, 12))
        samples.append(Sample(f"t{i:02d}", data, str(label)))
    return TimeSeriesDataset(samples)

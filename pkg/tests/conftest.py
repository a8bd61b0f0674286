from pathlib import Path

import numpy as np
import pytest

from fdbench.fdata import FunctionalDataset, FunctionalFeature, Task, load_ucr_tsv

DATA = Path(__file__).resolve().parent.parent / "data" / "ucr"


@pytest.fixture(scope="session")
def gunpoint():
    return load_ucr_tsv(DATA / "GunPoint")


def curve_task(n=40, length=32, n_classes=2, seed=0, name="synthetic", noise=0.3):
    """Classes differ by the frequency of a sine; labels balanced."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % n_classes
    t = np.linspace(0, 1, length)
    X = np.sin(2 * np.pi * (y[:, None] + 1) * t) + rng.normal(scale=noise, size=(n, length))
    ds = FunctionalDataset({}, [FunctionalFeature("series", X)])
    return Task.classification(name, ds, [f"c{v}" for v in y])


@pytest.fixture
def small_task():
    return curve_task()

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from fdbench import dtw

FROZEN = json.loads((Path(__file__).parent / "fixtures" / "oracles.json").read_text())
BACKENDS = dtw.available_backends()


def test_compiled_backend_is_built():
    assert dtw.BACKEND == "cython", "compiled DTW extension missing; run pip install -e ."


@pytest.mark.parametrize("backend", BACKENDS)
def test_frozen_exhaustive_values(backend):
    for case in FROZEN["dtw"]:
        assert dtw.dtw_cost(case["a"], case["b"], backend=backend) == pytest.approx(case["cost_full"], abs=1e-12)
        assert dtw.dtw_cost(case["a"], case["b"], band=case["band"], backend=backend) == pytest.approx(
            case["cost_band"], abs=1e-12)


def test_frozen_values_still_match_oracle():
    for case in FROZEN["dtw"][:10]:
        assert oracles.dtw_exhaustive(case["a"], case["b"]) == case["cost_full"]


@pytest.mark.parametrize("backend", BACKENDS)
def test_hand_examples(backend):
    assert dtw.dtw_distance([0, 0, 1], [0, 1, 1], 1.0, backend=backend) == 0.0
    assert dtw.dtw_distance([0, 1], [1, 0], 0.0, backend=backend) == math.sqrt(2)


def test_band_halfwidth():
    assert dtw.band_halfwidth(0.0, 100) == 1
    assert dtw.band_halfwidth(0.1, 128) == 13
    assert dtw.band_halfwidth(1.0, 16) == 16
    with pytest.raises(ValueError):
        dtw.band_halfwidth(1.5, 10)


def test_backends_bit_identical():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend available")
    rng = np.random.default_rng(4)
    A = rng.normal(size=(12, 33))
    B = rng.normal(size=(7, 33))
    for w in (0.0, 0.1, 0.5, 1.0):
        np.testing.assert_array_equal(dtw.dtw_pairwise(A, B, w, backend="python"),
                                      dtw.dtw_pairwise(A, B, w, backend="cython"))
        np.testing.assert_array_equal(dtw.dtw_pairwise(A, None, w, backend="python"),
                                      dtw.dtw_pairwise(A, None, w, backend="cython"))


def test_unequal_lengths_match_recursion():
    rng = np.random.default_rng(8)
    for _ in range(20):
        a, b = rng.normal(size=rng.integers(2, 12)), rng.normal(size=rng.integers(2, 12))
        for band in (1, 3, None):
            ref = oracles.dtw_recursive(a, b, None if band is None else max(band, abs(len(a) - len(b))))
            for backend in BACKENDS:
                assert dtw.dtw_cost(a, b, band, backend=backend) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_pairwise_matches_single_calls():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(5, 10))
    D = dtw.dtw_pairwise(A, window=0.3)
    for i in range(5):
        for j in range(5):
            assert D[i, j] == dtw.dtw_distance(A[i], A[j], 0.3)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        dtw.dtw_distance([], [1.0])
    with pytest.raises(ValueError):
        dtw.dtw_distance([np.nan, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        dtw.dtw_cost([1.0], [2.0], backend="fortran")


series = arrays(np.float64, st.integers(2, 14), elements=st.floats(-100, 100, allow_nan=False))


@settings(max_examples=100, deadline=None)
@given(series, st.floats(0, 1))
def test_metric_properties(x, w):
    y = np.roll(x, 1) * 0.5 + 1.0
    assert dtw.dtw_distance(x, x, w) == 0.0
    d = dtw.dtw_distance(x, y, w)
    assert d >= 0.0
    assert d == dtw.dtw_distance(y, x, w)
    assert dtw.dtw_distance(x, y, 1.0) <= d + 1e-12
    # unit-band DTW never exceeds the Euclidean distance
    assert dtw.dtw_distance(x, y, 0.0) <= np.linalg.norm(x - y) + 1e-9

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsteg.sampling import inverse_sample, subsample

even_square = st.integers(1, 16).flatmap(lambda h: arrays(np.float64, (2 * h, 2 * h), elements=st.floats(-1e6, 1e6)))


def test_two_by_two_example():
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    parts = subsample(np.array([[a, c], [b, d]]))
    assert [p.item() for p in parts] == [a, b, c, d]
    np.testing.assert_array_equal(inverse_sample([np.array([[v]]) for v in (a, b, c, d)]), [[a, c], [b, d]])


def test_constant_image():
    parts = subsample(np.full((6, 6), 9.0))
    assert all(p.shape == (3, 3) and np.all(p == 9.0) for p in parts)
    np.testing.assert_array_equal(inverse_sample(parts), 9.0)


def test_full_size():
    parts = subsample(np.zeros((1024, 1024)))
    assert [p.shape for p in parts] == [(512, 512)] * 4


@pytest.mark.parametrize("shape", [(3, 3), (4, 6), (5, 4)])
def test_rejects_odd_or_non_square(shape):
    with pytest.raises(ValueError):
        subsample(np.zeros(shape))


def test_rejects_mismatched_parts():
    with pytest.raises(ValueError):
        inverse_sample([np.zeros((2, 2))] * 3 + [np.zeros((3, 3))])
    with pytest.raises(ValueError):
        inverse_sample([np.zeros((2, 2))] * 3)


@given(even_square)
def test_round_trip(img):
    np.testing.assert_array_equal(inverse_sample(subsample(img)), img)


@given(even_square)
def test_parts_round_trip(img):
    parts = [p + 1 for p in subsample(img)]
    back = subsample(inverse_sample(parts))
    for got, want in zip(back, parts):
        np.testing.assert_array_equal(got, want)


def test_partition_property():
    img = np.arange(64.0).reshape(8, 8)
    values = np.concatenate([p.ravel() for p in subsample(img)])
    assert sorted(values) == list(range(64))

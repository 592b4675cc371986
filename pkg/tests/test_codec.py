import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsteg.codec import EmbedConstants, EmbedConstantsError, embed_block, extract_block

K = EmbedConstants()
LENGTH = 32 + 1600
finite = st.floats(-1e4, 1e4)


def test_single_value_example():
    y = np.zeros(LENGTH)
    y[19] = 2.0  # y(20), 1-based
    t = np.zeros(32)
    t[0] = 100.0
    assert embed_block(y, t, K)[31] == pytest.approx(3.0)


def test_zero_payload_copies():
    y = np.arange(1.0, LENGTH + 1)  # y(i) = i
    out = embed_block(y, np.zeros(32), K)
    assert out[31] == 20
    assert out[26:31].tolist() == list(range(21, 26))
    assert out[64:90].tolist() == list(range(39, 65))


def test_modified_index_set():
    expected = {32} | set(range(27, 32)) | set(range(65, 91))
    assert set((K.written_indices() + 1).tolist()) == expected
    assert len(expected) == 32
    y = np.random.default_rng(0).normal(size=LENGTH)
    t = np.random.default_rng(1).normal(size=32)
    changed = np.flatnonzero(embed_block(y, t, K) != y) + 1
    assert set(changed.tolist()) == expected


def test_untouched_entries_copied(rng):
    y = rng.normal(size=LENGTH)
    out = embed_block(y, rng.normal(size=32), K)
    mask = np.ones(LENGTH, bool)
    mask[K.written_indices()] = False
    np.testing.assert_array_equal(out[mask], y[mask])


def test_inverse_on_many_pairs(rng):
    y = rng.normal(scale=100, size=(10_000, LENGTH))
    t = rng.normal(scale=100, size=(10_000, 32))
    got = extract_block(embed_block(y, t, K), K)
    rel = np.abs(got - t).max(axis=1) / np.abs(t).max(axis=1)
    assert rel.max() <= 1e-9


@given(arrays(np.float64, 60, elements=finite), arrays(np.float64, 12, elements=finite),
       st.sampled_from([0.01, 0.1, 1.0, -2.5]), st.integers(1, 4))
def test_inverse_property(y, t, gain, c):
    k = EmbedConstants(alpha=gain, beta=gain * 3, gamma=1.0, c=c, p1=12, p4=12)
    got = extract_block(embed_block(y, t, k), k)
    np.testing.assert_allclose(got, t, rtol=1e-9, atol=1e-9 * np.abs(y).max() / abs(gain) + 1e-12)


def test_zero_round_trip(rng):
    y = rng.normal(size=LENGTH)
    assert not extract_block(embed_block(y, np.zeros(32), K), K).any()


def test_linear_in_payload(rng):
    y = rng.normal(size=LENGTH)
    t1, t2 = rng.normal(size=(2, 32))
    diff = embed_block(y, t1 + t2, K) - embed_block(y, t1, K)
    dst, _, coef, gain = K._index_map
    np.testing.assert_allclose(diff[dst], gain * t2[coef], atol=1e-12)
    diff[dst] = 0
    assert not diff.any()


def test_wrong_constants_give_large_error(rng):
    y = rng.normal(scale=50, size=LENGTH)
    t = rng.normal(scale=50, size=32)
    wrong = EmbedConstants(1.0, 1.0, 1.0, 1)
    got = extract_block(embed_block(y, t, K), wrong)
    assert np.linalg.norm(got - t) > np.linalg.norm(t)


@pytest.mark.parametrize(
    "kwargs, fragment",
    [
        (dict(c=20), "p1 - 2c"),
        (dict(alpha=0.0), "alpha"),
        (dict(c=0), "1 <= c < p4"),
        (dict(c=32), "1 <= c < p4"),
    ],
)
def test_violations(kwargs, fragment):
    bad = EmbedConstants(**kwargs).violations(LENGTH)
    assert any(fragment in v for v in bad)
    with pytest.raises(EmbedConstantsError):
        embed_block(np.zeros(LENGTH), np.zeros(32), EmbedConstants(**kwargs))


def test_length_checks():
    assert EmbedConstants().violations(LENGTH) == []
    assert any("exceeds" in v for v in EmbedConstants().violations(80))
    assert any("p4 must be less" in v for v in EmbedConstants(p1=4, p4=32, c=1).violations(32))


@given(st.integers(1, 40), st.integers(2, 40))
def test_valid_constants_never_clash(p1, p4):
    for c in range(1, p4):
        k = EmbedConstants(c=c, p1=p1, p4=p4)
        if p1 - 2 * c >= 1:
            assert k._overlaps() == []


def test_stacked_inputs(rng):
    y = rng.normal(size=(3, 5, LENGTH))
    t = rng.normal(size=(3, 5, 32))
    out = embed_block(y, t, K)
    assert out.shape == y.shape
    np.testing.assert_array_equal(out[1, 2], embed_block(y[1, 2], t[1, 2], K))


def test_payload_length_checked():
    with pytest.raises(ValueError):
        embed_block(np.zeros(LENGTH), np.zeros(31), K)

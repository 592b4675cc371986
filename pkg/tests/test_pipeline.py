import numpy as np
import pytest

from sparsteg import pipeline
from sparsteg.config import default_key, validate
from sparsteg.image_io import quantize
from sparsteg.metrics import nae, psnr
from sparsteg.suite import cover_image, secret_image

CFG = validate(default_key(seed=77, r=128, m=64))


@pytest.fixture(scope="module")
def cover():
    return cover_image("camera", 128)


@pytest.fixture(scope="module")
def secrets():
    return {i + 1: secret_image(n, 64) for i, n in enumerate(["astronaut", "coffee", "chelsea", "camera"])}


def test_capacity():
    cfg = validate(default_key(seed=1))
    assert [pipeline.capacity(cfg, n) for n in range(1, 5)] == [2.0, 4.0, 6.0, 8.0]
    with pytest.raises(ValueError):
        pipeline.capacity(cfg, 5)


def test_embed_extract_round_trip(cover, secrets):
    stego = pipeline.embed(cover, secrets, CFG)
    assert stego.shape == cover.shape and stego.dtype == np.uint8
    assert psnr(cover, stego) > 30
    for slot, got in zip(range(1, 5), pipeline.extract(stego, [1, 2, 3, 4], CFG)):
        assert got.shape == (64, 64)
        assert nae(secrets[slot], got) < 0.2


def test_extract_has_no_cover_argument():
    import inspect

    assert list(inspect.signature(pipeline.extract).parameters) == ["stego", "slots", "cfg"]


def test_deterministic(cover, secrets):
    a = pipeline.embed(cover, {2: secrets[2]}, CFG)
    b = pipeline.embed(cover, {2: secrets[2]}, CFG)
    np.testing.assert_array_equal(a, b)


def test_slot_independence(cover, secrets):
    bare, _ = pipeline.embed_real(cover, {}, CFG)
    loaded, _ = pipeline.embed_real(cover, {1: secrets[1], 3: secrets[3]}, CFG)
    np.testing.assert_array_equal(loaded[1::2, 0::2], bare[1::2, 0::2])  # slot 2
    np.testing.assert_array_equal(loaded[1::2, 1::2], bare[1::2, 1::2])  # slot 4
    assert not np.array_equal(loaded[0::2, 0::2], bare[0::2, 0::2])


def test_passthrough_empty(cover, secrets):
    stego, report = pipeline.embed_real(cover, {1: secrets[1]}, CFG, passthrough_empty=True)
    np.testing.assert_array_equal(stego[1::2, :], cover[1::2, :])
    np.testing.assert_array_equal(stego[0::2, 1::2], cover[0::2, 1::2])
    assert list(report.iterations) == [1]


def test_black_secret_close_to_bare_reconstruction(cover):
    bare, _ = pipeline.embed_real(cover, {}, CFG)
    black, _ = pipeline.embed_real(cover, {1: np.zeros((64, 64), np.uint8)}, CFG)
    # only the coefficient copying differs
    assert psnr(quantize(bare), quantize(black)) > 30
    assert not np.array_equal(bare, black)


def test_float_path_recovers_head_exactly(cover, secrets):
    stego, _ = pipeline.embed_real(cover, {3: secrets[3]}, CFG)
    t = pipeline.secret_coefficients(secrets[3], CFG)
    got = pipeline.extract_coefficients(stego, 3, CFG)
    c = CFG.constants.c
    np.testing.assert_allclose(got[:, :c], t[:, :c], atol=1e-6)


def test_wrong_keys_give_higher_error(cover, secrets):
    from sparsteg.experiment import wrong_constants_key

    stego = pipeline.embed(cover, {1: secrets[1]}, CFG)
    good = nae(secrets[1], pipeline.extract(stego, [1], CFG)[0])
    bad = nae(secrets[1], pipeline.extract(stego, [1], validate(wrong_constants_key(CFG.key)))[0])
    assert bad > 5 * good


def test_report(cover, secrets):
    _, report = pipeline.embed_real(cover, {4: secrets[4]}, CFG)
    assert sorted(report.iterations) == [1, 2, 3, 4]
    assert report.all_iterations().size == 4 * CFG.n_cover_blocks


def test_fewer_secret_blocks_than_cover_blocks(cover):
    cfg = validate(default_key(seed=5, r=128, m=32))
    secret = secret_image("coffee", 32)
    stego = pipeline.embed(cover, {1: secret}, cfg)
    assert nae(secret, pipeline.extract(stego, [1], cfg)[0]) < 0.25


@pytest.mark.parametrize("bad", [{0: None}, {5: None}])
def test_slot_range(cover, bad):
    with pytest.raises(ValueError):
        pipeline.embed(cover, {k: np.zeros((64, 64), np.uint8) for k in bad}, CFG)


def test_size_checks(cover, secrets):
    with pytest.raises(ValueError, match="cover must be 128x128"):
        pipeline.embed(cover[:64, :64], secrets, CFG)
    with pytest.raises(ValueError, match="secret for slot 1"):
        pipeline.embed(cover, {1: cover}, CFG)
    with pytest.raises(ValueError):
        pipeline.extract(cover[:64], [1], CFG)
    with pytest.raises(ValueError):
        pipeline.extract(cover, [1, 1], CFG)


def test_backends_give_same_stego(cover, secrets):
    from sparsteg.lasso_admm import AVAILABLE_BACKENDS

    if len(AVAILABLE_BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    a = pipeline.embed(cover, secrets, CFG, backend="cython")
    b = pipeline.embed(cover, secrets, CFG, backend="numpy")
    assert np.abs(a.astype(int) - b).max() <= 1

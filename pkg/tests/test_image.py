import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from gradlight.image import (
    ImageReadError,
    IntensityRange,
    UnsupportedFormatError,
    as_gray,
    load_image,
    quantize,
    round_half_away,
    save_image,
)

R = IntensityRange()


def test_load_pgm_bytes(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n2 1\n255\n" + bytes([0, 255]))
    img = load_image(p)
    assert img.shape == (1, 2)
    np.testing.assert_array_equal(img, [[0.0, 255.0]])


def test_load_ppm_bytes(tmp_path):
    p = tmp_path / "a.ppm"
    p.write_bytes(b"P6\n1 1\n255\n" + bytes([10, 20, 30]))
    np.testing.assert_array_equal(load_image(p), [[[10.0, 20.0, 30.0]]])


def test_load_png_rgb(tmp_path):
    p = tmp_path / "a.png"
    Image.fromarray(np.array([[[10, 20, 30]]], dtype=np.uint8)).save(p)
    img = load_image(p)
    assert img.shape == (1, 1, 3)
    np.testing.assert_array_equal(img[0, 0], [10.0, 20.0, 30.0])


def test_truncated_png(tmp_path):
    good = tmp_path / "good.png"
    Image.fromarray(np.arange(64 * 64, dtype=np.uint8).reshape(64, 64)).save(good)
    bad = tmp_path / "bad.png"
    bad.write_bytes(good.read_bytes()[:60])
    with pytest.raises(ImageReadError, match="unreadable file"):
        load_image(bad)


def test_missing_file(tmp_path):
    with pytest.raises(ImageReadError):
        load_image(tmp_path / "nope.png")


def test_unsupported_format(tmp_path):
    p = tmp_path / "a.bmp"
    Image.fromarray(np.zeros((2, 2), dtype=np.uint8)).save(p)
    with pytest.raises(UnsupportedFormatError):
        load_image(p)
    with pytest.raises(UnsupportedFormatError):
        save_image(np.zeros((2, 2)), tmp_path / "out.jpg")


def test_sixteen_bit_rejected(tmp_path):
    p = tmp_path / "a.png"
    Image.fromarray(np.full((2, 2), 40000, dtype=np.uint16)).save(p)
    with pytest.raises(UnsupportedFormatError):
        load_image(p)


@pytest.mark.parametrize(
    "sample, byte",
    [(254.6, 255), (-0.4, 0), (127.5, 128), (127.49, 127), (300.0, 255), (0.5, 1)],
)
def test_save_rounding(tmp_path, sample, byte):
    p = tmp_path / "s.pgm"
    save_image(np.array([[sample]]), p, R)
    assert p.read_bytes()[-1] == byte


def test_save_maps_custom_range(tmp_path):
    p = tmp_path / "s.png"
    save_image(np.array([[-1.0, 0.0, 1.0]]), p, IntensityRange(-1.0, 1.0))
    np.testing.assert_array_equal(load_image(p), [[0.0, 128.0, 255.0]])


def test_save_unwritable(tmp_path):
    from gradlight.image import ImageWriteError

    with pytest.raises(ImageWriteError):
        save_image(np.zeros((2, 2)), tmp_path / "missing_dir" / "x.png")


def test_round_half_away():
    np.testing.assert_array_equal(round_half_away([0.5, 1.5, 2.5, -0.5, -2.5]), [1, 2, 3, -1, -3])


@pytest.mark.parametrize(
    "data, expected",
    [([0.2, 254.9], [0.0, 255.0]), ([-3.0, 300.0], [0.0, 255.0]), ([12.0, 200.0], [12.0, 200.0])],
)
def test_quantize_examples(data, expected):
    np.testing.assert_array_equal(quantize(np.array([data]), R), [expected])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (3, 4), elements=finite))
def test_quantize_idempotent(x):
    once = quantize(x, R)
    np.testing.assert_array_equal(quantize(once, R), once)
    assert R.contains(once)


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6))), st.sampled_from([".png", ".pgm"]))
def test_gray_round_trip(tmp_path_factory, data, ext):
    p = tmp_path_factory.mktemp("rt") / f"x{ext}"
    img = data.astype(np.float64)
    save_image(img, p, R)
    back = load_image(p)
    np.testing.assert_array_equal(back, img)
    assert back.min() >= 0 and back.max() <= 255


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3))), st.sampled_from([".png", ".ppm"]))
def test_rgb_round_trip(tmp_path_factory, data, ext):
    p = tmp_path_factory.mktemp("rt") / f"x{ext}"
    save_image(data.astype(np.float64), p, R)
    np.testing.assert_array_equal(load_image(p), data)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        as_gray(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        IntensityRange(5, 5)
    assert IntensityRange.parse("10:20") == IntensityRange(10, 20)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.fft import dctn, idctn

from progbench import imaging


# -- reference implementations used as oracles ------------------------------

def ref_cubic(x):
    a = -0.5
    x = abs(x)
    if x <= 1:
        return (a + 2) * x ** 3 - (a + 3) * x ** 2 + 1
    if x < 2:
        return a * x ** 3 - 5 * a * x ** 2 + 8 * a * x - 4 * a
    return 0.0


def ref_resize(img, out_w, out_h):
    h, w, c = img.shape
    out = np.zeros((out_h, out_w, c))
    for i in range(out_h):
        sy = (i + 0.5) * h / out_h - 0.5
        y0 = math.floor(sy)
        for j in range(out_w):
            sx = (j + 0.5) * w / out_w - 0.5
            x0 = math.floor(sx)
            acc = np.zeros(c)
            for a in range(y0 - 1, y0 + 3):
                wy = ref_cubic(sy - a) if out_h != h else float(a == i)
                for b in range(x0 - 1, x0 + 3):
                    wx = ref_cubic(sx - b) if out_w != w else float(b == j)
                    acc += wy * wx * img[min(max(a, 0), h - 1), min(max(b, 0), w - 1)]
            out[i, j] = acc
    return np.clip(out, 0, 1)


def ref_correlate(img, k, boundary):
    h, w, _ = img.shape
    r = k.shape[0] // 2
    out = np.zeros_like(img)
    for i in range(h):
        for j in range(w):
            acc = np.zeros(3)
            for a in range(-r, r + 1):
                for b in range(-r, r + 1):
                    if boundary == "clamp":
                        y, x = min(max(i + a, 0), h - 1), min(max(j + b, 0), w - 1)
                    else:
                        y, x = (i + a) % h, (j + b) % w
                    acc += k[a + r, b + r] * img[y, x]
            out[i, j] = acc
    return out


def ref_dct_artifact(img, quality):
    h, w, _ = img.shape
    ph, pw = -h % 8, -w % 8
    rgb = np.pad(img * 255.0, [(0, ph), (0, pw), (0, 0)], mode="edge")
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    planes = [0.299 * r + 0.587 * g + 0.114 * b,
              128 - 0.168736 * r - 0.331264 * g + 0.5 * b,
              128 + 0.5 * r - 0.418688 * g - 0.081312 * b]
    tables = [imaging.quant_table(imaging.LUMA_TABLE, quality)] + \
             [imaging.quant_table(imaging.CHROMA_TABLE, quality)] * 2
    rec = []
    for plane, q in zip(planes, tables):
        out = np.empty_like(plane)
        for by in range(0, plane.shape[0], 8):
            for bx in range(0, plane.shape[1], 8):
                c = dctn(plane[by:by + 8, bx:bx + 8] - 128, type=2, norm="ortho")
                c = np.round(c / q) * q
                out[by:by + 8, bx:bx + 8] = idctn(c, type=2, norm="ortho") + 128
        rec.append(out)
    y, cb, cr = rec[0], rec[1] - 128, rec[2] - 128
    back = np.stack([y + 1.402 * cr, y - 0.344136 * cb - 0.714136 * cr, y + 1.772 * cb], -1)
    return np.clip(back[:h, :w] / 255.0, 0, 1)


# -- resize -----------------------------------------------------------------

def test_resize_identity_is_bit_exact(rng):
    img = rng.random((13, 17, 3))
    out = imaging.resize(img, 17, 13)
    assert np.array_equal(out, img) and out is not img


@pytest.mark.parametrize("size", [(1, 1), (5, 9), (40, 23)])
def test_resize_preserves_constant(size):
    img = np.full((12, 10, 3), 0.5)
    out = imaging.resize(img, *size)
    assert out.shape == (size[1], size[0], 3)
    np.testing.assert_allclose(out, 0.5, atol=1e-12)


def test_resize_gradient_round_trip_matches_reference():
    yy, xx = np.mgrid[0:8, 0:8]
    img = np.stack([xx / 7.0, yy / 7.0, (xx + yy) / 14.0], axis=-1)
    small = imaging.resize(img, 4, 4)
    back = imaging.resize(small, 8, 8)
    ref_small = ref_resize(img, 4, 4)
    np.testing.assert_allclose(small, ref_small, atol=1e-6)
    np.testing.assert_allclose(back, ref_resize(ref_small, 8, 8), atol=1e-6)


def test_resize_random_anisotropic_matches_reference(rng):
    img = rng.random((9, 14, 3))
    for w, h in [(5, 9), (14, 4), (21, 17), (3, 20)]:
        np.testing.assert_allclose(imaging.resize(img, w, h), ref_resize(img, w, h), atol=1e-9)


@pytest.mark.parametrize("w,h", [(0, 4), (4, 0), (-1, 3)])
def test_resize_rejects_nonpositive_size(w, h):
    with pytest.raises(ValueError):
        imaging.resize(np.zeros((4, 4, 3)), w, h)


# -- convolution -------------------------------------------------------------

def test_convolve_identity_kernel(rng):
    img = rng.random((8, 9, 3))
    assert np.array_equal(imaging.convolve2d(img, np.ones((1, 1)), "clamp"), img)


@pytest.mark.parametrize("side", [3, 5, 21])
def test_convolve_constant_image(rng, side):
    k = rng.random((side, side))
    k /= k.sum()
    img = np.full((30, 30, 3), 0.3)
    for boundary in ("clamp", "periodic"):
        np.testing.assert_allclose(imaging.convolve2d(img, k, boundary), 0.3, atol=1e-12)


@pytest.mark.parametrize("boundary", ["clamp", "periodic"])
def test_convolve_matches_brute_force_5x5(rng, boundary):
    img = rng.random((16, 16, 3))
    k = rng.random((5, 5))
    k /= k.sum()
    np.testing.assert_allclose(imaging.convolve2d(img, k, boundary),
                               ref_correlate(img, k, boundary), atol=1e-9)


@pytest.mark.parametrize("boundary", ["clamp", "periodic"])
def test_convolve_fft_path_matches_brute_force(rng, boundary):
    img = rng.random((14, 19, 3))
    k = rng.random((17, 17))
    k /= k.sum()
    np.testing.assert_allclose(imaging.convolve2d(img, k, boundary),
                               ref_correlate(img, k, boundary), atol=1e-9)


def test_convolve_rejects_bad_kernels():
    img = np.zeros((4, 4, 3))
    with pytest.raises(ValueError):
        imaging.convolve2d(img, np.full((2, 2), 0.25))
    with pytest.raises(ValueError):
        imaging.convolve2d(img, np.full((3, 3), 0.2))
    with pytest.raises(ValueError):
        imaging.convolve2d(img, np.array([[0.5, -0.5, 1.0]] * 3) / 3)


# -- gaussian blur ------------------------------------------------------------

def test_gaussian_zero_sigma_identity(rng):
    img = rng.random((6, 7, 3))
    assert np.array_equal(imaging.gaussian_blur(img, 0), img)


def test_gaussian_constant_image():
    np.testing.assert_allclose(imaging.gaussian_blur(np.full((20, 20, 3), 0.7), 2.0), 0.7, atol=1e-12)


def test_gaussian_impulse_matches_direct_evaluation():
    n, c = 21, 10
    img = np.zeros((n, n, 3))
    img[c, c, :] = 1.0
    out = imaging.gaussian_blur(img, 1.0, boundary="periodic")
    x = np.arange(-3, 4)
    g = np.exp(-x ** 2 / 2.0)
    expected = np.zeros((n, n))
    expected[c - 3:c + 4, c - 3:c + 4] = np.outer(g, g) / g.sum() ** 2
    for ch in range(3):
        np.testing.assert_allclose(out[..., ch], expected, atol=1e-9)
    assert out[c, c, 0] == pytest.approx(1.0 / g.sum() ** 2, abs=1e-12)
    assert out[c, c, 0] == out[..., 0].max()


def test_gaussian_radius_is_ceil_three_sigma():
    assert imaging.gaussian_kernel1d(1.0).size == 7
    assert imaging.gaussian_kernel1d(0.4).size == 5
    assert imaging.gaussian_kernel1d(1.5).size == 11


def test_gaussian_rejects_negative_sigma():
    with pytest.raises(ValueError):
        imaging.gaussian_blur(np.zeros((3, 3, 3)), -0.1)


# -- motion kernels ------------------------------------------------------------

def test_motion_kernel_length_one_is_delta():
    assert np.array_equal(imaging.motion_kernel(1, 137.0), np.ones((1, 1)))


def test_motion_kernel_horizontal_five():
    k = imaging.motion_kernel(5, 0.0)
    expected = np.zeros((5, 5))
    expected[2] = 0.2
    assert np.array_equal(k, expected)


def test_motion_kernel_vertical_even_length_partial_end_cells():
    # length 4 on a 5x5 grid: the end cells are half covered by the 4x4 subsamples
    k = imaging.motion_kernel(4, 90.0)
    expected = np.zeros((5, 5))
    expected[:, 2] = [0.125, 0.25, 0.25, 0.25, 0.125]
    np.testing.assert_allclose(k, expected, atol=1e-15)


def test_motion_kernel_side_is_smallest_odd_at_least_length():
    for length in range(1, 30):
        side = imaging.motion_kernel(length, 33.0).shape[0]
        assert side % 2 == 1 and side >= length and side - length <= 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 120), st.floats(0, 180, exclude_max=True))
def test_motion_kernel_normalized_and_symmetric(length, angle):
    k = imaging.motion_kernel(length, angle)
    assert abs(k.sum() - 1) <= 1e-6
    assert (k >= 0).all()
    assert np.array_equal(k, imaging.motion_kernel(length, angle + 180.0))
    # a line through the center is point symmetric
    np.testing.assert_allclose(k, k[::-1, ::-1], atol=1e-15)


def test_motion_kernel_rejects_bad_arguments():
    with pytest.raises(ValueError):
        imaging.motion_kernel(0, 10.0)
    with pytest.raises(ValueError):
        imaging.motion_kernel(2.5, 10.0)
    with pytest.raises(ValueError):
        imaging.motion_kernel(5, float("nan"))


# -- block DCT ------------------------------------------------------------------

def test_quant_tables():
    assert np.array_equal(imaging.quant_table(imaging.LUMA_TABLE, 50), imaging.LUMA_TABLE)
    assert (imaging.quant_table(imaging.CHROMA_TABLE, 100) == 1).all()
    # q=10: scale 500, 16 * 5 = 80
    assert imaging.quant_table(imaging.LUMA_TABLE, 10)[0, 0] == 80
    with pytest.raises(ValueError):
        imaging.quant_table(imaging.LUMA_TABLE, 0)
    with pytest.raises(ValueError):
        imaging.dct_artifact(np.zeros((8, 8, 3)), 101)


@pytest.mark.parametrize("quality", [1, 10, 50, 95, 100])
def test_dct_mid_gray_bit_identical(quality):
    img = np.full((19, 21, 3), 128 / 255)
    assert np.array_equal(imaging.dct_artifact(img, quality), img)


@pytest.mark.parametrize("quality", [10, 75])
def test_dct_matches_blockwise_reference(rng, quality):
    img = rng.random((19, 26, 3))
    np.testing.assert_allclose(imaging.dct_artifact(img, quality), ref_dct_artifact(img, quality),
                               atol=1e-9)


def test_dct_lower_quality_larger_error():
    img = np.random.default_rng(32).random((32, 32, 3))
    mse = {q: np.mean((imaging.dct_artifact(img, q) - img) ** 2) for q in (10, 90)}
    assert mse[10] >= mse[90]


def test_dct_quality_100_within_eight_levels(rng):
    for _ in range(5):
        img = rng.random((40, 48, 3))
        assert np.abs(imaging.dct_artifact(img, 100) - img).max() <= 8 / 255


def test_dct_deterministic_and_shape_preserving(rng):
    img = rng.random((13, 11, 3))
    a, b = imaging.dct_artifact(img, 37), imaging.dct_artifact(img, 37)
    assert a.shape == img.shape and np.array_equal(a, b)


# -- sRGB ------------------------------------------------------------------------

def test_srgb_endpoints():
    for direction in ("to_linear", "to_display"):
        out = imaging.srgb_transfer(np.array([[[0.0, 1.0, 0.0]]]), direction)
        np.testing.assert_allclose(out[0, 0], [0.0, 1.0, 0.0], atol=1e-15)


def test_srgb_half_gray():
    expected = ((0.5 + 0.055) / 1.055) ** 2.4
    out = imaging.srgb_transfer(np.full((1, 1, 3), 0.5), "to_linear")
    assert out[0, 0, 0] == pytest.approx(expected, abs=1e-15)
    assert out[0, 0, 0] == pytest.approx(0.2140, abs=5e-5)


def test_srgb_round_trip(rng):
    img = rng.random((30, 30, 3))
    lin = imaging.srgb_transfer(img, "to_linear")
    back = imaging.srgb_transfer(lin, "to_display")
    assert np.abs(back - img).max() <= 1e-7
    assert np.abs(imaging.srgb_transfer(back, "to_linear") - lin).max() <= 1e-7


def test_srgb_unknown_direction():
    with pytest.raises(ValueError):
        imaging.srgb_transfer(np.zeros((1, 1, 3)), "sideways")


# -- 8-bit I/O --------------------------------------------------------------------

def test_uint8_round_half_up():
    vals = np.array([[[0.5 / 255, 1.5 / 255, 254.49 / 255]]])
    assert imaging.to_uint8(vals).tolist() == [[[1, 2, 254]]]


def test_png_round_trip_lossless_at_8_bits(tmp_path, rng):
    img = rng.random((7, 9, 3))
    imaging.save_png(tmp_path / "a.png", img)
    back = imaging.load_png(tmp_path / "a.png")
    assert np.array_equal(imaging.to_uint8(back), imaging.to_uint8(img))
    imaging.save_png(tmp_path / "b.png", back)
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert imaging.png_size(tmp_path / "a.png") == (9, 7)


def test_as_image_rejects_bad_shapes():
    with pytest.raises(ValueError):
        imaging.as_image(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        imaging.as_image(np.zeros((0, 4, 3)))

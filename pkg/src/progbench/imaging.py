"""Pixel operations on float RGB images.

Images are ``(height, width, 3)`` float64 arrays holding sRGB-encoded values
in [0, 1].  Kernels are odd-sided square float64 arrays that sum to one.
Every public function returns a new array clamped to [0, 1]; intermediate
results inside a function may leave that range.
"""

import math

import numpy as np
from PIL import Image
from scipy import ndimage, signal

# above this side length correlation goes through the FFT
_DIRECT_MAX_SIDE = 15

_BOUNDARY_MODES = {"clamp": ("nearest", "edge"), "periodic": ("wrap", "wrap")}

LUMA_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)

CHROMA_TABLE = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.float64)


def as_image(img):
    """Validate and return ``img`` as a float64 ``(H, W, 3)`` array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    return arr


def check_kernel(kernel, tol=1e-6):
    k = np.asarray(kernel, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
        raise ValueError(f"kernel must be square with odd side, got shape {k.shape}")
    if np.any(k < 0):
        raise ValueError("kernel weights must be nonnegative")
    total = k.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"kernel weights must sum to 1, got {total!r}")
    return k


def _clamp(arr):
    return np.clip(arr, 0.0, 1.0, out=arr)


# -- resize -----------------------------------------------------------------

def _cubic_weights(t, a=-0.5):
    t = np.abs(t)
    t2 = t * t
    t3 = t2 * t
    near = (a + 2.0) * t3 - (a + 3.0) * t2 + 1.0
    far = a * t3 - 5.0 * a * t2 + 8.0 * a * t - 4.0 * a
    return np.where(t <= 1.0, near, np.where(t < 2.0, far, 0.0))


def _resize_taps(n_in, n_out):
    centers = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    base = np.floor(centers).astype(np.int64)
    offsets = np.arange(-1, 3)
    idx = base[:, None] + offsets[None, :]
    weights = _cubic_weights(centers[:, None] - idx)
    return np.clip(idx, 0, n_in - 1), weights


def _resize_axis(arr, n_out, axis):
    idx, w = _resize_taps(arr.shape[axis], n_out)
    shape = [1] * arr.ndim
    shape[axis] = n_out
    out = np.zeros(arr.shape[:axis] + (n_out,) + arr.shape[axis + 1:])
    for k in range(4):
        out += w[:, k].reshape(shape) * np.take(arr, idx[:, k], axis=axis)
    return out


def resize(img, out_w, out_h):
    """Bicubic (Catmull-Rom) resize with edge-clamped taps.

    Width is resampled first, then height.  Pixel centers are aligned
    (``src = (dst + 0.5) * in / out - 0.5``) and no antialiasing prefilter is
    applied when shrinking.  Equal dimensions return an exact copy.
    """
    img = as_image(img)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target size must be positive, got {out_w}x{out_h}")
    h, w = img.shape[:2]
    if (w, h) == (out_w, out_h):
        return img.copy()
    out = img
    if out_w != w:
        out = _resize_axis(out, out_w, axis=1)
    if out_h != h:
        out = _resize_axis(out, out_h, axis=0)
    return _clamp(out)


# -- convolution ------------------------------------------------------------

def correlate(img, kernel, boundary="clamp"):
    """Unclamped per-channel correlation of ``img`` with a centered kernel.

    Works on any ``(H, W)`` or ``(H, W, C)`` float array.
    """
    try:
        nd_mode, pad_mode = _BOUNDARY_MODES[boundary]
    except KeyError:
        raise ValueError(f"unknown boundary {boundary!r}") from None
    arr = np.asarray(img, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    extra = (1,) * (arr.ndim - 2)
    if k.shape[0] <= _DIRECT_MAX_SIDE:
        return ndimage.correlate(arr, k.reshape(k.shape + extra), mode=nd_mode)
    r = k.shape[0] // 2
    padded = np.pad(arr, [(r, r), (r, r)] + [(0, 0)] * (arr.ndim - 2), mode=pad_mode)
    flipped = k[::-1, ::-1].reshape(k.shape + extra)
    return signal.fftconvolve(padded, flipped, mode="valid", axes=(0, 1))


def convolve2d(img, kernel, boundary="clamp"):
    """Correlate each channel with ``kernel`` and clamp the result.

    ``boundary`` is ``"clamp"`` (edge replication) or ``"periodic"``.
    """
    img = as_image(img)
    k = check_kernel(kernel)
    if k.shape == (1, 1):
        return _clamp(img * k[0, 0])
    return _clamp(correlate(img, k, boundary))


def gaussian_kernel1d(sigma):
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_blur(img, sigma, boundary="clamp"):
    """Separable Gaussian blur with radius ``ceil(3 * sigma)``; ``sigma = 0`` copies."""
    img = as_image(img)
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return img.copy()
    mode = _BOUNDARY_MODES[boundary][0]
    g = gaussian_kernel1d(sigma)
    out = ndimage.correlate1d(img, g, axis=1, mode=mode)
    out = ndimage.correlate1d(out, g, axis=0, mode=mode)
    return _clamp(out)


def motion_kernel(length, angle):
    """Normalized linear motion-blur PSF.

    The PSF is a one-pixel-wide segment of ``length`` pixels through the
    kernel center, rotated ``angle`` degrees counter-clockwise from the +x
    axis (rows grow downward).  Each cell's weight is the fraction of its
    4x4 subsample grid falling inside the segment.  The angle is quantized to
    micro-degrees and taken modulo 180, so ``angle`` and ``angle + 180``
    give identical kernels.

    Parameters
    ----------
    length : int
        Segment length in pixels, at least 1.
    angle : float
        Direction in degrees; only its value modulo 180 matters.

    Returns
    -------
    numpy.ndarray
        Square kernel whose side is the smallest odd integer >= ``length``.
    """
    if int(length) != length or length < 1:
        raise ValueError(f"kernel length must be a positive integer, got {length}")
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle}")
    length = int(length)
    side = length if length % 2 else length + 1
    if side == 1:
        return np.ones((1, 1))

    micro = int(round(angle * 1e6)) % 180_000_000
    theta = math.radians(micro * 1e-6)
    c, s = math.cos(theta), math.sin(theta)

    r = side // 2
    sub = (np.arange(4) + 0.5) / 4.0 - 0.5
    fine = (np.arange(-r, r + 1)[:, None] + sub[None, :]).ravel()
    x = fine[None, :]
    y = -fine[:, None]  # row index grows downward
    along = x * c + y * s
    across = y * c - x * s
    inside = (np.abs(along) <= length / 2.0) & (np.abs(across) <= 0.5)
    counts = inside.reshape(side, 4, side, 4).sum(axis=(1, 3)).astype(np.float64)
    return counts / counts.sum()


# -- block DCT artifacts -----------------------------------------------------

def quant_table(base, quality):
    """Scale a base quantization table the way the IJG encoder does."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must lie in 1..100, got {quality}")
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    return np.maximum(1.0, np.floor(base * scale / 100.0 + 0.5))


_RGB_TO_YCC = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
_YCC_TO_RGB = np.array([
    [1.0, 0.0, 1.402],
    [1.0, -0.344136, -0.714136],
    [1.0, 1.772, 0.0],
])


def rgb_to_ycbcr(rgb):
    """Full-range BT.601 conversion of 0..255 RGB."""
    ycc = rgb @ _RGB_TO_YCC.T
    ycc[..., 1:] += 128.0
    return ycc


def ycbcr_to_rgb(ycc):
    centered = ycc - np.array([0.0, 128.0, 128.0])
    return centered @ _YCC_TO_RGB.T


def _dct_matrix(n=8):
    k = np.arange(n)
    m = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * k[None, :] + 1) * k[:, None] / (2 * n))
    m[0] /= np.sqrt(2.0)
    return m


_DCT8 = _dct_matrix()


def dct_artifact(img, quality):
    """Simulate JPEG blocking and ringing with a 4:4:4 block-DCT round trip.

    No entropy coding is done, so the output is deterministic but not
    byte-compatible with any real codec.
    """
    img = as_image(img)
    tables = np.stack([quant_table(LUMA_TABLE, quality)]
                      + [quant_table(CHROMA_TABLE, quality)] * 2)
    h, w = img.shape[:2]
    ph, pw = -h % 8, -w % 8
    ycc = rgb_to_ycbcr(img * 255.0)
    if ph or pw:
        ycc = np.pad(ycc, [(0, ph), (0, pw), (0, 0)], mode="edge")
    H, W = ycc.shape[:2]
    # (row block, col block, channel, 8, 8)
    blocks = ycc.reshape(H // 8, 8, W // 8, 8, 3).transpose(0, 2, 4, 1, 3) - 128.0
    coef = _DCT8 @ blocks @ _DCT8.T
    coef = np.round(coef / tables) * tables
    rec = _DCT8.T @ coef @ _DCT8 + 128.0
    ycc = rec.transpose(0, 3, 1, 4, 2).reshape(H, W, 3)
    rgb = ycbcr_to_rgb(ycc[:h, :w]) / 255.0
    return _clamp(rgb)


# -- transfer functions -----------------------------------------------------

def srgb_to_linear(v):
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.maximum(x, 0.0) ** (1.0 / 2.4) - 0.055)


def srgb_transfer(img, direction):
    """Apply the sRGB transfer curve; ``direction`` is ``"to_linear"`` or ``"to_display"``."""
    if direction == "to_linear":
        out = srgb_to_linear(img)
    elif direction == "to_display":
        out = linear_to_srgb(img)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return _clamp(out)


def luma(img):
    """Rec. 709 luma of display-encoded values."""
    img = np.asarray(img, dtype=np.float64)
    return 0.2126 * img[..., 0] + 0.7152 * img[..., 1] + 0.0722 * img[..., 2]


# -- 8-bit I/O ---------------------------------------------------------------

def to_uint8(img):
    """Quantize [0, 1] values to 8 bits, rounding half up."""
    return np.clip(np.floor(np.asarray(img) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def from_uint8(arr):
    return np.asarray(arr, dtype=np.float64) / 255.0


def load_png(path):
    with Image.open(path) as im:
        return from_uint8(np.asarray(im.convert("RGB")))


def save_png(path, img):
    Image.fromarray(to_uint8(img)).save(path, format="PNG", compress_level=1)


def png_size(path):
    """Return ``(width, height)`` without decoding pixel data."""
    with Image.open(path) as im:
        return im.size

"""Seeded procedural test images with edges, texture and smooth shading.

These stand in for natural photographs in tests and demos: they have a
roughly 1/f spectrum plus hard-edged shapes, so blur, resampling and noise
all change them measurably.
"""

import numpy as np


def pink_noise(rng, height, width, exponent=1.0):
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.rfftfreq(width)[None, :]
    radius = np.hypot(fy, fx)
    radius[0, 0] = 1.0
    spectrum = (rng.standard_normal(radius.shape) + 1j * rng.standard_normal(radius.shape))
    spectrum /= radius ** exponent
    spectrum[0, 0] = 0.0
    field = np.fft.irfft2(spectrum, s=(height, width))
    return field / (np.abs(field).max() + 1e-12)


def synthetic_scene(seed, width=256, height=192, shapes=12):
    """Return an ``(height, width, 3)`` image in [0, 1] built from ``seed``."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    yy /= height
    xx /= width

    base = rng.uniform(0.2, 0.7, 3)
    tilt = rng.uniform(-0.25, 0.25, (2, 3))
    img = base + xx[..., None] * tilt[0] + yy[..., None] * tilt[1]

    for _ in range(shapes):
        color = rng.uniform(0.0, 1.0, 3)
        cx, cy = rng.uniform(0, 1, 2)
        rx, ry = rng.uniform(0.04, 0.3, 2)
        if rng.random() < 0.5:
            mask = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
        else:
            mask = (np.abs(xx - cx) <= rx) & (np.abs(yy - cy) <= ry)
        alpha = rng.uniform(0.6, 1.0)
        img[mask] = (1 - alpha) * img[mask] + alpha * color

    texture = pink_noise(rng, height, width)
    img += 0.12 * texture[..., None] * rng.uniform(0.5, 1.0, 3)
    return np.clip(img, 0.0, 1.0)

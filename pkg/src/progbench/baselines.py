"""Trajectory generators that need no learned model.

``interp`` cross-fades from the degraded frame to the clean one and has a
closed-form PSNR curve, which makes it an oracle for the evaluation code.
``unsharp``, ``exposure`` and ``rl`` are simple classical restorers that
each produce a nine-frame trajectory starting at the degraded input.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import imaging
from .dataset import clip_spec, frame_name, read_clip_meta
from .degradation import NUM_FRAMES, TaskKind

UNSHARP_SIGMA = 2.0
UNSHARP_MAX_AMOUNT = 1.5
EXPOSURE_MAX_STOPS = 4.0
RL_EPS = 1e-8


class TrajectoryKind(str, enum.Enum):
    INTERP = "interp"
    UNSHARP = "unsharp"
    EXPOSURE = "exposure"
    RL = "rl"


def _check_frames(T):
    if T < 2:
        raise ValueError(f"a trajectory needs at least 2 frames, got {T}")


def interp_oracle(degraded, clean, T=NUM_FRAMES):
    """Frames ``(1 - l) * degraded + l * clean`` with ``l = (t - 1) / (T - 1)``."""
    _check_frames(T)
    degraded = imaging.as_image(degraded)
    clean = imaging.as_image(clean)
    if degraded.shape != clean.shape:
        raise ValueError(f"image shapes differ: {degraded.shape} vs {clean.shape}")
    frames = []
    for t in range(T):
        lam = t / (T - 1)
        frames.append((1.0 - lam) * degraded + lam * clean)
    return frames


def unsharp_trajectory(degraded, T=NUM_FRAMES):
    degraded = imaging.as_image(degraded)
    detail = degraded - imaging.gaussian_blur(degraded, UNSHARP_SIGMA)
    frames = []
    for t in range(T):
        amount = UNSHARP_MAX_AMOUNT * t / (T - 1)
        frames.append(np.clip(degraded + amount * detail, 0.0, 1.0))
    return frames


def exposure_trajectory(degraded, T=NUM_FRAMES):
    """Plain linear-light gain ramping from 1 to 2**4."""
    degraded = imaging.as_image(degraded)
    linear = imaging.srgb_to_linear(degraded)
    frames = [degraded.copy()]
    for t in range(1, T):
        gain = 2.0 ** (EXPOSURE_MAX_STOPS * t / (T - 1))
        frames.append(imaging.srgb_transfer(np.clip(linear * gain, 0.0, 1.0), "to_display"))
    return frames


def classical_trajectory(degraded, kind, T=NUM_FRAMES):
    _check_frames(T)
    kind = TrajectoryKind(kind)
    if kind is TrajectoryKind.UNSHARP:
        return unsharp_trajectory(degraded, T)
    if kind is TrajectoryKind.EXPOSURE:
        return exposure_trajectory(degraded, T)
    raise ValueError(f"{kind.value} is not a classical single-input restorer")


class PeriodicCorrelator:
    """Circular correlation with a fixed kernel on images of a fixed size."""

    def __init__(self, kernel, shape):
        h, w = shape[:2]
        k = np.asarray(kernel, dtype=np.float64)
        r = k.shape[0] // 2
        offs = np.arange(k.shape[0]) - r
        embedded = np.zeros((h, w))
        np.add.at(embedded, (offs[:, None] % h, offs[None, :] % w), k)
        self.shape = (h, w)
        self.otf = np.fft.rfft2(embedded)

    def _apply(self, img, spectrum):
        f = np.fft.rfft2(img, axes=(0, 1))
        f *= spectrum if img.ndim == 2 else spectrum[:, :, None]
        return np.fft.irfft2(f, s=self.shape, axes=(0, 1))

    def correlate(self, img):
        return self._apply(img, np.conj(self.otf))

    def adjoint(self, img):
        """Correlation with the kernel rotated by 180 degrees."""
        return self._apply(img, self.otf)


class ClampCorrelator:
    """Correlation with edge-replicated borders, the forward model of the
    blur degradation, together with its exact adjoint."""

    def __init__(self, kernel, shape):
        self.kernel = np.asarray(kernel, dtype=np.float64)
        self.r = self.kernel.shape[0] // 2
        self.norm = self.adjoint(np.ones(shape))

    def correlate(self, img):
        return imaging.correlate(img, self.kernel, "clamp")

    def adjoint(self, img):
        r = self.r
        if r == 0:
            return img * self.kernel[0, 0]
        pad = [(r, r), (r, r)] + [(0, 0)] * (img.ndim - 2)
        # transpose of the valid-region correlation: zero-pad, correlate with the flipped kernel
        ext = imaging.correlate(np.pad(img, pad), self.kernel[::-1, ::-1], "clamp")
        # transpose of edge replication: fold each margin back onto its edge row/column
        out = ext[r:-r].copy()
        out[0] += ext[:r].sum(axis=0)
        out[-1] += ext[-r:].sum(axis=0)
        cols = out[:, r:-r].copy()
        cols[:, 0] += out[:, :r].sum(axis=1)
        cols[:, -1] += out[:, -r:].sum(axis=1)
        return cols


def _operator(kernel, shape, boundary):
    if boundary == "periodic":
        return PeriodicCorrelator(kernel, shape)
    if boundary == "clamp":
        return ClampCorrelator(kernel, shape)
    raise ValueError(f"unknown boundary {boundary!r}")


def _rl_step(op, x, y):
    # FFT round-off can dip below zero; cut it so iterates stay nonnegative
    blurred = np.maximum(op.correlate(x), 0.0)
    update = np.maximum(op.adjoint(y / np.maximum(blurred, RL_EPS)), 0.0)
    norm = getattr(op, "norm", None)
    return x * (update if norm is None else update / norm)


def richardson_lucy(observed, kernel, iterations, boundary="periodic"):
    """``iterations`` unclamped Richardson-Lucy updates starting from the observation.

    With periodic boundaries the total flux of every iterate equals that of
    ``observed``.
    """
    y = np.asarray(observed, dtype=np.float64)
    op = _operator(imaging.check_kernel(kernel), y.shape, boundary)
    x = y.copy()
    for _ in range(iterations):
        x = _rl_step(op, x, y)
    return x


def rl_deconv_trajectory(degraded, kernel, T=NUM_FRAMES, iters_per_step=5, boundary="clamp",
                         raw=False):
    """Frame ``t`` is the Richardson-Lucy iterate after ``(t - 1) * iters_per_step`` steps.

    ``boundary="clamp"`` matches the edge replication used when the blur was
    synthesized; ``"periodic"`` is the textbook circular model, which
    conserves flux but rings at the borders of clamp-blurred input.  Frames
    are clamped to [0, 1] unless ``raw`` is true.
    """
    _check_frames(T)
    y = imaging.as_image(degraded)
    op = _operator(imaging.check_kernel(kernel), y.shape, boundary)
    x = y.copy()
    frames = [x.copy()]
    for _ in range(T - 1):
        for _ in range(iters_per_step):
            x = _rl_step(op, x, y)
        frames.append(x.copy() if raw else np.clip(x, 0.0, 1.0))
    return frames


def blur_kernel_for(spec):
    """The first-frame PSF of a blur clip, as recorded in its schedule."""
    if spec.task is not TaskKind.BLUR:
        raise ValueError(f"clip task is {spec.task.value}, RL needs a blur clip")
    return imaging.motion_kernel(max(1, spec.lengths[0]), spec.angle)


def trajectory_for_clip(clip_dir, kind, T=NUM_FRAMES):
    """Build a trajectory from a stored dataset clip."""
    clip_dir = Path(clip_dir)
    kind = TrajectoryKind(kind)
    degraded = imaging.load_png(clip_dir / frame_name(1))
    if kind is TrajectoryKind.INTERP:
        return interp_oracle(degraded, imaging.load_png(clip_dir / frame_name(T)), T)
    if kind is TrajectoryKind.RL:
        spec = clip_spec(read_clip_meta(clip_dir))
        return rl_deconv_trajectory(degraded, blur_kernel_for(spec), T)
    return classical_trajectory(degraded, kind, T)


def write_trajectory(out_dir, clip_id, frames):
    clip_dir = Path(out_dir) / clip_id
    clip_dir.mkdir(parents=True, exist_ok=True)
    for t, frame in enumerate(frames, start=1):
        imaging.save_png(clip_dir / frame_name(t), frame)


def generate_trajectories(manifest, kind, out_dir, threads=1):
    """Write a ``kind`` trajectory for every clip of ``manifest`` under ``out_dir``."""
    kind = TrajectoryKind(kind)
    if kind is TrajectoryKind.RL and manifest.task not in (None, TaskKind.BLUR):
        raise ValueError(f"RL needs a blur dataset, got {manifest.task.value}")

    def run(entry):
        frames = trajectory_for_clip(manifest.clip_dir(entry), kind)
        write_trajectory(out_dir, entry.clip_id, frames)

    Path(out_dir).mkdir(parents=True, exist_ok=True)
    if threads <= 1:
        for entry in manifest.clips:
            run(entry)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, manifest.clips))

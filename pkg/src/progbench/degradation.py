"""Nine-frame degradation schedules and the three per-frame transforms.

Every frame is rendered from the clean source directly, and every transform
reduces to an exact copy at its last frame, so ``frames[-1]`` always equals
the source bit for bit.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import imaging
from .sampling import RngState

NUM_FRAMES = 9
FPS = 5
DEFAULT_WIDTH = 1360
DEFAULT_HEIGHT = 768

S1_RANGE = (0.05, 0.25)
ANGLE_RANGE = (0.0, 360.0)
KMAX_RANGE = (40.0, 200.0)
NOISE_RANGE = (0.02, 0.08)

JPEG_BELOW_SCALE = 0.5
EXPOSURE_STOPS = 4.0
ROLLOFF = 0.5
WB_DRIFT = 0.15
LOWLIGHT_BLUR_SIGMA = 1.0


class TaskKind(str, enum.Enum):
    RESOLUTION = "resolution"
    BLUR = "blur"
    LOWLIGHT = "lowlight"


def round_half_up(x):
    return int(math.floor(x + 0.5))


def linear_ramp(start, stop, n=NUM_FRAMES):
    """``n`` evenly spaced values with exact endpoints."""
    m = n - 1
    return tuple((start * (m - i) + stop * i) / m for i in range(n))


@dataclass(frozen=True)
class DegradationSpec:
    """Sampled parameters and per-frame schedule for one clip.

    Only the fields belonging to ``task`` are set.
    """

    task: TaskKind
    scales: tuple = ()
    qualities: tuple = ()
    angle: float = None
    k_max: float = None
    lengths: tuple = ()
    noise: float = None
    wb: float = None
    strengths: tuple = ()
    frames: int = field(default=NUM_FRAMES)

    def to_params(self):
        if self.task is TaskKind.RESOLUTION:
            return {"s1": self.scales[0], "scales": list(self.scales),
                    "qualities": list(self.qualities), "jpeg_below_scale": JPEG_BELOW_SCALE}
        if self.task is TaskKind.BLUR:
            return {"angle": self.angle, "k_max": self.k_max, "lengths": list(self.lengths)}
        return {"noise": self.noise, "wb_u": self.wb, "strengths": list(self.strengths)}

    @classmethod
    def from_params(cls, task, params):
        task = TaskKind(task)
        if task is TaskKind.RESOLUTION:
            return resolution_spec(params["s1"])
        if task is TaskKind.BLUR:
            return blur_spec(params["angle"], params["k_max"])
        return lowlight_spec(params["noise"], params["wb_u"])


def resolution_spec(s1):
    scales = linear_ramp(s1, 1.0)
    qualities = tuple(round_half_up(30 + 65 * t / (NUM_FRAMES - 1)) for t in range(NUM_FRAMES))
    return DegradationSpec(TaskKind.RESOLUTION, scales=scales, qualities=qualities)


def blur_spec(angle, k_max):
    lengths = tuple(round_half_up(k_max * (1 - t / (NUM_FRAMES - 1))) for t in range(NUM_FRAMES))
    return DegradationSpec(TaskKind.BLUR, angle=angle, k_max=k_max, lengths=lengths)


def lowlight_spec(noise, wb):
    return DegradationSpec(TaskKind.LOWLIGHT, noise=noise, wb=wb,
                           strengths=linear_ramp(1.0, 0.0))


def _draw(rng, bounds):
    lo, hi = bounds
    value = rng.next_uniform(lo, hi)
    assert lo <= value <= hi, (value, bounds)
    return value


def make_schedule(task, rng):
    """Sample the clip parameters for ``task`` from ``rng`` and fill the schedule."""
    task = TaskKind(task)
    if task is TaskKind.RESOLUTION:
        return resolution_spec(_draw(rng, S1_RANGE))
    if task is TaskKind.BLUR:
        angle = _draw(rng, ANGLE_RANGE)
        return blur_spec(angle, _draw(rng, KMAX_RANGE))
    noise = _draw(rng, NOISE_RANGE)
    return lowlight_spec(noise, _draw(rng, (0.0, 1.0)))


def lowlight_transform(src, strength, noise, wb, rng=None):
    """Darken ``src`` with exposure roll-off, colour cast, sensor noise and blur.

    All effects scale with ``strength``; zero strength returns a copy.
    """
    if strength == 0:
        return src.copy()
    lin = imaging.srgb_to_linear(src)
    lin = lin * 2.0 ** (-EXPOSURE_STOPS * strength)
    lin = lin / (1.0 + ROLLOFF * strength * lin)
    drift = WB_DRIFT * strength * wb
    lin[..., 0] *= 1.0 + drift
    lin[..., 2] *= 1.0 - drift
    out = imaging.linear_to_srgb(np.clip(lin, 0.0, 1.0))
    sigma = noise * strength
    if sigma > 0:
        out += sigma * rng.next_gaussian_array(out.shape)
    return imaging.gaussian_blur(out, LOWLIGHT_BLUR_SIGMA * strength)


def degrade_frame(src, spec, t, rng=None):
    """Render frame ``t`` (1-based) of the clip described by ``spec``.

    ``rng`` is only consumed by the low-light task.
    """
    if not 1 <= t <= spec.frames:
        raise ValueError(f"frame index must lie in 1..{spec.frames}, got {t}")
    src = imaging.as_image(src)
    i = t - 1
    if spec.task is TaskKind.RESOLUTION:
        s = spec.scales[i]
        if s == 1.0:
            return src.copy()
        h, w = src.shape[:2]
        small = imaging.resize(src, max(1, round_half_up(w * s)), max(1, round_half_up(h * s)))
        out = imaging.resize(small, w, h)
        if s < JPEG_BELOW_SCALE:
            out = imaging.dct_artifact(out, spec.qualities[i])
        return out
    if spec.task is TaskKind.BLUR:
        k = spec.lengths[i]
        if k <= 1:
            return src.copy()
        return imaging.convolve2d(src, imaging.motion_kernel(k, spec.angle), boundary="clamp")
    return lowlight_transform(src, spec.strengths[i], spec.noise, spec.wb, rng)


@dataclass
class Clip:
    frames: list
    spec: DegradationSpec
    source_id: str = ""
    clip_seed: int = 0
    fps: int = FPS

    @property
    def height(self):
        return self.frames[0].shape[0]

    @property
    def width(self):
        return self.frames[0].shape[1]

    @property
    def task(self):
        return self.spec.task


def render_clip(src, spec, rng, source_id="", clip_seed=0):
    frames = [degrade_frame(src, spec, t, rng) for t in range(1, spec.frames + 1)]
    return Clip(frames, spec, source_id, clip_seed)


def build_clip(src, task, clip_seed, source_id=""):
    """Sample a schedule from ``clip_seed`` and render all nine frames in order."""
    src = imaging.as_image(src)
    rng = RngState(clip_seed)
    spec = make_schedule(task, rng)
    return render_clip(src, spec, rng, source_id, clip_seed)

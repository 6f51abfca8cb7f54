"""Full-reference quality metrics and the external perceptual-metric boundary.

PSNR and SSIM are computed here.  Learned metrics such as LPIPS are
produced elsewhere and brought in either by running a command per frame
pair or by reading a CSV of precomputed values.
"""

import csv
import math
import re
import shlex
import subprocess
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import imaging
from .errors import ExternalMetricError, MetricLookupError

PSNR = "psnr_db"
SSIM = "ssim"
EXTERNAL = "external"
METRICS = (PSNR, SSIM, EXTERNAL)

HIGHER_IS_BETTER = {PSNR: True, SSIM: True, EXTERNAL: False}

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * 1.0) ** 2
SSIM_C2 = (0.03 * 1.0) ** 2

_DECIMAL = re.compile(r"[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?")


def _pair(ref, test):
    ref = imaging.as_image(ref)
    test = imaging.as_image(test)
    if ref.shape != test.shape:
        raise ValueError(f"image shapes differ: {ref.shape} vs {test.shape}")
    return ref, test


def mse(ref, test):
    ref, test = _pair(ref, test)
    diff = ref - test
    return float(np.mean(diff * diff))


def psnr(ref, test):
    """PSNR in dB for unit peak; identical images give ``inf``."""
    err = mse(ref, test)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def ssim_window():
    g = imaging.gaussian_kernel1d(SSIM_SIGMA)
    assert g.size == SSIM_WINDOW
    return g


def ssim(ref, test):
    """Mean SSIM over every fully-contained 11x11 window of the luma plane.

    The window is Gaussian (sigma 1.5) and there is no padding.
    """
    ref, test = _pair(ref, test)
    h, w = ref.shape[:2]
    if min(h, w) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}")
    x = imaging.luma(ref)
    y = imaging.luma(test)
    g = ssim_window()
    r = SSIM_WINDOW // 2

    def local_mean(a):
        a = ndimage.correlate1d(a, g, axis=0, mode="reflect")
        a = ndimage.correlate1d(a, g, axis=1, mode="reflect")
        return a[r:h - r, r:w - r]

    mx, my = local_mean(x), local_mean(y)
    vx = local_mean(x * x) - mx * mx
    vy = local_mean(y * y) - my * my
    cxy = local_mean(x * y) - mx * my
    num = (2.0 * mx * my + SSIM_C1) * (2.0 * cxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2)
    return float(np.mean(num / den))


def parse_decimal(text):
    text = text.strip()
    if not _DECIMAL.fullmatch(text):
        raise ValueError(f"not a single decimal number: {text!r}")
    return float(text)


class ExecMetric:
    """Run ``<command> <ref_path> <test_path>`` and read one number from stdout."""

    name = EXTERNAL

    def __init__(self, command, timeout=None):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ValueError("empty external metric command")
        self.timeout = timeout

    def __call__(self, ref_path, test_path, clip_id=None, frame=None):
        argv = self.argv + [str(ref_path), str(test_path)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
        except FileNotFoundError:
            raise ExternalMetricError(f"external metric command not found: {self.argv[0]}") from None
        except subprocess.TimeoutExpired as exc:
            raise ExternalMetricError(f"external metric timed out after {exc.timeout}s") from None
        if proc.returncode != 0:
            raise ExternalMetricError(
                f"external metric exited with status {proc.returncode}", proc.stderr or proc.stdout)
        try:
            return parse_decimal(proc.stdout)
        except ValueError:
            raise ExternalMetricError("unparseable external metric output", proc.stdout) from None


class CsvMetric:
    """Precomputed values keyed by ``(clip_id, frame)`` from a CSV with header
    ``clip_id,frame,value``."""

    name = EXTERNAL

    def __init__(self, path):
        self.path = Path(path)
        self.values = {}
        try:
            with open(self.path, newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                if reader.fieldnames is None or not {"clip_id", "frame", "value"} <= set(reader.fieldnames):
                    raise ExternalMetricError(f"{self.path}: header must be clip_id,frame,value")
                for lineno, row in enumerate(reader, start=2):
                    try:
                        key = (row["clip_id"].strip(), int(row["frame"]))
                        self.values[key] = parse_decimal(row["value"])
                    except (ValueError, AttributeError):
                        raise ExternalMetricError(f"{self.path}:{lineno}: malformed row {row}") from None
        except OSError as exc:
            raise ExternalMetricError(f"cannot read {self.path}: {exc}") from None

    def lookup(self, clip_id, frame):
        try:
            return self.values[(clip_id, int(frame))]
        except KeyError:
            raise MetricLookupError(f"{self.path}: no value for clip {clip_id} frame {frame}") from None

    def __call__(self, ref_path, test_path, clip_id=None, frame=None):
        return self.lookup(clip_id, frame)

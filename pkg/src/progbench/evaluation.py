"""Frame-wise evaluation of restoration trajectories.

Every frame of a trajectory is compared with the clean target, which for a
dataset built by :mod:`progbench.dataset` is the clip's last frame.
"""

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import imaging
from .dataset import CLIP_META, frame_name, read_clip_meta
from .degradation import NUM_FRAMES
from .errors import CoverageError, ExternalMetricError, InvalidInputError, MetricLookupError
from .metrics import EXTERNAL, HIGHER_IS_BETTER, METRICS, PSNR, SSIM, psnr, ssim

REPORT_HEADER = ("clip_id", "frame", PSNR, SSIM, EXTERNAL)


@dataclass
class FrameCurve:
    """Per-frame metric values of one trajectory; ``values[name][t - 1]``."""

    clip_id: str
    values: dict = field(default_factory=dict)

    @property
    def metrics(self):
        return tuple(m for m in METRICS if m in self.values)


@dataclass
class Summary:
    per_frame_mean: dict
    monotone_fraction: dict
    net_delta: dict
    best_frame: dict
    clip_count: int
    psnr_inf_counts: list

    def to_dict(self):
        def enc(v):
            return "inf" if v == math.inf else "-inf" if v == -math.inf else v

        return {
            "per_frame_mean": {m: [enc(v) for v in vals] for m, vals in self.per_frame_mean.items()},
            "monotone_fraction": dict(self.monotone_fraction),
            "net_delta": {m: enc(v) for m, v in self.net_delta.items()},
            "best_frame": dict(self.best_frame),
            "clip_count": self.clip_count,
            "psnr_inf_counts": list(self.psnr_inf_counts),
        }


class TrajectoryProvider:
    """Maps clip ids to nine decoded frames stored as ``<root>/<clip_id>/frame_XX.png``.

    Frames are decoded lazily; existence and size were checked on import.
    """

    def __init__(self, root, clip_ids, frames=NUM_FRAMES):
        self.root = Path(root)
        self.clip_ids = list(clip_ids)
        self.frames = frames

    def __contains__(self, clip_id):
        return clip_id in self.clip_ids

    def __len__(self):
        return len(self.clip_ids)

    def frame_path(self, clip_id, t):
        return self.root / clip_id / frame_name(t)

    def __getitem__(self, clip_id):
        if clip_id not in self.clip_ids:
            raise KeyError(clip_id)
        return [imaging.load_png(self.frame_path(clip_id, t)) for t in range(1, self.frames + 1)]


def clip_size(manifest, entry):
    """``(width, height)`` of a dataset clip, from clip.json or its first frame."""
    clip_dir = manifest.clip_dir(entry)
    if (clip_dir / CLIP_META).exists():
        meta = read_clip_meta(clip_dir)
        return meta["width"], meta["height"]
    return imaging.png_size(clip_dir / frame_name(1))


def import_trajectories(root, manifest, frames=NUM_FRAMES):
    """Check that ``root`` holds a full-size trajectory for every manifest clip."""
    root = Path(root)
    missing = []
    for entry in manifest.clips:
        clip_dir = root / entry.clip_id
        if not clip_dir.is_dir():
            missing.append(entry.clip_id)
            continue
        missing += [f"{entry.clip_id}/{frame_name(t)}" for t in range(1, frames + 1)
                    if not (clip_dir / frame_name(t)).is_file()]
    if missing:
        raise CoverageError(missing)
    for entry in manifest.clips:
        expected = clip_size(manifest, entry)
        for t in range(1, frames + 1):
            got = imaging.png_size(root / entry.clip_id / frame_name(t))
            if got != tuple(expected):
                raise InvalidInputError(
                    f"{entry.clip_id}/{frame_name(t)} is {got[0]}x{got[1]}, "
                    f"dataset clip is {expected[0]}x{expected[1]}")
    return TrajectoryProvider(root, manifest.clip_ids, frames)


def _annotate(exc, clip_id, t):
    where = f"clip {clip_id} frame {t}" if clip_id else f"frame {t}"
    if isinstance(exc, MetricLookupError):
        return exc
    if isinstance(exc, ExternalMetricError):
        return ExternalMetricError(f"{where}: {exc}")
    return type(exc)(f"{where}: {exc}")


def evaluate_trajectory(clean, frames, metrics=(PSNR, SSIM), external=None, clip_id=None,
                        ref_path=None, frame_paths=None):
    """Compare each of ``frames`` with ``clean``.

    ``external`` is a callable ``(ref_path, test_path, clip_id=, frame=)``
    such as :class:`~progbench.metrics.ExecMetric` or
    :class:`~progbench.metrics.CsvMetric`; it is required when ``metrics``
    names the external metric.
    """
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    if EXTERNAL in metrics and external is None:
        raise ValueError("external metric requested but no source configured")
    values = {m: [] for m in METRICS if m in metrics}
    for t, frame in enumerate(frames, start=1):
        try:
            if PSNR in values:
                values[PSNR].append(psnr(clean, frame))
            if SSIM in values:
                values[SSIM].append(ssim(clean, frame))
            if EXTERNAL in values:
                test_path = frame_paths[t - 1] if frame_paths else None
                values[EXTERNAL].append(float(external(ref_path, test_path, clip_id=clip_id, frame=t)))
        except (ValueError, ExternalMetricError) as exc:
            raise _annotate(exc, clip_id, t) from exc
    return FrameCurve(clip_id, values)


def evaluate_dataset(manifest, provider, metrics=(PSNR, SSIM), external=None, threads=1):
    """One :class:`FrameCurve` per manifest clip, in manifest order."""

    def run(entry):
        clean_path = manifest.clip_dir(entry) / frame_name(provider.frames)
        clean = imaging.load_png(clean_path)
        paths = [provider.frame_path(entry.clip_id, t) for t in range(1, provider.frames + 1)]
        return evaluate_trajectory(clean, provider[entry.clip_id], metrics, external,
                                   clip_id=entry.clip_id, ref_path=clean_path, frame_paths=paths)

    if threads <= 1:
        return [run(e) for e in manifest.clips]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, manifest.clips))


def _improves(prev, nxt, higher):
    return nxt >= prev if higher else nxt <= prev


def _best_index(values, higher):
    best = 0
    for i, v in enumerate(values):
        if (v > values[best]) if higher else (v < values[best]):
            best = i
    return best


def summarize(curves):
    """Aggregate curves into per-frame means and progression statistics.

    Infinite PSNR values are left out of the per-frame means and counted in
    ``psnr_inf_counts``; a frame whose values are all infinite has mean
    ``inf``.  Sums use :func:`math.fsum` so clip order cannot change a bit
    of the result.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("cannot summarize an empty list of curves")
    names = curves[0].metrics
    if any(c.metrics != names for c in curves):
        raise ValueError("all curves must carry the same metrics")
    n_frames = len(curves[0].values[names[0]]) if names else NUM_FRAMES
    if any(len(v) != n_frames for c in curves for v in c.values.values()):
        raise ValueError("all curves must have the same number of frames")

    inf_counts = [0] * n_frames
    means, monotone, delta, best = {}, {}, {}, {}
    for name in names:
        higher = HIGHER_IS_BETTER[name]
        column = []
        for t in range(n_frames):
            vals = [c.values[name][t] for c in curves]
            finite = [v for v in vals if math.isfinite(v)]
            if name == PSNR:
                inf_counts[t] = len(vals) - len(finite)
            column.append(math.fsum(finite) / len(finite) if finite else vals[0])
        means[name] = column
        pairs = sum(_improves(c.values[name][t], c.values[name][t + 1], higher)
                    for c in curves for t in range(n_frames - 1))
        monotone[name] = pairs / ((n_frames - 1) * len(curves))
        delta[name] = column[-1] - column[0] if higher else column[0] - column[-1]
        best[name] = _best_index(column, higher) + 1
    return Summary(means, monotone, delta, best, len(curves), inf_counts)


def _fmt(v):
    if v is None:
        return ""
    if v == math.inf:
        return "inf"
    return repr(float(v))


def write_report(path, curves):
    """Write one CSV row per (clip, frame); absent metrics are empty fields."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for curve in curves:
            n = len(next(iter(curve.values.values()))) if curve.values else 0
            for t in range(n):
                row = [curve.values[m][t] if m in curve.values else None for m in METRICS]
                writer.writerow([curve.clip_id, t + 1] + [_fmt(v) for v in row])


def read_report(path):
    """Rebuild curves from a report CSV; a metric column is kept when no row leaves it empty."""
    rows = {}
    order = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != REPORT_HEADER:
            raise InvalidInputError(f"{path}: header must be {','.join(REPORT_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            clip_id = row["clip_id"]
            if clip_id not in rows:
                rows[clip_id] = {}
                order.append(clip_id)
            try:
                frame = int(row["frame"])
                rows[clip_id][frame] = {m: (float(row[m]) if row[m] != "" else None) for m in METRICS}
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: malformed row") from None
    present = [m for m in METRICS
               if all(v[m] is not None for frames in rows.values() for v in frames.values())]
    curves = []
    for clip_id in order:
        frames = rows[clip_id]
        ts = sorted(frames)
        if ts != list(range(1, len(ts) + 1)):
            raise InvalidInputError(f"{path}: clip {clip_id} has frames {ts}")
        curves.append(FrameCurve(clip_id, {m: [frames[t][m] for t in ts] for m in present}))
    return curves


def write_summary(path, summary):
    Path(path).write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")

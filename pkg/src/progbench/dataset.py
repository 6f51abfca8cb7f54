"""Dataset synthesis and the on-disk layout.

A dataset directory looks like::

    out/
      videos.txt            one clip directory per line
      prompt.txt            one prompt per line, aligned with videos.txt
      clip_000000/
        frame_01.png ... frame_09.png
        clip.json

Frames are quantized to 8 bits exactly once, when they are written.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import imaging
from .degradation import (
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    NUM_FRAMES,
    DegradationSpec,
    TaskKind,
    build_clip,
    round_half_up,
)
from .errors import DanglingReferenceError, DataError, EmptyInputError, FormatError
from .sampling import derive_stream

UNIFORM_PROMPTS = {
    TaskKind.RESOLUTION: "The image becomes sharper and higher in resolution. Nothing moves. Static image.",
    TaskKind.BLUR: "The image becomes sharp and free of motion blur. Nothing moves. Static image.",
    TaskKind.LOWLIGHT: "The image gradually brightens to normal lighting. Nothing moves. Static image.",
}

VIDEOS_FILE = "videos.txt"
PROMPTS_FILE = "prompt.txt"
CLIP_META = "clip.json"
IMAGE_SUFFIXES = (".png",)


def frame_name(t):
    return f"frame_{t:02d}.png"


def clip_name(index):
    return f"clip_{index:06d}"


@dataclass(frozen=True)
class PromptRecord:
    clip_id: str
    text: str
    mode: str = "uniform"

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"empty prompt for {self.clip_id}")
        if self.mode not in ("uniform", "adaptive"):
            raise ValueError(f"unknown prompt mode {self.mode!r}")


@dataclass(frozen=True)
class ClipEntry:
    path: str
    prompt: PromptRecord
    clip_seed: int = None
    source_id: str = None

    @property
    def clip_id(self):
        return self.prompt.clip_id


@dataclass
class DatasetManifest:
    root: Path
    task: TaskKind
    clips: list = field(default_factory=list)
    master_seed: int = None

    def clip_dir(self, entry):
        return Path(self.root) / entry.path

    @property
    def clip_ids(self):
        return [c.clip_id for c in self.clips]


def prepare_source(img, target_w=DEFAULT_WIDTH, target_h=DEFAULT_HEIGHT):
    """Scale ``img`` to cover ``target_w x target_h`` and center-crop to it."""
    img = imaging.as_image(img)
    h, w = img.shape[:2]
    if (w, h) == (target_w, target_h):
        return img.copy()
    sx, sy = target_w / w, target_h / h
    if sx >= sy:
        new_w, new_h = target_w, max(target_h, round_half_up(h * sx))
    else:
        new_w, new_h = max(target_w, round_half_up(w * sy)), target_h
    scaled = imaging.resize(img, new_w, new_h)
    y0 = (new_h - target_h) // 2
    x0 = (new_w - target_w) // 2
    return scaled[y0:y0 + target_h, x0:x0 + target_w].copy()


def list_sources(src_dir):
    src_dir = Path(src_dir)
    if not src_dir.is_dir():
        raise DataError(f"input directory not found: {src_dir}")
    files = sorted(p.name for p in src_dir.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise EmptyInputError(f"no PNG images in {src_dir}")
    return [src_dir / name for name in files]


def read_source(path):
    try:
        return imaging.load_png(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from exc


def read_prompt_file(path, count):
    """Return the first ``count`` lines of ``path`` as adaptive prompts."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < count:
        raise ValueError(f"prompt file {path} has {len(lines)} lines, need {count}")
    lines = lines[:count]
    for i, line in enumerate(lines):
        if not line.strip():
            raise FormatError(f"prompt file {path}: line {i + 1} is empty")
    return lines


def clip_metadata(clip, clip_id):
    return {
        "clip_id": clip_id,
        "task": clip.task.value,
        "clip_seed": clip.clip_seed,
        "source_id": clip.source_id,
        "fps": clip.fps,
        "width": clip.width,
        "height": clip.height,
        "params": clip.spec.to_params(),
    }


def write_clip(clip_dir, clip, clip_id):
    clip_dir = Path(clip_dir)
    clip_dir.mkdir(parents=True, exist_ok=True)
    for t, frame in enumerate(clip.frames, start=1):
        imaging.save_png(clip_dir / frame_name(t), frame)
    meta = json.dumps(clip_metadata(clip, clip_id), indent=2) + "\n"
    (clip_dir / CLIP_META).write_text(meta, encoding="utf-8", newline="\n")


def read_clip_meta(clip_dir):
    path = Path(clip_dir) / CLIP_META
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"missing {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def clip_spec(meta):
    return DegradationSpec.from_params(meta["task"], meta["params"])


def load_frames(clip_dir, frames=NUM_FRAMES):
    clip_dir = Path(clip_dir)
    out = []
    for t in range(1, frames + 1):
        try:
            out.append(imaging.load_png(clip_dir / frame_name(t)))
        except FileNotFoundError:
            raise DataError(f"missing {clip_dir / frame_name(t)}") from None
    return out


def write_manifest(manifest):
    """Write ``videos.txt`` and ``prompt.txt`` under ``manifest.root``."""
    root = Path(manifest.root)
    root.mkdir(parents=True, exist_ok=True)
    videos = "".join(f"{c.path}\n" for c in manifest.clips)
    prompts = []
    for c in manifest.clips:
        if "\n" in c.prompt.text or "\r" in c.prompt.text:
            raise ValueError(f"prompt for {c.clip_id} spans several lines")
        prompts.append(f"{c.prompt.text}\n")
    (root / VIDEOS_FILE).write_text(videos, encoding="utf-8", newline="\n")
    (root / PROMPTS_FILE).write_text("".join(prompts), encoding="utf-8", newline="\n")


def _read_lines(path):
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"missing {path}") from None
    return text.splitlines()


def load_manifest(root):
    """Read a dataset directory back into a :class:`DatasetManifest`.

    Per-clip seed, source and task come from each clip's ``clip.json`` when
    present.  The prompt mode is reported as uniform when every line agrees.
    """
    root = Path(root)
    paths = [line.strip().replace("\\", "/") for line in _read_lines(root / VIDEOS_FILE)]
    prompts = _read_lines(root / PROMPTS_FILE)
    if len(paths) != len(prompts):
        raise FormatError(
            f"{VIDEOS_FILE} has {len(paths)} lines but {PROMPTS_FILE} has {len(prompts)}")
    mode = "uniform" if len(set(prompts)) <= 1 else "adaptive"
    clips = []
    tasks = set()
    for path, text in zip(paths, prompts):
        clip_dir = root / path
        if not clip_dir.is_dir():
            raise DanglingReferenceError(f"{VIDEOS_FILE} references missing clip {path}")
        seed = source = None
        if (clip_dir / CLIP_META).exists():
            meta = read_clip_meta(clip_dir)
            seed, source = meta.get("clip_seed"), meta.get("source_id")
            tasks.add(meta.get("task"))
        clip_id = path.rstrip("/").rsplit("/", 1)[-1]
        clips.append(ClipEntry(path, PromptRecord(clip_id, text, mode), seed, source))
    if len(tasks) > 1:
        raise FormatError(f"clips of several tasks in one dataset: {sorted(tasks)}")
    task = TaskKind(tasks.pop()) if tasks else None
    return DatasetManifest(root, task, clips)


def _render_source(job):
    path, entries, task, width, height, out_dir = job
    src = prepare_source(read_source(path), width, height)
    for index, seed, clip_id in entries:
        clip = build_clip(src, task, seed, source_id=path.name)
        write_clip(Path(out_dir) / clip_id, clip, clip_id)


def build_dataset(src_dir, task, out_dir, master_seed=0, clips_per_image=2,
                  prompt_mode="uniform", prompt_file=None, uniform_text=None,
                  width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT, threads=1):
    """Synthesize ``clips_per_image`` clips for every PNG in ``src_dir``.

    Sources are taken in lexicographic filename order and clip ``i`` of image
    ``j`` gets index ``j * clips_per_image + i`` and the seed
    ``derive_stream(master_seed, index)``.  Output bytes depend only on the
    arguments, never on ``threads``.
    """
    task = TaskKind(task)
    if clips_per_image < 1:
        raise ValueError("clips_per_image must be at least 1")
    sources = list_sources(src_dir)
    n_clips = len(sources) * clips_per_image

    if prompt_mode == "uniform":
        text = uniform_text or UNIFORM_PROMPTS[task]
        texts, mode = [text] * n_clips, "uniform"
    elif prompt_mode == "file":
        if prompt_file is None:
            raise ValueError("prompt_mode 'file' needs a prompt_file")
        texts, mode = read_prompt_file(prompt_file, n_clips), "adaptive"
    else:
        raise ValueError(f"unknown prompt mode {prompt_mode!r}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs, clips = [], []
    for j, path in enumerate(sources):
        entries = []
        for i in range(clips_per_image):
            index = j * clips_per_image + i
            seed = derive_stream(master_seed, index).state
            clip_id = clip_name(index)
            entries.append((index, seed, clip_id))
            prompt = PromptRecord(clip_id, texts[index], mode)
            clips.append(ClipEntry(clip_id, prompt, seed, path.name))
        jobs.append((path, entries, task, width, height, out_dir))

    threads = max(1, int(threads))
    if threads == 1:
        for job in jobs:
            _render_source(job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(_render_source, jobs))

    manifest = DatasetManifest(out_dir, task, clips, master_seed)
    write_manifest(manifest)
    return manifest


def default_threads():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1

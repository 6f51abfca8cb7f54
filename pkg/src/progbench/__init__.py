"""Progressive degradation datasets and frame-wise restoration evaluation."""

from .baselines import TrajectoryKind, classical_trajectory, interp_oracle, rl_deconv_trajectory
from .dataset import (
    DatasetManifest,
    PromptRecord,
    build_dataset,
    load_manifest,
    prepare_source,
    write_manifest,
)
from .degradation import Clip, DegradationSpec, TaskKind, build_clip, degrade_frame, make_schedule
from .evaluation import FrameCurve, Summary, evaluate_trajectory, import_trajectories, summarize
from .imaging import (
    convolve2d,
    dct_artifact,
    gaussian_blur,
    motion_kernel,
    resize,
    srgb_transfer,
)
from .metrics import CsvMetric, ExecMetric, psnr, ssim
from .sampling import RngState, derive_stream

__version__ = "0.1.0"

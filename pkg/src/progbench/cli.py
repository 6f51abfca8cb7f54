"""Command-line entry point: ``progbench {build,oracle,eval,report,inspect}``.

Exit status is 0 on success, 1 for usage errors, 2 for data or I/O errors
and 3 when the external metric fails.  Diagnostics go to stderr; results are
written only to the paths given on the command line (``inspect`` prints to
stdout).
"""

import argparse
import json
import sys
from pathlib import Path

from . import baselines, dataset, evaluation
from .degradation import TaskKind
from .errors import DataError, ExternalMetricError
from .metrics import EXTERNAL, PSNR, SSIM, CsvMetric, ExecMetric

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_EXTERNAL = 0, 1, 2, 3

METRIC_FLAGS = {"psnr": PSNR, "ssim": SSIM, "external": EXTERNAL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return value


def build_parser():
    parser = _Parser(prog="progbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def threads_flag(p):
        p.add_argument("--threads", type=_positive_int, default=dataset.default_threads(),
                       help="worker threads (output does not depend on this)")

    p = sub.add_parser("build", help="synthesize a progressive degradation dataset")
    p.add_argument("--task", required=True, choices=[t.value for t in TaskKind])
    p.add_argument("--input", required=True, type=Path, help="directory of source PNGs")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    p.add_argument("--clips-per-image", type=_positive_int, default=2)
    p.add_argument("--width", type=_positive_int, default=dataset.DEFAULT_WIDTH)
    p.add_argument("--height", type=_positive_int, default=dataset.DEFAULT_HEIGHT)
    p.add_argument("--prompt-mode", choices=["uniform", "file"])
    p.add_argument("--prompt-file", type=Path, help="one prompt per line, in clip order")
    p.add_argument("--uniform-text", help="override the task's uniform prompt")
    threads_flag(p)

    p = sub.add_parser("oracle", help="write baseline trajectories for a dataset")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--kind", required=True, choices=[k.value for k in baselines.TrajectoryKind])
    p.add_argument("--out", required=True, type=Path)
    threads_flag(p)

    p = sub.add_parser("eval", help="score trajectories frame by frame")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--trajectories", required=True, type=Path)
    p.add_argument("--metrics", default="psnr,ssim", help="comma list of psnr, ssim, external")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--external-cmd", help="command run as: CMD REF TEST, prints one number")
    src.add_argument("--external-csv", type=Path, help="CSV with columns clip_id,frame,value")
    p.add_argument("--out", required=True, type=Path, help="per-frame report CSV")
    p.add_argument("--summary", type=Path, help="summary JSON")
    threads_flag(p)

    p = sub.add_parser("report", help="re-aggregate an existing report CSV")
    p.add_argument("--csv", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("inspect", help="show a clip's metadata and schedule")
    p.add_argument("--clip", required=True, type=Path)
    return parser


def _require_dir(path, what):
    if not path.is_dir():
        raise DataError(f"{what} directory not found: {path}")


def cmd_build(args):
    mode = args.prompt_mode or ("file" if args.prompt_file else "uniform")
    if mode == "file" and args.prompt_file is None:
        raise UsageError("--prompt-mode file needs --prompt-file")
    if mode == "uniform" and args.prompt_file is not None:
        raise UsageError("--prompt-file conflicts with --prompt-mode uniform")
    if mode == "file" and args.uniform_text is not None:
        raise UsageError("--uniform-text conflicts with --prompt-mode file")
    _require_dir(args.input, "input")
    if args.prompt_file is not None and not args.prompt_file.is_file():
        raise DataError(f"prompt file not found: {args.prompt_file}")
    try:
        manifest = dataset.build_dataset(
            args.input, args.task, args.out, master_seed=args.seed,
            clips_per_image=args.clips_per_image, prompt_mode=mode,
            prompt_file=args.prompt_file, uniform_text=args.uniform_text,
            width=args.width, height=args.height, threads=args.threads)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise UsageError(str(exc)) from exc
    print(f"wrote {len(manifest.clips)} clips to {args.out}", file=sys.stderr)


def cmd_oracle(args):
    _require_dir(args.dataset, "dataset")
    manifest = dataset.load_manifest(args.dataset)
    try:
        baselines.generate_trajectories(manifest, args.kind, args.out, threads=args.threads)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(str(exc)) from exc
    print(f"wrote {args.kind} trajectories for {len(manifest.clips)} clips to {args.out}",
          file=sys.stderr)


def cmd_eval(args):
    names = [n.strip() for n in args.metrics.split(",") if n.strip()]
    unknown = [n for n in names if n not in METRIC_FLAGS]
    if unknown or not names:
        raise UsageError(f"--metrics takes a comma list of psnr, ssim, external; got {args.metrics!r}")
    metrics = tuple(METRIC_FLAGS[n] for n in names)
    has_source = args.external_cmd is not None or args.external_csv is not None
    if EXTERNAL in metrics and not has_source:
        raise UsageError("the external metric needs --external-cmd or --external-csv")
    if has_source and EXTERNAL not in metrics:
        metrics += (EXTERNAL,)
    _require_dir(args.dataset, "dataset")
    _require_dir(args.trajectories, "trajectories")

    external = None
    if args.external_cmd is not None:
        external = ExecMetric(args.external_cmd)
    elif args.external_csv is not None:
        external = CsvMetric(args.external_csv)

    manifest = dataset.load_manifest(args.dataset)
    provider = evaluation.import_trajectories(args.trajectories, manifest)
    try:
        curves = evaluation.evaluate_dataset(manifest, provider, metrics, external, threads=args.threads)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    evaluation.write_report(args.out, curves)
    if args.summary is not None:
        evaluation.write_summary(args.summary, evaluation.summarize(curves))
    print(f"evaluated {len(curves)} clips", file=sys.stderr)


def cmd_report(args):
    if not args.csv.is_file():
        raise DataError(f"report not found: {args.csv}")
    curves = evaluation.read_report(args.csv)
    if not curves:
        raise DataError(f"{args.csv} has no rows")
    evaluation.write_summary(args.out, evaluation.summarize(curves))


def cmd_inspect(args):
    _require_dir(args.clip, "clip")
    meta = dataset.read_clip_meta(args.clip)
    spec = dataset.clip_spec(meta)
    print(json.dumps(meta, indent=2))
    params = spec.to_params()
    columns = [k for k in ("scales", "qualities", "lengths", "strengths") if k in params]
    print("\nframe  " + "  ".join(f"{c:>10}" for c in columns))
    for t in range(spec.frames):
        cells = []
        for c in columns:
            v = params[c][t]
            cells.append(f"{v:>10.4f}" if isinstance(v, float) else f"{v:>10}")
        print(f"{t + 1:>5}  " + "  ".join(cells))


COMMANDS = {"build": cmd_build, "oracle": cmd_oracle, "eval": cmd_eval,
            "report": cmd_report, "inspect": cmd_inspect}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ExternalMetricError as exc:
        print(f"progbench: external metric error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except (DataError, OSError) as exc:
        print(f"progbench: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

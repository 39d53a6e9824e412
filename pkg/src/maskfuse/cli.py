"""Command-line interface.

Subcommands:

* ``refine``  — fuse a coarse manifest with a masklet manifest.
* ``eval``    — score a predicted manifest against ground truth (J, F, J&F).
* ``synth``   — render a scenario JSON into gt/masklets/coarse manifests.
* ``ablate``  — evaluate the baseline plus one refinement run per window size.
* ``overlay`` — export a sequence manifest as per-frame PGM images.

Every failure exits nonzero after printing a one-line JSON error object
(``{"error": {"type": ..., "message": ...}}``) to stderr; output files are
written atomically, so a failed run never leaves partial manifests behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import MaskFuseError, ScenarioError
from .manifest import (
    load_manifest,
    masklet_manifest,
    save_manifest,
    sequence_manifest,
    write_json_atomic,
)
from .metrics import EvalResult, evaluate_sequence
from .overlay import export_overlay
from .refine import DEFAULT_TAU, DEFAULT_WINDOW, RefineConfig, refine_video
from .synth import corruption_report, generate, scenario_from_dict


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskfuse",
        description="Temporal consistency refinement for video segmentation masks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_refine = sub.add_parser("refine", help="refine a coarse manifest using tracked masklets")
    p_refine.add_argument("--coarse", required=True, help="coarse sequence manifest (JSON)")
    p_refine.add_argument("--tracked", required=True, help="masklet manifest (JSON)")
    p_refine.add_argument("--out", required=True, help="where to write the refined manifest")
    p_refine.add_argument("--window", type=int, default=DEFAULT_WINDOW,
                          help=f"frames per voting window (default {DEFAULT_WINDOW})")
    p_refine.add_argument("--tau", type=float, default=DEFAULT_TAU,
                          help=f"overlap-fraction threshold (default {DEFAULT_TAU})")
    p_refine.add_argument("--report", default=None,
                          help="optional path for the refinement trace JSON")

    p_eval = sub.add_parser("eval", help="score a prediction manifest against ground truth")
    p_eval.add_argument("--pred", required=True, help="predicted sequence manifest")
    p_eval.add_argument("--gt", required=True, help="ground-truth sequence manifest")
    p_eval.add_argument("--json-out", default=None,
                        help="optional path for the full result as JSON")

    p_synth = sub.add_parser("synth", help="render a synthetic scenario to manifests")
    p_synth.add_argument("--spec", required=True, help="scenario description (JSON)")
    p_synth.add_argument("--out-dir", required=True,
                         help="directory for gt/masklets/coarse/corruption JSON files")

    p_ablate = sub.add_parser("ablate", help="compare refinement across window sizes")
    p_ablate.add_argument("--coarse", required=True, help="coarse sequence manifest")
    p_ablate.add_argument("--tracked", required=True, help="masklet manifest")
    p_ablate.add_argument("--gt", required=True, help="ground-truth sequence manifest")
    p_ablate.add_argument("--windows", required=True,
                          help="comma-separated window sizes, e.g. 5,10,15,20")
    p_ablate.add_argument("--json-out", default=None,
                          help="optional path for the table as JSON")

    p_overlay = sub.add_parser("overlay", help="export a sequence manifest as PGM images")
    p_overlay.add_argument("--in", dest="in_path", required=True,
                           help="sequence manifest to render")
    p_overlay.add_argument("--out-dir", required=True, help="directory for the PGM files")

    return parser


def _format_scores(result: EvalResult) -> str:
    lines = []
    for label, value in (("J:", result.j_mean), ("F:", result.f_mean),
                         ("J&F:", result.jf_mean)):
        lines.append(f"{label:<4} {value * 100.0:.2f}")
    return "\n".join(lines)


def _cmd_refine(args) -> int:
    coarse_manifest = load_manifest(args.coarse)
    coarse = coarse_manifest.require_sequence(args.coarse)
    tracked = load_manifest(args.tracked).require_masklets(args.tracked)
    cfg = RefineConfig(window=args.window, tau=args.tau)
    refined = refine_video(coarse, tracked, cfg)
    save_manifest(args.out, sequence_manifest(coarse_manifest.video_id, "refined", refined))
    if args.report is not None:
        report = {"video_id": coarse_manifest.video_id}
        report.update(refined.report.to_json_dict())
        write_json_atomic(args.report, report)
    print(f"refined {refined.num_frames} frames -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    pred = load_manifest(args.pred).require_sequence(args.pred)
    gt = load_manifest(args.gt).require_sequence(args.gt)
    result = evaluate_sequence(pred, gt)
    if args.json_out is not None:
        write_json_atomic(args.json_out, result.to_json_dict())
    print(_format_scores(result))
    return 0


def _cmd_synth(args) -> int:
    try:
        with open(args.spec) as handle:
            spec_obj = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{args.spec} is not valid JSON: {exc}") from exc
    scenario = scenario_from_dict(spec_obj)
    result = generate(scenario)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = {
        "gt.json": sequence_manifest(scenario.video_id, "gt", result.gt),
        "masklets.json": masklet_manifest(scenario.video_id, result.masklets),
        "coarse.json": sequence_manifest(scenario.video_id, "coarse", result.coarse),
    }
    for name, manifest in outputs.items():
        save_manifest(os.path.join(args.out_dir, name), manifest)
    write_json_atomic(os.path.join(args.out_dir, "corruption.json"),
                      corruption_report(result, DEFAULT_WINDOW))
    for name in (*outputs, "corruption.json"):
        print(os.path.join(args.out_dir, name))
    return 0


def _parse_windows(text: str) -> list[int]:
    try:
        windows = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"--windows must be comma-separated integers, got {text!r}") from None
    if not windows:
        raise ValueError("--windows must name at least one window size")
    for w in windows:
        if w < 1:
            raise ValueError(f"window sizes must be at least 1, got {w}")
    return windows


def _cmd_ablate(args) -> int:
    windows = _parse_windows(args.windows)
    coarse = load_manifest(args.coarse).require_sequence(args.coarse)
    tracked = load_manifest(args.tracked).require_masklets(args.tracked)
    gt = load_manifest(args.gt).require_sequence(args.gt)

    rows = []
    baseline = evaluate_sequence(coarse, gt)
    rows.append(("baseline", None, baseline))
    for w in windows:
        refined = refine_video(coarse, tracked, RefineConfig(window=w))
        rows.append(("refined", w, evaluate_sequence(refined, gt)))

    cells = [("method", "window", "J", "F", "J&F")]
    for method, w, result in rows:
        cells.append((
            method,
            "-" if w is None else str(w),
            f"{result.j_mean * 100.0:.2f}",
            f"{result.f_mean * 100.0:.2f}",
            f"{result.jf_mean * 100.0:.2f}",
        ))
    widths = [max(len(row[col]) for row in cells) for col in range(5)]
    for row in cells:
        cols = [row[0].ljust(widths[0])]
        cols += [row[i].rjust(widths[i]) for i in range(1, 5)]
        print("  ".join(cols).rstrip())

    if args.json_out is not None:
        write_json_atomic(args.json_out, [
            {
                "method": method,
                "window": w,
                "J": result.j_mean * 100.0,
                "F": result.f_mean * 100.0,
                "J&F": result.jf_mean * 100.0,
            }
            for method, w, result in rows
        ])
    return 0


def _cmd_overlay(args) -> int:
    sequence = load_manifest(args.in_path).require_sequence(args.in_path)
    paths = export_overlay(sequence, args.out_dir)
    print(f"wrote {len(paths)} frames to {args.out_dir}")
    return 0


_COMMANDS = {
    "refine": _cmd_refine,
    "eval": _cmd_eval,
    "synth": _cmd_synth,
    "ablate": _cmd_ablate,
    "overlay": _cmd_overlay,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (MaskFuseError, ValueError, OSError) as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())

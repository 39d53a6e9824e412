"""Region and boundary quality measures for mask sequences.

``region_j`` is the Jaccard index of predicted vs ground-truth foreground.
``boundary_f`` is an F-measure on the masks' boundary pixels, where a
boundary pixel counts as matched when the other mask has a boundary pixel
within a small Chebyshev distance. The summary score averages the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import AlignmentError
from .masks import Mask, iou, make_mask, require_same_shape

region_j = iou

# 3x3 all-ones structuring element: one dilation step grows a set by
# Chebyshev distance 1.
_CHEBYSHEV_STEP = np.ones((3, 3), dtype=bool)


def default_boundary_tolerance(height: int, width: int) -> int:
    """Matching tolerance in pixels: 0.8% of the image diagonal, at least 1."""
    return max(1, int(round(0.008 * math.hypot(height, width))))


def mask_boundary(mask: Mask) -> Mask:
    """Foreground pixels with a 4-neighbour outside the foreground.

    Pixels on the image border count as boundary (everything beyond the
    image is background).
    """
    m = make_mask(mask)
    padded = np.pad(m, 1, mode="constant", constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return m & ~interior


def boundary_f(pred: Mask, gt: Mask, tolerance_px: int | None = None) -> float:
    """Boundary F-measure between a predicted and a ground-truth mask.

    Both boundaries empty -> 1.0; exactly one empty -> 0.0. Otherwise
    precision = fraction of predicted boundary pixels within
    ``tolerance_px`` (Chebyshev, at least 1) of the ground-truth boundary,
    recall the converse, and the result is their harmonic mean.
    """
    require_same_shape(pred, gt)
    if tolerance_px is None:
        tolerance_px = default_boundary_tolerance(*np.shape(pred))
    if tolerance_px < 1:
        raise ValueError(f"tolerance_px must be at least 1, got {tolerance_px}")
    pred_b = mask_boundary(pred)
    gt_b = mask_boundary(gt)
    n_pred = int(np.count_nonzero(pred_b))
    n_gt = int(np.count_nonzero(gt_b))
    if n_pred == 0 and n_gt == 0:
        return 1.0
    if n_pred == 0 or n_gt == 0:
        return 0.0
    pred_zone = ndimage.binary_dilation(pred_b, structure=_CHEBYSHEV_STEP,
                                        iterations=tolerance_px)
    gt_zone = ndimage.binary_dilation(gt_b, structure=_CHEBYSHEV_STEP,
                                      iterations=tolerance_px)
    precision = int(np.count_nonzero(pred_b & gt_zone)) / n_pred
    recall = int(np.count_nonzero(gt_b & pred_zone)) / n_gt
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class EvalResult:
    """Sequence-level scores plus the per-frame values behind them.

    All values live in [0, 1]; ``to_json_dict`` scales to the conventional
    0-100 range.
    """

    j_mean: float
    f_mean: float
    jf_mean: float
    per_frame_j: tuple[float, ...]
    per_frame_f: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.jf_mean != (self.j_mean + self.f_mean) / 2.0:
            raise ValueError("jf_mean must equal the exact mean of j_mean and f_mean")
        if len(self.per_frame_j) != len(self.per_frame_f):
            raise ValueError("per-frame J and F lists must have equal length")

    @classmethod
    def from_per_frame(cls, per_frame_j, per_frame_f) -> "EvalResult":
        pj = tuple(float(v) for v in per_frame_j)
        pf = tuple(float(v) for v in per_frame_f)
        if not pj or len(pj) != len(pf):
            raise ValueError("per-frame score lists must be non-empty and equally long")
        j_mean = float(np.mean(pj))
        f_mean = float(np.mean(pf))
        return cls(j_mean=j_mean, f_mean=f_mean, jf_mean=(j_mean + f_mean) / 2.0,
                   per_frame_j=pj, per_frame_f=pf)

    @property
    def num_frames(self) -> int:
        return len(self.per_frame_j)

    def to_json_dict(self) -> dict:
        return {
            "J": self.j_mean * 100.0,
            "F": self.f_mean * 100.0,
            "J&F": self.jf_mean * 100.0,
            "per_frame": [
                [j * 100.0, f * 100.0]
                for j, f in zip(self.per_frame_j, self.per_frame_f)
            ],
        }


def _frames_of(sequence) -> tuple[Mask, ...]:
    frames = getattr(sequence, "frames", None)
    if frames is not None:
        return tuple(frames)
    return tuple(make_mask(f) for f in sequence)


def evaluate_sequence(pred, gt, tolerance_px: int | None = None) -> EvalResult:
    """Score a predicted sequence against ground truth frame by frame.

    Accepts mask sequences, refined sequences, or plain iterables of masks.
    The boundary tolerance is derived once from the frame dimensions unless
    given explicitly.
    """
    pred_frames = _frames_of(pred)
    gt_frames = _frames_of(gt)
    if len(pred_frames) != len(gt_frames):
        raise AlignmentError(
            f"prediction has {len(pred_frames)} frames, ground truth {len(gt_frames)}"
        )
    if not pred_frames:
        raise ValueError("cannot evaluate an empty sequence")
    require_same_shape(pred_frames[0], gt_frames[0])
    if tolerance_px is None:
        tolerance_px = default_boundary_tolerance(*pred_frames[0].shape)
    per_j = []
    per_f = []
    for p, g in zip(pred_frames, gt_frames):
        per_j.append(region_j(p, g))
        per_f.append(boundary_f(p, g, tolerance_px=tolerance_px))
    return EvalResult.from_per_frame(per_j, per_f)

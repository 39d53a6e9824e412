"""Temporal refinement of per-frame masks using tracked instance masklets.

The engine repairs flicker in a coarse per-frame mask sequence by consulting
per-instance tracked masklets:

1. per frame, keep every instance whose tracked mask overlaps the coarse
   mask by more than a threshold fraction of the instance's own area,
2. per fixed-size window of frames, pick the instance combination that the
   gate produced most often,
3. rebuild each frame in the window as the union of the selected instances'
   tracked masks (falling back to the unmodified coarse frames when the
   selected combination is empty).

Frame indices are 0-based throughout the Python API; instance ids are
1-based. Exported JSON reports use 1-based frame numbers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError
from .masks import Mask, area, intersection_area, make_mask, union

# Supported policies for breaking ties between equally frequent combinations.
TIE_BREAK_POLICIES = ("earliest", "smallest")

DEFAULT_WINDOW = 15
DEFAULT_TAU = 0.8


@dataclass(frozen=True, eq=False)
class MaskSequence:
    """An ordered run of same-sized binary masks (one per video frame)."""

    frames: tuple[Mask, ...]

    def __post_init__(self) -> None:
        frames = tuple(make_mask(f) for f in self.frames)
        if not frames:
            raise ValueError("a mask sequence needs at least one frame")
        shape = frames[0].shape
        for idx, f in enumerate(frames):
            if f.shape != shape:
                raise ValueError(
                    f"frame {idx} has shape {f.shape}, expected {shape} from frame 0"
                )
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].shape[0]

    @property
    def width(self) -> int:
        return self.frames[0].shape[1]

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, index: int) -> Mask:
        return self.frames[index]

    def equals(self, other: "MaskSequence") -> bool:
        """True when both sequences match frame by frame, pixel by pixel."""
        if self.num_frames != other.num_frames:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.frames, other.frames))


@dataclass(frozen=True, eq=False)
class MaskletSet:
    """Tracked per-instance masklets, all covering the same frame range.

    ``tracks`` maps 1-based instance id to that instance's mask sequence.
    Ids must be contiguous ``1..N``; ``N = 0`` (no tracked instances) is
    allowed and makes the refiner fall back to the coarse input everywhere.
    """

    tracks: dict[int, MaskSequence]
    num_frames: int
    height: int
    width: int

    @classmethod
    def from_tracks(cls, tracks: dict[int, MaskSequence] | list[MaskSequence],
                    *, num_frames: int | None = None,
                    height: int | None = None, width: int | None = None) -> "MaskletSet":
        """Build a set from a list (implicitly ids 1..N) or an id-keyed dict.

        Explicit dimensions are only required when ``tracks`` is empty.
        """
        if isinstance(tracks, dict):
            track_map = dict(tracks)
        else:
            track_map = {i + 1: seq for i, seq in enumerate(tracks)}
        ids = sorted(track_map)
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"instance ids must be contiguous starting at 1, got {ids}")
        if not track_map:
            if num_frames is None or height is None or width is None:
                raise ValueError("an empty masklet set needs explicit num_frames, height and width")
            return cls(tracks={}, num_frames=num_frames, height=height, width=width)
        first = track_map[1]
        for iid, seq in track_map.items():
            if not isinstance(seq, MaskSequence):
                track_map[iid] = seq = MaskSequence(frames=tuple(seq))
            if (seq.num_frames, seq.height, seq.width) != (first.num_frames, first.height, first.width):
                raise ValueError(
                    f"masklet {iid} covers {seq.num_frames} frames of "
                    f"{seq.height}x{seq.width}, expected {first.num_frames} frames of "
                    f"{first.height}x{first.width}"
                )
        return cls(tracks=track_map, num_frames=first.num_frames,
                   height=first.height, width=first.width)

    @property
    def instance_ids(self) -> tuple[int, ...]:
        return tuple(range(1, len(self.tracks) + 1))

    @property
    def num_instances(self) -> int:
        return len(self.tracks)

    def frame(self, instance_id: int, frame_index: int) -> Mask:
        return self.tracks[instance_id].frames[frame_index]


@dataclass(frozen=True)
class RefineConfig:
    """Tunable parameters of the refinement engine.

    ``window`` is the number of frames voting together; ``tau`` is the
    overlap-fraction threshold (an instance survives a frame's gate only
    when its fraction strictly exceeds ``tau``). ``tie_break`` picks among
    equally frequent combinations: ``"earliest"`` keeps the one first seen
    in the window, ``"smallest"`` the lexicographically smallest id tuple.
    """

    window: int = DEFAULT_WINDOW
    tau: float = DEFAULT_TAU
    tie_break: str = "earliest"

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"window must be at least 1, got {self.window}")
        if not 0.0 <= self.tau < 1.0:
            raise ValueError(f"tau must satisfy 0 <= tau < 1, got {self.tau}")
        if self.tie_break not in TIE_BREAK_POLICIES:
            raise ValueError(
                f"tie_break must be one of {TIE_BREAK_POLICIES}, got {self.tie_break!r}"
            )


@dataclass(frozen=True)
class FrameRecord:
    """Gating outcome for one frame: surviving combination and all fractions."""

    index: int
    combination: tuple[int, ...]
    fractions: tuple[float, ...]


@dataclass(frozen=True)
class WindowRecord:
    """One window's half-open frame span, its vote winner, and per-frame records."""

    start: int
    stop: int
    selected: tuple[int, ...]
    frames: tuple[FrameRecord, ...]


@dataclass(frozen=True)
class RefineReport:
    """Full trace of a refinement run, suitable for JSON export."""

    num_frames: int
    num_instances: int
    window: int
    tau: float
    tie_break: str
    windows: tuple[WindowRecord, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        """JSON form of the trace. Frame numbers are 1-based here."""
        return {
            "num_frames": self.num_frames,
            "num_instances": self.num_instances,
            "window": self.window,
            "tau": self.tau,
            "tie_break": self.tie_break,
            "windows": [
                {
                    "first_frame": w.start + 1,
                    "last_frame": w.stop,
                    "selected": list(w.selected),
                    "frames": [
                        {
                            "frame": fr.index + 1,
                            "combination": list(fr.combination),
                            "fractions": list(fr.fractions),
                        }
                        for fr in w.frames
                    ],
                }
                for w in self.windows
            ],
        }


@dataclass(frozen=True, eq=False)
class RefinedSequence:
    """Refined frames plus the trace of how they were produced."""

    frames: tuple[Mask, ...]
    report: RefineReport

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, index: int) -> Mask:
        return self.frames[index]

    def as_sequence(self) -> MaskSequence:
        return MaskSequence(frames=self.frames)


def overlap_fraction(instance_mask: Mask, frame_mask: Mask) -> float:
    """Fraction of the instance's pixels covered by the frame mask.

    Zero when the instance mask is empty (an absent instance never passes
    the gate).
    """
    instance_px = area(instance_mask)
    if instance_px == 0:
        return 0.0
    return intersection_area(instance_mask, frame_mask) / instance_px


def _gate_frame(coarse_frame: Mask, tracks: dict[int, MaskSequence],
                frame_index: int, tau: float) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Gate every instance at one frame; returns (surviving ids, all fractions)."""
    kept = []
    fractions = []
    for iid in sorted(tracks):
        f = overlap_fraction(tracks[iid].frames[frame_index], coarse_frame)
        fractions.append(f)
        if f > tau:
            kept.append(iid)
    return tuple(kept), tuple(fractions)


def frame_combination(coarse_frame: Mask, tracked: MaskletSet, frame_index: int,
                      tau: float = DEFAULT_TAU) -> tuple[int, ...]:
    """Ids of the instances whose overlap fraction strictly exceeds ``tau``."""
    combo, _ = _gate_frame(coarse_frame, tracked.tracks, frame_index, tau)
    return combo


def select_combination(combinations, tie_break: str = "earliest") -> tuple[int, ...]:
    """Most frequent combination in the list, with the configured tie-break.

    Empty combinations vote like any other. ``"earliest"`` resolves ties to
    the combination whose first occurrence comes soonest; ``"smallest"`` to
    the lexicographically smallest tuple.
    """
    combos = [tuple(c) for c in combinations]
    if not combos:
        raise ValueError("cannot select from an empty combination list")
    if tie_break not in TIE_BREAK_POLICIES:
        raise ValueError(f"tie_break must be one of {TIE_BREAK_POLICIES}, got {tie_break!r}")
    counts: dict[tuple[int, ...], int] = {}
    first_at: dict[tuple[int, ...], int] = {}
    for pos, combo in enumerate(combos):
        if combo not in counts:
            counts[combo] = 0
            first_at[combo] = pos
        counts[combo] += 1
    best = max(counts.values())
    tied = [c for c, n in counts.items() if n == best]
    if tie_break == "earliest":
        return min(tied, key=lambda c: first_at[c])
    return min(tied)


def refine_window(coarse_frames, tracks: dict[int, MaskSequence], cfg: RefineConfig,
                  *, start: int = 0) -> tuple[tuple[Mask, ...], WindowRecord]:
    """Refine one window of frames.

    ``coarse_frames`` are the window's coarse masks; ``start`` is the index
    of the first one within the full video (tracks are indexed by absolute
    frame). Returns the rebuilt frames and the window's trace record.
    """
    records = []
    for offset, coarse in enumerate(coarse_frames):
        t = start + offset
        combo, fractions = _gate_frame(coarse, tracks, t, cfg.tau)
        records.append(FrameRecord(index=t, combination=combo, fractions=fractions))
    selected = select_combination([r.combination for r in records], cfg.tie_break)
    if not selected:
        # Nothing survived the vote: pass the coarse frames through untouched.
        out = tuple(coarse_frames)
    else:
        shape = coarse_frames[0].shape
        out = tuple(
            union([tracks[iid].frames[start + offset] for iid in selected], shape=shape)
            for offset in range(len(coarse_frames))
        )
    record = WindowRecord(start=start, stop=start + len(coarse_frames),
                          selected=selected, frames=tuple(records))
    return out, record


def refine_video(coarse: MaskSequence, tracked: MaskletSet,
                 cfg: RefineConfig | None = None, *, workers: int = 1) -> RefinedSequence:
    """Refine a whole video.

    The video is split into consecutive non-overlapping windows of
    ``cfg.window`` frames (the last window may be shorter) and each window
    is refined independently. ``workers`` only parallelizes that loop; the
    output is bit-identical for any worker count.
    """
    if cfg is None:
        cfg = RefineConfig()
    if tracked.num_frames != coarse.num_frames:
        raise AlignmentError(
            f"coarse sequence has {coarse.num_frames} frames but masklets "
            f"cover {tracked.num_frames}"
        )
    if (tracked.height, tracked.width) != (coarse.height, coarse.width):
        raise AlignmentError(
            f"coarse frames are {coarse.height}x{coarse.width} but masklets "
            f"are {tracked.height}x{tracked.width}"
        )
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")

    T = coarse.num_frames
    spans = [(s, min(s + cfg.window, T)) for s in range(0, T, cfg.window)]

    def run_span(span: tuple[int, int]) -> tuple[tuple[Mask, ...], WindowRecord]:
        s, e = span
        return refine_window(coarse.frames[s:e], tracked.tracks, cfg, start=s)

    if workers == 1 or len(spans) == 1:
        results = [run_span(sp) for sp in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_span, spans))

    frames: list[Mask] = []
    window_records = []
    for out_frames, record in results:
        frames.extend(out_frames)
        window_records.append(record)
    report = RefineReport(
        num_frames=T,
        num_instances=tracked.num_instances,
        window=cfg.window,
        tau=cfg.tau,
        tie_break=cfg.tie_break,
        windows=tuple(window_records),
    )
    return RefinedSequence(frames=tuple(frames), report=report)

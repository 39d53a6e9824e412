"""Synthetic video scenarios for exercising the refinement engine.

A scenario places simple shapes (axis-aligned rectangles, discrete disks)
on straight integer-lattice paths, declares which instances make up the
target object, and renders three aligned artifacts:

* ground truth: union of the target instances per frame,
* masklets: exact per-instance tracks,
* coarse: ground truth with seeded corruption (instance dropout, spurious
  inclusion of non-targets, boundary erosion).

Rendering is deterministic: the same scenario always produces bit-identical
outputs. Corruption draws come from ``numpy.random.default_rng(seed)``
(PCG64): one uniform per (frame, target instance) pair in ascending frame
then instance order for dropouts, followed by one uniform per (frame,
non-target instance) pair in the same order for spurious additions. Draws
happen even when the corresponding probability is zero, so adding forced
events never shifts the stream.

Frame indices are 0-based in this API; exported JSON uses 1-based frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ScenarioError
from .masks import Mask, empty_mask, union
from .refine import MaskletSet, MaskSequence

SHAPE_KINDS = ("rect", "disk")

# 4-neighbour cross: one erosion step peels a 1-pixel rim off the coarse mask.
_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class ShapeTrack:
    """One instance: a shape gliding along a straight path.

    ``size`` (height, width) applies to rectangles, ``radius`` to disks; the
    unused field stays ``None``. ``start`` is the position at frame 0 (the
    rectangle's top-left corner or the disk's centre, as (row, col)) and
    ``velocity`` the per-frame (row, col) step. Parts of the shape that
    leave the image are clipped.
    """

    kind: str
    start: tuple[int, int]
    velocity: tuple[int, int] = (0, 0)
    size: tuple[int, int] | None = None
    radius: int | None = None

    def position(self, frame_index: int) -> tuple[int, int]:
        return (self.start[0] + frame_index * self.velocity[0],
                self.start[1] + frame_index * self.velocity[1])


@dataclass(frozen=True)
class CorruptionSpec:
    """How the coarse sequence deviates from ground truth.

    ``forced_drops`` / ``forced_adds`` are (frame, instance) pairs that
    fire regardless of the probabilities — handy for scripting corruption
    at exact frames. Frames here are 0-based.
    """

    flicker_drop_prob: float = 0.0
    spurious_add_prob: float = 0.0
    boundary_erosion_px: int = 0
    forced_drops: tuple[tuple[int, int], ...] = ()
    forced_adds: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for name in ("flicker_drop_prob", "spurious_add_prob"):
            p = getattr(self, name)
            if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0.0 <= p <= 1.0:
                raise ScenarioError(f"{name} must be a probability in [0, 1], got {p!r}")
        k = self.boundary_erosion_px
        if isinstance(k, bool) or not isinstance(k, int) or k < 0:
            raise ScenarioError(f"boundary_erosion_px must be a non-negative integer, got {k!r}")
        for name in ("forced_drops", "forced_adds"):
            events = []
            for entry in getattr(self, name):
                pair = tuple(entry)
                if len(pair) != 2 or not all(
                    isinstance(v, int) and not isinstance(v, bool) for v in pair
                ):
                    raise ScenarioError(
                        f"{name} entries must be (frame, instance) integer pairs, got {entry!r}"
                    )
                events.append(pair)
            object.__setattr__(self, name, tuple(sorted(set(events))))


@dataclass(frozen=True)
class Scenario:
    """Complete description of one synthetic video."""

    frames: int
    height: int
    width: int
    instances: tuple[ShapeTrack, ...]
    target: tuple[int, ...]
    corruption: CorruptionSpec = field(default_factory=CorruptionSpec)
    seed: int = 0
    video_id: str = "synthetic"

    def __post_init__(self) -> None:
        if self.frames < 1:
            raise ScenarioError(f"frames must be at least 1, got {self.frames}")
        if self.height < 1 or self.width < 1:
            raise ScenarioError(
                f"dimensions must be at least 1x1, got {self.height}x{self.width}"
            )
        instances = tuple(self.instances)
        object.__setattr__(self, "instances", instances)
        if not instances:
            raise ScenarioError("a scenario needs at least one instance")
        for idx, track in enumerate(instances, start=1):
            self._check_track(idx, track)
        n = len(instances)
        target = tuple(sorted(set(self.target)))
        object.__setattr__(self, "target", target)
        if not target:
            raise ScenarioError("target must name at least one instance")
        for iid in target:
            if not (isinstance(iid, int) and not isinstance(iid, bool) and 1 <= iid <= n):
                raise ScenarioError(f"target id {iid!r} is not an instance id in 1..{n}")
        non_target = set(range(1, n + 1)) - set(target)
        for frame, iid in self.corruption.forced_drops:
            if not 0 <= frame < self.frames:
                raise ScenarioError(f"forced drop frame {frame} outside 0..{self.frames - 1}")
            if iid not in target:
                raise ScenarioError(f"forced drop instance {iid} is not a target instance")
        for frame, iid in self.corruption.forced_adds:
            if not 0 <= frame < self.frames:
                raise ScenarioError(f"forced add frame {frame} outside 0..{self.frames - 1}")
            if iid not in non_target:
                raise ScenarioError(f"forced add instance {iid} is not a non-target instance")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ScenarioError(f"seed must be an integer, got {self.seed!r}")

    def _check_track(self, idx: int, track: ShapeTrack) -> None:
        if not isinstance(track, ShapeTrack):
            raise ScenarioError(f"instance {idx} is not a ShapeTrack: {track!r}")
        if track.kind not in SHAPE_KINDS:
            raise ScenarioError(f"instance {idx} has unknown shape kind {track.kind!r}")
        for name in ("start", "velocity"):
            pair = getattr(track, name)
            if len(tuple(pair)) != 2 or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in pair
            ):
                raise ScenarioError(f"instance {idx} {name} must be an integer (row, col) pair")
        if track.kind == "rect":
            if track.size is None:
                raise ScenarioError(f"instance {idx} is a rect but has no size")
            sh, sw = track.size
            if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1
                       for v in (sh, sw)):
                raise ScenarioError(f"instance {idx} rect size must be positive integers")
            if sh > self.height or sw > self.width:
                raise ScenarioError(
                    f"instance {idx} rect {sh}x{sw} does not fit in "
                    f"{self.height}x{self.width}"
                )
        else:
            r = track.radius
            if r is None or isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise ScenarioError(f"instance {idx} disk radius must be a non-negative integer")
            if 2 * r + 1 > self.height or 2 * r + 1 > self.width:
                raise ScenarioError(
                    f"instance {idx} disk of radius {r} does not fit in "
                    f"{self.height}x{self.width}"
                )

    @property
    def num_instances(self) -> int:
        return len(self.instances)

    @property
    def non_target(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.num_instances + 1) if i not in self.target)


def _render_track(track: ShapeTrack, frame_index: int, height: int, width: int) -> Mask:
    """Rasterize one instance at one frame, clipping at the image edges."""
    row, col = track.position(frame_index)
    if track.kind == "rect":
        mask = empty_mask(height, width)
        sh, sw = track.size
        r0, r1 = max(0, row), min(height, row + sh)
        c0, c1 = max(0, col), min(width, col + sw)
        if r0 < r1 and c0 < c1:
            mask[r0:r1, c0:c1] = True
        return mask
    yy, xx = np.ogrid[:height, :width]
    return (yy - row) ** 2 + (xx - col) ** 2 <= track.radius ** 2


@dataclass(frozen=True, eq=False)
class SynthResult:
    """Rendered scenario: aligned ground truth, masklets, and coarse masks.

    ``drops``/``adds`` list every corruption event that fired (0-based
    frame, instance), forced and sampled alike. ``corrupted_frames`` are the
    frames where the coarse mask actually differs from ground truth.
    """

    scenario: Scenario
    gt: MaskSequence
    masklets: MaskletSet
    coarse: MaskSequence
    drops: tuple[tuple[int, int], ...]
    adds: tuple[tuple[int, int], ...]
    corrupted_frames: tuple[int, ...]

    def window_corruption(self, window: int) -> tuple[tuple[int, int, int], ...]:
        """Per-window corruption as (start, stop, corrupted-count) triples."""
        if window < 1:
            raise ValueError(f"window must be at least 1, got {window}")
        T = self.gt.num_frames
        corrupted = set(self.corrupted_frames)
        out = []
        for s in range(0, T, window):
            e = min(s + window, T)
            out.append((s, e, sum(1 for t in range(s, e) if t in corrupted)))
        return tuple(out)

    def minority_everywhere(self, window: int) -> bool:
        """True when corruption hits a strict minority of frames in every window."""
        return all(2 * n < (e - s) for s, e, n in self.window_corruption(window))


def generate(scenario: Scenario) -> SynthResult:
    """Render a scenario. Same scenario, same bits — always."""
    T, H, W = scenario.frames, scenario.height, scenario.width
    rendered = {
        iid: tuple(_render_track(track, t, H, W) for t in range(T))
        for iid, track in enumerate(scenario.instances, start=1)
    }
    masklets = MaskletSet.from_tracks(
        {iid: MaskSequence(frames=frames) for iid, frames in rendered.items()}
    )
    gt_frames = tuple(
        union([rendered[iid][t] for iid in scenario.target], shape=(H, W))
        for t in range(T)
    )

    spec = scenario.corruption
    rng = np.random.default_rng(scenario.seed)
    drops = set(spec.forced_drops)
    for t in range(T):
        for iid in scenario.target:
            if rng.random() < spec.flicker_drop_prob:
                drops.add((t, iid))
    adds = set(spec.forced_adds)
    for t in range(T):
        for iid in scenario.non_target:
            if rng.random() < spec.spurious_add_prob:
                adds.add((t, iid))

    coarse_frames = []
    for t in range(T):
        parts = [rendered[iid][t] for iid in scenario.target if (t, iid) not in drops]
        parts += [rendered[iid][t] for iid in scenario.non_target if (t, iid) in adds]
        frame = union(parts, shape=(H, W))
        if spec.boundary_erosion_px > 0 and frame.any():
            frame = ndimage.binary_erosion(
                frame, structure=_CROSS, iterations=spec.boundary_erosion_px,
                border_value=0,
            )
        coarse_frames.append(frame)

    corrupted = tuple(
        t for t in range(T) if not np.array_equal(coarse_frames[t], gt_frames[t])
    )
    return SynthResult(
        scenario=scenario,
        gt=MaskSequence(frames=gt_frames),
        masklets=masklets,
        coarse=MaskSequence(frames=tuple(coarse_frames)),
        drops=tuple(sorted(drops)),
        adds=tuple(sorted(adds)),
        corrupted_frames=corrupted,
    )


def fig2_scenario() -> Scenario:
    """The canonical two-instance demo.

    Five frames, a rectangle (instance 1) and a disk (instance 2) on
    disjoint paths; the target is the disk alone, but the coarse prediction
    wrongly includes the rectangle at frame 3 of 5. Windowed voting keeps
    the disk-only combination and discards the intruder.
    """
    return Scenario(
        frames=5,
        height=24,
        width=48,
        instances=(
            ShapeTrack(kind="rect", size=(6, 8), start=(3, 4), velocity=(0, 1)),
            ShapeTrack(kind="disk", radius=4, start=(16, 30), velocity=(0, -1)),
        ),
        target=(2,),
        corruption=CorruptionSpec(forced_adds=((2, 1),)),
        seed=2024,
        video_id="fig2",
    )


def corruption_report(result: SynthResult, window: int) -> dict:
    """JSON-ready summary of what was corrupted and where recovery is at risk.

    Windows where corruption reaches half the frames or more are flagged
    (``strict_minority`` false): there the most-frequent-combination vote
    can lock onto a corrupted combination. Frames are 1-based here.
    """
    return {
        "video_id": result.scenario.video_id,
        "seed": result.scenario.seed,
        "num_frames": result.scenario.frames,
        "window": window,
        "drops": [{"frame": t + 1, "instance": i} for t, i in result.drops],
        "adds": [{"frame": t + 1, "instance": i} for t, i in result.adds],
        "corrupted_frames": [t + 1 for t in result.corrupted_frames],
        "windows": [
            {
                "first_frame": s + 1,
                "last_frame": e,
                "corrupted": n,
                "strict_minority": bool(2 * n < (e - s)),
            }
            for s, e, n in result.window_corruption(window)
        ],
    }


def scenario_to_dict(scenario: Scenario) -> dict:
    """JSON form of a scenario (forced-event frames become 1-based)."""
    instances = []
    for track in scenario.instances:
        entry = {
            "kind": track.kind,
            "start": list(track.start),
            "velocity": list(track.velocity),
        }
        if track.kind == "rect":
            entry["size"] = list(track.size)
        else:
            entry["radius"] = track.radius
        instances.append(entry)
    spec = scenario.corruption
    return {
        "video_id": scenario.video_id,
        "frames": scenario.frames,
        "height": scenario.height,
        "width": scenario.width,
        "seed": scenario.seed,
        "instances": instances,
        "target": list(scenario.target),
        "corruption": {
            "flicker_drop_prob": spec.flicker_drop_prob,
            "spurious_add_prob": spec.spurious_add_prob,
            "boundary_erosion_px": spec.boundary_erosion_px,
            "forced_drops": [{"frame": t + 1, "instance": i} for t, i in spec.forced_drops],
            "forced_adds": [{"frame": t + 1, "instance": i} for t, i in spec.forced_adds],
        },
    }


def _events_from_json(obj, name: str) -> tuple[tuple[int, int], ...]:
    if not isinstance(obj, list):
        raise ScenarioError(f"corruption.{name} must be a list")
    events = []
    for entry in obj:
        if (not isinstance(entry, dict) or "frame" not in entry
                or "instance" not in entry):
            raise ScenarioError(
                f"corruption.{name} entries must be objects with 'frame' and 'instance'"
            )
        frame, iid = entry["frame"], entry["instance"]
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (frame, iid)):
            raise ScenarioError(f"corruption.{name} frame/instance must be integers")
        if frame < 1:
            raise ScenarioError(f"corruption.{name} frame numbers are 1-based, got {frame}")
        events.append((frame - 1, iid))
    return tuple(events)


def scenario_from_dict(obj) -> Scenario:
    """Parse the JSON form produced by :func:`scenario_to_dict`."""
    if not isinstance(obj, dict):
        raise ScenarioError(f"scenario must be a JSON object, got {type(obj).__name__}")
    for key in ("frames", "height", "width", "instances", "target"):
        if key not in obj:
            raise ScenarioError(f"scenario is missing key {key!r}")
    if not isinstance(obj["instances"], list):
        raise ScenarioError("scenario 'instances' must be a list")
    tracks = []
    for idx, entry in enumerate(obj["instances"], start=1):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ScenarioError(f"instance {idx} must be an object with a 'kind'")
        kind = entry["kind"]
        if kind not in SHAPE_KINDS:
            raise ScenarioError(f"instance {idx} has unknown shape kind {kind!r}")
        for key in ("start", "velocity"):
            if key in entry and (not isinstance(entry[key], list) or len(entry[key]) != 2):
                raise ScenarioError(f"instance {idx} {key!r} must be a [row, col] pair")
        try:
            tracks.append(ShapeTrack(
                kind=kind,
                start=tuple(entry.get("start", (0, 0))),
                velocity=tuple(entry.get("velocity", (0, 0))),
                size=tuple(entry["size"]) if kind == "rect" and "size" in entry else None,
                radius=entry.get("radius") if kind == "disk" else None,
            ))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"instance {idx} is malformed: {exc}") from exc
    corruption_obj = obj.get("corruption", {})
    if not isinstance(corruption_obj, dict):
        raise ScenarioError("scenario 'corruption' must be an object")
    spec = CorruptionSpec(
        flicker_drop_prob=corruption_obj.get("flicker_drop_prob", 0.0),
        spurious_add_prob=corruption_obj.get("spurious_add_prob", 0.0),
        boundary_erosion_px=corruption_obj.get("boundary_erosion_px", 0),
        forced_drops=_events_from_json(corruption_obj.get("forced_drops", []), "forced_drops"),
        forced_adds=_events_from_json(corruption_obj.get("forced_adds", []), "forced_adds"),
    )
    if not isinstance(obj["target"], list):
        raise ScenarioError("scenario 'target' must be a list of instance ids")
    for key in ("frames", "height", "width"):
        if isinstance(obj[key], bool) or not isinstance(obj[key], int):
            raise ScenarioError(f"scenario {key!r} must be an integer")
    return Scenario(
        frames=obj["frames"],
        height=obj["height"],
        width=obj["width"],
        instances=tuple(tracks),
        target=tuple(obj["target"]),
        corruption=spec,
        seed=obj.get("seed", 0),
        video_id=obj.get("video_id", "synthetic"),
    )

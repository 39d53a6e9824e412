"""JSON manifest files: the on-disk interchange format for mask data.

A manifest is a single JSON object:

    {
      "video_id": "...",
      "kind": "coarse" | "refined" | "gt" | "masklets",
      "height": H, "width": W, "num_frames": T,
      "frames":    [RLE, ...]                    # sequence kinds
      "instances": {"1": [RLE, ...], "2": ...}   # kind == "masklets"
    }

where each RLE is ``{"h": .., "w": .., "counts": [..]}`` (see ``masks``).
Instance keys are contiguous decimal strings starting at "1". Frame and
instance numbers in error messages are 1-based, matching the file.

Writes are atomic: the JSON is fully serialized, written to a temporary
file in the target directory, and renamed into place, so a failed save
never leaves a partial manifest behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

from .errors import (
    ManifestIntegrityError,
    ManifestKindError,
    ManifestParseError,
    ManifestSchemaError,
    RleFormatError,
)
from .masks import RleMask, rle_decode, rle_encode
from .refine import MaskletSet, MaskSequence, RefinedSequence

KINDS = ("coarse", "masklets", "refined", "gt")
SEQUENCE_KINDS = tuple(k for k in KINDS if k != "masklets")


@dataclass(frozen=True, eq=False)
class VideoManifest:
    """In-memory manifest: identity plus fully validated mask data."""

    video_id: str
    kind: str
    data: MaskSequence | MaskletSet

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        wants_masklets = self.kind == "masklets"
        if wants_masklets != isinstance(self.data, MaskletSet):
            raise ValueError(
                f"kind {self.kind!r} does not match data of type {type(self.data).__name__}"
            )

    @property
    def height(self) -> int:
        return self.data.height

    @property
    def width(self) -> int:
        return self.data.width

    @property
    def num_frames(self) -> int:
        return self.data.num_frames

    def require_sequence(self, path: str = "<manifest>") -> MaskSequence:
        """The mask sequence, or :class:`ManifestKindError` for masklet manifests."""
        if self.kind == "masklets":
            raise ManifestKindError(
                f"{path}: kind 'masklets' where a frame-sequence manifest "
                f"({'/'.join(SEQUENCE_KINDS)}) is required"
            )
        return self.data

    def require_masklets(self, path: str = "<manifest>") -> MaskletSet:
        """The masklet set, or :class:`ManifestKindError` for sequence manifests."""
        if self.kind != "masklets":
            raise ManifestKindError(
                f"{path}: kind {self.kind!r} where a 'masklets' manifest is required"
            )
        return self.data


def sequence_manifest(video_id: str, kind: str, sequence) -> VideoManifest:
    """Wrap a mask sequence (or refined result) for saving."""
    if kind not in SEQUENCE_KINDS:
        raise ValueError(f"kind must be one of {SEQUENCE_KINDS}, got {kind!r}")
    if isinstance(sequence, RefinedSequence):
        sequence = sequence.as_sequence()
    elif not isinstance(sequence, MaskSequence):
        sequence = MaskSequence(frames=tuple(sequence))
    return VideoManifest(video_id=video_id, kind=kind, data=sequence)


def masklet_manifest(video_id: str, masklets: MaskletSet) -> VideoManifest:
    """Wrap a masklet set for saving."""
    return VideoManifest(video_id=video_id, kind="masklets", data=masklets)


def manifest_to_json_dict(manifest: VideoManifest) -> dict:
    """Serializable form with canonical key order."""
    out = {
        "video_id": manifest.video_id,
        "kind": manifest.kind,
        "height": manifest.height,
        "width": manifest.width,
        "num_frames": manifest.num_frames,
    }
    if manifest.kind == "masklets":
        masklets: MaskletSet = manifest.data
        out["instances"] = {
            str(iid): [rle_encode(f).to_json_dict() for f in masklets.tracks[iid].frames]
            for iid in masklets.instance_ids
        }
    else:
        out["frames"] = [rle_encode(f).to_json_dict() for f in manifest.data.frames]
    return out


def write_json_atomic(path, obj) -> None:
    """Serialize ``obj`` fully, then write-and-rename so readers never see a partial file."""
    text = json.dumps(obj, indent=2) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def save_manifest(path, manifest: VideoManifest) -> None:
    """Write a manifest to ``path`` atomically."""
    write_json_atomic(path, manifest_to_json_dict(manifest))


def _require_key(obj: dict, key: str, path) -> object:
    if key not in obj:
        raise ManifestSchemaError(f"{path}: missing key {key!r}")
    return obj[key]


def _require_int(obj: dict, key: str, path) -> int:
    value = _require_key(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ManifestSchemaError(f"{path}: {key!r} must be an integer, got {value!r}")
    return value


def _decode_rle(entry, height: int, width: int, where: str, path):
    try:
        rle = RleMask.from_json_dict(entry)
    except RleFormatError as exc:
        raise ManifestIntegrityError(f"{path}: {where}: {exc}") from exc
    if (rle.height, rle.width) != (height, width):
        raise ManifestIntegrityError(
            f"{path}: {where}: RLE is {rle.height}x{rle.width}, "
            f"manifest header says {height}x{width}"
        )
    return rle_decode(rle)


def load_manifest(path) -> VideoManifest:
    """Read and fully validate a manifest file.

    Raises :class:`ManifestParseError` when the file cannot be read or is
    not JSON, :class:`ManifestSchemaError` when fields are missing or of
    the wrong type, and :class:`ManifestIntegrityError` when the mask data
    violates an invariant (naming the offending frame or instance).
    """
    try:
        with open(path) as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise ManifestParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestParseError(f"{path} is not valid JSON: {exc}") from exc

    if not isinstance(obj, dict):
        raise ManifestSchemaError(f"{path}: top level must be a JSON object")
    video_id = _require_key(obj, "video_id", path)
    if not isinstance(video_id, str):
        raise ManifestSchemaError(f"{path}: 'video_id' must be a string, got {video_id!r}")
    kind = _require_key(obj, "kind", path)
    if kind not in KINDS:
        raise ManifestSchemaError(f"{path}: 'kind' must be one of {KINDS}, got {kind!r}")
    height = _require_int(obj, "height", path)
    width = _require_int(obj, "width", path)
    num_frames = _require_int(obj, "num_frames", path)
    if height < 1 or width < 1:
        raise ManifestSchemaError(f"{path}: dimensions must be at least 1x1, got {height}x{width}")
    if num_frames < 1:
        raise ManifestSchemaError(f"{path}: 'num_frames' must be at least 1, got {num_frames}")

    if kind == "masklets":
        instances = _require_key(obj, "instances", path)
        if not isinstance(instances, dict):
            raise ManifestSchemaError(f"{path}: 'instances' must be an object")
        key_by_id: dict[int, str] = {}
        for key in instances:
            if not (isinstance(key, str) and key.isdigit() and str(int(key)) == key):
                raise ManifestSchemaError(
                    f"{path}: instance keys must be decimal strings, got {key!r}"
                )
            key_by_id[int(key)] = key
        ids = sorted(key_by_id)
        if ids != list(range(1, len(ids) + 1)):
            raise ManifestIntegrityError(
                f"{path}: instance ids must be contiguous from 1, got {ids}"
            )
        tracks = {}
        for iid in ids:
            entries = instances[key_by_id[iid]]
            if not isinstance(entries, list):
                raise ManifestSchemaError(f"{path}: instance {iid} must map to a list of RLE objects")
            if len(entries) != num_frames:
                raise ManifestIntegrityError(
                    f"{path}: instance {iid} has {len(entries)} frames, "
                    f"manifest header says {num_frames}"
                )
            frames = tuple(
                _decode_rle(entry, height, width, f"instance {iid} frame {t + 1}", path)
                for t, entry in enumerate(entries)
            )
            tracks[iid] = MaskSequence(frames=frames)
        data = MaskletSet.from_tracks(tracks, num_frames=num_frames, height=height, width=width)
        return VideoManifest(video_id=video_id, kind=kind, data=data)

    frames_obj = _require_key(obj, "frames", path)
    if not isinstance(frames_obj, list):
        raise ManifestSchemaError(f"{path}: 'frames' must be a list of RLE objects")
    if len(frames_obj) != num_frames:
        raise ManifestIntegrityError(
            f"{path}: 'frames' has {len(frames_obj)} entries, "
            f"manifest header says {num_frames}"
        )
    frames = tuple(
        _decode_rle(entry, height, width, f"frame {t + 1}", path)
        for t, entry in enumerate(frames_obj)
    )
    return VideoManifest(video_id=video_id, kind=kind, data=MaskSequence(frames=frames))

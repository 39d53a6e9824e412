"""Binary mask primitives and the run-length codec.

A binary mask is a 2-D ``numpy`` bool array (``True`` = foreground). All
functions here are pure: inputs are never modified, so masks can be shared
freely across threads.

Run-length layout (the interchange form):

* row-major scan order (row 0 left to right, then row 1, ...),
* counts alternate background/foreground starting with background,
* the first count may be 0 (mask starts with foreground), every later
  count is >= 1, and the counts sum to ``height * width``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RleFormatError, ShapeMismatchError

# A mask: 2-D numpy array of bool, True marks foreground pixels.
Mask = np.ndarray


def make_mask(pixels) -> Mask:
    """Coerce ``pixels`` to a 2-D contiguous bool array, validating the shape."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got {arr.ndim} dimension(s)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask dimensions must be at least 1x1, got {arr.shape}")
    if arr.dtype != np.bool_:
        arr = arr.astype(bool)
    return np.ascontiguousarray(arr)


def empty_mask(height: int, width: int) -> Mask:
    """All-background mask of the given dimensions."""
    return np.zeros((height, width), dtype=bool)


def full_mask(height: int, width: int) -> Mask:
    """All-foreground mask of the given dimensions."""
    return np.ones((height, width), dtype=bool)


def require_same_shape(a: Mask, b: Mask) -> None:
    """Raise :class:`ShapeMismatchError` unless the two masks share dimensions."""
    if np.shape(a) != np.shape(b):
        raise ShapeMismatchError(f"mask shapes differ: {np.shape(a)} vs {np.shape(b)}")


def area(mask: Mask) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(mask))


def intersection_area(a: Mask, b: Mask) -> int:
    """Number of pixels foreground in both masks; symmetric in its arguments."""
    require_same_shape(a, b)
    return int(np.count_nonzero(np.logical_and(a, b)))


def union(masks, *, shape: tuple[int, int] | None = None) -> Mask:
    """Pixel-wise OR of the given masks.

    An empty list is only valid with an explicit ``shape`` and yields an
    all-background mask of those dimensions.
    """
    mask_list = list(masks)
    if not mask_list:
        if shape is None:
            raise ValueError("union of an empty mask list requires an explicit shape")
        return empty_mask(*shape)
    first = make_mask(mask_list[0])
    out = first.astype(bool, copy=True)
    for m in mask_list[1:]:
        require_same_shape(first, m)
        np.logical_or(out, m, out=out)
    return out


def iou(a: Mask, b: Mask) -> float:
    """Jaccard index of two masks.

    Returns 1.0 when both masks are empty: both sources agree there is no
    object, which is the usual convention for absent-object frames.
    """
    require_same_shape(a, b)
    inter = intersection_area(a, b)
    union_px = area(a) + area(b) - inter
    if union_px == 0:
        return 1.0
    return inter / union_px


@dataclass(frozen=True)
class RleMask:
    """Run-length encoded mask (see module docstring for the layout)."""

    height: int
    width: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.height < 1 or self.width < 1:
            raise RleFormatError(
                f"RLE dimensions must be at least 1x1, got {self.height}x{self.width}"
            )
        counts = tuple(self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise RleFormatError("RLE counts must not be empty")
        for pos, count in enumerate(counts):
            if isinstance(count, bool) or not isinstance(count, (int, np.integer)):
                raise RleFormatError(f"RLE count at position {pos} is not an integer: {count!r}")
            if count < 0:
                raise RleFormatError(f"RLE count at position {pos} is negative: {count}")
            if count == 0 and pos > 0:
                raise RleFormatError(f"RLE count at position {pos} is zero (only the leading count may be 0)")
        total = sum(counts)
        expected = self.height * self.width
        if total != expected:
            raise RleFormatError(
                f"RLE counts sum to {total}, expected {expected} for a "
                f"{self.height}x{self.width} mask"
            )

    def to_json_dict(self) -> dict:
        """The interchange JSON object: ``{"h": .., "w": .., "counts": [..]}``."""
        return {"h": self.height, "w": self.width, "counts": list(self.counts)}

    @classmethod
    def from_json_dict(cls, obj) -> "RleMask":
        """Parse the interchange JSON object, raising :class:`RleFormatError` if malformed."""
        if not isinstance(obj, dict):
            raise RleFormatError(f"RLE object must be a JSON object, got {type(obj).__name__}")
        for key in ("h", "w", "counts"):
            if key not in obj:
                raise RleFormatError(f"RLE object is missing key {key!r}")
        h, w, counts = obj["h"], obj["w"], obj["counts"]
        if isinstance(h, bool) or not isinstance(h, int):
            raise RleFormatError(f"RLE 'h' must be an integer, got {h!r}")
        if isinstance(w, bool) or not isinstance(w, int):
            raise RleFormatError(f"RLE 'w' must be an integer, got {w!r}")
        if not isinstance(counts, list):
            raise RleFormatError(f"RLE 'counts' must be a list, got {type(counts).__name__}")
        return cls(height=h, width=w, counts=tuple(counts))


def rle_encode(mask: Mask) -> RleMask:
    """Encode a mask in row-major background-first run-length form."""
    m = make_mask(mask)
    flat = m.ravel()
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    counts = np.diff(edges).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return RleMask(height=m.shape[0], width=m.shape[1], counts=tuple(counts))


def rle_decode(rle: RleMask) -> Mask:
    """Decode back to a dense bool mask; exact inverse of :func:`rle_encode`."""
    values = np.resize(np.array([False, True]), len(rle.counts))
    flat = np.repeat(values, np.asarray(rle.counts, dtype=np.int64))
    return flat.reshape(rle.height, rle.width)

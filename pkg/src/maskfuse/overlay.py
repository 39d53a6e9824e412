"""Per-frame image export for eyeballing mask sequences.

Masks are written as binary (P5) PGM files, 0 for background and 255 for
foreground — viewable everywhere and trivially diffable. One file per
frame, named ``00001.pgm``, ``00002.pgm``, ... in frame order.
"""

from __future__ import annotations

import os

import numpy as np

from .masks import Mask, make_mask


def write_pgm(path, mask: Mask) -> None:
    """Write one mask as a binary PGM file."""
    m = make_mask(mask)
    height, width = m.shape
    raster = np.where(m, np.uint8(255), np.uint8(0))
    with open(path, "wb") as handle:
        handle.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        handle.write(raster.tobytes())


def read_pgm(path) -> Mask:
    """Read a PGM written by :func:`write_pgm` back as a bool mask.

    Any nonzero pixel counts as foreground. Only the binary (P5) variant
    with maxval 255 is supported.
    """
    with open(path, "rb") as handle:
        payload = handle.read()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(payload) and payload[pos : pos + 1].isspace():
            pos += 1
        if payload[pos : pos + 1] == b"#":  # comment runs to end of line
            while pos < len(payload) and payload[pos : pos + 1] not in (b"\n", b""):
                pos += 1
            continue
        start = pos
        while pos < len(payload) and not payload[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        fields.append(payload[start:pos])
    pos += 1  # single whitespace byte separates the header from the raster
    magic, width_s, height_s, maxval_s = fields
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width, height, maxval = int(width_s), int(height_s), int(maxval_s)
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}, expected 255")
    raster = payload[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: raster has {len(raster)} bytes, expected {width * height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width) != 0


def export_overlay(sequence, out_dir) -> list[str]:
    """Write every frame of a sequence as a PGM under ``out_dir``.

    Accepts anything with a ``frames`` attribute (mask sequences, refined
    results) or a plain iterable of masks. Returns the written paths in
    frame order. The directory is created if needed; I/O failures propagate
    with the offending path in the exception.
    """
    frames = getattr(sequence, "frames", None)
    if frames is None:
        frames = tuple(sequence)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for index, mask in enumerate(frames, start=1):
        path = os.path.join(out_dir, f"{index:05d}.pgm")
        write_pgm(path, mask)
        paths.append(path)
    return paths

import numpy as np

from maskfuse import CorruptionSpec, Scenario, ShapeTrack


def mask_from_rows(*rows: str) -> np.ndarray:
    """Build a bool mask from strings: '#' or '1' = foreground, anything else background."""
    return np.array([[ch in "#1" for ch in row] for row in rows], dtype=bool)


def rand_mask(rng: np.random.Generator, height: int, width: int, p: float = 0.5) -> np.ndarray:
    return rng.random((height, width)) < p


def flicker_scenario() -> Scenario:
    """Forty frames, three instances, a sparse forced-drop/add pattern that is a
    strict minority within every window for all sizes in {5, 10, 15, 20}."""
    return Scenario(
        frames=40,
        height=32,
        width=64,
        instances=(
            ShapeTrack(kind="rect", size=(6, 7), start=(2, 3), velocity=(0, 1)),
            ShapeTrack(kind="disk", radius=3, start=(14, 50), velocity=(0, -1)),
            ShapeTrack(kind="rect", size=(5, 5), start=(24, 20), velocity=(0, 0)),
        ),
        target=(1, 2),
        corruption=CorruptionSpec(
            forced_drops=((2, 1), (8, 2), (13, 1), (21, 2), (34, 1)),
            forced_adds=((27, 3),),
        ),
        seed=7,
        video_id="flicker",
    )

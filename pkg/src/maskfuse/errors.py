"""Exception types shared across the package."""


class MaskFuseError(Exception):
    """Base class for every error raised by maskfuse."""


class ShapeMismatchError(MaskFuseError):
    """Masks with different dimensions were combined."""


class AlignmentError(MaskFuseError):
    """Sequences disagree on frame count or frame dimensions."""


class RleFormatError(MaskFuseError):
    """Run-length payload violates the codec invariants."""


class ManifestError(MaskFuseError):
    """Base class for manifest file problems."""


class ManifestParseError(ManifestError):
    """Manifest file is unreadable or is not valid JSON."""


class ManifestSchemaError(ManifestError):
    """Manifest JSON is missing fields or has fields of the wrong type."""


class ManifestIntegrityError(ManifestError):
    """Manifest content violates an invariant (bad RLE, length mismatch)."""


class ManifestKindError(ManifestError):
    """Manifest has a valid kind that is wrong for the requested operation."""


class ScenarioError(MaskFuseError):
    """Synthetic scenario specification cannot be rendered."""

"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user input: malformed config, out-of-range parameter, shape mismatch."""


class StructuralMaskError(RuntimeError):
    """The observation mask leaves some lifted row/column with too few entries
    to determine a rank-r factor; completion is impossible for this mask."""

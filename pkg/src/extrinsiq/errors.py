"""Exception hierarchy shared across the package."""


class ExtrinsiqError(Exception):
    """Base class for all library errors."""


class NonPositiveDepth(ExtrinsiqError):
    """Point has non-positive depth in the camera frame; cannot project."""


class DegenerateLine(ExtrinsiqError):
    """Image line back-projects to a zero normal (K^T l vanishes)."""


class NearPiAngle(ExtrinsiqError):
    """Rotation logarithm requested too close to the pi-angle singularity."""


class ParallelLines(ExtrinsiqError):
    """Two image lines are (numerically) parallel; no finite intersection."""


class InfeasibleScene(ExtrinsiqError):
    """Target pose rejection sampling exceeded its iteration cap."""


class NoReturns(ExtrinsiqError):
    """Simulated LIDAR scan produced no returns from the target."""


class TargetNotVisible(ExtrinsiqError):
    """Target is not (fully) visible in the simulated camera."""


class NoConsensus(ExtrinsiqError):
    """RANSAC failed to find a model with a sufficient inlier ratio."""


class MissingEdge(ExtrinsiqError):
    """Fewer than four usable boundary lines could be extracted."""


class DegenerateConfiguration(ExtrinsiqError):
    """Geometric configuration too degenerate to solve (e.g. collinear corners)."""


class DidNotConverge(ExtrinsiqError):
    """An iterative geometric solve failed to reach its tolerance."""


class InsufficientViews(ExtrinsiqError):
    """Too few (or too poorly conditioned) views to run a calibration."""


class NumericalFailure(ExtrinsiqError):
    """Non-finite cost or Jacobian encountered during optimization."""


class DisconnectedGraph(ExtrinsiqError):
    """Sensor graph is not connected; global calibration is impossible."""

# File: src/utils/errors.py
# Purpose: Exception types shared by every analysis module.

from typing import Any, Optional


class CableRobotError(Exception):
    """Base class for all toolkit errors."""


class ScenarioError(CableRobotError):
    """Malformed or invalid scenario; `field` points at the offending key."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class UnknownBodyError(CableRobotError):
    pass


class StrokeError(CableRobotError):
    """Internal coordinate outside its stroke limits."""

    def __init__(self, coordinate: str, value: float, bound: str, limit: float):
        self.coordinate = coordinate
        self.value = value
        self.bound = bound
        self.limit = limit
        super().__init__(
            f"{coordinate}={value:.6g} violates {bound} bound {limit:.6g}"
        )


class CoilBindError(CableRobotError):
    """Spring compressed below its minimum extension."""

    def __init__(self, extension: float, min_extension: float):
        self.extension = extension
        self.min_extension = min_extension
        super().__init__(
            f"spring extension {extension:.6g} m below coil-bind limit {min_extension:.6g} m"
        )


class SingularityError(CableRobotError):
    pass


class ConvergenceError(CableRobotError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e} m)")


class DivergenceError(CableRobotError):
    def __init__(self, message: str, last_state: Any = None):
        self.last_state = last_state
        super().__init__(message)


class InvalidWaypointError(CableRobotError):
    pass


class InfeasiblePoseError(CableRobotError):
    """Base position fails the static checks where an analysis needs it to hold."""

    def __init__(self, message: str, verdict: str = ""):
        self.verdict = verdict
        super().__init__(f"{message} ({verdict})" if verdict else message)

from typing import Optional


class ResonanceError(Exception):
    """Base class for every error raised by the toolkit"""


class ChartSingularityError(ResonanceError, ArithmeticError):
    """The angle chart was evaluated where sin(theta/2) vanishes"""

    def __init__(self, theta: float):
        self.theta = theta
        super().__init__(f"angle chart is singular at theta={theta:.3e}; use the amplitude chart")


class StepSizeUnderflowError(ResonanceError):
    """The adaptive integrator could not keep the step above machine spacing"""

    def __init__(self, time: float, message: str = ""):
        self.time = time
        detail = f": {message}" if message else ""
        super().__init__(f"step size underflow at t={time:.6g}{detail}")


class NoSeparatrixError(ResonanceError, ValueError):
    """Requested a separatrix where the target is not hyperbolic"""


class DesignInvalidError(ResonanceError):
    """The alpha(theta) solution left the band where the fields stay finite and positive"""

    def __init__(self, message: str, theta: Optional[float] = None):
        self.theta = theta
        super().__init__(message)


class InvalidPerturbationError(ResonanceError, ValueError):
    """Amplitude error would flip or null the Rabi frequency"""


class EmptyZoneError(ResonanceError, ValueError):
    """A zone average was requested over a region with no grid points"""

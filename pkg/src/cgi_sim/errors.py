class ROIError(ValueError):
    """A height falls outside the region where the field model is valid."""


class ExtrapolationError(ROIError):
    pass


class PropagationError(ROIError):
    def __init__(self, time: float, height: float, roi: tuple[float, float]):
        self.time = time
        self.height = height
        self.roi = roi
        super().__init__(
            f"trajectory leaves ROI [{roi[0]:g}, {roi[1]:g}] m at t={time:.6g} s, z={height:.6g} m")


class FitError(ValueError):
    pass


class SingularityError(ValueError):
    def __init__(self, message: str, pole: float):
        self.pole = pole
        super().__init__(message)


class ClosureWarning(UserWarning):
    """Output port separation large enough for the separation phase to dominate."""


class ConfigError(ValueError):
    """Invalid run configuration; ``lineno`` points into the config file when known."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = f"{path or '<config>'}:{lineno}: " if lineno is not None else ""
        super().__init__(where + message)

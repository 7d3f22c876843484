"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid domain, kernel or run configuration."""


class MeshMismatchError(ValueError):
    """A nodal vector does not live on the mesh it is combined with."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before meeting its tolerance.

    The best iterate found so far is kept on ``result`` so callers can
    inspect or reuse it.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result

"""Exception hierarchy shared by every rigidkit module."""


class RigidkitError(Exception):
    """Base class for all library errors."""


class InvalidGraph(RigidkitError, ValueError):
    pass


class GraphParseError(RigidkitError, ValueError):
    pass


class DegenerateFramework(RigidkitError, ValueError):
    """All vertices coincide (the framework leaves the modeled space)."""


class GraphMismatch(RigidkitError, ValueError):
    pass


class TooLarge(RigidkitError):
    """Input exceeds a documented scope limit."""


class LamanInconsistency(RigidkitError, RuntimeError):
    """Pebble game and exhaustive subgraph check disagree."""


class NotLaman(RigidkitError, ValueError):
    pass


class DegenerateAxis(RigidkitError, ValueError):
    pass


class ZeroPerimeter(RigidkitError, ValueError):
    pass


class InvalidStep(RigidkitError, ValueError):
    def __init__(self, index, reason):
        super().__init__(reason if index is None else f"step {index}: {reason}")
        self.index = index
        self.reason = reason


class RealizationError(RigidkitError, ValueError):
    def __init__(self, index, reason):
        super().__init__(f"step {index}: {reason}")
        self.index = index


class CirclesDisjoint(RealizationError):
    pass


class CirclesTangent(RealizationError):
    pass


class NotVertexAddConstructible(RigidkitError, ValueError):
    pass


class InfeasibleLengths(RigidkitError, ValueError):
    pass


class IncompatibleLaw(RigidkitError, ValueError):
    def __init__(self, report):
        super().__init__(f"control law fails compatibility: {report.summary()}")
        self.report = report


class NonFiniteState(RigidkitError, ValueError):
    pass


class NotAtEquilibrium(RigidkitError, ValueError):
    pass


class OracleMismatch(RigidkitError, RuntimeError):
    """Analytic Jacobian disagrees with the finite-difference oracle."""


class NotTwoCycles(RigidkitError, ValueError):
    pass

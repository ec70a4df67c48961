__all__ = ["PlanningError", "ConfigError", "OutOfEnvelope", "SurfaceDomainError", "InfeasibleAirspeed",
           "DegenerateSegment", "InvalidSpline", "NegativeCruise", "WindTooStrong", "InfeasibleSegment",
           "PrimitiveInfeasible", "PrimitiveNotRequired", "FixpointFailure", "ExportError"]


class PlanningError(Exception):
    pass


class ConfigError(PlanningError):
    pass


class OutOfEnvelope(PlanningError):
    pass


class SurfaceDomainError(PlanningError):
    pass


class InfeasibleAirspeed(PlanningError):
    pass


class DegenerateSegment(PlanningError):
    pass


class InvalidSpline(PlanningError):
    pass


class NegativeCruise(PlanningError):
    pass


class WindTooStrong(PlanningError):
    pass


class InfeasibleSegment(PlanningError):
    pass


class PrimitiveInfeasible(PlanningError):
    pass


class PrimitiveNotRequired(PlanningError):
    pass


class ExportError(PlanningError):
    pass


class FixpointFailure(PlanningError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual

"""Kernel exceptions; each maps to a machine code and a CLI exit code"""
from typing import Any, Dict, List, Optional


class KernelError(Exception):
    """Base class for every failure the kernel reports"""

    code = "kernel_error"
    exit_code = 1

    def __init__(self, detail: str, **extra: Any):
        super().__init__(detail)
        self.detail = detail
        self.extra = extra

    def to_dict(self) -> Dict[str, Any]:
        payload = {"error": self.code, "detail": self.detail}
        payload.update(self.extra)
        return payload


# Geometry

class DegenerateConic(KernelError):
    code = "degenerate_conic"
    exit_code = 2


class OffCurve(KernelError):
    code = "off_curve"


class OutOfExtent(KernelError):
    code = "out_of_extent"


class NoIntersection(KernelError):
    code = "no_intersection"


class DomainError(KernelError):
    code = "domain_error"


# Construction

class InvalidConfiguration(KernelError):
    """Raised with the names of every violated constraint"""

    code = "invalid_configuration"
    exit_code = 2

    def __init__(self, violations: List[str], detail: Optional[str] = None):
        super().__init__(
            detail or "violated constraints: " + ", ".join(violations),
            violations=list(violations),
        )
        self.violations = list(violations)


class ArcClippingFailed(KernelError):
    code = "arc_clipping_failed"
    exit_code = 2


class RailExhausted(KernelError):
    code = "rail_exhausted"
    exit_code = 2


# Tracing

class InsideBody(KernelError):
    code = "inside_body"


class NotExited(KernelError):
    code = "not_exited"


class OutsideRevolvedRange(KernelError):
    code = "outside_revolved_range"


# Input / output

class InvalidConfigFile(KernelError):
    code = "invalid_config_file"
    exit_code = 2


class ConfigIOError(KernelError):
    code = "io_error"
    exit_code = 3

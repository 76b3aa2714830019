import math
from dataclasses import dataclass

from ..core.errors import DomainError
from ..core.geometry import Dir2, Point2


@dataclass(frozen=True)
class LemmaConfig:
    """
    Two foci and three angles on one side of the focal line.

    alpha = angle F1-F2-h, beta = angle F1-F2-e, gamma = angle h-F1-F2;
    e and h lie on the same ray from F1.
    """

    F1: Point2
    F2: Point2
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.F1.distance(self.F2) <= 0.0:
            raise DomainError("foci coincide")
        if min(self.alpha, self.beta, self.gamma) <= 0.0:
            raise DomainError("angles must be positive")
        if self.alpha + self.gamma >= math.pi or self.beta + self.gamma >= math.pi:
            raise DomainError("angles do not close a triangle")

    @property
    def f(self) -> float:
        return self.F1.distance(self.F2)

    @property
    def axis(self) -> Dir2:
        return Dir2.between(self.F1, self.F2)

    def f1_ray(self, gamma: float) -> Dir2:
        e, n = self.axis, self.axis.perp()
        return Dir2.of(e * math.cos(gamma) + n * math.sin(gamma))

    def f2_ray(self, angle: float) -> Dir2:
        e, n = self.axis, self.axis.perp()
        return Dir2.of(e * -math.cos(angle) + n * math.sin(angle))

    # Sine-law lengths
    @property
    def a1(self) -> float:
        return self.f * math.sin(self.alpha) / math.sin(self.alpha + self.gamma)

    @property
    def b1(self) -> float:
        return self.f * math.sin(self.gamma) / math.sin(self.alpha + self.gamma)

    @property
    def a2(self) -> float:
        return self.f * math.sin(self.beta) / math.sin(self.beta + self.gamma)

    @property
    def b2(self) -> float:
        return self.f * math.sin(self.gamma) / math.sin(self.beta + self.gamma)

    @property
    def c(self) -> float:
        return 0.5 * (-self.a1 + self.b1 + self.a2 + self.b2)

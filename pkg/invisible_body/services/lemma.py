"""
Numeric checks of the confocal collinearity lemma and of the closed form
for the direction of the ellipse/hyperbola crossing.
"""
import logging
import math
from typing import Dict, Tuple

import numpy as np

from ..core.conics import Conic, ConicKind, confocal_crossing, conic_through, ray_conic_intersections
from ..core.const import EPS_GEOM, TAU_AUDIT
from ..core.errors import DegenerateConic, DomainError, NoIntersection
from ..core.geometry import Dir2, Point2, Ray2, angle_between, collinearity_residual, line_params
from ..models.lemma import LemmaConfig
from ..schemas.report import AppendixCheck, LemmaReport

logger = logging.getLogger(__name__)

RNG_NAME = "numpy.PCG64"

ANGLE_LOW = math.radians(5.0)
ANGLE_HIGH = math.radians(120.0)
GAMMA_MARGIN = math.radians(2.0)


def phi_closed_form(alpha: float, beta: float) -> float:
    """Angle at F2 between F2F1 and F2u, from the two F2-side angles alone"""
    den = math.cos(0.5 * (alpha - beta))
    if abs(den) <= 1e-12:
        raise DomainError(f"cos((alpha - beta)/2) vanishes for alpha={alpha}, beta={beta}")
    ratio = math.cos(0.5 * (alpha + beta)) / den
    if not -1.0 <= ratio <= 1.0:
        raise DomainError(f"cos(phi) = {ratio} is outside [-1, 1]")
    return math.acos(ratio)


def _ray_meet(p: Point2, u: Dir2, q: Point2, v: Dir2) -> Point2:
    params = line_params(p, u, q, v)
    if params is None or params[0] <= 0.0 or params[1] <= 0.0:
        raise DomainError("rays do not meet ahead of both foci")
    return p + u * params[0]


def _hyperbola_through(F1: Point2, F2: Point2, p: Point2) -> Conic:
    near = F1 if p.distance(F1) < p.distance(F2) else F2
    return conic_through(ConicKind.HYPERBOLA_BRANCH, F1, F2, p, near)


def _on_bisector(F1: Point2, F2: Point2, p: Point2) -> bool:
    return abs(p.distance(F1) - p.distance(F2)) <= EPS_GEOM * max(1.0, F1.distance(F2))


def _crossing(F1: Point2, F2: Point2, e: Point2, h: Point2) -> Point2:
    """Crossing of the confocal ellipse through e with the hyperbola branch through h"""
    ellipse = conic_through(ConicKind.ELLIPSE, F1, F2, e)
    if _on_bisector(F1, F2, h):
        # the branch degenerates into the perpendicular bisector of F1F2
        center = (F1 + F2) * 0.5
        a = 0.5 * ellipse.k
        c = 0.5 * F1.distance(F2)
        n = Dir2.between(F1, F2).perp()
        if n.dot(h - center) < 0.0:
            n = -n
        return center + n * math.sqrt(a * a - c * c)
    return confocal_crossing(ellipse, _hyperbola_through(F1, F2, h), h)


def construct_points(cfg: LemmaConfig) -> Tuple[Point2, Point2, Point2]:
    """(e, h, u) of a lemma configuration"""
    ray = cfg.f1_ray(cfg.gamma)
    h = _ray_meet(cfg.F1, ray, cfg.F2, cfg.f2_ray(cfg.alpha))
    e = _ray_meet(cfg.F1, ray, cfg.F2, cfg.f2_ray(cfg.beta))
    return e, h, _crossing(cfg.F1, cfg.F2, e, h)


def phi_by_construction(cfg: LemmaConfig) -> float:
    """Angle F1-F2-u measured on the constructed crossing u"""
    _, _, u = construct_points(cfg)
    return angle_between(cfg.F1 - cfg.F2, u - cfg.F2)


def check_lemma_a(F1: Point2, F2: Point2, gamma1: float, gamma2: float, alpha: float, beta: float) -> float:
    """
    Two rays from F1 (angles gamma1, gamma2 off F1F2) cross the F2-rays at
    angles alpha (points h) and beta (points e). Returns the collinearity
    residual of F2 with the two ellipse/hyperbola crossings.
    """
    crossings = []
    for gamma in (gamma1, gamma2):
        cfg = LemmaConfig(F1, F2, alpha, beta, gamma)
        crossings.append(construct_points(cfg)[2])
    return collinearity_residual(F2, crossings[0], crossings[1])


def _first_point(ray: Ray2, conic: Conic) -> Point2:
    hits = ray_conic_intersections(ray, conic)
    if not hits:
        raise NoIntersection(f"ray from ({ray.origin.x}, {ray.origin.y}) misses the {conic.kind.value}")
    return hits[0][1]


def _curves_through(F1: Point2, F2: Point2, u: Point2) -> Tuple[Conic, Conic]:
    if _on_bisector(F1, F2, u):
        raise DomainError("hyperbola through a point of the perpendicular bisector is a line")
    return conic_through(ConicKind.ELLIPSE, F1, F2, u), _hyperbola_through(F1, F2, u)


def check_lemma_b(F1: Point2, F2: Point2, u1: Point2, u2: Point2, gamma: float) -> float:
    """
    Converse check: u1, u2 on a common ray from F2 and one F1-ray at angle
    gamma. Returns the collinearity residual of F1, e2 and h2.
    """
    if collinearity_residual(F2, u1, u2) > TAU_AUDIT and u1.distance(u2) > EPS_GEOM:
        raise DomainError("u1 and u2 are not on a common ray from F2")
    if math.sin(gamma) == 0.0:
        raise DomainError("the F1-ray runs along the focal axis")
    E1, H1 = _curves_through(F1, F2, u1)
    E2, H2 = _curves_through(F1, F2, u2)
    axis = Dir2.between(F1, F2)
    side = 1.0 if axis.cross(u1 - F1) >= 0.0 else -1.0
    ray = Ray2(F1, Dir2.of(axis * math.cos(gamma) + axis.perp() * (side * math.sin(gamma))))
    e1 = _first_point(ray, E1)
    h1 = _first_point(ray, H1)
    e2 = _first_point(Ray2.through(F2, e1), E2)
    h2 = _first_point(Ray2.through(F2, h1), H2)
    return collinearity_residual(F1, e2, h2)


def appendix_identities(cfg: LemmaConfig) -> AppendixCheck:
    """Residuals of the sine-law lengths, the expression for c and the cosine law"""
    e, h, u = construct_points(cfg)
    sine_law = max(
        abs(cfg.F1.distance(h) - cfg.a1),
        abs(cfg.F2.distance(h) - cfg.b1),
        abs(cfg.F1.distance(e) - cfg.a2),
        abs(cfg.F2.distance(e) - cfg.b2),
    )
    c = cfg.c
    c_formula = abs(cfg.F2.distance(u) - c)
    phi = phi_closed_form(cfg.alpha, cfg.beta)
    f = cfg.f
    lhs = math.sqrt(max(f * f + c * c - 2.0 * c * f * math.cos(phi), 0.0))
    cosine_law = abs(lhs - 0.5 * (cfg.a1 - cfg.b1 + cfg.a2 + cfg.b2))
    return AppendixCheck(sine_law=sine_law, c_formula=c_formula, cosine_law=cosine_law)


def _random_foci(rng: np.random.Generator) -> Tuple[Point2, Point2]:
    while True:
        x1, y1, x2, y2 = rng.uniform(-2.0, 2.0, size=4)
        F1, F2 = Point2(float(x1), float(y1)), Point2(float(x2), float(y2))
        if F1.distance(F2) >= 0.5:
            return F1, F2


def lemma_sweep(samples: int, seed: int, gamma_values: int = 10) -> LemmaReport:
    """Seeded sweep over random foci and angles; PASS iff every worst residual < TAU_AUDIT"""
    rng = np.random.default_rng(seed)
    rejected: Dict[str, int] = {"triangle": 0, "lemma_b": 0}
    phi_error = stdev = lemma_a = lemma_b = appendix = 0.0

    for _ in range(samples):
        F1, F2 = _random_foci(rng)
        alpha, beta = (float(v) for v in rng.uniform(ANGLE_LOW, ANGLE_HIGH, size=2))
        gamma_high = math.pi - max(alpha, beta) - GAMMA_MARGIN
        if gamma_high <= GAMMA_MARGIN:
            rejected["triangle"] += 1
            continue
        gammas = [float(g) for g in rng.uniform(GAMMA_MARGIN, gamma_high, size=gamma_values)]
        expected = phi_closed_form(alpha, beta)

        phis = []
        crossings = []
        for gamma in gammas:
            cfg = LemmaConfig(F1, F2, alpha, beta, gamma)
            _, _, u = construct_points(cfg)
            crossings.append(u)
            phis.append(angle_between(F1 - F2, u - F2))
        phi_error = max(phi_error, max(abs(phi - expected) for phi in phis))
        stdev = max(stdev, float(np.std(phis)))

        if len(gammas) >= 2:
            lemma_a = max(lemma_a, check_lemma_a(F1, F2, gammas[0], gammas[1], alpha, beta))
        appendix = max(appendix, appendix_identities(LemmaConfig(F1, F2, alpha, beta, gammas[0])).worst)

        u1 = crossings[0]
        u2 = F2 + (u1 - F2) * float(rng.uniform(0.6, 1.5))
        gamma_b = float(rng.uniform(ANGLE_LOW, ANGLE_HIGH))
        try:
            lemma_b = max(lemma_b, check_lemma_b(F1, F2, u1, u2, gamma_b))
        except (NoIntersection, DegenerateConic, DomainError) as exc:
            logger.debug("lemma (b) sample rejected: %s", exc.detail)
            rejected["lemma_b"] += 1

    worst = max(phi_error, stdev, lemma_a, lemma_b, appendix)
    report = LemmaReport(
        samples=samples,
        seed=seed,
        rng=RNG_NAME,
        gamma_values=gamma_values,
        phi_max_error=phi_error,
        phi_max_gamma_stdev=stdev,
        lemma_a_max_residual=lemma_a,
        lemma_b_max_residual=lemma_b,
        appendix_max_residual=appendix,
        rejected=rejected,
        threshold=TAU_AUDIT,
        passed=worst < TAU_AUDIT,
    )
    logger.info("lemma sweep: %d samples, worst residual %.3g", samples, worst)
    return report

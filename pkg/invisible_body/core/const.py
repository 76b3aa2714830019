"""
Tolerances shared by the geometry kernel.

All values are absolute and refer to the normalized frame in which
|A1A2| = 2, so a single constant has the same meaning for every
configuration.
"""
import math

#: Commonly used constant PI*2
TAU = math.pi * 2

#: Distance/focal-residual tolerance for "lies on" predicates
EPS_GEOM = 1e-9
#: Cross product of unit directions below which lines count as parallel
EPS_PARALLEL = 1e-12
#: Minimum forward ray parameter; also the advance after a reflection
EPS_T = 1e-9
#: Hits closer than this to a piece endpoint are degenerate
EPS_END = 1e-7
#: |d.n| below this at a hit is a grazing (tangent) contact
EPS_GRAZE = 1e-9
#: Discriminants below this are merged into one double root
EPS_DOUBLE_ROOT = 1e-14
#: Slack on angular extent tests, radians
EPS_ANGLE = 1e-12
#: Minimum separation of segment endpoints
EPS_SEGMENT = 1e-12
#: Unit-norm tolerance for directions
EPS_UNIT = 1e-12

#: Guard margin removed at every handled-cone boundary, radians
DELTA_CONE = 1e-6
#: Maximum exit deviation accepted by the invisibility sweep
TAU_INV = 1e-8
#: Tolerance of audit and lemma residual checks
TAU_AUDIT = 1e-9

#: Sequence truncation depth used when a config does not give one
DEFAULT_DEPTH = 12
#: Bounce budget of a single trace
MAX_BOUNCES = 16

"""Reference values for the reproduction gate.

Optimal areas and coordinates for the even cases n = 8..16, as reported
to 8 significant digits by the semidefinite-relaxation computations this
package reproduces, plus the exact relaxation sizes and the rigorous
bound targets used by the acceptance suite.  Version bumps whenever a
value changes so downstream comparisons stay auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

TABLE_VERSION = 1

# n -> reported optimum of the full (non-reduced) program
FULL_AREA = {
    8: 0.72686848,
    10: 0.74913736,
    12: 0.76072988,
}

# n -> reported optimum of the symmetry-reduced program
SYMMETRIC_AREA = {
    8: 0.72686848,
    10: 0.74913735,
    12: 0.76072986,
    14: 0.76753100,
    16: 0.77185969,
}

# n -> reported full-space coordinates x_1 .. x_{n-3}
FULL_X = {
    8: (0.26214172, 0.67123417, 0.67123381, 0.90909242, 0.90909213),
    10: (0.21101191, 0.54864468, 0.54864311, 0.78292524, 0.78292347,
         0.94529290, 0.94529183),
    12: (0.17616131, 0.46150224, 0.46150519, 0.67623091, 0.67623301,
         0.85320300, 0.85320328, 0.96231370, 0.96231344),
}

# n -> reported reduced coordinates (x1, x2, x4, ...)
SYMMETRIC_X = {
    10: (0.21101121, 0.54864181, 0.78292327, 0.94529267),
    12: (0.17616079, 0.46150096, 0.67622897, 0.85319926, 0.96231045),
    14: (0.15100047, 0.39733106, 0.59117050, 0.76441599, 0.89237421,
         0.97279813),
    16: (0.13204787, 0.34840959, 0.52343183, 0.68719098, 0.81912908,
         0.91836386, 0.97935563),
}

# (n, symmetric) -> (moment vector size, moment matrix size) at order 2
RELAXATION_SIZES = {
    (10, False): (2240, 113),
    (12, False): (5640, 181),
    (10, True): (320, 41),
    (12, True): (680, 61),
}

# n -> (rigorous lower bound, analytic upper bound) brackets
BRACKETS = {
    14: (0.76753100, 0.76893595),
    16: (0.77185969, 0.77279135),
}

# rigorous interval-verified bound targets for the certification gate
CERT_TARGETS = {
    8: (0.7268683, 0.7268685),  # certified bound must land in this window
    10: 0.7491370,              # certified bound must be at least this
}


@dataclass(frozen=True)
class ReproRow:
    n: int
    symmetric: bool
    reference: float
    tolerance: float


# the end-to-end reproduction suite: symmetric n = 8..16, full n = 8..12
REPRODUCE_ROWS = (
    ReproRow(8, True, SYMMETRIC_AREA[8], 1e-6),
    ReproRow(10, True, SYMMETRIC_AREA[10], 1e-6),
    ReproRow(12, True, SYMMETRIC_AREA[12], 1e-6),
    ReproRow(14, True, SYMMETRIC_AREA[14], 1e-5),
    ReproRow(16, True, SYMMETRIC_AREA[16], 1e-5),
    ReproRow(8, False, FULL_AREA[8], 1e-6),
    ReproRow(10, False, FULL_AREA[10], 5e-6),
    ReproRow(12, False, FULL_AREA[12], 5e-6),
)

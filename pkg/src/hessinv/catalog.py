"""Built-in test functions with sampling domains and their known answers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.transform import Rotation

from .funcspace import (
    Box,
    ConvexFunction,
    ExpAffine,
    ExpPiece,
    Intersection,
    LogBarrierPiece,
    PowerPiece,
    Quadratic,
    QuadraticPiece,
    RotatedCompose,
    SeparableSum,
    rotated,
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], ConvexFunction]
    property_i: bool
    note: str = ""
    angle: float | None = None  # characteristic angle, planar rotated entries


def _box(*intervals):
    return Box(np.array(intervals, dtype=float))


def _on(f, box):
    f.domain = Intersection([f.domain, box])
    return f


def sep_exp():
    """e^x1 + e^(2 x2) on a box where the two eigenvalues never meet."""
    return _on(SeparableSum([(0, ExpPiece(1, 1)), (1, ExpPiece(1, 2))], 2), _box([-1, 0], [0.2, 1]))


def power_sum():
    f = SeparableSum([(0, ExpPiece(1, 1)), (1, PowerPiece(4, 1 / 12)), (1, QuadraticPiece(1))], 2)
    return _on(f, _box([-1, 1], [-1, 1]))


def barrier_sum():
    f = SeparableSum([(0, LogBarrierPiece(-1.0, 0.0)), (1, ExpPiece(1, 1))], 2)
    return _on(f, _box([-2, -0.1], [-1, 1]))


def rotated_sep(theta):
    """inner(R(theta)^T x) with inner = e^y1 + 3 y2^2: no eigenvalue collision for |x| <= 0.7."""
    inner = SeparableSum([(0, ExpPiece(1, 1)), (1, QuadraticPiece(3))], 2)
    return _on(rotated(theta, inner), _box([-0.5, 0.5], [-0.5, 0.5]))


def exp_ray():
    """e^(x1 + 2 x2) + |x|^2: one exponential direction, a rotated separable sum."""
    return ExpAffine([[1, 2]], [1], k=1.0, domain=_box([-0.5, 0.5], [-0.5, 0.5]))


def mixed_exp():
    """e^(x1 + 2 x2) + e^x1 + |x|^2: two non-orthogonal exponential directions."""
    return ExpAffine([[1, 2], [1, 0]], [1, 1], k=1.0, domain=_box([-0.5, 0.5], [-0.5, 0.5]))


ROTATION3 = Rotation.from_euler("zyz", [0.4, 0.7, -0.3]).as_matrix()


def rotated3():
    inner = SeparableSum([(0, ExpPiece(1, 1)), (1, ExpPiece(0.5, -1)), (2, QuadraticPiece(2))], 3)
    return RotatedCompose(ROTATION3.T, inner, domain=_box([-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]))


def mixed3():
    return ExpAffine([[1, 1, 0], [0, 1, 1], [1, 0, 0]], [1, 1, 1], k=1.0,
                     domain=_box([-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]))


def handle_pair():
    from .handles import standard_instance

    return standard_instance()


CATALOG = {
    e.name: e
    for e in [
        CatalogEntry("quadratic", lambda: Quadratic(1.0, 2, domain=_box([-1, 1], [-1, 1])), True, "flat metric"),
        CatalogEntry("sep_exp", sep_exp, True, "separable"),
        CatalogEntry("power", power_sum, True, "separable with a quartic"),
        CatalogEntry("barrier", barrier_sum, True, "separable with a log barrier"),
        CatalogEntry("rot30", lambda: rotated_sep(np.pi / 6), True, "rotated separable", np.pi / 6),
        CatalogEntry("rot45", lambda: rotated_sep(np.pi / 4), True, "rotated separable", np.pi / 4),
        CatalogEntry("rot1", lambda: rotated_sep(1.0), True, "rotated separable", 1.0),
        CatalogEntry("exp_ray", exp_ray, True, "single exponential ray plus quadratic"),
        CatalogEntry("rot3d", rotated3, True, "rotated separable in 3D"),
        CatalogEntry("handles", handle_pair, True, "two bumped handles at 30 degrees"),
        CatalogEntry("mixed_exp", mixed_exp, False, "two exponential directions at 63 degrees"),
        CatalogEntry("mixed3", mixed3, False, "three exponential directions in 3D"),
    ]
}


def get(name) -> ConvexFunction:
    return CATALOG[name].build()

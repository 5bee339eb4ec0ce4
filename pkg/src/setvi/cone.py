"""Polyhedral ordering cones given by dual (facet) generators.

A cone is C = {y : g_j . y >= 0 for all j} with at least one generator and
a declared interior point e (g_j . e > 0 for every j certifies a nonempty
interior).  Every consumer of C in this package reads it through the
inequalities g_j . y >= 0, so the dual representation makes membership and
margins a handful of dot products and keeps the Minkowski-sum interior
test exact on finite clouds.

Margins are taken against unit-length facet normals: for a point y,
``min_j ghat_j . y`` is the largest epsilon such that the euclidean
epsilon-ball around y stays inside C whenever the margin is positive.
That turns "there is a neighborhood U with y + U inside the cone" into a
single closed-form number.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySet,
    InteriorWitnessInvalid,
    ZeroGenerator,
)

# Strictness tolerance separating INTERIOR / BOUNDARY / OUTSIDE verdicts.
TAU_STRICT = 1e-9

# Guard against combinatorial blowup when gridding a dual base.
_MAX_BASE_SAMPLE = 200_000


class Region(Enum):
    INTERIOR = "INTERIOR"
    BOUNDARY = "BOUNDARY"
    OUTSIDE = "OUTSIDE"


class Membership(NamedTuple):
    region: Region
    margin: float


class ExtMembership(NamedTuple):
    region: Region
    margin: float
    witness: int  # index into the anchoring cloud of the maximizing point


@dataclass(frozen=True, eq=False)
class Cone:
    dual_generators: np.ndarray   # (k, m)
    interior_point: np.ndarray    # (m,)
    normalized_normals: np.ndarray  # (k, m), rows of unit length

    @property
    def dim(self) -> int:
        return self.dual_generators.shape[1]


@dataclass(frozen=True, eq=False)
class WStarSample:
    """A finite sample of the dual-cone base {w in C+ : w . e = 1}.

    The normalized generators g_j / (g_j . e) are always present; the rest
    are convex-combination grid points of those vertices.
    """

    weights: np.ndarray           # (n, m)
    normalization_point: np.ndarray  # e

    def __len__(self) -> int:
        return self.weights.shape[0]

    def min_norm(self) -> float:
        return float(np.linalg.norm(self.weights, axis=1).min())

    def max_norm(self) -> float:
        return float(np.linalg.norm(self.weights, axis=1).max())


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


def make_cone(dual_generators, interior_point) -> Cone:
    """Validate and cache a cone from its facet generators.

    Raises ZeroGenerator for a zero row, DimensionMismatch for ragged
    input, and InteriorWitnessInvalid when some g_j . e <= 0.
    """
    gens = np.asarray(dual_generators, dtype=float)
    if gens.ndim != 2 or gens.shape[0] < 1:
        raise DimensionMismatch("dual generators must form a nonempty (k, m) matrix")
    e = np.asarray(interior_point, dtype=float)
    if e.ndim != 1 or e.shape[0] != gens.shape[1]:
        raise DimensionMismatch(
            f"interior point has dimension {e.shape}, generators are {gens.shape}"
        )
    if not np.all(np.isfinite(gens)) or not np.all(np.isfinite(e)):
        raise ValueError("cone data must be finite")
    norms = np.linalg.norm(gens, axis=1)
    if np.any(norms == 0.0):
        raise ZeroGenerator("every dual generator must be nonzero")
    products = gens @ e
    if np.any(products <= 0.0):
        j = int(np.argmin(products))
        raise InteriorWitnessInvalid(
            f"generator {j} has g.e = {products[j]:g}; the interior point must "
            "satisfy g.e > 0 for every facet"
        )
    return Cone(
        dual_generators=_readonly(gens),
        interior_point=_readonly(e),
        normalized_normals=_readonly(gens / norms[:, None]),
    )


def _check_dim(cone: Cone, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != cone.dim:
        raise DimensionMismatch(f"point of dimension {y.shape[-1]} vs cone in R^{cone.dim}")
    return y


def cone_margin(cone: Cone, y) -> float:
    """min_j ghat_j . y; positive = radius of a ball around y inside C."""
    y = _check_dim(cone, y)
    return float(np.min(cone.normalized_normals @ y))


def _classify(margin: float, tau: float) -> Region:
    if margin > tau:
        return Region.INTERIOR
    if margin < -tau:
        return Region.OUTSIDE
    return Region.BOUNDARY


def membership(cone: Cone, y, tau: float = TAU_STRICT) -> Membership:
    """Locate y relative to C with the signed ball-radius margin."""
    margin = cone_margin(cone, y)
    return Membership(_classify(margin, tau), margin)


def ext_margins(points: np.ndarray, cone: Cone, ys: np.ndarray):
    """Margins of each row of ys against the extended set points + C.

    Returns (margins, witnesses) where margins[i] = max_a min_j
    ghat_j . (ys[i] - a) and witnesses[i] is the maximizing point index.
    """
    pts = np.asarray(points, dtype=float)
    ys = np.asarray(ys, dtype=float)
    # (n_y, n_a, k) facet distances of every y - a pair
    diff = ys[:, None, :] - pts[None, :, :]
    dists = np.einsum("yak,jk->yaj", diff, cone.normalized_normals)
    per_anchor = dists.min(axis=2)          # (n_y, n_a)
    witnesses = per_anchor.argmax(axis=1)   # (n_y,)
    margins = per_anchor[np.arange(ys.shape[0]), witnesses]
    return margins, witnesses


def cone_extended_member(points, cone: Cone, y, tau: float = TAU_STRICT) -> ExtMembership:
    """Locate y relative to A + C for a finite nonempty cloud A.

    The margin max_a min_j ghat_j . (y - a) is positive exactly when y is
    in A + Int C, which coincides with the interior of A + C; the witness
    is the anchoring point realizing the maximum.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[0] == 0:
        raise EmptySet("cone_extended_member needs a nonempty anchor cloud")
    y = _check_dim(cone, np.asarray(y, dtype=float))
    if pts.shape[1] != cone.dim:
        raise DimensionMismatch(f"cloud in R^{pts.shape[1]} vs cone in R^{cone.dim}")
    margins, witnesses = ext_margins(pts, cone, y.reshape(1, -1))
    margin = float(margins[0])
    return ExtMembership(_classify(margin, tau), margin, int(witnesses[0]))


def _compositions(total: int, parts: int):
    """All integer vectors of the given length summing to total, lexicographic."""
    for combo in combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for c in combo:
            counts[c] += 1
        yield counts


def dual_base(cone: Cone, density: int) -> WStarSample:
    """Sample the base {w : w . e = 1} of the dual cone.

    density 1 returns exactly the normalized generators; density d >= 2
    returns the simplex lattice with d points per edge of the convex hull
    of those vertices (the vertices are always included).
    """
    if density < 1:
        raise ValueError("density must be >= 1")
    gens = cone.dual_generators
    e = cone.interior_point
    vertices = gens / (gens @ e)[:, None]
    if density == 1 or vertices.shape[0] == 1:
        weights = vertices
    else:
        k = vertices.shape[0]
        n = density - 1
        count = 1
        for i in range(1, k):
            count = count * (n + i) // i
        if count > _MAX_BASE_SAMPLE:
            raise ValueError(
                f"dual base grid would hold {count} points; lower the density"
            )
        lattice = np.array(list(_compositions(n, k)), dtype=float) / float(n)
        weights = lattice @ vertices
    return WStarSample(weights=_readonly(weights), normalization_point=cone.interior_point)

#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - compact convex sets & set-valued map geometry.

Sets are queried through their support function h_Y(u) = sup <y, u>. On top of that
sit the pieces needed to turn a set-valued map F into single-valued surrogates:
  - the Steiner point s(Y), a selection that is d-Lipschitz in the Hausdorff metric
  - the clipped projection Pi(Y, x) = Y n B(x, 2 d(x, Y)), 5-Lipschitz in (Y, x)
  - the parametrized selection f(x, u) = s(Pi(F(x), K(1 + |x|) u)), u in the unit ball
  - the sampled dilation F^(l)(x) = co F(x + 2 eps_l U), eps_l = 3^-l
"""

import logging
import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar, nnls
from scipy.spatial import ConvexHull
from scipy.special import roots_legendre

try:
    from scipy.spatial import QhullError
except ImportError:  # scipy < 1.8
    from scipy.spatial.qhull import QhullError

from .const import (
    DEFAULT_DILATION_SAMPLES,
    DEFAULT_N_DIRS,
    DEFAULT_QUAD_ORDER,
    MC_STEINER_DIRS,
    MC_STEINER_TOL,
    MEMBERSHIP_TOL,
    MIN_QUAD_ORDER,
    PARAMETER_TOL,
    PI_BISECT_ITERS,
    QUAD_RESIDUAL_TOL,
    SNAP_TOL,
    SelectionStrategy,
    __dev_mode__,
)
from .exceptions import (
    ConfigError,
    DimensionMismatchError,
    QuadratureError,
    SelectionError,
    ZeroDirectionError,
)
from .helpers import as_point, ball_grid, direction_grid, substream_rng

DEV_MODE = __dev_mode__ and False

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)

_RANK_TOL = 1e-12
MAX_DOUBLINGS = 40


def _check_direction(u, dim: int) -> np.ndarray:
    u = as_point(u, dim)
    if not np.any(u):
        raise ZeroDirectionError(f"u={u.tolist()}")
    return u


def _unique_rows(points: np.ndarray) -> np.ndarray:
    _, idx = np.unique(points, axis=0, return_index=True)
    return points[np.sort(idx)]


def _reduce_vertices(points: np.ndarray) -> np.ndarray:
    """Drop duplicate & (where qhull can tell) non-extreme points of a hull."""

    points = _unique_rows(points)
    count, dim = points.shape

    if dim == 1:
        return np.array([[points.min()], [points.max()]]) if count > 1 else points

    if count <= dim + 1:
        return points

    try:
        return points[np.sort(ConvexHull(points).vertices)]
    except (QhullError, ValueError):  # lower-dimensional point set
        return points


class ConvexSet(metaclass=ABCMeta):
    """A nonempty compact convex subset of R^d."""

    radius: float = 0.0

    @property
    @abstractmethod
    def dim(self) -> int:
        """Return the dimension of the ambient space."""

    @property
    @abstractmethod
    def vertices(self) -> np.ndarray:
        """Return the generating points (the centre, for a ball)."""

    def support(self, u) -> float:
        """Return h_Y(u) = sup <y, u> over the set (u must be nonzero)."""
        return float(self.support_many(_check_direction(u, self.dim)[None, :])[0])

    def support_many(self, dirs: np.ndarray) -> np.ndarray:
        """Return h_Y for each row of dirs (rows are not checked)."""
        values = (dirs @ self.vertices.T).max(axis=1)
        if self.radius:
            values = values + self.radius * np.linalg.norm(dirs, axis=1)
        return values

    def supporting_point(self, u) -> np.ndarray:
        """Return a maximiser of <y, u> over the set."""
        u = _check_direction(u, self.dim)
        point = self.vertices[int(np.argmax(self.vertices @ u))]
        if self.radius:
            point = point + self.radius * u / np.linalg.norm(u)
        return point

    @abstractmethod
    def nearest_point(self, x) -> np.ndarray:
        """Return the metric projection of x onto the set."""

    def max_norm(self) -> float:
        """Return sup |y| over the set."""
        return float(np.linalg.norm(self.vertices, axis=1).max() + self.radius)

    @property
    def is_singleton(self) -> bool:
        return self.radius == 0 and len(self.vertices) == 1

    def extent(self) -> tuple:
        """Return (min, max) of a 1-D set."""
        if self.dim != 1:
            raise DimensionMismatchError("extent() is only defined for d=1")
        return (
            float(self.vertices.min() - self.radius),
            float(self.vertices.max() + self.radius),
        )

    def to_dict(self) -> dict:
        return {"kind": type(self).__name__, "vertices": self.vertices.tolist()}


class Ball(ConvexSet):
    """The closed ball B(center, radius)."""

    def __init__(self, center, radius: float) -> None:
        self.center = as_point(center)
        self.radius = float(radius)
        if not self.radius >= 0:
            raise ConfigError(f"ball radius must be >= 0, not {radius}")

    def __repr__(self) -> str:
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def vertices(self) -> np.ndarray:
        return self.center[None, :]

    def nearest_point(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        offset = x - self.center
        dist = np.linalg.norm(offset)
        if dist <= self.radius:
            return x
        return self.center + self.radius / dist * offset

    def to_dict(self) -> dict:
        return {"kind": "Ball", "center": self.center.tolist(), "radius": self.radius}


class Hull(ConvexSet):
    """The convex hull of a nonempty finite point set."""

    def __init__(self, vertices) -> None:
        points = np.atleast_2d(np.asarray(vertices, dtype=float))
        if points.size == 0:
            raise ConfigError("a hull needs at least one vertex")
        if not np.all(np.isfinite(points)):
            raise ConfigError("hull vertices must be finite")
        self._vertices = _reduce_vertices(points)
        self._vertices.flags.writeable = False

    def __repr__(self) -> str:
        return f"Hull({self._vertices.tolist()})"

    @property
    def dim(self) -> int:
        return self._vertices.shape[1]

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    def nearest_point(self, x) -> np.ndarray:
        return _polytope_projection(self._vertices, as_point(x, self.dim))


class HullBall(ConvexSet):
    """The Minkowski sum co(vertices) + radius * U."""

    def __init__(self, vertices, radius: float) -> None:
        self.hull = Hull(vertices)
        self.radius = float(radius)
        if not self.radius >= 0:
            raise ConfigError(f"hull-ball radius must be >= 0, not {radius}")

    def __repr__(self) -> str:
        return f"HullBall({self.hull.vertices.tolist()}, radius={self.radius})"

    @property
    def dim(self) -> int:
        return self.hull.dim

    @property
    def vertices(self) -> np.ndarray:
        return self.hull.vertices

    def nearest_point(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        base = self.hull.nearest_point(x)
        offset = x - base
        dist = np.linalg.norm(offset)
        if dist <= self.radius:
            return x
        return base + self.radius / dist * offset

    def to_dict(self) -> dict:
        return {**super().to_dict(), "radius": self.radius}


def _polytope_projection(vertices: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Project x onto co(vertices), as a convex combination of the vertices.

    The barycentric weights come from a non-negative least-squares fit with a heavily
    weighted sum-to-one row, then are polished on their support by an exact affine
    least-squares solve.
    """

    count, dim = vertices.shape
    if count == 1:
        return vertices[0].copy()
    if dim == 1:
        return np.clip(x, vertices.min(), vertices.max())

    scale = 1.0 + np.abs(vertices).max() + np.abs(x).max()
    weight = 1e4 * scale
    a_mat = np.vstack((vertices.T, np.full((1, count), weight)))
    b_vec = np.concatenate((x, [weight]))
    lam, _ = nnls(a_mat, b_vec)
    lam = lam / lam.sum()

    support = np.flatnonzero(lam > 0)
    if 1 < len(support) <= dim + 1:
        base = vertices[support[0]]
        basis = (vertices[support[1:]] - base).T
        coef, *_ = np.linalg.lstsq(basis, x - base, rcond=None)
        polished = np.concatenate(([1.0 - coef.sum()], coef))
        if polished.min() >= -1e-14:
            polished = np.clip(polished, 0.0, None)
            return (polished / polished.sum()) @ vertices[support]

    return lam @ vertices


def _check_dims(*items) -> int:
    dims = {item.dim if isinstance(item, ConvexSet) else len(item) for item in items}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimensions {sorted(dims)}")
    return dims.pop()


def support_function(Y: ConvexSet, u) -> float:
    """Return h_Y(u); a zero direction raises ZeroDirectionError."""
    return Y.support(u)


def nearest_point(Y: ConvexSet, x) -> np.ndarray:
    x = as_point(x)
    _check_dims(Y, x)
    return Y.nearest_point(x)


def point_set_distance(x, Y: ConvexSet) -> float:
    """Return d(x, Y) = inf |x - y| over y in Y."""
    x = as_point(x)
    _check_dims(Y, x)
    return float(np.linalg.norm(x - Y.nearest_point(x)))


def supporting_point(Y: ConvexSet, u) -> np.ndarray:
    return Y.supporting_point(u)


def _as_hull_ball(Y: ConvexSet) -> tuple:
    return Y.vertices, Y.radius


def _hull_hausdorff(v1: np.ndarray, v2: np.ndarray) -> float:
    one = max(float(np.linalg.norm(v - _polytope_projection(v2, v))) for v in v1)
    two = max(float(np.linalg.norm(v - _polytope_projection(v1, v))) for v in v2)
    return max(one, two)


def hausdorff(Y1: ConvexSet, Y2: ConvexSet) -> float:
    """Return the Hausdorff distance between two sets.

    Exact when both radii agree (Hull/Hull, equal-radius balls or hull-balls) and for
    Ball/Ball; otherwise the sup of |h1(u) - h2(u)| over a direction grid (see
    helpers.direction_grid), locally refined around the best grid direction.
    """

    dim = _check_dims(Y1, Y2)
    (v1, r1), (v2, r2) = _as_hull_ball(Y1), _as_hull_ball(Y2)

    if len(v1) == 1 and len(v2) == 1:
        return float(np.linalg.norm(v1[0] - v2[0]) + abs(r1 - r2))
    if r1 == r2:
        return _hull_hausdorff(v1, v2)

    def gap(dirs: np.ndarray) -> np.ndarray:
        return np.abs(Y1.support_many(dirs) - Y2.support_many(dirs))

    dirs = direction_grid(dim)
    values = gap(dirs)
    best = int(np.argmax(values))
    result = float(values[best])
    if dim == 1:
        return result

    if dim == 2:
        theta0 = math.atan2(dirs[best, 1], dirs[best, 0])
        step = 2 * math.pi / len(dirs)
        res = minimize_scalar(
            lambda th: -gap(np.array([[math.cos(th), math.sin(th)]]))[0],
            bounds=(theta0 - step, theta0 + step),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return max(result, -float(res.fun))

    def neg_gap(w: np.ndarray) -> float:
        norm = np.linalg.norm(w)
        return -gap((w / norm)[None, :])[0] if norm else 0.0

    res = minimize(neg_gap, dirs[best], method="Nelder-Mead", options={"xatol": 1e-9})
    return max(result, -float(res.fun))


# Steiner point


def _steiner_2d(points: np.ndarray, quad_order: int) -> np.ndarray:
    """Return (1/pi) * integral of h(u) u over the circle, for a full-dim 2-D polygon.

    On the normal-cone arc of vertex p the integrand is <p, u> u, so the circle is
    split at the arc ends and each arc integrated by Gauss-Legendre.
    """

    ring = points[ConvexHull(points).vertices]  # counter-clockwise
    edges = np.roll(ring, -1, axis=0) - ring
    normals = np.column_stack((edges[:, 1], -edges[:, 0]))
    angles = np.arctan2(normals[:, 1], normals[:, 0])

    def integrate(order: int) -> np.ndarray:
        nodes, weights = roots_legendre(order)
        total = np.zeros(2)
        for i, point in enumerate(ring):
            start = angles[i - 1]
            length = (angles[i] - start) % (2 * math.pi)
            theta = start + 0.5 * length * (nodes + 1)
            dirs = np.column_stack((np.cos(theta), np.sin(theta)))
            values = (dirs @ point)[:, None] * dirs
            total += 0.5 * length * (weights @ values)
        return total / math.pi

    coarse, fine = integrate(quad_order), integrate(2 * quad_order)
    scale = 1.0 + np.linalg.norm(points, axis=1).max()
    residual = float(np.linalg.norm(fine - coarse))
    if residual > QUAD_RESIDUAL_TOL * scale:
        raise QuadratureError(f"2-D arc rule residual {residual:.3e}")
    return fine


def _solid_angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    numer = abs(float(a @ np.cross(b, c)))
    denom = 1.0 + float(a @ b + b @ c + c @ a)
    return 2.0 * math.atan2(numer, denom)


def _steiner_3d(points: np.ndarray) -> np.ndarray:
    """Weight each vertex of a full 3-D polytope by its normal cone's solid angle."""

    hull = ConvexHull(points)
    normals = hull.equations[:, :3]
    weights = np.zeros(len(points))

    for vtx in hull.vertices:
        cone = normals[np.any(hull.simplices == vtx, axis=1)]
        cone = _unique_rows(np.round(cone, 12))
        if len(cone) < 3:
            continue
        axis = cone.sum(axis=0)
        axis /= np.linalg.norm(axis)
        e1 = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(e1) < 0.5:
            e1 = np.cross(axis, [0.0, 1.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        cone = cone[np.argsort(np.arctan2(cone @ e2, cone @ e1))]
        cone /= np.linalg.norm(cone, axis=1, keepdims=True)
        weights[vtx] = sum(
            _solid_angle(cone[0], cone[i], cone[i + 1]) for i in range(1, len(cone) - 1)
        )

    weights /= weights.sum()
    return weights @ points


def _steiner_monte_carlo(points: np.ndarray, quad_order: int) -> np.ndarray:
    dim = points.shape[1]
    rng = substream_rng(0, dim, quad_order)
    dirs = rng.standard_normal((2 * MC_STEINER_DIRS, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    support = (dirs @ points.T).max(axis=1)
    halves = [
        dim * np.mean(support[sl, None] * dirs[sl], axis=0)
        for sl in (slice(0, MC_STEINER_DIRS), slice(MC_STEINER_DIRS, None))
    ]
    scale = 1.0 + np.linalg.norm(points, axis=1).max()
    residual = float(np.linalg.norm(halves[0] - halves[1]))
    if residual > MC_STEINER_TOL * scale:
        raise QuadratureError(f"Monte Carlo residual {residual:.3e} (d={dim})")
    return 0.5 * (halves[0] + halves[1])


def _steiner_polytope(vertices: np.ndarray, quad_order: int) -> np.ndarray:
    centroid = vertices.mean(axis=0)
    points = vertices - centroid
    if len(points) == 1:
        return vertices[0].copy()

    _, sing, vt = np.linalg.svd(points, full_matrices=False)
    rank = int(np.sum(sing > _RANK_TOL * max(1.0, sing[0])))

    while rank > 1:
        local = points @ vt[:rank].T  # coordinates within the affine hull
        try:
            if rank == 2:
                result = _steiner_2d(local, quad_order)
            elif rank == 3:
                result = _steiner_3d(local)
            else:
                result = _steiner_monte_carlo(local, quad_order)
                result = Hull(local).nearest_point(result)
        except QhullError:  # flat to within qhull's precision
            rank -= 1
            continue
        return centroid + result @ vt[:rank]

    if rank == 0:
        return centroid
    proj = points @ vt[0]  # a segment: its midpoint
    return centroid + 0.5 * (points[np.argmin(proj)] + points[np.argmax(proj)])


def steiner_point(Y: ConvexSet, quad_order: int = DEFAULT_QUAD_ORDER) -> np.ndarray:
    """Return the Steiner point s(Y) = (1/kappa_d) * integral of h_Y(u) u du.

    Balls give their centre, 1-D sets their midpoint, and a hull-ball the Steiner point
    of its hull (s is Minkowski additive and s(rU) = 0). Polytopes are integrated in
    their own affine hull: 2-D by an arc-wise Gauss-Legendre rule of quad_order nodes
    (checked against 2 * quad_order), 3-D by normal-cone solid angles, and higher
    dimensions by a seeded Monte Carlo estimate.
    """

    if quad_order < MIN_QUAD_ORDER:
        raise ConfigError(f"quad_order must be >= {MIN_QUAD_ORDER}, not {quad_order}")

    vertices = Y.vertices
    if len(vertices) == 1:
        return vertices[0].copy()
    if Y.dim == 1:
        return np.array([0.5 * (vertices.min() + vertices.max())])
    return _steiner_polytope(vertices, quad_order)


# Clipped projection & parametrized selection


def _clipped_supporting_point(
    Y: ConvexSet, x: np.ndarray, radius: float, u: np.ndarray
) -> np.ndarray:
    """Return the maximiser of <y, u> over Y n B(x, radius).

    It is P_Y(x + t u) for the t at which |P_Y(x + t u) - x| = radius (the distance is
    nondecreasing in t), found by bisection on t.
    """

    candidate = Y.supporting_point(u)
    if np.linalg.norm(candidate - x) <= radius:
        return candidate

    h_max = float(candidate @ u)
    on_face = 1e-12 * (1.0 + abs(h_max))

    def project(t: float) -> tuple:
        y = Y.nearest_point(x + t * u)
        return y, float(np.linalg.norm(y - x))

    t_lo, (y_lo, _) = 0.0, project(0.0)
    t_hi, (y_hi, r_hi) = radius, project(radius)
    for _ in range(MAX_DOUBLINGS):
        if r_hi > radius:
            break
        if y_hi @ u >= h_max - on_face:  # a maximiser over Y that lies in the ball
            return y_hi
        t_lo, y_lo = t_hi, y_hi
        t_hi *= 2
        y_hi, r_hi = project(t_hi)
    else:
        return y_lo

    for _ in range(PI_BISECT_ITERS):
        t_mid = 0.5 * (t_lo + t_hi)
        y_mid, r_mid = project(t_mid)
        if r_mid <= radius:
            t_lo, y_lo = t_mid, y_mid
        else:
            t_hi = t_mid
        if t_hi - t_lo <= 1e-13 * t_hi:
            break
    return y_lo


def project_pi(Y: ConvexSet, x, n_dirs: int = DEFAULT_N_DIRS) -> Hull:
    """Return a Hull approximating Pi(Y, x) = Y n (x + 2 d(x, Y) U).

    The hull is spanned by the nearest point of x and the supporting points of the
    clipped set in n_dirs grid directions, so it is an inner approximation.
    """

    x = as_point(x)
    dim = _check_dims(Y, x)
    if Y.is_singleton:
        return Hull(Y.vertices)

    near = Y.nearest_point(x)
    delta = float(np.linalg.norm(x - near))
    if delta <= SNAP_TOL * (1.0 + np.linalg.norm(x)):
        return Hull([near])

    radius = 2 * delta
    if dim == 1:
        lo, hi = Y.extent()
        return Hull([[max(lo, x[0] - radius)], [min(hi, x[0] + radius)]])

    points = [near]
    points += [
        _clipped_supporting_point(Y, x, radius, u) for u in direction_grid(dim, n_dirs)
    ]
    return Hull(np.array(points))


@dataclass(frozen=True)
class SetValuedMapSpec:
    """A set-valued drift map F with its declared linear growth constant K."""

    evaluate: Callable[[np.ndarray], ConvexSet]
    growth_K: float
    dimension: int
    name: str = ""
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.growth_K > 0:
            raise ConfigError(f"growth_K must be > 0, not {self.growth_K}")
        if self.dimension < 1:
            raise ConfigError(f"dimension must be >= 1, not {self.dimension}")

    def __call__(self, x) -> ConvexSet:
        value = self.evaluate(as_point(x, self.dimension))
        if value.dim != self.dimension:
            raise DimensionMismatchError(f"{self.name}: F(x) has d={value.dim}")
        return value


def check_parameter(u, dim: int) -> np.ndarray:
    u = as_point(u, dim)
    if np.linalg.norm(u) > 1.0 + PARAMETER_TOL:
        raise SelectionError(f"|u| = {np.linalg.norm(u)} > 1")
    return u


def parametrized_selection(
    F: SetValuedMapSpec,
    x,
    u,
    n_dirs: int = DEFAULT_N_DIRS,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> np.ndarray:
    """Return f(x, u) = s(Pi(F(x), K(1 + |x|) u))."""

    x = as_point(x, F.dimension)
    u = check_parameter(u, F.dimension)
    target = F.growth_K * (1.0 + np.linalg.norm(x)) * u
    return steiner_point(project_pi(F(x), target, n_dirs), quad_order)


def recover_parameter(F: SetValuedMapSpec, x, v) -> np.ndarray:
    """Return u = v / (K(1 + |x|)), the parameter that selects v in F(x)."""

    x = as_point(x, F.dimension)
    v = as_point(v, F.dimension)
    value = F(x)
    dist = point_set_distance(v, value)
    if dist > MEMBERSHIP_TOL * (1.0 + value.max_norm()):
        raise SelectionError(f"d(v, F(x)) = {dist:.3e} at x={x.tolist()}")

    u = v / (F.growth_K * (1.0 + np.linalg.norm(x)))
    norm = np.linalg.norm(u)
    if norm > 1.0 + PARAMETER_TOL:
        if norm > 1.0 + MEMBERSHIP_TOL:
            raise SelectionError(f"|u| = {norm} > 1: growth bound of {F.name} violated")
        u = u / norm
    return u


def select_velocity(
    Y: ConvexSet,
    strategy: SelectionStrategy,
    rng: Optional[np.random.Generator] = None,
    direction: Optional[np.ndarray] = None,
    quad_order: int = DEFAULT_QUAD_ORDER,
) -> np.ndarray:
    """Pick an element of Y according to the selection strategy."""

    strategy = SelectionStrategy(strategy)
    if strategy == SelectionStrategy.STEINER:
        return steiner_point(Y, quad_order)

    if strategy == SelectionStrategy.RANDOM:
        u = rng.standard_normal(Y.dim)
        while not np.any(u):
            u = rng.standard_normal(Y.dim)
        return Y.supporting_point(u)

    if direction is None:
        direction = np.eye(Y.dim)[0]
    return Y.supporting_point(direction)


# Dilation


def dilation_radius(level: int) -> float:
    """Return 2 eps_l = 2 * 3^-l."""
    return 2.0 * 3.0 ** (-level)


def dilation_growth_constant(growth_K: float, level: int) -> float:
    """Return K^(l) = K (1 + 2 eps_l): |y| <= K(1 + |x| + 2 eps_l) for y in F^(l)(x)."""
    return growth_K * (1.0 + dilation_radius(level))


def _union_hull(sets: Sequence[ConvexSet], n_dirs: int) -> ConvexSet:
    """Return co(union of sets) as a Hull or HullBall.

    Balls (and hull-balls) keep the common radius exactly; any excess radius is
    discretized along n_dirs support directions.
    """

    r_min = min(y.radius for y in sets)
    chunks = []
    for value in sets:
        if value.radius > r_min:
            dirs = direction_grid(value.dim, n_dirs)
            extra = value.radius - r_min
            shifted = value.vertices[:, None, :] + extra * dirs[None, :, :]
            chunks.append(shifted.reshape(-1, value.dim))
        else:
            chunks.append(value.vertices)
    points = np.vstack(chunks)
    return HullBall(points, r_min) if r_min > 0 else Hull(points)


def dilate_map(
    F: SetValuedMapSpec,
    level: int,
    n_samples: int = DEFAULT_DILATION_SAMPLES,
    n_dirs: int = DEFAULT_N_DIRS,
) -> SetValuedMapSpec:
    """Return F^(l)(x) = co(union of F(x_j)) over a grid {x_j} of x + 2 * 3^-l * U."""

    if level < 1:
        raise ConfigError(f"dilation level must be >= 1, not {level}")
    if n_samples < 2 * F.dimension:
        raise ConfigError(f"n_samples must be >= 2d = {2 * F.dimension}")

    radius = dilation_radius(level)

    def evaluate(x: np.ndarray) -> ConvexSet:
        return _union_hull([F(x_j) for x_j in ball_grid(x, radius, n_samples)], n_dirs)

    return SetValuedMapSpec(
        evaluate=evaluate,
        growth_K=dilation_growth_constant(F.growth_K, level),
        dimension=F.dimension,
        name=f"{F.name}^({level})",
        notes={"base": F.name, "level": level, "n_samples": n_samples},
    )


# Growth & Lipschitz constants


@dataclass
class GrowthReport:
    map_name: str
    growth_K: float
    checked: int
    violations: List[dict]

    @property
    def ok(self) -> bool:
        return not self.violations


def growth_check(F: SetValuedMapSpec, sample_points) -> GrowthReport:
    """Compare sup |y| over F(x) with K(1 + |x|) at each sample point."""

    samples = [as_point(x, F.dimension) for x in sample_points]
    if not samples:
        raise ConfigError("growth_check needs at least one sample point")

    violations = []
    for x in samples:
        sup_norm = F(x).max_norm()
        bound = F.growth_K * (1.0 + np.linalg.norm(x))
        if sup_norm > bound * (1.0 + 1e-9):
            violations.append({"x": x.tolist(), "sup_norm": sup_norm, "bound": bound})

    if violations:
        _LOGGER.warning(
            "growth_check(%s): %s of %s samples violate K=%s",
            F.name,
            len(violations),
            len(samples),
            F.growth_K,
        )
    return GrowthReport(F.name, F.growth_K, len(samples), violations)


def map_lipschitz_estimate(
    F: SetValuedMapSpec, center, radius: float, n_pairs: int = 200, seed: int = 0
) -> float:
    """Return max H(F(x), F(y)) / |x - y| over seeded random pairs in the ball."""

    center = as_point(center, F.dimension)
    rng = substream_rng(seed, F.dimension, n_pairs)
    dim = F.dimension

    def sample() -> np.ndarray:
        dirs = rng.standard_normal((2, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return center + radius * rng.random((2, 1)) ** (1 / dim) * dirs

    best = 0.0
    for _ in range(n_pairs):
        x, y = sample()
        gap = np.linalg.norm(x - y)
        if gap > 0:
            best = max(best, hausdorff(F(x), F(y)) / gap)

    _LOGGER.info(
        "Lipschitz estimate of %s on B(%s, %.4g): %.6g (%s sampled pairs)",
        F.name,
        center.tolist(),
        radius,
        best,
        n_pairs,
    )
    return best


def selection_lipschitz_constant(
    lipschitz_F: float, growth_K: float, dim: int
) -> float:
    """Return 5 d (L_F + K), the Lipschitz constant of f(., u)."""
    return 5.0 * dim * (lipschitz_F + growth_K)

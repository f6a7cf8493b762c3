"""Domains, collocation grids, and Gauss-Legendre quadrature.

Interior points live on a tensor grid pulled in from the boundary by a
margin ``epsilon_c``; boundary points are sampled per segment with a
right-open grid so that walking the perimeter visits each corner once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidConfigError

DEFAULT_EPSILON_C = 1e-10


@dataclass(frozen=True)
class Hypercube:
    """Axis-aligned box [p_1,q_1] x ... x [p_d,q_d]."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidConfigError("hypercube bounds must be 1-d and of equal length")
        if not np.all(lo < hi):
            raise InvalidConfigError("hypercube requires lower < upper in every dimension")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)


@dataclass(frozen=True)
class Domain:
    """A solution domain: bounding box plus a membership predicate.

    ``shape`` is a label ("box", "circle", "lshape", "spacetime"); the
    optional ``membership`` predicate restricts the box for non-box shapes.
    For space-time domains the first coordinate is time.
    """

    bounding_box: Hypercube
    shape: str = "box"
    membership: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def dim(self) -> int:
        return self.bounding_box.dim

    def contains(self, points: np.ndarray) -> np.ndarray:
        inside = self.bounding_box.contains(points)
        if self.membership is not None:
            inside = inside & np.asarray(self.membership(np.atleast_2d(points)), dtype=bool)
        return inside


def box_domain(lower, upper) -> Domain:
    return Domain(Hypercube(np.asarray(lower, float), np.asarray(upper, float)), "box")


def circle_domain(center, radius: float) -> Domain:
    center = np.asarray(center, dtype=float)
    box = Hypercube(center - radius, center + radius)

    def member(pts):
        return np.sum((pts - center) ** 2, axis=1) <= radius**2

    return Domain(box, "circle", member)


def lshape_domain(box_lower, box_upper, cut_lower, cut_upper) -> Domain:
    """Box minus an open quadrant box (the cut must sit inside the box)."""
    box = Hypercube(np.asarray(box_lower, float), np.asarray(box_upper, float))
    cut_lo = np.asarray(cut_lower, dtype=float)
    cut_hi = np.asarray(cut_upper, dtype=float)

    def member(pts):
        in_cut = np.all((pts > cut_lo) & (pts < cut_hi), axis=1)
        return ~in_cut

    return Domain(box, "lshape", member)


def spacetime_domain(t_final: float, spatial: Hypercube) -> Domain:
    """Space-time box (0, T) x spatial with time as the first coordinate."""
    lower = np.concatenate(([0.0], spatial.lower))
    upper = np.concatenate(([float(t_final)], spatial.upper))
    return Domain(Hypercube(lower, upper), "spacetime")


@dataclass(frozen=True)
class BoundarySegment:
    """One face of the bounding box with a point budget.

    ``axis`` is the frozen coordinate, ``value`` its face value. ``kind`` is
    "dirichlet" or "initial" (the t=0 face of a space-time box). For faces
    with several free coordinates ``point_count`` is per free dimension.
    ``reverse`` flips the sampling direction so a perimeter walk stays
    right-open at corners.
    """

    id: str
    axis: int
    value: float
    point_count: int | tuple[int, ...]
    kind: str = "dirichlet"
    reverse: bool = False


@dataclass(frozen=True)
class CollocationSet:
    """Interior and per-segment boundary collocation points."""

    interior: np.ndarray
    boundary: tuple[tuple[str, np.ndarray], ...] = ()
    epsilon_c: float = DEFAULT_EPSILON_C

    @property
    def n_interior(self) -> int:
        return self.interior.shape[0]

    @property
    def n_boundary(self) -> int:
        return sum(pts.shape[0] for _, pts in self.boundary)

    def boundary_points(self) -> np.ndarray:
        if not self.boundary:
            return np.zeros((0, self.interior.shape[1]))
        return np.vstack([pts for _, pts in self.boundary])

    def with_interior(self, interior: np.ndarray) -> "CollocationSet":
        return CollocationSet(interior, self.boundary, self.epsilon_c)


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor Gauss-Legendre rule on a box."""

    nodes: np.ndarray
    weights: np.ndarray
    box: Hypercube

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def sample_interior(domain: Domain, counts: Sequence[int], epsilon_c: float = DEFAULT_EPSILON_C) -> CollocationSet:
    """Uniform tensor grid offset from the box faces by ``epsilon_c``.

    Per dimension the grid is x_k = p + eps_c + (k-1) (q - p - 2 eps_c)/(N-1)
    for k = 1..N. For non-box shapes, grid points outside the domain are
    discarded. Ordering is first-dimension slowest (C order).
    """
    box = domain.bounding_box
    counts = [int(c) for c in counts]
    if len(counts) != box.dim:
        raise InvalidConfigError(f"expected {box.dim} interior counts, got {len(counts)}")
    if any(c < 2 for c in counts):
        raise InvalidConfigError("interior counts must be >= 2 per dimension (grid step undefined for 1)")
    if epsilon_c < 0 or np.any(epsilon_c >= 0.5 * box.sides):
        raise InvalidConfigError("epsilon_c must be nonnegative and smaller than half of every side")
    axes = [
        box.lower[t] + epsilon_c + np.arange(counts[t]) * (box.sides[t] - 2.0 * epsilon_c) / (counts[t] - 1)
        for t in range(box.dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    if domain.membership is not None:
        pts = pts[domain.contains(pts)]
    return CollocationSet(pts, (), epsilon_c)


def _segment_axis_grid(lo: float, hi: float, n: int, reverse: bool) -> np.ndarray:
    start, end = (hi, lo) if reverse else (lo, hi)
    return start + np.arange(n) * (end - start) / n


def sample_boundary(domain: Domain, segments: Sequence[BoundarySegment]) -> tuple[tuple[str, np.ndarray], ...]:
    """Right-open grids on box faces, one block of points per segment."""
    box = domain.bounding_box
    out = []
    for seg in segments:
        if seg.axis < 0 or seg.axis >= box.dim:
            raise InvalidConfigError(f"segment {seg.id!r}: axis {seg.axis} out of range")
        if seg.value not in (box.lower[seg.axis], box.upper[seg.axis]):
            raise InvalidConfigError(f"segment {seg.id!r}: face value {seg.value} is not on the boundary")
        free = [t for t in range(box.dim) if t != seg.axis]
        counts = seg.point_count if isinstance(seg.point_count, tuple) else (seg.point_count,) * max(len(free), 1)
        if len(free) == 0:
            if counts[0] != 1:
                raise InvalidConfigError(f"segment {seg.id!r}: a vertex face holds exactly one point")
            pts = np.array([[seg.value]])
        else:
            if len(counts) != len(free) or any(c < 1 for c in counts):
                raise InvalidConfigError(f"segment {seg.id!r}: needs one positive count per free dimension")
            axes = [
                _segment_axis_grid(box.lower[t], box.upper[t], n, seg.reverse)
                for t, n in zip(free, counts)
            ]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.empty((mesh[0].size, box.dim))
            pts[:, seg.axis] = seg.value
            for t, m in zip(free, mesh):
                pts[:, t] = m.reshape(-1)
        out.append((seg.id, pts))
    return tuple(out)


def box_perimeter_segments(box: Hypercube, counts: int | Sequence[int]) -> list[BoundarySegment]:
    """Four edges of a 2-d box walked (bottom, right, top, left).

    The top and left edges are sampled in reverse so that the right-open
    grids cover each corner exactly once.
    """
    if box.dim != 2:
        raise InvalidConfigError("perimeter segments are defined for 2-d boxes")
    if isinstance(counts, int):
        counts = [counts] * 4
    if len(counts) != 4:
        raise InvalidConfigError("perimeter needs 4 edge counts")
    return [
        BoundarySegment("bottom", axis=1, value=box.lower[1], point_count=counts[0], reverse=False),
        BoundarySegment("right", axis=0, value=box.upper[0], point_count=counts[1], reverse=False),
        BoundarySegment("top", axis=1, value=box.upper[1], point_count=counts[2], reverse=True),
        BoundarySegment("left", axis=0, value=box.lower[0], point_count=counts[3], reverse=True),
    ]


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1].

    Roots of the degree-n Legendre polynomial by Newton iteration on the
    three-term recurrence (tolerance 1e-15, at most 100 sweeps), then
    symmetrized so nodes come out strictly increasing and weights sum to 2.
    """
    n = int(n)
    if n < 1:
        raise InvalidConfigError("gauss_legendre requires n >= 1")
    if n == 1:
        return np.array([0.0]), np.array([2.0])
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        pm1 = np.ones_like(x)
        p = x.copy()
        for j in range(2, n + 1):
            pm1, p = p, ((2 * j - 1) * x * p - (j - 1) * pm1) / j
        dp = n * (x * p - pm1) / (x**2 - 1.0)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    pm1 = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        pm1, p = p, ((2 * j - 1) * x * p - (j - 1) * pm1) / j
    dp = n * (x * p - pm1) / (x**2 - 1.0)
    w = 2.0 / ((1.0 - x**2) * dp**2)
    x = x[::-1]
    w = w[::-1]
    x = 0.5 * (x - x[::-1])  # enforce symmetry about 0
    w = 0.5 * (w + w[::-1])
    return x, w


def tensor_quadrature(box: Hypercube, n_per_dim: int) -> QuadratureRule:
    """Tensor product of the 1-d rule, affinely mapped onto ``box``."""
    nodes1, weights1 = gauss_legendre(n_per_dim)
    axes = []
    waxes = []
    for t in range(box.dim):
        half = 0.5 * box.sides[t]
        mid = 0.5 * (box.lower[t] + box.upper[t])
        axes.append(mid + half * nodes1)
        waxes.append(half * weights1)
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
    wmesh = np.meshgrid(*waxes, indexing="ij")
    weights = np.ones(nodes.shape[0])
    for wm in wmesh:
        weights = weights * wm.reshape(-1)
    return QuadratureRule(nodes, weights, box)

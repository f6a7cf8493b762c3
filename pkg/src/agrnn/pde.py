"""Problem definitions: operators, boundary data, and exact solutions.

Three operator families are supported: Poisson (-lap u = f), linear
advection-reaction (div(beta u) + gamma u = f), and viscous Burgers
(u_t + (u^2/2)_x - eps u_xx = 0 on a space-time box with coordinates
(t, x)). Burgers is nonlinear and enters assembly only through its Picard
or Newton linearization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry
from .basis import Solution
from .errors import InvalidConfigError
from .geometry import BoundarySegment, Domain, Hypercube

Array = np.ndarray


@dataclass(frozen=True)
class LinearizedOperator:
    """Per-point coefficients of a (linearized) differential operator.

    A row acts on a basis function as
    c_val * phi + c_grad . grad(phi) + sum_t c_lap_diag[t] * d_tt(phi);
    ``rhs_correction`` is added to the right-hand side (nonzero only for
    Newton steps of nonlinear operators).
    """

    c_val: Array  # (n,)
    c_grad: Array | None  # (n, d) or None
    c_lap_diag: Array | None  # (n, d) or None
    rhs_correction: Array  # (n,)

    @property
    def order(self) -> int:
        if self.c_lap_diag is not None and np.any(self.c_lap_diag != 0):
            return 2
        if self.c_grad is not None and np.any(self.c_grad != 0):
            return 1
        return 0


@dataclass(frozen=True)
class Poisson:
    """G u = -lap u."""

    dim: int
    linear: bool = True

    def linearize(self, points: Array, state: Solution | None = None) -> LinearizedOperator:
        n = np.atleast_2d(points).shape[0]
        return LinearizedOperator(
            c_val=np.zeros(n),
            c_grad=None,
            c_lap_diag=np.full((n, self.dim), -1.0),
            rhs_correction=np.zeros(n),
        )

    def apply(self, solution: Solution, points: Array) -> Array:
        _, _, sec = solution.jet_values(points, order=2)
        return -np.sum(sec, axis=1)


@dataclass(frozen=True)
class AdvectionReaction:
    """G u = div(beta u) + gamma u = beta . grad u + (div beta + gamma) u.

    ``beta`` maps (n, d) points to (n, d) field values; ``beta_div`` maps
    points to the divergence (defaults to zero, i.e. a solenoidal field).
    """

    beta: Callable[[Array], Array]
    gamma: float = 0.0
    beta_div: Callable[[Array], Array] | None = None
    linear: bool = True

    def linearize(self, points: Array, state: Solution | None = None) -> LinearizedOperator:
        pts = np.atleast_2d(points)
        div = self.beta_div(pts) if self.beta_div is not None else np.zeros(pts.shape[0])
        return LinearizedOperator(
            c_val=div + self.gamma,
            c_grad=np.asarray(self.beta(pts), dtype=float),
            c_lap_diag=None,
            rhs_correction=np.zeros(pts.shape[0]),
        )

    def apply(self, solution: Solution, points: Array) -> Array:
        pts = np.atleast_2d(points)
        val, grad, _ = solution.jet_values(pts, order=1)
        lin = self.linearize(pts)
        return lin.c_val * val + np.sum(lin.c_grad * grad, axis=1)


@dataclass(frozen=True)
class BurgersViscous:
    """G u = u_t + (u^2/2)_x - eps u_xx on space-time coordinates (t, x)."""

    epsilon: float
    linear: bool = False

    def _lap(self, n: int) -> Array | None:
        if self.epsilon == 0.0:
            return None
        lap = np.zeros((n, 2))
        lap[:, 1] = -self.epsilon
        return lap

    def linearize(self, points: Array, state: Solution | None = None, scheme: str = "picard") -> LinearizedOperator:
        pts = np.atleast_2d(points)
        n = pts.shape[0]
        if state is None:
            u = np.zeros(n)
            ux = np.zeros(n)
        else:
            val, grad, _ = state.jet_values(pts, order=1)
            u, ux = val, grad[:, 1]
        c_grad = np.column_stack([np.ones(n), u])
        if scheme == "picard":
            return LinearizedOperator(np.zeros(n), c_grad, self._lap(n), np.zeros(n))
        if scheme == "newton":
            return LinearizedOperator(ux.copy(), c_grad, self._lap(n), u * ux)
        raise InvalidConfigError(f"unknown linearization scheme {scheme!r}")

    def apply(self, solution: Solution, points: Array) -> Array:
        pts = np.atleast_2d(points)
        order = 2 if self.epsilon != 0.0 else 1
        val, grad, sec = solution.jet_values(pts, order=order)
        out = grad[:, 0] + val * grad[:, 1]
        if self.epsilon != 0.0:
            out = out - self.epsilon * sec[:, 1]
        return out


Operator = Poisson | AdvectionReaction | BurgersViscous


@dataclass(frozen=True)
class PdeProblem:
    """Operator, domain, data, and (optionally) the exact solution."""

    name: str
    operator: Operator
    domain: Domain
    rhs: Callable[[Array], Array]
    segments: tuple[BoundarySegment, ...]
    boundary_data: dict[str, Callable[[Array], Array]]
    eta: float
    exact: Callable[[Array], Array] | None = None

    def segment_data(self, segment_id: str) -> Callable[[Array], Array]:
        try:
            return self.boundary_data[segment_id]
        except KeyError:
            raise InvalidConfigError(f"no boundary data for segment {segment_id!r}") from None

    def with_counts(self, counts: dict[str, int | tuple[int, ...]]) -> "PdeProblem":
        segs = []
        for seg in self.segments:
            if seg.id in counts:
                c = counts[seg.id]
                segs.append(
                    BoundarySegment(seg.id, seg.axis, seg.value, tuple(c) if isinstance(c, (list, tuple)) else int(c), seg.kind, seg.reverse)
                )
            else:
                segs.append(seg)
        return PdeProblem(self.name, self.operator, self.domain, self.rhs, tuple(segs), self.boundary_data, self.eta, self.exact)

    def with_eta(self, eta: float) -> "PdeProblem":
        return PdeProblem(self.name, self.operator, self.domain, self.rhs, self.segments, self.boundary_data, float(eta), self.exact)

    def residual(self, solution, points: Array) -> Array:
        """Interior residual G u - f; ``solution`` needs jet_values()."""
        return self.operator.apply(solution, points) - self.rhs(np.atleast_2d(points))


# ----------------------------------------------------------------------
# Oscillatory 1-d Poisson problem
# ----------------------------------------------------------------------

def oscillatory_exact(points: Array) -> Array:
    x = np.atleast_2d(points)[:, 0]
    return sum(np.sin(2.0**s * np.pi * x) for s in range(1, 7)) / 6.0


def oscillatory_rhs(points: Array) -> Array:
    x = np.atleast_2d(points)[:, 0]
    return sum((2.0**s * np.pi) ** 2 * np.sin(2.0**s * np.pi * x) for s in range(1, 7)) / 6.0


# ----------------------------------------------------------------------
# Sharp arctan bump on the unit cube (d = 2 or 3)
# ----------------------------------------------------------------------

_BUMP_STEEPNESS = 120.0


def bump_exact(points: Array) -> Array:
    pts = np.atleast_2d(points)
    d = pts.shape[1]
    c = pts - 0.5
    ring = 1.0 / 16.0 - np.sum(c**2, axis=1)
    t = 0.5 + np.arctan(_BUMP_STEEPNESS * ring) / np.pi
    return 4.0**d * t * np.prod(pts * (1.0 - pts), axis=1)


def bump_rhs(points: Array) -> Array:
    """-lap of ``bump_exact``, derived in closed form.

    With R = 1/16 - sum c_i^2, T = 1/2 + arctan(A R)/pi and
    P = prod (1/4 - c_i^2):
      T_i  = -(2A/pi) c_i / (1 + A^2 R^2)
      T_ii = -(2A/pi) [1 + 4 A^2 R c_i^2 / (1 + A^2 R^2)] / (1 + A^2 R^2)
      P_i  = -2 c_i P/(1/4 - c_i^2),  P_ii = -2 P/(1/4 - c_i^2)
    and -lap u = -4^d sum_i (T_ii P + 2 T_i P_i + T P_ii).
    """
    A = _BUMP_STEEPNESS
    pts = np.atleast_2d(points)
    d = pts.shape[1]
    c = pts - 0.5
    factors = 0.25 - c**2  # (n, d)
    R = 1.0 / 16.0 - np.sum(c**2, axis=1)
    den = 1.0 + A**2 * R**2
    T = 0.5 + np.arctan(A * R) / np.pi
    lap = np.zeros(pts.shape[0])
    for i in range(d):
        # product over k != i, computed directly to stay finite on the boundary
        P_rest = np.prod(np.delete(factors, i, axis=1), axis=1)
        P = factors[:, i] * P_rest
        Ti = -(2.0 * A / np.pi) * c[:, i] / den
        Tii = -(2.0 * A / np.pi) * (1.0 + 4.0 * A**2 * R * c[:, i] ** 2 / den) / den
        Pi = -2.0 * c[:, i] * P_rest
        Pii = -2.0 * P_rest
        lap += Tii * P + 2.0 * Ti * Pi + T * Pii
    return -(4.0**d) * lap


def zero_fn(points: Array) -> Array:
    return np.zeros(np.atleast_2d(points).shape[0])


# ----------------------------------------------------------------------
# Advection-reaction cases
# ----------------------------------------------------------------------

QUARTER_DISK_RADIUS = 43.0 / 64.0


def ar_rotational_exact(points: Array) -> Array:
    pts = np.atleast_2d(points)
    inside = pts[:, 0] ** 2 + pts[:, 1] ** 2 < QUARTER_DISK_RADIUS**2
    return np.where(inside, -1.0, 1.0)


_AR_STRIPS = ((0.0, 0.1), (0.2, 0.3), (0.4, 0.5), (0.6, 0.7), (0.8, 0.9))


def ar_stripes_exact(points: Array) -> Array:
    x = np.atleast_2d(points)[:, 0]
    hit = np.zeros_like(x, dtype=bool)
    for lo, hi in _AR_STRIPS:
        hit |= (x > lo) & (x < hi)
    return np.where(hit, 1.0, 0.0)


# ----------------------------------------------------------------------
# Burgers cases (space-time coordinates (t, x))
# ----------------------------------------------------------------------

def burgers_travelling_front(epsilon: float) -> Callable[[Array], Array]:
    """Viscous front between states 1 and 0.

    The travelling-wave profile of u_t + (u^2/2)_x - eps u_xx = 0 moves at
    the mean of the end states, speed 1/2:
    u(t, x) = 1 / (1 + exp((x - t/2) / (2 eps))).
    """

    def exact(points: Array) -> Array:
        pts = np.atleast_2d(points)
        t, x = pts[:, 0], pts[:, 1]
        return 1.0 / (1.0 + np.exp(np.clip((x - 0.5 * t) / (2.0 * epsilon), -700, 700)))

    return exact


def burgers_rarefaction_exact(points: Array) -> Array:
    pts = np.atleast_2d(points)
    t, x = pts[:, 0], pts[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        fan = np.where(t > 0, x / np.where(t > 0, t, 1.0), 0.0)
    u = np.where(x <= 0, 0.0, np.where(x >= t, 1.0, fan))
    return u


def burgers_shock_exact(points: Array) -> Array:
    pts = np.atleast_2d(points)
    t, x = pts[:, 0], pts[:, 1]
    return np.where(x < 0.5 * t, 1.0, 0.0)


class ColeHopfSolution:
    """Exact viscous Burgers solution for u0(x) = -sin(pi x) on (-1, 1).

    u(t, x) is the quotient of two integrals of exp(-H/(2 eps)) with
    H(x, y) = (cos(pi y) - 1)/pi + (x - y)^2 / (2 t). Both integrals are
    evaluated with composite Gauss-Legendre quadrature on a truncation of
    the real line covering the Gaussian core around x and the window
    [-2, 2] where the initial data varies.
    """

    def __init__(self, epsilon: float, panels: int = 64, nodes_per_panel: int = 8):
        self.epsilon = float(epsilon)
        self.panels = panels
        ref_nodes, ref_weights = geometry.gauss_legendre(nodes_per_panel)
        self._ref = (ref_nodes, ref_weights)

    def _quad_nodes(self, lo: float, hi: float) -> tuple[Array, Array]:
        edges = np.linspace(lo, hi, self.panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halves = 0.5 * np.diff(edges)
        rn, rw = self._ref
        y = (mids[:, None] + halves[:, None] * rn[None, :]).reshape(-1)
        w = (halves[:, None] * rw[None, :]).reshape(-1)
        return y, w

    def __call__(self, points: Array) -> Array:
        pts = np.atleast_2d(points)
        t, x = pts[:, 0], pts[:, 1]
        out = np.empty(pts.shape[0])
        at0 = t <= 0.0
        out[at0] = -np.sin(np.pi * x[at0])
        idx = np.where(~at0)[0]
        for i in idx:
            out[i] = self._value(t[i], x[i])
        return out

    def _value(self, t: float, x: float) -> float:
        width = 6.0 * math.sqrt(2.0 * self.epsilon * t)
        lo = min(x - width, -2.0)
        hi = max(x + width, 2.0)
        y, w = self._quad_nodes(lo, hi)
        H = (np.cos(np.pi * y) - 1.0) / np.pi + (x - y) ** 2 / (2.0 * t)
        expo = -H / (2.0 * self.epsilon)
        expo -= np.max(expo)
        kern = w * np.exp(expo)
        denom = np.sum(kern)
        numer = np.sum(kern * (x - y) / t)
        return float(numer / denom)


# ----------------------------------------------------------------------
# Problem registry
# ----------------------------------------------------------------------

def _poisson_1d() -> PdeProblem:
    domain = geometry.box_domain([0.0], [1.0])
    segments = (
        BoundarySegment("left", axis=0, value=0.0, point_count=1),
        BoundarySegment("right", axis=0, value=1.0, point_count=1),
    )
    data = {s.id: oscillatory_exact for s in segments}
    return PdeProblem("poisson-1", Poisson(1), domain, oscillatory_rhs, segments, data, eta=1.0, exact=oscillatory_exact)


def _poisson_2d(name: str) -> PdeProblem:
    domain = geometry.box_domain([0.0, 0.0], [1.0, 1.0])
    segments = tuple(geometry.box_perimeter_segments(domain.bounding_box, 3000))
    data = {s.id: bump_exact for s in segments}
    return PdeProblem(name, Poisson(2), domain, bump_rhs, segments, data, eta=3000.0, exact=bump_exact)


def _poisson_3d() -> PdeProblem:
    domain = geometry.box_domain([0.0] * 3, [1.0] * 3)
    segments = []
    for axis in range(3):
        for side, val in (("lo", 0.0), ("hi", 1.0)):
            segments.append(BoundarySegment(f"face{axis}{side}", axis=axis, value=val, point_count=40))
    data = {s.id: bump_exact for s in segments}
    return PdeProblem("poisson-4", Poisson(3), domain, bump_rhs, tuple(segments), data, eta=5000.0, exact=bump_exact)


def _ar_case1() -> PdeProblem:
    domain = geometry.box_domain([0.0, 0.0], [1.0, 1.0])
    beta = lambda pts: np.column_stack([-pts[:, 1], pts[:, 0]])
    op = AdvectionReaction(beta=beta, gamma=0.0)
    segments = (
        BoundarySegment("bottom", axis=1, value=0.0, point_count=200),
        BoundarySegment("right", axis=0, value=1.0, point_count=200),
    )
    data = {s.id: ar_rotational_exact for s in segments}
    return PdeProblem("ar-1", op, domain, zero_fn, segments, data, eta=1.0, exact=ar_rotational_exact)


def _ar_case2() -> PdeProblem:
    domain = geometry.box_domain([0.0, 0.0], [1.0, 1.0])
    beta = lambda pts: np.broadcast_to(np.array([0.0, 1.0]), (pts.shape[0], 2)).copy()
    op = AdvectionReaction(beta=beta, gamma=0.0)
    segments = (BoundarySegment("bottom", axis=1, value=0.0, point_count=200),)
    data = {"bottom": ar_stripes_exact}
    return PdeProblem("ar-2", op, domain, zero_fn, segments, data, eta=1.0, exact=ar_stripes_exact)


def _burgers_problem(name: str, epsilon: float, x_lo: float, x_hi: float, exact, counts=(100, 200)) -> PdeProblem:
    domain = geometry.spacetime_domain(1.0, Hypercube(np.array([x_lo]), np.array([x_hi])))
    t_count, x_count = counts
    segments = (
        BoundarySegment("initial", axis=0, value=0.0, point_count=x_count, kind="initial"),
        BoundarySegment("left", axis=1, value=x_lo, point_count=t_count),
        BoundarySegment("right", axis=1, value=x_hi, point_count=t_count),
    )
    data = {s.id: exact for s in segments}
    return PdeProblem(name, BurgersViscous(epsilon), domain, zero_fn, segments, data, eta=200.0, exact=exact)


def build_problem(problem_id: str) -> PdeProblem:
    """Construct a named problem with its default segment counts and eta."""
    pid = problem_id.lower()
    if pid == "poisson-1":
        return _poisson_1d()
    if pid in ("poisson-2", "poisson-3"):
        return _poisson_2d(pid)
    if pid == "poisson-4":
        return _poisson_3d()
    if pid == "ar-1":
        return _ar_case1()
    if pid == "ar-2":
        return _ar_case2()
    if pid == "burgers-1":
        return _burgers_problem("burgers-1", 0.1 / np.pi, -1.0, 1.0, ColeHopfSolution(0.1 / np.pi), counts=(200, 200))
    if pid == "burgers-2":
        p = _burgers_problem("burgers-2", 0.01, 0.0, 1.0, burgers_travelling_front(0.01), counts=(200, 200))
        return p
    if pid == "burgers-3":
        p = _burgers_problem("burgers-3", 0.0, -1.0, 2.0, burgers_rarefaction_exact, counts=(66, 200))
        return p.with_eta(10.0)
    if pid == "burgers-4":
        p = _burgers_problem("burgers-4", 0.0, -1.0, 2.0, burgers_shock_exact, counts=(66, 200))
        return p.with_eta(20.0)
    raise InvalidConfigError(f"unknown problem id {problem_id!r}")


PROBLEM_IDS = (
    "poisson-1",
    "poisson-2",
    "poisson-3",
    "poisson-4",
    "ar-1",
    "ar-2",
    "burgers-1",
    "burgers-2",
    "burgers-3",
    "burgers-4",
)

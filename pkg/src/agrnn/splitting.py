"""Range-based domain splitting with optional interface continuity.

The domain is partitioned by the value range of a pilot solution (or by a
user indicator function), one network is fitted per segment, and for
continuous targets the segments are coupled by penalty rows enforcing
equality at interface points. Segments may be geometrically disconnected;
assignment is purely by value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import assembly
from .basis import RnnSpace, Solution
from .errors import DegenerateRangeError, EmptySegmentError, InvalidConfigError
from .geometry import CollocationSet
from .pde import PdeProblem

#: Default interface half-width as a fraction of the pilot value range.
EPS_R_FRACTION = 0.05


@dataclass(frozen=True)
class RangePartition:
    """Split of a value range into segments.

    ``thresholds`` holds v_0 < ... < v_R for range modes; values equal to
    an interior threshold route to the lower segment. In indicator mode
    the thresholds are unused and ``indicator`` maps points (n, d) to
    segment indices.
    """

    num_segments: int
    mode: str  # pilot_range | boundary_midpoint | indicator
    thresholds: np.ndarray | None = None
    indicator: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.num_segments < 2:
            raise InvalidConfigError("a partition needs at least 2 segments")
        if self.mode == "indicator":
            if self.indicator is None:
                raise InvalidConfigError("indicator mode needs an indicator function")
        else:
            th = np.asarray(self.thresholds, dtype=float)
            if th.size != self.num_segments + 1 or np.any(np.diff(th) <= 0):
                raise InvalidConfigError("thresholds must be strictly increasing with R+1 entries")
            object.__setattr__(self, "thresholds", th)

    def interior_thresholds(self) -> np.ndarray:
        return self.thresholds[1:-1]


def build_partition(
    pilot: Solution | None,
    problem: PdeProblem,
    num_segments: int,
    mode: str,
    colloc: CollocationSet | None = None,
    indicator: Callable[[np.ndarray], np.ndarray] | None = None,
) -> RangePartition:
    """Choose the segment thresholds.

    pilot_range: equal-width split of the pilot's value range over the
    interior points. boundary_midpoint (R = 2): the midpoint of the
    boundary-data extremes. indicator: thresholds unused.
    """
    if mode == "indicator":
        return RangePartition(num_segments, mode, indicator=indicator)
    if mode == "pilot_range":
        if pilot is None or colloc is None:
            raise InvalidConfigError("pilot_range mode needs a pilot solution and collocation points")
        values = pilot.predict(colloc.interior)
        v_min, v_max = float(values.min()), float(values.max())
        if v_min == v_max:
            raise DegenerateRangeError("pilot solution is constant; its range cannot be split")
        return RangePartition(num_segments, mode, thresholds=np.linspace(v_min, v_max, num_segments + 1))
    if mode == "boundary_midpoint":
        if num_segments != 2:
            raise InvalidConfigError("boundary_midpoint splitting is defined for R = 2")
        if colloc is None or not colloc.boundary:
            raise InvalidConfigError("boundary_midpoint mode needs boundary collocation points")
        g_all = np.concatenate([problem.segment_data(seg_id)(pts) for seg_id, pts in colloc.boundary])
        g_min, g_max = float(g_all.min()), float(g_all.max())
        if g_min == g_max:
            raise DegenerateRangeError("boundary data is constant; midpoint split is undefined")
        v1 = 0.5 * (g_min + g_max)
        return RangePartition(2, mode, thresholds=np.array([g_min, v1, g_max]))
    raise InvalidConfigError(f"unknown partition mode {mode!r}")


def segment_of(partition: RangePartition, pilot: Solution | None, points: np.ndarray) -> np.ndarray:
    """Segment index per point, by indicator or pilot-value interval."""
    pts = np.atleast_2d(points)
    if partition.mode == "indicator":
        idx = np.asarray(partition.indicator(pts), dtype=int)
        if np.any((idx < 0) | (idx >= partition.num_segments)):
            raise InvalidConfigError("indicator returned a segment index out of range")
        return idx
    if pilot is None:
        raise InvalidConfigError("range partitions route by the pilot solution")
    u = pilot.predict(pts)
    # side="left": a value equal to an interior threshold joins the lower segment
    return np.clip(np.searchsorted(partition.interior_thresholds(), u, side="left"), 0, partition.num_segments - 1)


@dataclass(frozen=True)
class SplitAssignment:
    """Collocation points routed to segments, plus interface point sets."""

    partition: RangePartition
    segment_colloc: tuple[CollocationSet, ...]
    theta: tuple[np.ndarray, ...]  # interface sets between segments j and j+1
    eps_r: float


def assign_points(
    partition: RangePartition,
    pilot: Solution | None,
    colloc: CollocationSet,
    eps_r: float | None = None,
    probe: np.ndarray | None = None,
) -> SplitAssignment:
    """Route interior and boundary points to segments and collect interfaces.

    Interface sets Theta_j hold probe points whose pilot value lies within
    eps_r of threshold v_j (empty in indicator mode, where no thresholds
    exist). The probe set defaults to the interior collocation points.
    """
    R = partition.num_segments
    interior_idx = segment_of(partition, pilot, colloc.interior)
    segs = []
    for j in range(R):
        interior_j = colloc.interior[interior_idx == j]
        if interior_j.shape[0] == 0:
            raise EmptySegmentError(f"segment {j} received no interior points; reduce the segment count")
        boundary_j = []
        for seg_id, pts in colloc.boundary:
            sel = segment_of(partition, pilot, pts) == j
            if np.any(sel):
                boundary_j.append((seg_id, pts[sel]))
        segs.append(CollocationSet(interior_j, tuple(boundary_j), colloc.epsilon_c))
    if partition.mode == "indicator":
        theta = tuple(np.zeros((0, colloc.interior.shape[1])) for _ in range(R - 1))
        eps_val = 0.0
    else:
        probe_pts = colloc.interior if probe is None else np.atleast_2d(probe)
        values = pilot.predict(probe_pts)
        v_span = partition.thresholds[-1] - partition.thresholds[0]
        eps_val = EPS_R_FRACTION * v_span if eps_r is None else float(eps_r)
        theta = tuple(
            probe_pts[np.abs(values - vj) <= eps_val] for vj in partition.interior_thresholds()
        )
    return SplitAssignment(partition, tuple(segs), theta, eps_val)


@dataclass(frozen=True)
class SplitModel:
    """Pilot, partition, and one trained network per segment."""

    pilot: Solution | None
    assignment: SplitAssignment
    segments: tuple[Solution, ...]
    continuous: bool

    @property
    def partition(self) -> RangePartition:
        return self.assignment.partition

    def route(self, points: np.ndarray) -> np.ndarray:
        return segment_of(self.partition, self.pilot, points)

    def predict(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        idx = self.route(pts)
        out = np.empty(pts.shape[0])
        for j, sol in enumerate(self.segments):
            sel = idx == j
            if np.any(sel):
                out[sel] = sol.predict(pts[sel])
        return out

    def jet_values(self, points: np.ndarray, order: int = 2):
        pts = np.atleast_2d(points)
        idx = self.route(pts)
        n, d = pts.shape
        val = np.empty(n)
        grad = np.empty((n, d)) if order >= 1 else None
        sec = np.empty((n, d)) if order >= 2 else None
        for j, sol in enumerate(self.segments):
            sel = idx == j
            if not np.any(sel):
                continue
            v, g, s = sol.jet_values(pts[sel], order=order)
            val[sel] = v
            if order >= 1:
                grad[sel] = g
            if order >= 2:
                sec[sel] = s
        return val, grad, sec


def predict_split(model: SplitModel, points: np.ndarray) -> np.ndarray:
    """Evaluate the split model, routing each point by the assignment rule."""
    return model.predict(points)


def joint_system(
    problem: PdeProblem,
    assignment: SplitAssignment,
    spaces: Sequence[RnnSpace],
    states: Sequence[Solution | None],
    scheme: str = "picard",
    couple: bool = True,
) -> assembly.LsqSystem:
    """Block-diagonal system over all segments, optionally with interface rows.

    Interface rows enforce u_j(x) = u_{j+1}(x) at each point of Theta_j,
    scaled by the same penalty eta as the boundary rows.
    """
    R = len(spaces)
    col_offsets = np.cumsum([0] + [sp.dim for sp in spaces])
    M = int(col_offsets[-1])
    blocks = []
    for j in range(R):
        sys_j = assembly.assemble(problem, spaces[j], assignment.segment_colloc[j], states[j], scheme=scheme)
        blocks.append(sys_j)
    n_rows = sum(s.matrix.shape[0] for s in blocks)
    if couple:
        n_rows += sum(th.shape[0] for th in assignment.theta)
    A = np.zeros((n_rows, M))
    b = np.zeros(n_rows)
    tags = []
    row = 0
    for j, sys_j in enumerate(blocks):
        nj = sys_j.matrix.shape[0]
        A[row : row + nj, col_offsets[j] : col_offsets[j + 1]] = sys_j.matrix
        b[row : row + nj] = sys_j.rhs
        for tag in sys_j.tags:
            tags.append(assembly.RowTag(tag.kind, (j, tag.label), slice(row + tag.rows.start, row + tag.rows.stop)))
        row += nj
    if couple:
        eta = problem.eta
        for j, th in enumerate(assignment.theta):
            if th.shape[0] == 0:
                continue
            nj = th.shape[0]
            A[row : row + nj, col_offsets[j] : col_offsets[j + 1]] = eta * spaces[j].features(th)
            A[row : row + nj, col_offsets[j + 1] : col_offsets[j + 2]] = -eta * spaces[j + 1].features(th)
            tags.append(assembly.RowTag("interface", j, slice(row, row + nj)))
            row += nj
    col_slices = tuple(slice(int(col_offsets[j]), int(col_offsets[j + 1])) for j in range(R))
    return assembly.LsqSystem(A, b, tuple(tags), problem.eta, col_slices)


def solve_split(
    problem: PdeProblem,
    assignment: SplitAssignment,
    spaces: Sequence[RnnSpace],
    pilot: Solution | None = None,
    continuous: bool = False,
    it_picard: int = 1,
    it_newton: int = 0,
) -> SplitModel:
    """Fit one network per segment.

    Discontinuous targets: fully independent least-squares solves (the
    interface sets are computed but unused). Continuous targets: a joint
    solve with coupling rows; nonlinear operators are re-linearized per
    segment around the current iterate for it_picard + it_newton rounds.
    """
    from .nonlinear import picard_newton_solve  # local import to avoid a cycle

    R = len(spaces)
    if R != assignment.partition.num_segments:
        raise InvalidConfigError("one space per segment is required")
    if not continuous:
        sols = []
        for j in range(R):
            cj = assignment.segment_colloc[j]
            if problem.operator.linear:
                rep = assembly.solve_qr(assembly.assemble(problem, spaces[j], cj))
                sols.append(Solution(spaces[j], rep.coeffs))
            else:
                sol, _ = picard_newton_solve(problem, spaces[j], cj, it_picard, it_newton)
                sols.append(sol)
        return SplitModel(pilot, assignment, tuple(sols), continuous=False)

    states: list[Solution | None] = [None] * R
    iterations = [("picard", it_picard), ("newton", it_newton)] if not problem.operator.linear else [("picard", 1)]
    sols = list(states)
    for scheme, count in iterations:
        for _ in range(count):
            system = joint_system(problem, assignment, spaces, states, scheme=scheme, couple=True)
            rep = assembly.solve_qr(system)
            sols = [Solution(spaces[j], rep.coeffs[system.col_slices[j]]) for j in range(R)]
            states = list(sols)
    return SplitModel(pilot, assignment, tuple(sols), continuous=True)

"""Penalized least-squares collocation: assembly, QR solve, and norms.

Interior rows apply the (linearized) operator to the basis jets; boundary
and interface rows are basis values scaled by the penalty eta. Systems are
solved by column-pivoted QR with a relative rank tolerance, returning a
basic solution (dropped columns get coefficient zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .basis import RnnSpace, Solution
from .errors import InvalidConfigError, SingularSystemError
from .geometry import CollocationSet, QuadratureRule
from .pde import LinearizedOperator, PdeProblem

#: Relative threshold on the R diagonal below which columns are dropped.
RANK_RTOL = 1e-12

_CHUNK = 4096


@dataclass(frozen=True)
class RowTag:
    """Provenance of a contiguous row block: interior / boundary / interface."""

    kind: str  # "interior" | "boundary" | "interface"
    label: str | int | None
    rows: slice


@dataclass(frozen=True)
class LsqSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    tags: tuple[RowTag, ...]
    eta: float
    col_slices: tuple[slice, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class SolveReport:
    coeffs: np.ndarray
    residual_norm: float
    effective_rank: int
    dropped_columns: int


def operator_rows(space: RnnSpace, points: np.ndarray, lin: LinearizedOperator, out: np.ndarray | None = None) -> np.ndarray:
    """Rows of the collocation matrix for the operator at ``points``.

    Uses each block's fused path, chunked over points so temporaries stay
    bounded.
    """
    pts = np.atleast_2d(points)
    n = pts.shape[0]
    if out is None:
        out = np.empty((n, space.dim))
    slices = space.block_slices()
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        c_val = lin.c_val[lo:hi]
        c_grad = lin.c_grad[lo:hi] if lin.c_grad is not None else None
        c_lap = lin.c_lap_diag[lo:hi] if lin.c_lap_diag is not None else None
        for block, sl in zip(space.blocks, slices):
            out[lo:hi, sl] = block.operator_rows(pts[lo:hi], c_val, c_grad, c_lap)
    return out


def operator_rows_reference(space: RnnSpace, points: np.ndarray, lin: LinearizedOperator) -> np.ndarray:
    """Same rows via the jets tensors; the slow reference for testing."""
    pts = np.atleast_2d(points)
    jets = space.eval_jets(pts, order=lin.order)
    rows = jets.value * lin.c_val[:, None]
    if lin.c_grad is not None and jets.grad is not None:
        rows += np.einsum("nmt,nt->nm", jets.grad, lin.c_grad)
    if lin.c_lap_diag is not None and jets.second is not None:
        rows += np.einsum("nmt,nt->nm", jets.second_diag(), lin.c_lap_diag)
    return rows


def assemble(
    problem: PdeProblem,
    space: RnnSpace,
    colloc: CollocationSet,
    state: Solution | None = None,
    scheme: str = "picard",
) -> LsqSystem:
    """Stack interior operator rows and eta-scaled boundary rows.

    For nonlinear operators the interior block uses the Picard or Newton
    linearization around ``state`` (zero state if None); linear operators
    ignore both arguments.
    """
    interior = colloc.interior
    n_int = interior.shape[0]
    if problem.operator.linear:
        lin = problem.operator.linearize(interior)
    else:
        lin = problem.operator.linearize(interior, state, scheme=scheme)
    n_rows = n_int + colloc.n_boundary
    # Fortran order: LAPACK factorizations can then run in place
    A = np.empty((n_rows, space.dim), order="F")
    b = np.empty(n_rows)
    operator_rows(space, interior, lin, out=A[:n_int])
    b[:n_int] = problem.rhs(interior) + lin.rhs_correction
    tags = [RowTag("interior", None, slice(0, n_int))]
    row = n_int
    eta = problem.eta
    for seg_id, pts in colloc.boundary:
        m = pts.shape[0]
        A[row : row + m] = eta * space.features(pts)
        b[row : row + m] = eta * problem.segment_data(seg_id)(pts)
        tags.append(RowTag("boundary", seg_id, slice(row, row + m)))
        row += m
    return LsqSystem(A, b, tuple(tags), eta, tuple(space.block_slices()))


def solve_qr(system: LsqSystem | tuple[np.ndarray, np.ndarray], rank_rtol: float = RANK_RTOL, overwrite: bool = False) -> SolveReport:
    """Minimize |A c - rhs| by column-pivoted QR, dropping tiny-pivot columns.

    Columns whose R diagonal falls below ``rank_rtol`` times the largest
    diagonal get coefficient zero (basic solution), mirroring rectangular
    least-squares solvers that apply an implicit rank threshold.

    With ``overwrite`` the matrix is destroyed in place (no copy, for
    systems at the memory limit) and the residual comes from the projection
    identity |b|^2 - |Q^T b|_rank^2, which loses accuracy once the residual
    drops below ~1e-8 |b|; callers that need the exact residual afterwards
    should recompute it by streaming.
    """
    if isinstance(system, tuple):
        A, b = system
    else:
        A, b = system.matrix, system.rhs
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidConfigError("least-squares system must have at least one row and one column")
    m_cols = A.shape[1]
    b_norm = float(np.linalg.norm(b))
    # mode="right" with a row vector computes b @ Q = (Q^T b)^T without
    # forming Q; overwrite only avoids the internal copy when A is
    # Fortran-contiguous (assemble allocates it that way)
    qtb, R, perm = scipy.linalg.qr_multiply(
        A,
        b[None, :],
        mode="right",
        pivoting=True,
        overwrite_a=overwrite,
    )
    qtb = qtb[0]
    rdiag = np.abs(np.diag(R))
    tol = rank_rtol * rdiag.max() if rdiag.size else 0.0
    if rdiag.size == 0 or rdiag.max() == 0.0:
        raise SingularSystemError("all columns fell below the rank tolerance")
    # column pivoting keeps the diagonal (essentially) non-increasing
    below = np.nonzero(rdiag < tol)[0]
    rank = int(below[0]) if below.size else int(rdiag.size)
    y = scipy.linalg.solve_triangular(R[:rank, :rank], qtb[:rank])
    coeffs = np.zeros(m_cols)
    coeffs[perm[:rank]] = y
    if overwrite:
        residual = float(np.sqrt(max(b_norm**2 - float(qtb[:rank] @ qtb[:rank]), 0.0)))
    else:
        residual = float(np.linalg.norm(A @ coeffs - b))
    return SolveReport(coeffs, residual, rank, m_cols - rank)


def solve_with_frozen(
    system: LsqSystem,
    frozen: slice | np.ndarray,
    frozen_coeffs: np.ndarray,
    rank_rtol: float = RANK_RTOL,
) -> SolveReport:
    """Solve with some columns pinned to given coefficients.

    Moves the frozen columns' contribution to the right-hand side, solves
    the remaining columns, and reports the residual of the full system.
    """
    m_cols = system.matrix.shape[1]
    mask = np.zeros(m_cols, dtype=bool)
    mask[frozen] = True
    rhs = system.rhs - system.matrix[:, mask] @ np.asarray(frozen_coeffs, dtype=float)
    sub = solve_qr((system.matrix[:, ~mask], rhs), rank_rtol=rank_rtol)
    coeffs = np.empty(m_cols)
    coeffs[mask] = frozen_coeffs
    coeffs[~mask] = sub.coeffs
    return SolveReport(coeffs, sub.residual_norm, sub.effective_rank, sub.dropped_columns)


def loss_from_system(system: LsqSystem, coeffs: np.ndarray) -> tuple[float, float, float]:
    """Loss components recovered from an assembled system's residual vector.

    Valid whenever the system's interior block was linearized at the same
    state the coefficients represent (always true for linear operators and
    for Picard systems assembled at the solution itself).
    """
    res = system.matrix @ coeffs - system.rhs
    int_sq, int_n = 0.0, 0
    bnd_sq, bnd_n = 0.0, 0
    for tag in system.tags:
        r = res[tag.rows]
        if tag.kind == "interior":
            int_sq += float(r @ r)
            int_n += r.size
        elif tag.kind == "boundary":
            bnd_sq += float(r @ r) / system.eta**2
            bnd_n += r.size
    interior_rms = np.sqrt(int_sq / int_n) if int_n else 0.0
    boundary_rms = np.sqrt(bnd_sq / bnd_n) if bnd_n else 0.0
    return interior_rms, boundary_rms, interior_rms + system.eta * boundary_rms


def streaming_residual_loss(
    problem: PdeProblem,
    space: RnnSpace,
    colloc: CollocationSet,
    coeffs: np.ndarray,
    state: Solution | None = None,
    scheme: str = "picard",
) -> tuple[float, tuple[float, float, float]]:
    """Residual norm and loss components without storing the matrix.

    Re-assembles the system in row chunks and accumulates |A c - b| plus the
    per-block RMS values; used after in-place solves that destroyed the
    matrix, and exact where the projection-identity residual is not.
    """
    interior = colloc.interior
    if problem.operator.linear:
        lin = problem.operator.linearize(interior)
    else:
        lin = problem.operator.linearize(interior, state, scheme=scheme)
    f_vals = problem.rhs(interior) + lin.rhs_correction
    slices = space.block_slices()
    int_sq = 0.0
    for lo in range(0, interior.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, interior.shape[0])
        acc = -f_vals[lo:hi]
        c_grad = lin.c_grad[lo:hi] if lin.c_grad is not None else None
        c_lap = lin.c_lap_diag[lo:hi] if lin.c_lap_diag is not None else None
        for block, sl in zip(space.blocks, slices):
            acc = acc + block.operator_rows(interior[lo:hi], lin.c_val[lo:hi], c_grad, c_lap) @ coeffs[sl]
        int_sq += float(acc @ acc)
    bnd_sq = 0.0
    n_bnd = 0
    for seg_id, pts in colloc.boundary:
        r = space.features(pts) @ coeffs - problem.segment_data(seg_id)(pts)
        bnd_sq += float(r @ r)
        n_bnd += r.size
    eta = problem.eta
    residual = float(np.sqrt(int_sq + eta**2 * bnd_sq))
    interior_rms = np.sqrt(int_sq / interior.shape[0]) if interior.shape[0] else 0.0
    boundary_rms = np.sqrt(bnd_sq / n_bnd) if n_bnd else 0.0
    return residual, (interior_rms, boundary_rms, interior_rms + eta * boundary_rms)


def loss_eta(problem: PdeProblem, solution, colloc: CollocationSet) -> tuple[float, float, float]:
    """(interior RMS, boundary RMS, interior + eta * boundary).

    RMS rather than raw sums so the interior/boundary balance does not
    depend on the point counts. The interior residual uses the actual
    (possibly nonlinear) operator.
    """
    r_int = problem.residual(solution, colloc.interior)
    interior_rms = float(np.sqrt(np.mean(r_int**2))) if r_int.size else 0.0
    sq_sum, count = 0.0, 0
    for seg_id, pts in colloc.boundary:
        r = solution.predict(pts) - problem.segment_data(seg_id)(pts)
        sq_sum += float(np.sum(r**2))
        count += r.size
    boundary_rms = float(np.sqrt(sq_sum / count)) if count else 0.0
    return interior_rms, boundary_rms, interior_rms + problem.eta * boundary_rms


def relative_l2_error(predict: Callable[[np.ndarray], np.ndarray], exact: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule) -> float:
    """Quadrature-weighted |u_h - u| / |u|."""
    u = np.asarray(exact(rule.nodes), dtype=float)
    denom = rule.integrate(u**2)
    if denom <= 0.0:
        raise InvalidConfigError("exact solution is identically zero on the quadrature nodes")
    diff = np.asarray(predict(rule.nodes), dtype=float) - u
    return float(np.sqrt(rule.integrate(diff**2) / denom))


def l1_difference(predict_a, predict_b, rule: QuadratureRule) -> float:
    """Quadrature L1 norm of the difference of two trial functions."""
    return rule.integrate(np.abs(predict_a(rule.nodes) - predict_b(rule.nodes)))

"""Growth strategies: frequency-based initialization, neuron growth, layer growth.

All construction is deterministic given an explicit RNG: weights are drawn
from a uniform distribution whose support is tuned so the operator image
of the candidate basis peaks just above the dominant frequency of the data
(or of the current residual), and biases anchor each neuron at a sampled
point so that phi(anchor) = rho(0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import spectral
from .basis import (
    Activation,
    CompositeLayerBlock,
    DenseLayerBlock,
    RnnSpace,
    Solution,
)
from .errors import InvalidConfigError, ZeroSignalError
from .geometry import CollocationSet, Domain, gauss_legendre
from .pde import PdeProblem

#: Residual magnitudes below this (relative to the data scale) are treated
#: as converged: growing against them would fit noise.
RESIDUAL_FLOOR = 1e-13

#: Attempts to re-draw an all-zero random scale row before giving up.
MAX_REDRAWS = 100


@dataclass(frozen=True)
class FreqInitConfig:
    """Frequency-based initialization of a dense layer."""

    m1: int
    r_max: float
    num_magnitudes: int  # number of candidate magnitudes per dimension
    activation: Activation
    anchor_mode: str = "box_uniform"  # box_uniform | domain_uniform | gauss_legendre
    candidate_mode: str = "full"  # full | per_axis (d >= 3 extension)
    fs: float | None = None  # spectral sampling rate; per-dimension default if None

    def sampling_rate(self, dim: int) -> float:
        return self.fs if self.fs is not None else spectral.default_sampling_rate(dim)


@dataclass(frozen=True)
class GrowthSchedule:
    """Neuron-growth plan; the first entry of ``m_add`` is the initial width."""

    m_add: tuple[int, ...]
    eps_stop: float = 1e-4  # L1 stopping tolerance between consecutive stages
    max_stages: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "m_add", tuple(int(m) for m in self.m_add))
        if not self.m_add or any(m < 1 for m in self.m_add):
            raise InvalidConfigError("m_add must be a nonempty list of positive integers")


@dataclass(frozen=True)
class LayerGrowthConfig:
    """Configuration of one grown layer."""

    m2: int
    activation: Activation
    h0_mode: str = "random"  # random | gradient
    r2: tuple[float, ...] | None = None  # support of the random scale rows
    eta1: float = 1.0  # gradient scaling when h0_mode == "gradient"
    eta2: float = 1.0  # envelope scaling
    localize: bool = True
    retrain_first_layer: bool = True
    indicator: str = "residual"  # residual | gradient_norm

    def __post_init__(self):
        if self.m2 < 1:
            raise InvalidConfigError("m2 must be >= 1")
        if self.h0_mode not in ("random", "gradient"):
            raise InvalidConfigError(f"unknown h0_mode {self.h0_mode!r}")
        if self.h0_mode == "random":
            if self.r2 is None or any(r <= 0 for r in self.r2):
                raise InvalidConfigError("random h0_mode requires positive r2 per dimension")


class CandidateCache:
    """Candidate weight grid with lazily computed operator-image peaks.

    The peaks are computed once (at the first stage that needs them, using
    the linearization state current at that moment) and reused by every
    later growth stage, so repeated growth only has to transform the new
    residual.
    """

    def __init__(self, problem: PdeProblem, cfg: FreqInitConfig):
        self.problem = problem
        self.box = problem.domain.bounding_box
        self.fs = cfg.sampling_rate(self.box.dim)
        self.x_c = self.box.center()
        self.activation = cfg.activation
        self.candidates = spectral.candidate_weights(cfg.r_max, cfg.num_magnitudes, self.box.dim, cfg.candidate_mode)
        self._xi: np.ndarray | None = None
        self._grid_pts, self._grid_shape = spectral.grid_points(self.box, self.fs)

    @property
    def grid_points(self) -> np.ndarray:
        return self._grid_pts

    def data_spectrum_peak(self, values_on_grid: np.ndarray) -> spectral.PeakFrequency:
        sample = spectral.SpectrumSample(values_on_grid.reshape(self._grid_shape), self.fs, self.box)
        return spectral.peak_frequency(sample)

    def candidate_peaks(self, state: Solution | None = None) -> np.ndarray:
        if self._xi is None:
            op = self.problem.operator
            if op.linear:
                lin = op.linearize(self._grid_pts)
            else:
                lin = op.linearize(self._grid_pts, state, scheme="picard")
            self._xi = spectral.candidate_spectra(lin, self.activation, self.candidates, self.x_c, self.box, self.fs)
        return self._xi


def draw_anchors(domain: Domain, m: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    """Anchor points B used to build biases b_i = -w_i . B_i."""
    box = domain.bounding_box
    if mode == "box_uniform":
        return rng.uniform(box.lower, box.upper, size=(m, box.dim))
    if mode == "domain_uniform":
        out = np.empty((0, box.dim))
        while out.shape[0] < m:
            draw = rng.uniform(box.lower, box.upper, size=(2 * m, box.dim))
            out = np.vstack([out, draw[domain.contains(draw)]])
        return out[:m]
    if mode == "gauss_legendre":
        n = 1
        while n**box.dim < m:
            n += 1
        nodes, _ = gauss_legendre(n)
        axes = [0.5 * (box.lower[t] + box.upper[t]) + 0.5 * box.sides[t] * nodes for t in range(box.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
        return pts[:m]
    raise InvalidConfigError(f"unknown anchor mode {mode!r}")


def _draw_dense_rows(
    domain: Domain,
    m: int,
    r_opt: np.ndarray,
    anchor_mode: str,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    r_opt = np.atleast_1d(np.asarray(r_opt, dtype=float))
    W = rng.uniform(-r_opt, r_opt, size=(m, r_opt.size))
    B = draw_anchors(domain, m, anchor_mode, rng)
    b = -np.sum(W * B, axis=1)
    return W, b


def freq_init(
    problem: PdeProblem,
    cfg: FreqInitConfig,
    rng: np.random.Generator,
    cache: CandidateCache | None = None,
) -> tuple[DenseLayerBlock, np.ndarray, CandidateCache]:
    """Build the initial dense layer from the spectrum of the right-hand side.

    Returns the block, the selected distribution support r_opt, and the
    candidate cache for reuse by later growth stages.
    """
    cache = cache or CandidateCache(problem, cfg)
    y = problem.rhs(cache.grid_points)
    if not np.any(y):
        raise ZeroSignalError(
            "right-hand side is identically zero, so no frequency information is available; "
            "use a fixed initial distribution instead"
        )
    xi0 = cache.data_spectrum_peak(y)
    j0 = spectral.select_j0(xi0.xi, cache.candidate_peaks())
    r_opt = cache.candidates[j0]
    W, b = _draw_dense_rows(problem.domain, cfg.m1, r_opt, cfg.anchor_mode, rng)
    return DenseLayerBlock(W, b, cfg.activation), r_opt, cache


def fixed_init(
    problem: PdeProblem,
    m1: int,
    r1: Sequence[float],
    activation: Activation,
    rng: np.random.Generator,
    anchor_mode: str = "box_uniform",
) -> DenseLayerBlock:
    """Dense layer with a hand-picked uniform distribution U(-r1, r1)."""
    W, b = _draw_dense_rows(problem.domain, m1, np.asarray(r1, dtype=float), anchor_mode, rng)
    return DenseLayerBlock(W, b, activation)


def neuron_growth(
    problem: PdeProblem,
    solution: Solution,
    m_add: int,
    cfg: FreqInitConfig,
    rng: np.random.Generator,
    cache: CandidateCache,
) -> tuple[DenseLayerBlock, np.ndarray] | None:
    """Extend the dense layer with neurons tuned to the residual spectrum.

    Returns (extended block, r_opt), or None when the residual is
    numerically zero and growth would only fit noise. The candidate peaks
    are reused from the cache; only the residual spectrum is new.
    """
    dense = solution.space.blocks[0]
    if not isinstance(dense, DenseLayerBlock) or len(solution.space.blocks) != 1:
        raise InvalidConfigError("neuron growth extends a space with a single dense block")
    grid = cache.grid_points
    y_star = problem.rhs(grid) - problem.operator.apply(solution, grid)
    scale = max(1.0, float(np.max(np.abs(problem.rhs(grid)))))
    if np.max(np.abs(y_star)) <= RESIDUAL_FLOOR * scale:
        return None
    xi0 = cache.data_spectrum_peak(y_star)
    j0 = spectral.select_j0(xi0.xi, cache.candidate_peaks(state=solution))
    r_opt = cache.candidates[j0]
    W_new, b_new = _draw_dense_rows(problem.domain, m_add, r_opt, cfg.anchor_mode, rng)
    grown = DenseLayerBlock(
        np.vstack([dense.weights, W_new]),
        np.concatenate([dense.biases, b_new]),
        dense.activation,
    )
    return grown, r_opt


def select_error_points(
    problem: PdeProblem,
    colloc: CollocationSet,
    solution: Solution,
    m2: int,
    indicator: str = "residual",
) -> np.ndarray:
    """Interior points with the largest error-indicator values.

    ``residual`` ranks by |G u - f|; ``gradient_norm`` by |grad u|, which
    is the right indicator near discontinuities where the residual is
    uninformative. Ties keep the original point order.
    """
    pts = colloc.interior
    if m2 > pts.shape[0]:
        raise InvalidConfigError(f"m2 = {m2} exceeds the {pts.shape[0]} interior points")
    if indicator == "residual":
        values = np.abs(problem.residual(solution, pts))
    elif indicator == "gradient_norm":
        _, grad, _ = solution.jet_values(pts, order=1)
        values = np.linalg.norm(grad, axis=1)
    else:
        raise InvalidConfigError(f"unknown indicator {indicator!r}")
    order = np.argsort(-values, kind="stable")
    return pts[order[:m2]]


def layer_growth(
    solution: Solution,
    x_err: np.ndarray,
    cfg: LayerGrowthConfig,
    rng: np.random.Generator,
) -> CompositeLayerBlock:
    """Compose a new layer over the current dense-layer solution.

    Scale rows H0 are either random U(-r2, r2) or eta1 * grad u0 at the
    error points; each neuron's scale is the l1 norm of its row, and its
    bias anchors the neuron at the error point. All-zero rows are re-drawn
    (random mode) or dropped (gradient mode, flat regions).
    """
    dense = solution.space.blocks[0]
    if not isinstance(dense, DenseLayerBlock) or len(solution.space.blocks) != 1:
        raise InvalidConfigError("layer growth composes over a space with a single dense block")
    x_err = np.atleast_2d(np.asarray(x_err, dtype=float))
    m2, d = x_err.shape
    if cfg.h0_mode == "random":
        r2 = np.asarray(cfg.r2, dtype=float)
        if r2.size != d:
            raise InvalidConfigError(f"r2 needs {d} components, got {r2.size}")
        h0 = rng.uniform(-r2, r2, size=(m2, d))
        for i in range(m2):
            attempts = 0
            while not np.any(h0[i]):
                if attempts >= MAX_REDRAWS:
                    break
                h0[i] = rng.uniform(-r2, r2, size=d)
                attempts += 1
        keep = np.any(h0 != 0.0, axis=1)
    else:
        _, grad, _ = solution.jet_values(x_err, order=1)
        h0 = cfg.eta1 * grad
        keep = np.any(h0 != 0.0, axis=1)
    if not np.all(keep):
        h0 = h0[keep]
        x_err = x_err[keep]
    if h0.shape[0] == 0:
        raise InvalidConfigError("every scale row vanished; the pilot solution is flat at all error points")
    scales = np.sum(np.abs(h0), axis=1)
    anchor_values = solution.predict(x_err)
    return CompositeLayerBlock(
        parent=dense,
        parent_coeffs=solution.coeffs,
        scales=scales,
        anchor_points=x_err,
        anchor_values=anchor_values,
        loc_rows=h0,
        eta2=cfg.eta2,
        localize=cfg.localize,
        activation=cfg.activation,
    )

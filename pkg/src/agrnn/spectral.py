"""Discrete Fourier analysis of data, residuals, and candidate basis images.

All signals are real, so spectra are reduced to the nonnegative-frequency
quadrant of the DFT magnitude. The DC bin is excluded from peak searches:
a nonzero mean would otherwise always win and carries no scale
information. Frequencies are reported in cycles per unit length per
dimension (bin * fs / N).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import Activation
from .errors import InvalidConfigError, ZeroSignalError
from .geometry import Hypercube
from .pde import LinearizedOperator

#: Default sampling rates (samples per unit length) by dimension, following
#: the usual choice of 1e4 for 1-d signals and 1e2 per axis above that.
DEFAULT_SAMPLING_RATE = {1: 1.0e4, 2: 1.0e2, 3: 1.0e2}


def default_sampling_rate(dim: int) -> float:
    return DEFAULT_SAMPLING_RATE.get(dim, 1.0e2)


def grid_shape(box: Hypercube, fs: float) -> tuple[int, ...]:
    shape = tuple(int(round(fs * s)) for s in box.sides)
    if any(n < 8 for n in shape):
        raise InvalidConfigError(f"sampling rate {fs} gives a grid below 8 points per dimension: {shape}")
    return shape


def grid_points(box: Hypercube, fs: float) -> tuple[np.ndarray, tuple[int, ...]]:
    """Right-open uniform grid x_k = p + (k/N)(q - p), flattened in C order."""
    shape = grid_shape(box, fs)
    axes = [box.lower[t] + np.arange(n) * box.sides[t] / n for t, n in enumerate(shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1), shape


@dataclass(frozen=True)
class SpectrumSample:
    """Samples of a scalar function on the uniform spectral grid."""

    values: np.ndarray  # tensor, one axis per dimension
    fs: float
    box: Hypercube

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape


@dataclass(frozen=True)
class PeakFrequency:
    xi: np.ndarray  # (d,), cycles per unit length
    magnitude: float


def sample_on_grid(fn: Callable[[np.ndarray], np.ndarray], box: Hypercube, fs: float) -> SpectrumSample:
    pts, shape = grid_points(box, fs)
    values = np.asarray(fn(pts), dtype=float).reshape(shape)
    return SpectrumSample(values, fs, box)


def _quadrant_magnitude(values: np.ndarray) -> np.ndarray:
    mag = np.abs(np.fft.fftn(values, axes=tuple(range(values.ndim))))
    sl = tuple(slice(0, n // 2 + 1) for n in values.shape)
    return mag[sl]


def _bin_to_frequency(bins: Sequence[int], shape: Sequence[int], fs: float) -> np.ndarray:
    return np.array([b * fs / n for b, n in zip(bins, shape)])


def peak_frequency(sample: SpectrumSample) -> PeakFrequency:
    """Argmax bin of the one-sided DFT magnitude, DC excluded.

    Ties break toward the lexicographically smallest frequency vector.
    """
    if not np.any(sample.values):
        raise ZeroSignalError("cannot locate a spectral peak of an identically zero signal")
    quad = _quadrant_magnitude(sample.values)
    flat = quad.reshape(-1).copy()
    flat[0] = -1.0  # DC bin
    idx = int(np.argmax(flat))  # first occurrence = lexicographically smallest bins
    bins = np.unravel_index(idx, quad.shape)
    return PeakFrequency(_bin_to_frequency(bins, sample.shape, sample.fs), float(flat[idx]))


def candidate_weights(r_max: float, num_magnitudes: int, dim: int, mode: str = "full") -> np.ndarray:
    """Candidate weight vectors built from magnitudes r_k = (k/L) r_max.

    "full" enumerates the L^d tensor grid (lexicographic in the magnitude
    indices); it is refused for dim >= 3 where the grid explodes. The
    "per_axis" extension sweeps each axis independently, holding the other
    components at the smallest magnitude.
    """
    if r_max <= 0 or num_magnitudes < 2:
        raise InvalidConfigError("candidate grid needs r_max > 0 and at least 2 magnitudes")
    r = r_max * np.arange(1, num_magnitudes + 1) / num_magnitudes
    if mode == "full":
        if dim >= 3:
            raise InvalidConfigError("full candidate grid is quadratic+ in dimension; use mode='per_axis' for d >= 3")
        mesh = np.meshgrid(*([r] * dim), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)
    if mode == "per_axis":
        out = []
        for axis in range(dim):
            w = np.full((num_magnitudes, dim), r[0])
            w[:, axis] = r
            out.append(w)
        return np.vstack(out)
    raise InvalidConfigError(f"unknown candidate mode {mode!r}")


def candidate_spectra(
    lin: LinearizedOperator,
    activation: Activation,
    candidates: np.ndarray,
    x_c: np.ndarray,
    box: Hypercube,
    fs: float,
    batch: int = 256,
) -> np.ndarray:
    """Peak frequency of the operator image of each candidate function.

    Candidate j is phi_j(x) = rho(w_j . (x - x_c)); its image under the
    (linearized) operator is sampled on the spectral grid and the one-sided
    DFT argmax recorded. ``lin`` must be evaluated at the grid points.
    Returns an array (J, d) of frequencies.
    """
    pts, shape = grid_points(box, fs)
    order = lin.order
    if order > activation.smooth_order:
        raise InvalidConfigError(f"operator needs order-{order} derivatives; activation {activation.name!r} cannot provide them")
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    J, d = candidates.shape
    centered = pts - np.asarray(x_c, dtype=float)
    peaks = np.empty((J, d))
    quad_sl = tuple(slice(0, n // 2 + 1) for n in shape)
    for lo in range(0, J, batch):
        W = candidates[lo : lo + batch]  # (B, d)
        S = centered @ W.T  # (G, B)
        img = activation.value(S) * lin.c_val[:, None]
        if order >= 1 and lin.c_grad is not None:
            d1 = activation.deriv(S)
            for t in range(d):
                img += lin.c_grad[:, t : t + 1] * d1 * W[:, t][None, :]
        if order >= 2 and lin.c_lap_diag is not None:
            d2 = activation.second(S)
            for t in range(d):
                img += lin.c_lap_diag[:, t : t + 1] * d2 * (W[:, t] ** 2)[None, :]
        spec = np.abs(np.fft.fftn(img.reshape(*shape, -1), axes=tuple(range(len(shape)))))
        quad = spec[quad_sl].reshape(-1, img.shape[1])
        quad[0] = -1.0  # DC
        arg = np.argmax(quad, axis=0)
        for b, flat_idx in enumerate(arg):
            bins = np.unravel_index(int(flat_idx), tuple(n // 2 + 1 for n in shape))
            peaks[lo + b] = _bin_to_frequency(bins, shape, fs)
    return peaks


def select_j0(xi0: np.ndarray, candidate_xi: np.ndarray) -> int:
    """Index of the candidate peak nearest to ``xi0`` from above.

    Preference order: candidates strictly dominating xi0 in every
    component; failing that, dominating with >=; failing that, all
    candidates. Within the preferred set the Euclidean distance to xi0 is
    minimized, ties broken by smallest index.
    """
    candidate_xi = np.atleast_2d(np.asarray(candidate_xi, dtype=float))
    if candidate_xi.shape[0] == 0:
        raise InvalidConfigError("candidate list is empty")
    xi0 = np.atleast_1d(np.asarray(xi0, dtype=float))
    strict = np.all(candidate_xi > xi0, axis=1)
    weak = np.all(candidate_xi >= xi0, axis=1)
    for mask in (strict, weak, np.ones(candidate_xi.shape[0], dtype=bool)):
        if np.any(mask):
            dist = np.linalg.norm(candidate_xi - xi0, axis=1)
            dist[~mask] = np.inf
            return int(np.argmin(dist))
    raise AssertionError("unreachable")


def spectrum_table(sample: SpectrumSample) -> np.ndarray:
    """All quadrant bins as rows (freq_1, ..., freq_d, magnitude)."""
    quad = _quadrant_magnitude(sample.values)
    rows = []
    for bins in np.ndindex(quad.shape):
        freq = _bin_to_frequency(bins, sample.shape, sample.fs)
        rows.append(np.concatenate([freq, [quad[bins]]]))
    return np.array(rows)

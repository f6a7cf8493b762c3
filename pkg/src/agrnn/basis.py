"""Trial spaces: activations, basis blocks, and derivative evaluation.

A space is an ordered list of blocks whose basis functions all feed the
output directly (shortcut structure), so a trial function is
z(x) = sum_l w^(l) . Phi_l(x) and only the output coefficients are trained.
Two block kinds exist: a dense first layer phi_i(x) = rho(w_i . x + b_i),
and grown composite blocks whose neurons are activations of the scaled,
anchored previous solution, optionally damped by Gaussian envelopes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegenerateSpaceError, InvalidConfigError, UnsupportedDerivativeError


@dataclass(frozen=True)
class Activation:
    """Scalar activation with elementwise value / first / second derivative."""

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    second: Callable[[np.ndarray], np.ndarray]
    smooth_order: int = 2  # highest derivative order eval_jets will serve


def _tanh_d1(s):
    t = np.tanh(s)
    return 1.0 - t * t


def _tanh_d2(s):
    t = np.tanh(s)
    return -2.0 * t * (1.0 - t * t)


def _gauss(s):
    return np.exp(-0.5 * s * s)


def _gauss_d1(s):
    return -s * np.exp(-0.5 * s * s)


def _gauss_d2(s):
    return (s * s - 1.0) * np.exp(-0.5 * s * s)


def _ramp_jump(s):
    return np.where(s > 0.0, s + 1.0, 0.0)


def _ramp_jump_d1(s):
    return np.where(s > 0.0, 1.0, 0.0)


TANH = Activation("tanh", np.tanh, _tanh_d1, _tanh_d2)
GAUSSIAN = Activation("gaussian", _gauss, _gauss_d1, _gauss_d2)
SINE = Activation("sine", np.sin, np.cos, lambda s: -np.sin(s))
# Discontinuous ramp used for grown layers on shock problems; the jump at 0
# takes the left value and the second derivative is 0 away from the kink.
RAMP_JUMP = Activation("ramp_jump", _ramp_jump, _ramp_jump_d1, lambda s: np.zeros_like(s), smooth_order=1)

ACTIVATIONS = {a.name: a for a in (TANH, GAUSSIAN, SINE, RAMP_JUMP)}


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise InvalidConfigError(f"unknown activation {name!r}; known: {sorted(ACTIVATIONS)}") from None


@dataclass(frozen=True)
class Jets:
    """Values and derivatives of every basis function at a batch of points.

    ``value`` has shape (n, M). ``grad`` (n, M, d) is present for order >= 1.
    ``second`` is the diagonal (n, M, d) in "diag" mode or the full Hessian
    (n, M, d, d) in "full" mode; cross derivatives are only available in
    full mode.
    """

    value: np.ndarray
    grad: np.ndarray | None = None
    second: np.ndarray | None = None
    second_mode: str = "diag"

    def second_diag(self) -> np.ndarray:
        if self.second is None:
            raise UnsupportedDerivativeError("second derivatives were not evaluated")
        if self.second_mode == "diag":
            return self.second
        return np.einsum("nmtt->nmt", self.second)

    def hessian(self) -> np.ndarray:
        if self.second is None:
            raise UnsupportedDerivativeError("second derivatives were not evaluated")
        if self.second_mode != "full":
            raise UnsupportedDerivativeError("cross derivatives require full-Hessian mode")
        return self.second


def _check_order(activation: Activation, order: int):
    if order > activation.smooth_order:
        raise UnsupportedDerivativeError(
            f"activation {activation.name!r} supports derivatives up to order {activation.smooth_order}"
        )


@dataclass(frozen=True)
class DenseLayerBlock:
    """First hidden layer: phi_i(x) = rho(w_i . x + b_i)."""

    weights: np.ndarray  # (m, d)
    biases: np.ndarray  # (m,)
    activation: Activation

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=float))
        b = np.atleast_1d(np.asarray(self.biases, dtype=float))
        if w.shape[0] != b.size or w.shape[0] < 1:
            raise InvalidConfigError("weights and biases must agree on the neuron count (>= 1)")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def width(self) -> int:
        return self.weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    def jets(self, points: np.ndarray, order: int = 2, second_mode: str = "diag") -> Jets:
        _check_order(self.activation, order)
        pts = np.atleast_2d(points)
        s = pts @ self.weights.T + self.biases
        value = self.activation.value(s)
        grad = sec = None
        if order >= 1:
            d1 = self.activation.deriv(s)
            grad = d1[:, :, None] * self.weights[None, :, :]
        if order >= 2:
            d2 = self.activation.second(s)
            if second_mode == "diag":
                sec = d2[:, :, None] * (self.weights**2)[None, :, :]
            else:
                sec = d2[:, :, None, None] * (self.weights[:, :, None] * self.weights[:, None, :])[None]
        return Jets(value, grad, sec, second_mode)

    def operator_rows(self, points: np.ndarray, c_val, c_grad, c_lap) -> np.ndarray:
        """Fused c_val*phi + c_grad.grad(phi) + c_lap.diag_second(phi).

        Equivalent to contracting ``jets`` with the coefficients but without
        materializing the (n, m, d) derivative tensors; the coefficient
        arrays may be None when a term is absent.
        """
        order = 2 if c_lap is not None else (1 if c_grad is not None else 0)
        _check_order(self.activation, order)
        pts = np.atleast_2d(points)
        s = pts @ self.weights.T + self.biases
        rows = self.activation.value(s) * c_val[:, None]
        if c_grad is not None:
            rows += self.activation.deriv(s) * (c_grad @ self.weights.T)
        if c_lap is not None:
            rows += self.activation.second(s) * (c_lap @ (self.weights**2).T)
        return rows

    def take(self, idx: np.ndarray) -> "DenseLayerBlock":
        return DenseLayerBlock(self.weights[idx], self.biases[idx], self.activation)


@dataclass(frozen=True)
class CompositeLayerBlock:
    """Grown layer composing over the pilot solution of a dense block.

    With u0(x) = parent_coeffs . phi(x), neuron j is
    psi~_j(x) = rho2( H_j * (u0(x) - u0(x_j)) ), anchored so that
    psi~_j(x_j) = rho2(0). When ``localize`` is set the neuron is damped by
    G_j(x) = exp(-|eta2 * h_j o (x - x_j)|^2), a decaying Gaussian envelope
    centred at the anchor point.
    """

    parent: DenseLayerBlock
    parent_coeffs: np.ndarray  # (m1,)
    scales: np.ndarray  # H, (m2,)
    anchor_points: np.ndarray  # X_err, (m2, d)
    anchor_values: np.ndarray  # u0(X_err), (m2,)
    loc_rows: np.ndarray  # h_j rows of H0, (m2, d)
    eta2: float
    localize: bool
    activation: Activation

    def __post_init__(self):
        for name in ("parent_coeffs", "scales", "anchor_values"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        for name in ("anchor_points", "loc_rows"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        m2 = self.scales.size
        if not (self.anchor_points.shape[0] == self.anchor_values.size == self.loc_rows.shape[0] == m2 and m2 >= 1):
            raise InvalidConfigError("composite block arrays disagree on the neuron count")
        if np.any(self.scales < 0):
            raise InvalidConfigError("composite scales H must be nonnegative")

    @property
    def width(self) -> int:
        return self.scales.size

    @property
    def input_dim(self) -> int:
        return self.parent.input_dim

    def jets(
        self,
        points: np.ndarray,
        order: int = 2,
        second_mode: str = "diag",
        parent_jets: Jets | None = None,
    ) -> Jets:
        _check_order(self.activation, order)
        pts = np.atleast_2d(points)
        n, d = pts.shape
        if parent_jets is None:
            parent_jets = self.parent.jets(pts, order=order, second_mode=second_mode)
        alpha = self.parent_coeffs
        u = parent_jets.value @ alpha  # (n,)
        s = u[:, None] * self.scales[None, :] - (self.scales * self.anchor_values)[None, :]
        value = self.activation.value(s)
        grad = sec = None
        if order >= 1:
            du = np.einsum("nmt,m->nt", parent_jets.grad, alpha)  # (n, d)
            d1 = self.activation.deriv(s)
            grad = d1[:, :, None] * self.scales[None, :, None] * du[:, None, :]
        if order >= 2:
            d2 = self.activation.second(s)
            if second_mode == "diag":
                duu = np.einsum("nmt,m->nt", parent_jets.second_diag(), alpha)
                sec = (
                    d2[:, :, None] * (self.scales**2)[None, :, None] * (du**2)[:, None, :]
                    + d1[:, :, None] * self.scales[None, :, None] * duu[:, None, :]
                )
            else:
                h_u = np.einsum("nmts,m->nts", parent_jets.hessian(), alpha)
                sec = (
                    d2[:, :, None, None] * (self.scales**2)[None, :, None, None] * (du[:, None, :, None] * du[:, None, None, :])
                    + d1[:, :, None, None] * self.scales[None, :, None, None] * h_u[:, None, :, :]
                )
        if not self.localize:
            return Jets(value, grad, sec, second_mode)

        # Gaussian envelope G_j(x) = exp(-sum_t g_jt^2 (x_t - x_jt)^2).
        g2 = (self.eta2 * self.loc_rows) ** 2  # (m2, d)
        diff = pts[:, None, :] - self.anchor_points[None, :, :]  # (n, m2, d)
        env = np.exp(-np.einsum("nmt,mt->nm", diff**2, g2))
        out_val = env * value
        out_grad = out_sec = None
        if order >= 1:
            denv = -2.0 * g2[None, :, :] * diff * env[:, :, None]  # (n, m2, d)
            out_grad = denv * value[:, :, None] + env[:, :, None] * grad
        if order >= 2:
            if second_mode == "diag":
                d2env = (4.0 * g2[None, :, :] ** 2 * diff**2 - 2.0 * g2[None, :, :]) * env[:, :, None]
                out_sec = d2env * value[:, :, None] + 2.0 * denv * grad + env[:, :, None] * sec
            else:
                a = -2.0 * g2[None, :, :] * diff  # per-axis log-derivative of the envelope
                d2env = (a[:, :, :, None] * a[:, :, None, :]) * env[:, :, None, None]
                idx = np.arange(d)
                d2env[:, :, idx, idx] += -2.0 * g2[None, :, :] * env[:, :, None]
                out_sec = (
                    d2env * value[:, :, None, None]
                    + denv[:, :, :, None] * grad[:, :, None, :]
                    + denv[:, :, None, :] * grad[:, :, :, None]
                    + env[:, :, None, None] * sec
                )
        return Jets(out_val, out_grad, out_sec, second_mode)

    def _parent_state(self, pts: np.ndarray, order: int):
        """u0 and its per-dimension derivatives at the points."""
        p = self.parent
        s = pts @ p.weights.T + p.biases
        alpha = self.parent_coeffs
        u = p.activation.value(s) @ alpha
        du = duu = None
        if order >= 1:
            d1 = p.activation.deriv(s)
            du = d1 @ (alpha[:, None] * p.weights)
        if order >= 2:
            d2 = p.activation.second(s)
            duu = d2 @ (alpha[:, None] * p.weights**2)
        return u, du, duu

    def operator_rows(self, points: np.ndarray, c_val, c_grad, c_lap) -> np.ndarray:
        """Fused operator application, mirroring DenseLayerBlock.operator_rows."""
        order = 2 if c_lap is not None else (1 if c_grad is not None else 0)
        _check_order(self.activation, order)
        pts = np.atleast_2d(points)
        n, d = pts.shape
        u, du, duu = self._parent_state(pts, order)
        H = self.scales[None, :]
        arg = u[:, None] * H - (self.scales * self.anchor_values)[None, :]
        psi = self.activation.value(arg)
        d1 = self.activation.deriv(arg) if order >= 1 else None
        d2 = self.activation.second(arg) if order >= 2 else None
        # contractions of the parent derivatives with the row coefficients
        first = np.zeros(n)  # factors multiplying rho2' * H
        if c_grad is not None:
            first += np.einsum("nt,nt->n", du, c_grad)
        if c_lap is not None:
            first += np.einsum("nt,nt->n", duu, c_lap)
            gs = np.einsum("nt,nt->n", du**2, c_lap)
        rows = psi * c_val[:, None]
        if order >= 1:
            rows = rows + d1 * (first[:, None] * H)
        if order >= 2:
            rows = rows + d2 * (gs[:, None] * H**2)
        if not self.localize:
            return rows
        # envelope G and its log-derivatives a_t = -2 g_t^2 (x_t - x_jt)
        g2 = (self.eta2 * self.loc_rows) ** 2  # (m2, d)
        diff = pts[:, None, :] - self.anchor_points[None, :, :]  # (n, m2, d)
        env = np.exp(-np.einsum("nmt,mt->nm", diff**2, g2))
        extra = np.zeros_like(psi)
        if c_grad is not None:
            for t in range(d):
                extra += (c_grad[:, t : t + 1]) * (-2.0 * g2[None, :, t] * diff[:, :, t]) * psi
        if c_lap is not None:
            for t in range(d):
                a_t = -2.0 * g2[None, :, t] * diff[:, :, t]
                extra += c_lap[:, t : t + 1] * ((a_t**2 - 2.0 * g2[None, :, t]) * psi + 2.0 * a_t * d1 * (du[:, t : t + 1] * H))
        return env * (rows + extra)

    def take(self, idx: np.ndarray) -> "CompositeLayerBlock":
        return replace(
            self,
            scales=self.scales[idx],
            anchor_points=self.anchor_points[idx],
            anchor_values=self.anchor_values[idx],
            loc_rows=self.loc_rows[idx],
        )


Block = Union[DenseLayerBlock, CompositeLayerBlock]

#: Points per chunk when evaluating jets over large batches; keeps the
#: (n, M, d) temporaries bounded.
EVAL_CHUNK = 4096


@dataclass(frozen=True)
class RnnSpace:
    """Ordered blocks of basis functions sharing one output layer."""

    blocks: tuple[Block, ...]

    def __post_init__(self):
        if not self.blocks:
            raise DegenerateSpaceError("a space needs at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def dim(self) -> int:
        return sum(b.width for b in self.blocks)

    @property
    def input_dim(self) -> int:
        return self.blocks[0].input_dim

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for b in self.blocks:
            out.append(slice(start, start + b.width))
            start += b.width
        return out

    def column_block(self, col: int) -> tuple[int, int]:
        """Map a global column index to (block index, local index)."""
        for i, sl in enumerate(self.block_slices()):
            if sl.start <= col < sl.stop:
                return i, col - sl.start
        raise IndexError(col)

    def eval_jets(self, points: np.ndarray, order: int = 2, second_mode: str = "diag") -> Jets:
        """Jets of every basis function at every point (single batch).

        Parent jets are shared with composite blocks whose parent is this
        space's dense block, so the first layer is evaluated once.
        """
        pts = np.atleast_2d(points)
        vals, grads, secs = [], [], []
        dense_jets: dict[int, Jets] = {}
        for b in self.blocks:
            if isinstance(b, CompositeLayerBlock):
                pj = dense_jets.get(id(b.parent))
                j = b.jets(pts, order=order, second_mode=second_mode, parent_jets=pj)
            else:
                j = b.jets(pts, order=order, second_mode=second_mode)
                dense_jets[id(b)] = j
            vals.append(j.value)
            grads.append(j.grad)
            secs.append(j.second)
        value = np.concatenate(vals, axis=1)
        grad = np.concatenate(grads, axis=1) if order >= 1 else None
        sec = np.concatenate(secs, axis=1) if order >= 2 else None
        return Jets(value, grad, sec, second_mode)

    def features(self, points: np.ndarray) -> np.ndarray:
        """Basis values (n, M), chunked over points."""
        pts = np.atleast_2d(points)
        out = np.empty((pts.shape[0], self.dim))
        for lo in range(0, pts.shape[0], EVAL_CHUNK):
            out[lo : lo + EVAL_CHUNK] = self.eval_jets(pts[lo : lo + EVAL_CHUNK], order=0).value
        return out


def eval_jets(space: RnnSpace, points: np.ndarray, order: int = 2, second_mode: str = "diag") -> Jets:
    return space.eval_jets(points, order=order, second_mode=second_mode)


@dataclass(frozen=True)
class Solution:
    """A trial function: space plus trained output coefficients."""

    space: RnnSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.size != self.space.dim:
            raise InvalidConfigError(f"coefficient length {c.size} != space dimension {self.space.dim}")
        object.__setattr__(self, "coeffs", c)

    def predict(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        out = np.empty(pts.shape[0])
        for lo in range(0, pts.shape[0], EVAL_CHUNK):
            out[lo : lo + EVAL_CHUNK] = self.space.eval_jets(pts[lo : lo + EVAL_CHUNK], order=0).value @ self.coeffs
        return out

    def jet_values(self, points: np.ndarray, order: int = 2) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
        """(u, grad u, diagonal second derivatives) of the trial function."""
        pts = np.atleast_2d(points)
        n, d = pts.shape
        val = np.empty(n)
        grad = np.empty((n, d)) if order >= 1 else None
        sec = np.empty((n, d)) if order >= 2 else None
        for lo in range(0, n, EVAL_CHUNK):
            j = self.space.eval_jets(pts[lo : lo + EVAL_CHUNK], order=order)
            val[lo : lo + EVAL_CHUNK] = j.value @ self.coeffs
            if order >= 1:
                grad[lo : lo + EVAL_CHUNK] = np.einsum("nmt,m->nt", j.grad, self.coeffs)
            if order >= 2:
                sec[lo : lo + EVAL_CHUNK] = np.einsum("nmt,m->nt", j.second_diag(), self.coeffs)
        return val, grad, sec


def zero_solution(space: RnnSpace) -> Solution:
    return Solution(space, np.zeros(space.dim))


def prune(space: RnnSpace, coeffs: np.ndarray, tol_rel: float = 1e-14) -> tuple[RnnSpace, np.ndarray, int]:
    """Drop basis functions whose output coefficient is numerically zero.

    Removes columns with |c_i| <= tol_rel * max|c| and compacts both the
    space and the coefficient vector; returns the removed count m_p.
    Composite blocks keep their internal parent reference intact, so their
    basis functions are unchanged even if the dense block shrinks.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if coeffs.size != space.dim:
        raise InvalidConfigError("coefficient length does not match the space")
    keep = np.abs(coeffs) > tol_rel * np.max(np.abs(coeffs))
    if not np.any(keep):
        raise DegenerateSpaceError("pruning removed every basis function")
    if np.all(keep):
        return space, coeffs, 0
    new_blocks = []
    new_coeffs = []
    for b, sl in zip(space.blocks, space.block_slices()):
        mask = keep[sl]
        if not np.any(mask):
            continue
        idx = np.where(mask)[0]
        new_blocks.append(b.take(idx) if idx.size < b.width else b)
        new_coeffs.append(coeffs[sl][idx])
    return RnnSpace(tuple(new_blocks)), np.concatenate(new_coeffs), int(np.sum(~keep))


def partition_hyperplane_density(block: DenseLayerBlock, centers: np.ndarray, tau: float) -> np.ndarray:
    """Fraction of neurons whose zero-level hyperplane passes within ``tau``.

    For each center c this is the share of neurons with
    |w_i . c + b_i| / |w_i| <= tau; zero-weight neurons count as
    non-intersecting. A coverage diagnostic for bias anchor choices.
    """
    if tau <= 0:
        raise InvalidConfigError("tau must be positive")
    centers = np.atleast_2d(centers)
    norms = np.linalg.norm(block.weights, axis=1)
    ok = norms > 0
    if not np.any(ok):
        return np.zeros(centers.shape[0])
    dist = np.abs(centers @ block.weights[ok].T + block.biases[ok]) / norms[ok]
    return np.sum(dist <= tau, axis=1) / block.width

"""Configuration-driven experiment pipelines.

A run builds a problem, samples collocation points, then executes an
ordered list of stages: one init stage (frequency-based or fixed
distribution), optional neuron growth, optional layer growth, and an
optional terminal split stage. Each executed stage appends a result
record; the artifacts are written as CSV plus an echo of the fully
resolved configuration.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import adaptivity, assembly, geometry, pde, spectral, splitting
from .basis import (
    CompositeLayerBlock,
    DenseLayerBlock,
    RnnSpace,
    Solution,
    get_activation,
    prune,
)
from .errors import AgrnnError, InvalidConfigError
from .nonlinear import picard_newton_solve

DEFAULT_QUAD_POINTS = {1: 200, 2: 100, 3: 40}

#: Above this many matrix entries the QR factorization runs in place and the
#: residual/loss are recomputed by streaming (the matrix copy would not fit
#: comfortably in memory).
BIG_SYSTEM_ENTRIES = 2.5e8
DEFAULT_PLOT_GRID = {1: (512,), 2: (101, 101), 3: (33, 33, 33)}

#: Named indicator functions for characteristic-line splitting.
INDICATORS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    # quarter disk of radius 43/64 about the origin (rotational transport case)
    "quarter-disk": lambda pts: np.where(
        pts[:, 0] ** 2 + pts[:, 1] ** 2 < pde.QUARTER_DISK_RADIUS**2, 0, 1
    ),
    # shock line x = t/2 of the piecewise-constant Burgers case
    "shock-line": lambda pts: np.where(pts[:, 1] < 0.5 * pts[:, 0], 0, 1),
}

RESULT_COLUMNS = (
    "stage_index",
    "stage_kind",
    "M",
    "m_p",
    "r_opt",
    "residual_norm",
    "loss_interior",
    "loss_boundary",
    "loss_eta",
    "e0",
    "e0_paper",
    "wall_time_s",
)


@dataclass
class ResultRecord:
    stage_index: int
    stage_kind: str
    M: int
    m_p: int | None = None
    r_opt: tuple[float, ...] | None = None
    residual_norm: float | None = None
    loss_interior: float | None = None
    loss_boundary: float | None = None
    loss_eta: float | None = None
    e0: float | None = None
    e0_paper: float | None = None
    wall_time_s: float = 0.0


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ";".join(format(float(v), ".17g") for v in value)
    return str(value)


def records_to_csv(records: Sequence[ResultRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in RESULT_COLUMNS])
    return buf.getvalue()


# ----------------------------------------------------------------------
# Configuration validation
# ----------------------------------------------------------------------

_STAGE_KINDS = ("freq_init", "fixed_init", "neuron_growth", "layer_growth", "split")


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise InvalidConfigError(f"{path}: {message}")


def resolve_config(raw: dict) -> dict:
    """Validate a run configuration and fill in every default.

    The returned dict is fully explicit: feeding it back reproduces the
    run. Errors carry the offending field path.
    """
    if not isinstance(raw, dict):
        raise InvalidConfigError("config: expected a JSON object")
    cfg = dict(raw)
    _require("problem" in cfg, "problem", "missing problem id")
    problem = pde.build_problem(cfg["problem"])
    dim = problem.domain.dim
    _require("interior_counts" in cfg, "interior_counts", "missing per-dimension interior counts")
    counts = cfg["interior_counts"]
    _require(
        isinstance(counts, list) and len(counts) == dim and all(isinstance(c, int) and c >= 2 for c in counts),
        "interior_counts",
        f"expected {dim} integer counts >= 2",
    )
    cfg.setdefault("seed", 0)
    _require(isinstance(cfg["seed"], int), "seed", "seed must be an integer")
    cfg.setdefault("eta", problem.eta)
    _require(cfg["eta"] > 0, "eta", "penalty must be positive")
    cfg.setdefault("epsilon_c", geometry.DEFAULT_EPSILON_C)
    cfg.setdefault("quadrature_points", DEFAULT_QUAD_POINTS.get(dim, 40))
    cfg.setdefault("sampling_rate", None)
    cfg.setdefault("prune_tol", 1e-14)
    cfg.setdefault("plot_grid", list(DEFAULT_PLOT_GRID.get(dim, (33,) * dim)))
    _require(
        isinstance(cfg["plot_grid"], list) and len(cfg["plot_grid"]) == dim,
        "plot_grid",
        f"expected {dim} counts",
    )
    cfg.setdefault("solver", {})
    cfg["solver"] = _resolve_solver(cfg["solver"], "solver", default_picard=1 if not problem.operator.linear else 0)
    bc = cfg.setdefault("boundary_counts", {})
    if isinstance(bc, int):
        cfg["boundary_counts"] = {seg.id: bc for seg in problem.segments}
    else:
        _require(isinstance(bc, dict), "boundary_counts", "expected an integer or a {segment: count} object")
        for key in bc:
            _require(
                key in {s.id for s in problem.segments},
                f"boundary_counts.{key}",
                f"unknown segment; known: {[s.id for s in problem.segments]}",
            )
        cfg["boundary_counts"] = {
            seg.id: bc.get(seg.id, seg.point_count if isinstance(seg.point_count, int) else list(seg.point_count))
            for seg in problem.segments
        }
    pipeline = cfg.get("pipeline")
    _require(isinstance(pipeline, list) and pipeline, "pipeline", "expected a nonempty stage list")
    resolved = []
    for i, stage in enumerate(pipeline):
        resolved.append(_resolve_stage(stage, f"pipeline[{i}]", i, len(pipeline), problem))
    _require(resolved[0]["kind"] in ("freq_init", "fixed_init"), "pipeline[0]", "the first stage must be an init stage")
    for i, st in enumerate(resolved[1:], start=1):
        _require(st["kind"] not in ("freq_init", "fixed_init"), f"pipeline[{i}]", "only one init stage is allowed")
        if st["kind"] == "split":
            _require(i == len(resolved) - 1, f"pipeline[{i}]", "a split stage must be terminal")
    cfg["pipeline"] = resolved
    return cfg


def _resolve_solver(raw, path: str, default_picard: int = 0, default_newton: int = 0) -> dict:
    _require(isinstance(raw, dict), path, "expected an object with picard/newton counts")
    out = {"picard": raw.get("picard", default_picard), "newton": raw.get("newton", default_newton)}
    for key, v in out.items():
        _require(isinstance(v, int) and v >= 0, f"{path}.{key}", "iteration count must be a nonnegative integer")
    return out


def _resolve_stage(stage: dict, path: str, index: int, total: int, problem: pde.PdeProblem) -> dict:
    _require(isinstance(stage, dict), path, "expected a stage object")
    kind = stage.get("kind")
    _require(kind in _STAGE_KINDS, f"{path}.kind", f"expected one of {_STAGE_KINDS}")
    out = dict(stage)
    dim = problem.domain.dim
    if kind == "freq_init":
        for key in ("m1", "r_max", "num_magnitudes"):
            _require(key in out, f"{path}.{key}", "required for freq_init")
        out.setdefault("activation", "gaussian")
        out.setdefault("anchor_mode", "box_uniform")
        out.setdefault("candidate_mode", "full" if dim < 3 else "per_axis")
    elif kind == "fixed_init":
        for key in ("m1", "r1"):
            _require(key in out, f"{path}.{key}", "required for fixed_init")
        _require(
            isinstance(out["r1"], list) and len(out["r1"]) == dim,
            f"{path}.r1",
            f"expected {dim} components",
        )
        out.setdefault("activation", "tanh")
        out.setdefault("anchor_mode", "box_uniform")
    elif kind == "neuron_growth":
        _require("m_add" in out and isinstance(out["m_add"], list) and out["m_add"], f"{path}.m_add", "required stage widths")
        out.setdefault("eps_stop", 1e-4)
        out.setdefault("r_max", None)
        out.setdefault("num_magnitudes", None)
        out.setdefault("activation", None)
        out.setdefault("anchor_mode", None)
        out.setdefault("candidate_mode", None)
    elif kind == "layer_growth":
        _require("m2" in out, f"{path}.m2", "required for layer_growth")
        out.setdefault("activation", "gaussian")
        out.setdefault("h0_mode", "random")
        if out["h0_mode"] == "random":
            _require(
                isinstance(out.get("r2"), list) and len(out["r2"]) == dim,
                f"{path}.r2",
                f"expected {dim} components for random h0_mode",
            )
        out.setdefault("r2", None)
        out.setdefault("eta1", 1.0)
        out.setdefault("eta2", 1.0)
        out.setdefault("localize", True)
        out.setdefault("retrain_first_layer", True)
        out.setdefault("indicator", "residual")
        variants = out.setdefault("variants", None)
        if variants is not None:
            _require(
                isinstance(variants, list) and variants and all(v in ("u1", "u2", "u3", "u4") for v in variants),
                f"{path}.variants",
                "expected a list drawn from u1..u4",
            )
    elif kind == "split":
        _require("segments" in out and isinstance(out["segments"], int) and out["segments"] >= 2, f"{path}.segments", "segment count >= 2 required")
        out.setdefault("mode", "pilot_range")
        _require(out["mode"] in ("pilot_range", "boundary_midpoint", "indicator"), f"{path}.mode", "unknown split mode")
        if out["mode"] == "indicator":
            _require(out.get("indicator") in INDICATORS, f"{path}.indicator", f"expected one of {sorted(INDICATORS)}")
        out.setdefault("indicator", None)
        out.setdefault("eps_r", None)
        out.setdefault("continuous", False)
        _require("m1" in out and "r1" in out, f"{path}.m1/r1", "per-segment network size and distribution required")
        out.setdefault("activation", "tanh")
        out.setdefault("anchor_mode", "box_uniform")
    if "solver" in out and out["solver"] is not None:
        out["solver"] = _resolve_solver(out["solver"], f"{path}.solver")
    else:
        out["solver"] = None
    return out


# ----------------------------------------------------------------------
# Pipeline execution
# ----------------------------------------------------------------------

@dataclass
class RunResult:
    config: dict
    records: list[ResultRecord]
    final_predict: Callable[[np.ndarray], np.ndarray]
    solutions: dict[str, Any] = field(default_factory=dict)


class _Pipeline:
    def __init__(self, cfg: dict, paper_refs: dict[int, float] | None = None):
        self.cfg = cfg
        self.problem = pde.build_problem(cfg["problem"]).with_eta(cfg["eta"]).with_counts(cfg["boundary_counts"])
        self.rng = np.random.default_rng(cfg["seed"])
        interior = geometry.sample_interior(self.problem.domain, cfg["interior_counts"], cfg["epsilon_c"])
        boundary = geometry.sample_boundary(self.problem.domain, self.problem.segments)
        self.colloc = geometry.CollocationSet(interior.interior, boundary, cfg["epsilon_c"])
        self.quad = geometry.tensor_quadrature(self.problem.domain.bounding_box, cfg["quadrature_points"])
        self.records: list[ResultRecord] = []
        self.paper_refs = paper_refs or {}
        self.cache: adaptivity.CandidateCache | None = None
        self.dense_solution: Solution | None = None  # latest single-block solution
        self.current: Any = None  # Solution or SplitModel from the latest stage
        self._init_stage_cfg: dict | None = None

    # -- helpers -------------------------------------------------------

    def _solver_counts(self, stage: dict) -> tuple[int, int]:
        solver = stage.get("solver") or self.cfg["solver"]
        return solver["picard"], solver["newton"]

    def _solve_dense(self, space: RnnSpace, stage: dict, warm: Solution | None):
        """Returns (solution, training residual norm, loss components)."""
        if self.problem.operator.linear:
            system = assembly.assemble(self.problem, space, self.colloc)
            big = system.matrix.size > BIG_SYSTEM_ENTRIES
            report = assembly.solve_qr(system, overwrite=big)
            sol = Solution(space, report.coeffs)
            if big:
                res, loss = assembly.streaming_residual_loss(self.problem, space, self.colloc, sol.coeffs)
            else:
                res = report.residual_norm
                loss = assembly.loss_from_system(system, sol.coeffs)
            return sol, res, loss
        it_p, it_n = self._solver_counts(stage)
        sol, log = picard_newton_solve(self.problem, space, self.colloc, it_p, it_n, initial=warm)
        # a Picard linearization at the solution itself evaluates the true
        # nonlinear residual of that solution
        res, loss = assembly.streaming_residual_loss(self.problem, space, self.colloc, sol.coeffs, sol, "picard")
        return sol, res, loss

    def _prune(self, sol: Solution) -> tuple[Solution, int]:
        tol = self.cfg["prune_tol"]
        if tol is None:
            return sol, 0
        space, coeffs, m_p = prune(sol.space, sol.coeffs, tol)
        return Solution(space, coeffs), m_p

    def _record(self, kind: str, sol, *, m_p=None, r_opt=None, residual=None, started=0.0, loss=None):
        e0 = None
        if self.problem.exact is not None:
            e0 = assembly.relative_l2_error(sol.predict, self.problem.exact, self.quad)
        li, lb, le = loss if loss is not None else assembly.loss_eta(self.problem, sol, self.colloc)
        idx = len(self.records)
        self.records.append(
            ResultRecord(
                stage_index=idx,
                stage_kind=kind,
                M=self._dim_of(sol),
                m_p=m_p,
                r_opt=tuple(np.atleast_1d(r_opt)) if r_opt is not None else None,
                residual_norm=residual,
                loss_interior=li,
                loss_boundary=lb,
                loss_eta=le,
                e0=e0,
                e0_paper=self.paper_refs.get(idx),
                wall_time_s=time.perf_counter() - started,
            )
        )

    @staticmethod
    def _dim_of(sol) -> int:
        if isinstance(sol, Solution):
            return sol.space.dim
        return sum(s.space.dim for s in sol.segments)

    def _freq_cfg(self, stage: dict, fallback: dict | None = None) -> adaptivity.FreqInitConfig:
        src = {**(fallback or {}), **{k: v for k, v in stage.items() if v is not None}}
        for key in ("r_max", "num_magnitudes"):
            if src.get(key) is None:
                raise InvalidConfigError(f"neuron growth needs {key} (set it on the stage or use freq_init)")
        return adaptivity.FreqInitConfig(
            m1=int(src.get("m1", 1)),
            r_max=float(src["r_max"]),
            num_magnitudes=int(src["num_magnitudes"]),
            activation=get_activation(src.get("activation") or "gaussian"),
            anchor_mode=src.get("anchor_mode") or "box_uniform",
            candidate_mode=src.get("candidate_mode") or ("full" if self.problem.domain.dim < 3 else "per_axis"),
            fs=self.cfg["sampling_rate"],
        )

    # -- stages --------------------------------------------------------

    def run(self) -> RunResult:
        for stage in self.cfg["pipeline"]:
            kind = stage["kind"]
            try:
                getattr(self, f"_stage_{kind}")(stage)
            except AgrnnError as err:
                raise type(err)(f"stage {len(self.records)} ({kind}): {err}") from err
        return RunResult(self.cfg, self.records, self.current.predict, {"final": self.current})

    def _stage_freq_init(self, stage: dict):
        started = time.perf_counter()
        fcfg = self._freq_cfg(stage)
        block, r_opt, cache = adaptivity.freq_init(self.problem, fcfg, self.rng)
        self.cache = cache
        self._init_stage_cfg = stage
        sol, res, loss = self._solve_dense(RnnSpace((block,)), stage, warm=None)
        sol, m_p = self._prune(sol)
        self.dense_solution = self.current = sol
        self._record("freq_init", sol, m_p=m_p, r_opt=r_opt, residual=res, started=started, loss=loss)

    def _stage_fixed_init(self, stage: dict):
        started = time.perf_counter()
        activation = get_activation(stage["activation"])
        block = adaptivity.fixed_init(
            self.problem, int(stage["m1"]), stage["r1"], activation, self.rng, anchor_mode=stage["anchor_mode"]
        )
        self._init_stage_cfg = stage
        sol, res, loss = self._solve_dense(RnnSpace((block,)), stage, warm=None)
        sol, m_p = self._prune(sol)
        self.dense_solution = self.current = sol
        self._record("fixed_init", sol, m_p=m_p, r_opt=tuple(stage["r1"]), residual=res, started=started, loss=loss)

    def _stage_neuron_growth(self, stage: dict):
        if self.dense_solution is None:
            raise InvalidConfigError("neuron growth requires a solved init stage")
        fcfg = self._freq_cfg(stage, fallback=self._init_stage_cfg)
        if self.cache is None:
            self.cache = adaptivity.CandidateCache(self.problem, fcfg)
        eps_stop = stage["eps_stop"]
        schedule = adaptivity.GrowthSchedule(
            (int(self._init_stage_cfg["m1"]), *(int(m) for m in stage["m_add"])),
            eps_stop=eps_stop if eps_stop else 1e-4,
        )
        for m_add in schedule.m_add[1:]:
            started = time.perf_counter()
            grown = adaptivity.neuron_growth(self.problem, self.dense_solution, int(m_add), fcfg, self.rng, self.cache)
            if grown is None:
                break
            block, r_opt = grown
            previous = self.dense_solution
            sol, res, loss = self._solve_dense(RnnSpace((block,)), stage, warm=previous)
            sol, m_p = self._prune(sol)
            self.dense_solution = self.current = sol
            self._record("neuron_growth", sol, m_p=m_p, r_opt=r_opt, residual=res, started=started, loss=loss)
            if eps_stop is not None and eps_stop > 0:
                diff = assembly.l1_difference(sol.predict, previous.predict, self.quad)
                if diff < eps_stop:
                    break

    def _layer_variant_cfg(self, stage: dict, variant: str) -> adaptivity.LayerGrowthConfig:
        base = adaptivity.LayerGrowthConfig(
            m2=int(stage["m2"]),
            activation=get_activation(stage["activation"]),
            h0_mode=stage["h0_mode"],
            r2=tuple(stage["r2"]) if stage["r2"] is not None else None,
            eta1=float(stage["eta1"]),
            eta2=float(stage["eta2"]),
            localize=bool(stage["localize"]),
            retrain_first_layer=bool(stage["retrain_first_layer"]),
            indicator=stage["indicator"],
        )
        # ablations relative to the configured base (the "u4" setting):
        # u1 freezes the first layer's output coefficients, u2 drops the
        # localization envelopes, u3 builds the scale rows from the pilot
        # gradient instead of drawing them
        if variant == "u1":
            return replace(base, retrain_first_layer=False)
        if variant == "u2":
            return replace(base, localize=False)
        if variant == "u3":
            return replace(base, h0_mode="gradient", r2=None)
        return base

    def _solve_layer(self, space: RnnSpace, cfg: adaptivity.LayerGrowthConfig, stage: dict, pilot: Solution):
        dense_cols = space.block_slices()[0]
        pilot_padded = Solution(space, np.concatenate([pilot.coeffs, np.zeros(space.dim - pilot.space.dim)]))
        if self.problem.operator.linear:
            schedule = [("picard", 1)]
        else:
            it_p, it_n = self._solver_counts(stage)
            if it_p + it_n < 1:
                raise InvalidConfigError("layer growth on a nonlinear problem needs at least one iteration")
            schedule = [("picard", it_p), ("newton", it_n)]
        state = pilot_padded
        report = None
        system = None
        big = (self.colloc.n_interior + self.colloc.n_boundary) * space.dim > BIG_SYSTEM_ENTRIES
        for scheme, count in schedule:
            for _ in range(count):
                system = assembly.assemble(self.problem, space, self.colloc, state, scheme=scheme)
                if cfg.retrain_first_layer:
                    report = assembly.solve_qr(system, overwrite=big)
                else:
                    report = assembly.solve_with_frozen(system, dense_cols, pilot.coeffs)
                state = Solution(space, report.coeffs)
        if self.problem.operator.linear and not big:
            res = report.residual_norm
            loss = assembly.loss_from_system(system, state.coeffs)
        else:
            final_state = None if self.problem.operator.linear else state
            res, loss = assembly.streaming_residual_loss(self.problem, space, self.colloc, state.coeffs, final_state, "picard")
        return state, res, loss

    def _stage_layer_growth(self, stage: dict):
        if self.dense_solution is None:
            raise InvalidConfigError("layer growth requires a solved init stage")
        pilot = self.dense_solution
        base_cfg = self._layer_variant_cfg(stage, "u4")
        x_err = adaptivity.select_error_points(self.problem, self.colloc, pilot, int(stage["m2"]), base_cfg.indicator)
        # one shared random draw so variants differ only in the studied factor
        shared_rng = self.rng
        random_block_cache: CompositeLayerBlock | None = None
        variants = stage["variants"] or [None]
        for variant in variants:
            started = time.perf_counter()
            cfg = self._layer_variant_cfg(stage, variant or "u4")
            if cfg.h0_mode == "random":
                if random_block_cache is None:
                    random_block_cache = adaptivity.layer_growth(pilot, x_err, self._layer_variant_cfg(stage, "u4"), shared_rng)
                block = CompositeLayerBlock(
                    parent=random_block_cache.parent,
                    parent_coeffs=random_block_cache.parent_coeffs,
                    scales=random_block_cache.scales,
                    anchor_points=random_block_cache.anchor_points,
                    anchor_values=random_block_cache.anchor_values,
                    loc_rows=random_block_cache.loc_rows,
                    eta2=cfg.eta2,
                    localize=cfg.localize,
                    activation=cfg.activation,
                )
            else:
                block = adaptivity.layer_growth(pilot, x_err, cfg, shared_rng)
            space = RnnSpace((pilot.space.blocks[0], block))
            sol, res, loss = self._solve_layer(space, cfg, stage, pilot)
            self.current = sol
            kind = "layer_growth" if variant is None else f"layer_growth:{variant}"
            self._record(kind, sol, residual=res, started=started, loss=loss)

    def _stage_split(self, stage: dict):
        started = time.perf_counter()
        if self.current is None:
            raise InvalidConfigError("splitting requires a pilot stage")
        pilot = self.current
        mode = stage["mode"]
        indicator = INDICATORS[stage["indicator"]] if mode == "indicator" else None
        partition = splitting.build_partition(
            pilot if mode != "indicator" else None,
            self.problem,
            int(stage["segments"]),
            mode,
            colloc=self.colloc,
            indicator=indicator,
        )
        assignment = splitting.assign_points(
            partition, pilot if mode != "indicator" else None, self.colloc, eps_r=stage["eps_r"]
        )
        activation = get_activation(stage["activation"])
        spaces = []
        for _ in range(int(stage["segments"])):
            block = adaptivity.fixed_init(
                self.problem, int(stage["m1"]), stage["r1"], activation, self.rng, anchor_mode=stage["anchor_mode"]
            )
            spaces.append(RnnSpace((block,)))
        it_p, it_n = self._solver_counts(stage)
        model = splitting.solve_split(
            self.problem,
            assignment,
            spaces,
            pilot=pilot if mode != "indicator" else None,
            continuous=bool(stage["continuous"]),
            it_picard=it_p,
            it_newton=it_n,
        )
        self.current = model
        self._record("split", model, started=started)


def execute(cfg: dict, paper_refs: dict[int, float] | None = None) -> RunResult:
    """Validate and run a configuration."""
    resolved = resolve_config(cfg)
    return _Pipeline(resolved, paper_refs).run()


# ----------------------------------------------------------------------
# Artifacts
# ----------------------------------------------------------------------

def solution_grid_csv(result: RunResult) -> str:
    """Final solution on a uniform inclusive grid, for plotting."""
    cfg = result.config
    problem = pde.build_problem(cfg["problem"])
    box = problem.domain.bounding_box
    axes = [np.linspace(box.lower[t], box.upper[t], int(n)) for t, n in enumerate(cfg["plot_grid"])]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    values = result.final_predict(pts)
    exact = problem.exact(pts) if problem.exact is not None else None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"x{t}" for t in range(box.dim)] + ["value"]
    if exact is not None:
        header += ["exact", "abs_error"]
    writer.writerow(header)
    for i in range(pts.shape[0]):
        row = [_fmt(float(v)) for v in pts[i]] + [_fmt(float(values[i]))]
        if exact is not None:
            row += [_fmt(float(exact[i])), _fmt(abs(float(values[i]) - float(exact[i])))]
        writer.writerow(row)
    return buf.getvalue()


def write_artifacts(result: RunResult, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out / "results.csv",
        "solution_grid": out / "solution_grid.csv",
        "config_echo": out / "config_echo.json",
    }
    paths["results"].write_text(records_to_csv(result.records))
    paths["solution_grid"].write_text(solution_grid_csv(result))
    paths["config_echo"].write_text(json.dumps(result.config, indent=2, sort_keys=True) + "\n")
    return paths


def spectrum_csv(cfg: dict) -> str:
    """One-sided DFT magnitude table of the problem's right-hand side."""
    resolved = resolve_config(cfg)
    problem = pde.build_problem(resolved["problem"])
    box = problem.domain.bounding_box
    fs = resolved["sampling_rate"] or spectral.default_sampling_rate(box.dim)
    sample = spectral.sample_on_grid(problem.rhs, box, fs)
    table = spectral.spectrum_table(sample)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"freq{t}" for t in range(box.dim)] + ["magnitude"])
    for row in table:
        writer.writerow([_fmt(float(v)) for v in row])
    return buf.getvalue()

"""Outer Picard/Newton iteration for the nonlinear Burgers operator.

Each iteration assembles the linearized collocation system around the
current iterate and re-solves it by QR; Picard freezes the state inside
the advection coefficient, Newton adds the derivative term and the
matching right-hand-side correction. No damping is applied: divergence
shows up in the log rather than being auto-corrected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assembly
from .basis import RnnSpace, Solution, zero_solution
from .errors import AgrnnError, InvalidConfigError, IterationFailureError
from .geometry import CollocationSet
from .pde import PdeProblem


@dataclass(frozen=True)
class IterationRecord:
    kind: str  # "picard" | "newton"
    loss: float
    coeff_change: float


@dataclass(frozen=True)
class IterationLog:
    records: tuple[IterationRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def counts(self) -> tuple[int, int]:
        kinds = [r.kind for r in self.records]
        return kinds.count("picard"), kinds.count("newton")


def picard_newton_solve(
    problem: PdeProblem,
    space: RnnSpace,
    colloc: CollocationSet,
    it_picard: int,
    it_newton: int,
    initial: Solution | None = None,
) -> tuple[Solution, IterationLog]:
    """Run it_picard Picard steps then it_newton Newton steps.

    The initial linearization state defaults to the zero function. Linear
    operators pass through unchanged: every iteration solves the same
    system, so the first one already reaches the fixed point.
    """
    if it_picard + it_newton < 1:
        raise InvalidConfigError("at least one iteration is required")
    state = initial if initial is not None else zero_solution(space)
    records = []
    current = state
    schedule = [("picard", it_picard), ("newton", it_newton)]
    for scheme, count in schedule:
        for _ in range(count):
            try:
                system = assembly.assemble(problem, space, colloc, current, scheme=scheme)
                report = assembly.solve_qr(system)
            except (AgrnnError, np.linalg.LinAlgError) as err:
                raise IterationFailureError(
                    f"{scheme} iteration {len(records)} failed: {err}", IterationLog(tuple(records))
                ) from err
            new = Solution(space, report.coeffs)
            prev_coeffs = current.coeffs if current.space is space else np.zeros(space.dim)
            change = float(np.linalg.norm(new.coeffs - prev_coeffs))
            _, _, combined = assembly.loss_eta(problem, new, colloc)
            records.append(IterationRecord(scheme, combined, change))
            current = new
    return current, IterationLog(tuple(records))

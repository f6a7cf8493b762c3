"""Built-in experiment configurations with published reference errors.

Each case mirrors one benchmark configuration; ``paper_refs`` maps record
indices (per executed stage/variant) to the reference relative L2 error
reported for that configuration, attached to results for side-by-side
comparison. References come from runs with a different random generator,
so agreement is expected in order of magnitude, not digit-for-digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CaseSpec:
    config: dict
    paper_refs: dict[int, float] = field(default_factory=dict)
    note: str = ""


CASES: dict[str, CaseSpec] = {}


def _case(name: str, config: dict, refs: dict[int, float], note: str = ""):
    CASES[name] = CaseSpec(config, refs, note)


_case(
    "poisson-case1",
    {
        "problem": "poisson-1",
        "seed": 1,
        "interior_counts": [2000],
        "boundary_counts": 1,
        "eta": 1.0,
        "quadrature_points": 200,
        "pipeline": [
            {"kind": "freq_init", "m1": 200, "r_max": 400.0, "num_magnitudes": 50, "activation": "gaussian"},
            {"kind": "neuron_growth", "m_add": [100, 50, 50, 50, 50], "eps_stop": 1e-12},
        ],
    },
    {0: 2.68e-4, 1: 6.41e-8, 2: 2.85e-8, 3: 4.37e-9, 4: 5.89e-9, 5: 3.45e-11},
    note="1-d oscillatory Poisson; frequency init + five growth stages. The L1 stopping "
    "tolerance is lowered so the published schedule always runs to completion.",
)

_case(
    "poisson-case2",
    {
        "problem": "poisson-2",
        "seed": 1,
        "interior_counts": [300, 300],
        "boundary_counts": 3000,
        "eta": 3000.0,
        "quadrature_points": 100,
        "pipeline": [
            {"kind": "fixed_init", "m1": 2000, "r1": [15.0, 15.0], "activation": "tanh"},
            {
                "kind": "layer_growth",
                "m2": 1500,
                "activation": "gaussian",
                "r2": [10.0, 10.0],
                "variants": ["u1", "u2", "u3", "u4"],
            },
        ],
    },
    {0: 5.59e-3, 1: 1.01e-2, 2: 1.10e-5, 3: 1.37e-5, 4: 8.77e-7},
    note="2-d sharp-bump Poisson at full scale; heavy (five dense solves at 102000 rows).",
)

_case(
    "poisson-case2-reduced",
    {
        "problem": "poisson-2",
        "seed": 1,
        "interior_counts": [300, 300],
        "boundary_counts": 3000,
        "eta": 3000.0,
        "quadrature_points": 100,
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [15.0, 15.0], "activation": "tanh"},
            {
                "kind": "layer_growth",
                "m2": 500,
                "activation": "gaussian",
                "r2": [10.0, 10.0],
                "variants": ["u1", "u2", "u3", "u4"],
            },
        ],
    },
    {0: 1.49e-2, 1: 1.05e-2, 2: 1.69e-3, 3: 3.21e-4, 4: 8.03e-5},
    note="Layer-growth factor study at (m1, m2) = (1000, 500).",
)

_case(
    "poisson-case3",
    {
        "problem": "poisson-3",
        "seed": 1,
        "interior_counts": [300, 300],
        "boundary_counts": 3000,
        "eta": 3000.0,
        "quadrature_points": 100,
        "pipeline": [
            {"kind": "freq_init", "m1": 600, "r_max": 100.0, "num_magnitudes": 100, "activation": "tanh"},
            {"kind": "neuron_growth", "m_add": [400, 200, 200, 200, 200, 200], "eps_stop": 1e-12},
            {"kind": "layer_growth", "m2": 1500, "activation": "gaussian", "r2": [10.0, 10.0]},
        ],
    },
    {0: 2.81e-2, 1: 1.65e-2, 2: 1.30e-2, 3: 1.10e-2, 4: 9.42e-3, 5: 7.90e-3, 6: 6.80e-3, 7: 1.92e-6},
    note="All three growth strategies on the 2-d sharp bump.",
)

_case(
    "poisson-case4",
    {
        "problem": "poisson-4",
        "seed": 1,
        "interior_counts": [80, 80, 80],
        "boundary_counts": 40,
        "eta": 5000.0,
        "quadrature_points": 40,
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [5.0, 5.0, 5.0], "activation": "tanh"},
            {"kind": "layer_growth", "m2": 1000, "activation": "gaussian", "r2": [8.0, 8.0, 8.0]},
        ],
    },
    {0: 1.40e-1, 1: 4.10e-3},
    note="3-d sharp bump at full point count (512000 interior rows; slow).",
)

_case(
    "poisson-case4-reduced",
    {
        "problem": "poisson-4",
        "seed": 1,
        "interior_counts": [60, 60, 60],
        "boundary_counts": 40,
        "eta": 5000.0,
        "quadrature_points": 40,
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [5.0, 5.0, 5.0], "activation": "tanh"},
            {"kind": "layer_growth", "m2": 1000, "activation": "gaussian", "r2": [8.0, 8.0, 8.0]},
        ],
    },
    {0: 1.40e-1, 1: 4.10e-3},
    note="3-d case at reduced interior resolution (60^3); still resolves the shell.",
)

_AR1_BASE = {
    "problem": "ar-1",
    "seed": 1,
    "interior_counts": [100, 100],
    "boundary_counts": 200,
    "eta": 1.0,
    "quadrature_points": 100,
}

_case(
    "ar-case1-layer",
    {
        **_AR1_BASE,
        "pipeline": [
            {"kind": "fixed_init", "m1": 500, "r1": [10.0, 10.0], "activation": "tanh"},
            {
                "kind": "layer_growth",
                "m2": 500,
                "activation": "gaussian",
                "r2": [5.0, 5.0],
                "indicator": "gradient_norm",
            },
        ],
    },
    {0: 1.87e-1, 1: 5.55e-2},
    note="Rotational transport of a discontinuity; layer growth with the gradient indicator.",
)

_case(
    "ar-case1-split-pilot",
    {
        **_AR1_BASE,
        "pipeline": [
            {"kind": "fixed_init", "m1": 500, "r1": [10.0, 10.0], "activation": "tanh"},
            {"kind": "split", "segments": 2, "mode": "pilot_range", "m1": 500, "r1": [10.0, 10.0], "activation": "tanh"},
        ],
    },
    {0: 1.87e-1, 1: 9.05e-2},
    note="Range splitting driven by the pilot solution (blind split).",
)

_case(
    "ar-case1-characteristic",
    {
        **_AR1_BASE,
        "pipeline": [
            {"kind": "fixed_init", "m1": 500, "r1": [10.0, 10.0], "activation": "tanh"},
            {"kind": "split", "segments": 2, "mode": "indicator", "indicator": "quarter-disk", "m1": 500, "r1": [10.0, 10.0], "activation": "tanh"},
        ],
    },
    {0: 1.87e-1, 1: 1.42e-9},
    note="Splitting along the known characteristic circle.",
)

_case(
    "ar-case2-split",
    {
        "problem": "ar-2",
        "seed": 1,
        "interior_counts": [100, 100],
        "boundary_counts": 200,
        "eta": 1.0,
        "quadrature_points": 100,
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [20.0, 1.0], "activation": "tanh"},
            {"kind": "split", "segments": 2, "mode": "pilot_range", "m1": 1000, "r1": [20.0, 1.0], "activation": "tanh"},
        ],
    },
    {0: 2.21e-1, 1: 4.94e-2},
    note="Vertical transport of nine stripes; blind range splitting.",
)

_case(
    "burgers-case1",
    {
        "problem": "burgers-1",
        "seed": 1,
        "interior_counts": [100, 200],
        "boundary_counts": 200,
        "eta": 200.0,
        "quadrature_points": 100,
        "solver": {"picard": 10, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 200, "r1": [1.0, 1.0], "activation": "gaussian"},
            {
                "kind": "neuron_growth",
                "m_add": [200, 200, 200, 200],
                "eps_stop": 1e-12,
                "r_max": 100.0,
                "num_magnitudes": 100,
                "solver": {"picard": 5, "newton": 0},
            },
        ],
    },
    {0: 1.64e-1, 1: 1.03e-2, 2: 5.47e-4, 3: 1.52e-4, 4: 2.83e-5},
    note="Viscous Burgers via space-time collocation; growth tuned to the residual spectrum. "
    "The zero right-hand side forces a fixed U(-1,1) initial distribution.",
)

_case(
    "burgers-case1-best",
    {
        "problem": "burgers-1",
        "seed": 1,
        "interior_counts": [100, 200],
        "boundary_counts": 200,
        "eta": 200.0,
        "quadrature_points": 100,
        "solver": {"picard": 20, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [8.0, 25.0], "activation": "gaussian"},
        ],
    },
    {0: 4.84e-6},
    note="Hand-tuned single-layer reference for the viscous Burgers case.",
)

_case(
    "burgers-case2",
    {
        "problem": "burgers-2",
        "seed": 1,
        "interior_counts": [200, 200],
        "boundary_counts": 200,
        "eta": 200.0,
        "quadrature_points": 100,
        "solver": {"picard": 10, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 500, "r1": [20.0, 20.0], "activation": "tanh"},
            {
                "kind": "layer_growth",
                "m2": 500,
                "activation": "gaussian",
                "r2": [7.0, 7.0],
                "variants": ["u3", "u4"],
                "solver": {"picard": 0, "newton": 3},
            },
        ],
    },
    {0: 2.9285e-2, 1: 1.7374e-3, 2: 3.5720e-5},
    note="Travelling viscous front; Picard for the pilot, Newton during layer growth.",
)

_case(
    "burgers-case3",
    {
        "problem": "burgers-3",
        "seed": 1,
        "interior_counts": [66, 200],
        "boundary_counts": {"initial": 200, "left": 66, "right": 66},
        "eta": 10.0,
        "quadrature_points": 100,
        "solver": {"picard": 10, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [3.0, 15.0], "activation": "tanh"},
            {
                "kind": "layer_growth",
                "m2": 1000,
                "activation": "gaussian",
                "r2": [20.0, 20.0],
                "indicator": "gradient_norm",
                "solver": {"picard": 0, "newton": 5},
            },
        ],
    },
    {0: 2.83e-2, 1: 4.31e-3},
    note="Inviscid rarefaction fan; gradient indicator for the error points.",
)

_case(
    "burgers-case4-characteristic",
    {
        "problem": "burgers-4",
        "seed": 1,
        "interior_counts": [66, 200],
        "boundary_counts": {"initial": 200, "left": 66, "right": 66},
        "eta": 20.0,
        "quadrature_points": 100,
        "solver": {"picard": 10, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 1000, "r1": [15.0, 15.0], "activation": "tanh"},
            {
                "kind": "split",
                "segments": 2,
                "mode": "indicator",
                "indicator": "shock-line",
                "m1": 1000,
                "r1": [15.0, 15.0],
                "activation": "tanh",
                "solver": {"picard": 5, "newton": 0},
            },
        ],
    },
    {1: 9.78e-16},
    note="Shock wave split along the known characteristic line x = t/2.",
)

_case(
    "burgers-case4-all",
    {
        "problem": "burgers-4",
        "seed": 1,
        "interior_counts": [100, 300],
        "boundary_counts": {"initial": 300, "left": 183, "right": 183},
        "eta": 20.0,
        "quadrature_points": 100,
        "solver": {"picard": 10, "newton": 0},
        "pipeline": [
            {"kind": "fixed_init", "m1": 100, "r1": [1.0, 1.0], "activation": "gaussian"},
            {
                "kind": "neuron_growth",
                "m_add": [100, 100],
                "eps_stop": 1e-4,
                "r_max": 100.0,
                "num_magnitudes": 100,
                "solver": {"picard": 5, "newton": 0},
            },
            {
                "kind": "layer_growth",
                "m2": 700,
                "activation": "ramp_jump",
                "r2": [10.0, 10.0],
                "indicator": "gradient_norm",
                "solver": {"picard": 0, "newton": 5},
            },
            {
                "kind": "layer_growth",
                "m2": 700,
                "activation": "gaussian",
                "r2": [10.0, 10.0],
                "indicator": "gradient_norm",
                "solver": {"picard": 0, "newton": 5},
            },
            {
                "kind": "split",
                "segments": 2,
                "mode": "pilot_range",
                "m1": 500,
                "r1": [2.0, 2.0],
                "activation": "gaussian",
                "solver": {"picard": 2, "newton": 0},
            },
        ],
    },
    {0: 1.8389e-1, 3: 8.36e-2, 4: 1.24e-1, 5: 3.91e-2},
    note="Every strategy on the shock case: growth with the L1 stopping rule, grown layers "
    "with a discontinuous ramp and with a Gaussian (both branch from the same grown dense "
    "layer), then range splitting piloted by the Gaussian-layer solution.",
)

"""Adaptive growing randomized neural networks for PDE collocation.

Hidden-layer parameters are generated constructively (frequency-tuned
distributions, residual-anchored neurons, value-range domain splitting)
and only the output coefficients are trained, by penalized least squares
at collocation points.
"""

from .adaptivity import (
    CandidateCache,
    FreqInitConfig,
    GrowthSchedule,
    LayerGrowthConfig,
    fixed_init,
    freq_init,
    layer_growth,
    neuron_growth,
    select_error_points,
)
from .assembly import (
    LsqSystem,
    SolveReport,
    assemble,
    l1_difference,
    loss_eta,
    relative_l2_error,
    solve_qr,
    solve_with_frozen,
)
from .basis import (
    ACTIVATIONS,
    Activation,
    CompositeLayerBlock,
    DenseLayerBlock,
    Jets,
    RnnSpace,
    Solution,
    eval_jets,
    get_activation,
    partition_hyperplane_density,
    prune,
    zero_solution,
)
from .errors import (
    AgrnnError,
    DegenerateRangeError,
    DegenerateSpaceError,
    EmptySegmentError,
    InvalidConfigError,
    SingularSystemError,
    UnsupportedDerivativeError,
    ZeroSignalError,
)
from .geometry import (
    BoundarySegment,
    CollocationSet,
    Domain,
    Hypercube,
    QuadratureRule,
    box_domain,
    box_perimeter_segments,
    circle_domain,
    gauss_legendre,
    lshape_domain,
    sample_boundary,
    sample_interior,
    spacetime_domain,
    tensor_quadrature,
)
from .nonlinear import IterationLog, IterationRecord, picard_newton_solve
from .pde import (
    AdvectionReaction,
    BurgersViscous,
    LinearizedOperator,
    PdeProblem,
    Poisson,
    build_problem,
)
from .runner import ResultRecord, RunResult, execute, write_artifacts
from .spectral import (
    PeakFrequency,
    SpectrumSample,
    candidate_spectra,
    candidate_weights,
    peak_frequency,
    sample_on_grid,
    select_j0,
)
from .splitting import (
    RangePartition,
    SplitModel,
    assign_points,
    build_partition,
    predict_split,
    solve_split,
)

__version__ = "0.1.0"

"""Set-wise coordinate descent on the consensus dual.

A library and CLI for simulating asynchronous set-wise coordinate descent
with uniform (SU) and greedy Gauss-Southwell (SGS) in-set selection, plus the
norm machinery that certifies both rates and the synthetic rate-ratio
benchmarks.
"""

from . import errors
from .dual import (
    DualConsensusProblem,
    DualState,
    SeparableQuadraticProblem,
    SeparableState,
    consensus_dual_problem,
    separable_problem,
)
from .engine import BACKEND, RunConfig, Trace, TraceRow, expected_progress_bound, run
from .experiments import (
    ExperimentSummary,
    experiment_decentralized,
    experiment_paramserver,
)
from .graph import (
    Assignment,
    Graph,
    SetSystem,
    build_graph,
    circulant_regular,
    enumerate_assignments,
    incidence_matrix,
    laplacian_extremes,
    neighbor_sets,
    perfect_matching_circulant,
)
from .objective import Quadratic
from .rates import RateEstimate, estimate_rate
from .verify import verify

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BACKEND",
    "DualConsensusProblem",
    "DualState",
    "ExperimentSummary",
    "Graph",
    "Quadratic",
    "RateEstimate",
    "RunConfig",
    "SeparableQuadraticProblem",
    "SeparableState",
    "SetSystem",
    "Trace",
    "TraceRow",
    "build_graph",
    "circulant_regular",
    "consensus_dual_problem",
    "enumerate_assignments",
    "errors",
    "estimate_rate",
    "expected_progress_bound",
    "experiment_decentralized",
    "experiment_paramserver",
    "incidence_matrix",
    "laplacian_extremes",
    "neighbor_sets",
    "perfect_matching_circulant",
    "run",
    "separable_problem",
    "verify",
]

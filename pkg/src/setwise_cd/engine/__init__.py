from .backend import BACKEND, available_backends, get_kernels
from .loop import expected_progress_bound, run, select_gs, select_uniform, step
from .trace import ALGORITHMS, RunConfig, Trace, TraceRow

__all__ = [
    "ALGORITHMS",
    "BACKEND",
    "RunConfig",
    "Trace",
    "TraceRow",
    "available_backends",
    "expected_progress_bound",
    "get_kernels",
    "run",
    "select_gs",
    "select_uniform",
    "step",
]

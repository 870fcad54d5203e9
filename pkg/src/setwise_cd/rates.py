"""Per-iteration contraction estimation from suboptimality traces.

The contraction model is ``s_k ~ s_0 (1-rho)^k``; ``rho`` is recovered from
the least-squares slope of ``log s`` over the trailing window of the curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPoints, NonPositiveSuboptimality

NUMERICAL_FLOOR = 1e-300
MIN_WINDOW_POINTS = 10


@dataclass(frozen=True)
class RateEstimate:
    rho: float
    window: tuple[int, int]
    residual: float
    n_points: int
    log_range: float
    floor_reached: bool = False

    @property
    def residual_fraction(self) -> float:
        """Fit residual relative to the window's dynamic range."""
        if self.log_range <= 0:
            return math.inf
        return self.residual / self.log_range


def _extract(trace) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(trace, "iters"):
        return np.asarray(trace.iters, dtype=float), np.asarray(trace.suboptimality, dtype=float)
    iters, subopt = trace
    return np.asarray(iters, dtype=float), np.asarray(subopt, dtype=float)


def estimate_rate(trace, window_fraction: float = 1 / 3) -> RateEstimate:
    """Fit the contraction factor on the trailing ``window_fraction`` of a trace.

    Curves that hit the numerical floor (``<= 1e-300``, including exact
    zeros) are truncated at the first floored point and flagged; the window
    then covers the trailing fraction of the surviving curve. A fully floored
    curve yields ``rho = nan`` with the flag set instead of an error.
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must be in (0, 1]")
    iters, subopt = _extract(trace)
    if iters.size == 0:
        raise InsufficientPoints("empty trace")
    if np.any(subopt < 0):
        raise NonPositiveSuboptimality("negative suboptimality in trace")

    below = ~(subopt > NUMERICAL_FLOOR)
    floor_reached = bool(below.any())
    cut = int(np.argmax(below)) if floor_reached else len(subopt)
    iters, subopt = iters[:cut], subopt[:cut]
    if iters.size == 0:
        return RateEstimate(
            rho=math.nan, window=(0, 0), residual=math.nan, n_points=0,
            log_range=0.0, floor_reached=True,
        )

    start = iters[-1] * (1.0 - window_fraction)
    in_win = iters >= start
    k = iters[in_win]
    y = np.log(subopt[in_win])
    min_points = 2 if floor_reached else MIN_WINDOW_POINTS
    if k.size < min_points:
        if floor_reached:
            return RateEstimate(
                rho=math.nan, window=(int(k[0]) if k.size else 0,
                                      int(k[-1]) if k.size else 0),
                residual=math.nan, n_points=int(k.size), log_range=0.0,
                floor_reached=True,
            )
        raise InsufficientPoints(
            f"{k.size} points in window, need {MIN_WINDOW_POINTS}"
        )

    kc = k - k.mean()
    denom = float(kc @ kc)
    if denom == 0.0:
        raise InsufficientPoints("window has no iteration spread")
    slope = float(kc @ (y - y.mean())) / denom
    fit = y.mean() + slope * kc
    residual = float(np.sqrt(np.mean((y - fit) ** 2)))
    return RateEstimate(
        rho=1.0 - math.exp(slope),
        window=(int(k[0]), int(k[-1])),
        residual=residual,
        n_points=int(k.size),
        log_range=float(y.max() - y.min()),
        floor_reached=floor_reached,
    )

"""Python-level stepping API and the kernel-backed run loop.

``select_uniform`` / ``select_gs`` / ``step`` operate on problem objects and
are convenient for tests and diagnostics; ``run`` flattens the problem into
arrays and hands the whole loop to the selected kernel backend.
"""

from __future__ import annotations

import math

import numpy as np

from ..dual import (
    AGGREGATE_DRIFT_TOL,
    DualConsensusProblem,
    DualState,
    SeparableQuadraticProblem,
    SeparableState,
)
from ..errors import IsolatedNode, NegativeSuboptimality
from ..rng import SplitMix64
from .backend import get_kernels
from .trace import RunConfig, Trace, TraceRow


def select_uniform(rng: SplitMix64, sets, i: int) -> int:
    """Uniform draw from node ``i``'s accessible coordinate set."""
    s_i = sets.sets[i]
    if not s_i:
        raise IsolatedNode(f"node {i} has no incident edges")
    return s_i[rng.randint(len(s_i))]


def select_gs(p, s, i: int) -> int:
    """Greedy pick: the in-set coordinate with the largest squared block
    gradient, ties broken by the lowest edge index."""
    s_i = p.sets.sets[i]
    if not s_i:
        raise IsolatedNode(f"node {i} has no incident edges")
    best = -1.0
    best_edge = -1
    for ell in s_i:
        g = p.coordinate_gradient(s, ell)
        gsq = float(g @ g)
        if gsq > best:
            best = gsq
            best_edge = ell
    return best_edge


def step(p, s, i: int, rule: str, eta: float, rng: SplitMix64 | None = None,
         iteration: int = 0) -> TraceRow:
    """One activation of node ``i``: select, update, record."""
    if rule == "su":
        if rng is None:
            raise ValueError("uniform selection needs an rng")
        ell = select_uniform(rng, p.sets, i)
    elif rule == "sgs":
        ell = select_gs(p, s, i)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    g = p.coordinate_gradient(s, ell)
    gradsq = float(g @ g)
    p.apply_update(s, ell, eta)
    return TraceRow(iteration, i, ell, gradsq, p.suboptimality(s))


def expected_progress_bound(p, s) -> tuple[float, float]:
    """Exact expected one-step decrease of F under each rule at state ``s``.

    Returns ``(uniform, greedy)``; per-node means use exact summation so the
    greedy value can never come out below the uniform one in floats.
    """
    su_terms = []
    sgs_terms = []
    for i in range(p.sets.n):
        gsq = []
        for ell in p.sets.sets[i]:
            g = p.coordinate_gradient(s, ell)
            gsq.append(float(g @ g))
        if not gsq:
            continue
        su_terms.append(math.fsum(gsq) / len(gsq))
        sgs_terms.append(max(gsq))
    scale = 2.0 * p.L_smooth * p.sets.n
    return math.fsum(su_terms) / scale, math.fsum(sgs_terms) / scale


def _run_consensus(p: DualConsensusProblem, cfg: RunConfig, state: DualState,
                   kernels) -> Trace:
    arrays = p.kernel_arrays()
    lam = np.ascontiguousarray(state.lam, dtype=np.float64).copy()
    z = np.ascontiguousarray(state.z, dtype=np.float64).copy()
    eta = cfg.eta if cfg.eta is not None else 1.0 / p.L_smooth
    out = kernels.run_consensus(
        lam,
        z,
        arrays["qinv"],
        arrays["bvec"],
        arrays["c0"],
        arrays["f_star"],
        arrays["edge_u"],
        arrays["edge_v"],
        arrays["indptr"],
        arrays["indices"],
        cfg.algorithm == "sgs",
        eta,
        cfg.iterations,
        cfg.seed,
        cfg.record_every,
        cfg.drift_check_every,
        AGGREGATE_DRIFT_TOL,
    )
    return _wrap(out, cfg, DualState(lam, z))


def _run_separable(p: SeparableQuadraticProblem, cfg: RunConfig,
                   state: SeparableState, kernels) -> Trace:
    arrays = p.kernel_arrays()
    x = np.ascontiguousarray(state.x, dtype=np.float64).copy()
    eta = cfg.eta if cfg.eta is not None else 1.0 / p.L_smooth
    out = kernels.run_separable(
        x,
        arrays["diag"],
        arrays["indptr"],
        arrays["indices"],
        cfg.algorithm == "sgs",
        eta,
        cfg.iterations,
        cfg.seed,
        cfg.record_every,
    )
    return _wrap(out, cfg, SeparableState(x))


def _wrap(out, cfg: RunConfig, final_state) -> Trace:
    it, node, edge, gradsq, subopt, messages, resyncs = out
    low = float(subopt.min())
    if low < -1e-9:
        raise NegativeSuboptimality(f"recorded suboptimality {low:.3e}")
    return Trace(
        iters=it,
        nodes=node,
        edges=edge,
        grad_sq=gradsq,
        suboptimality=subopt,
        messages=int(messages),
        resyncs=int(resyncs),
        config=cfg,
        final_state=final_state,
    )


def run(p, cfg: RunConfig, initial_state=None, backend: str | None = None) -> Trace:
    """Simulate ``cfg.iterations`` uniform activations of the set-wise CD loop.

    Deterministic in ``(problem, config, initial_state)``; the trace holds
    rows at the record cadence plus the final step, the message count, and
    the final state.
    """
    kernels = get_kernels(backend)
    if isinstance(p, DualConsensusProblem):
        state = initial_state if initial_state is not None else p.initial_state()
        return _run_consensus(p, cfg, state, kernels)
    if isinstance(p, SeparableQuadraticProblem):
        state = initial_state if initial_state is not None else p.initial_state()
        return _run_separable(p, cfg, state, kernels)
    raise TypeError(f"unsupported problem type {type(p).__name__}")

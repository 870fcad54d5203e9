"""Executable verification of the norm/projector analysis on small graphs.

``verify("fast")`` covers the canonical tiny graphs in seconds;
``verify("full")`` adds randomized graphs and the brute-force budgets. Each
check returns a :class:`CheckResult` with its worst observed slack; the CLI
turns a failed report into a nonzero exit status.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .dual import consensus_dual_problem
from .engine import RunConfig, run
from .errors import InequalityViolated
from .graph import Graph, build_graph, circulant_regular, neighbor_sets
from .norms import (
    check_chain_inequality,
    check_projector,
    check_set_max_dual_bound,
    cycle_null_vector,
    gradient_range_residual,
    projector_seminorm,
    range_projector,
    set_max_norm,
)
from .objective import Quadratic

LEVELS = ("fast", "full")


def _plain(value):
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


@dataclass
class VerifyReport:
    level: str
    checks: list[CheckResult]
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "passed": self.passed,
            "elapsed_seconds": self.elapsed,
            "checks": [c.to_dict() for c in self.checks],
        }


def canonical_graphs() -> dict[str, Graph]:
    return {
        "P2": build_graph(2, [(0, 1)]),
        "P3": build_graph(3, [(0, 1), (1, 2)]),
        "K3": build_graph(3, [(0, 1), (0, 2), (1, 2)]),
        "C4": circulant_regular(4, 2),
    }


def random_connected_graph(rng: np.random.Generator, n: int,
                           max_edges: int) -> Graph:
    """Random spanning tree plus random extra edges, capped at ``max_edges``."""
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((j, i))
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(all_pairs)
    for pair in all_pairs:
        if len(edges) >= max_edges:
            break
        if pair not in edges and rng.random() < 0.5:
            edges.add(pair)
    return build_graph(n, sorted(edges))


def _random_problem(rng: np.random.Generator, g: Graph, d: int):
    fns = []
    for _ in range(g.n):
        a = rng.standard_normal((d, d))
        q = a.T @ a + 0.5 * np.eye(d)
        fns.append(Quadratic(q, rng.standard_normal(d), float(rng.standard_normal())))
    return consensus_dual_problem(g, fns, d)


# -- individual checks -------------------------------------------------------

def check_projectors(graphs: dict[str, Graph]) -> CheckResult:
    details = {}
    passed = True
    for name, g in graphs.items():
        try:
            proj = range_projector(g)
            check_projector(proj)
            if g.num_edges == g.n - 1:  # tree: full column rank, P = I
                err = float(np.linalg.norm(proj.matrix - np.eye(g.num_edges)))
                details[f"{name}_identity_err"] = err
                passed &= err <= 1e-9
        except InequalityViolated as exc:
            details[name] = f"violated: {exc}"
            passed = False
    return CheckResult("projector_invariants", passed, details)


def check_norm_axioms(graphs: dict[str, Graph], samples: int,
                      rng: np.random.Generator, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for g in graphs.values():
        sets = neighbor_sets(g)
        e = g.num_edges
        per_graph = max(1, samples // len(graphs))
        xs = rng.standard_normal((per_graph, e))
        ys = rng.standard_normal((per_graph, e))
        ts = rng.standard_normal(per_graph)
        for x, y, t in zip(xs, ys, ts):
            nx, ny = set_max_norm(sets, x), set_max_norm(sets, y)
            worst = max(worst, set_max_norm(sets, x + y) - (nx + ny))
            worst = max(worst, abs(set_max_norm(sets, t * x) - abs(t) * nx))
            if nx == 0.0 and np.any(x != 0):
                worst = np.inf
        if set_max_norm(sets, np.zeros(e)) != 0.0:
            worst = np.inf
    return CheckResult(
        "set_max_norm_axioms", worst <= tol,
        {"worst_violation": float(worst), "samples": samples},
    )


def check_chain(graphs: dict[str, Graph], vectors: int,
                rng: np.random.Generator) -> CheckResult:
    eligible = {n: g for n, g in graphs.items() if g.num_edges <= 12}
    per_graph = max(1, vectors // max(len(eligible), 1))
    worst_lower = worst_upper = np.inf
    worst_partition = 0.0
    count = 0
    for g in eligible.values():
        for _ in range(per_graph):
            x = rng.standard_normal(g.num_edges)
            try:
                rep = check_chain_inequality(g, x)
            except InequalityViolated as exc:
                return CheckResult("chain_inequality", False, {"witness": str(exc)})
            worst_lower = min(worst_lower, rep.worst_lower_margin)
            worst_upper = min(worst_upper, rep.worst_upper_margin)
            worst_partition = max(worst_partition, rep.worst_partition_err)
            count += 1
    return CheckResult(
        "chain_inequality", True,
        {
            "vectors": count,
            "worst_lower_margin": worst_lower,
            "worst_upper_margin": worst_upper,
            "worst_partition_err": worst_partition,
        },
    )


def check_null_degeneracy(graphs: dict[str, Graph],
                          rng: np.random.Generator) -> CheckResult:
    """On cyclic graphs the constructed kernel vector has zero seminorm,
    positive Euclidean norm, and does not move the objective."""
    details = {}
    passed = True
    checked = 0
    for name, g in graphs.items():
        w = cycle_null_vector(g)
        if w is None:
            continue
        checked += 1
        proj = range_projector(g)
        semi = projector_seminorm(proj, w)
        details[f"{name}_seminorm"] = semi
        # rounding in the quadratic form is O(eps * ||w||^2), so the seminorm
        # of an exact kernel vector can only be certified to O(sqrt(eps))
        wnorm = float(np.linalg.norm(w))
        passed &= semi <= 1e-7 * (1.0 + wnorm) and wnorm > 0.5

        d = 2
        p = _random_problem(rng, g, d)
        s = p.state_from_lambda(rng.standard_normal((g.num_edges, d)))
        direction = rng.standard_normal(d)
        s2 = p.state_from_lambda(s.lam + np.outer(w, direction))
        f1, f2 = p.dual_value(s), p.dual_value(s2)
        diff = abs(f2 - f1)
        details[f"{name}_value_shift"] = diff
        passed &= diff <= 1e-9 * (1.0 + abs(f1))
    return CheckResult("null_vector_degeneracy", passed and checked > 0,
                       {**details, "graphs_with_cycles": checked})


def check_gradient_range(graphs: dict[str, Graph], rng: np.random.Generator,
                         steps: int = 120) -> CheckResult:
    worst = 0.0
    for g in graphs.values():
        for d in (1, 2):
            p = _random_problem(rng, g, d)
            proj = range_projector(g)
            trace = run(
                p,
                RunConfig("sgs", iterations=steps, seed=int(rng.integers(2**32)),
                          record_every=steps),
                initial_state=p.state_from_lambda(
                    rng.standard_normal((g.num_edges, d))
                ),
            )
            s = trace.final_state
            grads = p.full_gradient(s)
            scale = 1.0 + float(np.linalg.norm(grads))
            worst = max(worst, gradient_range_residual(p, s, proj) / scale)

            w = cycle_null_vector(g)
            if w is not None:
                s2 = p.state_from_lambda(
                    s.lam + np.outer(w, rng.standard_normal(d))
                )
                grads2 = p.full_gradient(s2)
                scale2 = 1.0 + float(np.linalg.norm(grads2))
                worst = max(worst, gradient_range_residual(p, s2, proj) / scale2)
    return CheckResult(
        "gradient_in_range", worst <= 1e-9, {"worst_scaled_residual": worst}
    )


def check_dual_bound(graphs: dict[str, Graph], samples_per_graph: int,
                     seed: int, steps: int = 1000) -> CheckResult:
    eligible = {n: g for n, g in graphs.items() if g.num_edges <= 10}
    flagged = 0
    min_margin = np.inf
    total = 0
    for offset, g in enumerate(eligible.values()):
        rep = check_set_max_dual_bound(
            g, samples=samples_per_graph, seed=seed + offset, steps=steps
        )
        flagged += len(rep.flagged)
        min_margin = min(min_margin, rep.min_margin)
        total += rep.samples
    return CheckResult(
        "dual_norm_halving", flagged == 0,
        {"samples": total, "flagged": flagged, "min_margin": float(min_margin)},
    )


def verify(level: str = "fast", seed: int = 0) -> VerifyReport:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    t0 = time.monotonic()
    rng = np.random.default_rng(seed)
    graphs = canonical_graphs()
    if level == "full":
        for idx in range(8):
            n = int(rng.integers(4, 7))
            g = random_connected_graph(rng, n, max_edges=12)
            graphs[f"random{idx}_n{g.n}_E{g.num_edges}"] = g

    norm_samples = 10_000 if level == "full" else 1_000
    chain_vectors = 1_000 if level == "full" else 120
    dual_samples = 10 if level == "full" else 4
    dual_steps = 1000 if level == "full" else 600

    checks = [
        check_projectors(graphs),
        check_norm_axioms(graphs, norm_samples, rng),
        check_chain(graphs, chain_vectors, rng),
        check_null_degeneracy(graphs, rng),
        check_gradient_range(graphs, rng),
        check_dual_bound(
            {n: g for n, g in graphs.items() if g.num_edges <= 10},
            dual_samples, seed, steps=dual_steps,
        ),
    ]
    return VerifyReport(level=level, checks=checks, elapsed=time.monotonic() - t0)

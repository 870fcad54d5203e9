"""Set-structured objectives driven by the simulation engine.

Two problem families share one interface (coordinate sets, per-coordinate
block gradients, value/suboptimality against an analytic reference optimum):

* :class:`DualConsensusProblem` - minimize ``F(lam) = sum_i f_i*(z_i)`` over
  one d-dimensional block per edge, where ``z_i`` is the signed sum of the
  node's incident blocks. Its optimum equals minus the primal consensus
  minimum, which is available in closed form for quadratics.
* :class:`SeparableQuadraticProblem` - minimize ``x' D x`` with diagonal D,
  coordinates grouped into the edge-sets of a carrier graph (each coordinate
  accessible from exactly two sets).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NegativeSuboptimality,
    NonPositiveStep,
    SingularAggregate,
)
from .graph import Graph, SetSystem, graph_from_json, laplacian_extremes, load_graph, neighbor_sets
from .objective import Quadratic, quadratic_from_spec

SUBOPTIMALITY_FLOOR = -1e-9
AGGREGATE_DRIFT_TOL = 1e-8


@dataclass
class DualState:
    """Edge blocks ``lam`` (E, d) plus per-node aggregates ``z`` (n, d).

    Single-owner mutable: one simulation run mutates one state.
    """

    lam: np.ndarray
    z: np.ndarray

    def copy(self) -> "DualState":
        return DualState(self.lam.copy(), self.z.copy())


@dataclass
class SeparableState:
    x: np.ndarray

    def copy(self) -> "SeparableState":
        return SeparableState(self.x.copy())


class DualConsensusProblem:
    """Dual of consensus minimization of quadratics over a connected graph."""

    setting = "decentralized"

    def __init__(self, graph: Graph, functions: Sequence[Quadratic], block_dim: int):
        if len(functions) != graph.n:
            raise DimensionMismatch(
                f"{len(functions)} functions for {graph.n} nodes"
            )
        for f in functions:
            if f.d != block_dim:
                raise DimensionMismatch(f"function dimension {f.d} != {block_dim}")
        self.graph = graph
        self.functions = tuple(functions)
        self.block_dim = block_dim
        self.sets: SetSystem = neighbor_sets(graph)
        self.edge_u, self.edge_v = graph.endpoints()

        gamma_min_plus, gamma_max = laplacian_extremes(graph)
        self.gamma_min_plus = gamma_min_plus
        self.gamma_max = gamma_max
        self.mu_min = min(f.mu for f in functions)
        self.M_max = max(f.M_smooth for f in functions)
        self.L_smooth = gamma_max / self.mu_min
        self.sigma_A = gamma_min_plus / self.M_max

        # reference optimum from the primal closed form (strong duality):
        # theta* minimizes sum_i f_i, and F* = -(sum_i f_i(theta*))
        q_sum = np.zeros((block_dim, block_dim))
        b_sum = np.zeros(block_dim)
        for f in functions:
            q_sum += f.Q
            b_sum += f.b
        try:
            self.theta_star = np.linalg.solve(q_sum, -b_sum)
        except np.linalg.LinAlgError as exc:
            raise SingularAggregate(str(exc)) from exc
        self.F_star = -sum(f.value(self.theta_star) for f in functions)

    # properties shared with the separable family
    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def num_coordinates(self) -> int:
        return self.graph.num_edges

    @property
    def strong_convexity(self) -> float:
        return self.sigma_A

    def initial_state(self) -> DualState:
        return DualState(
            np.zeros((self.num_coordinates, self.block_dim)),
            np.zeros((self.n, self.block_dim)),
        )

    def state_from_lambda(self, lam: np.ndarray) -> DualState:
        lam = np.asarray(lam, dtype=float).reshape(self.num_coordinates, self.block_dim)
        z = np.zeros((self.n, self.block_dim))
        np.add.at(z, self.edge_u, lam)
        np.subtract.at(z, self.edge_v, lam)
        return DualState(lam.copy(), z)

    def recompute_aggregates(self, s: DualState) -> np.ndarray:
        z = np.zeros_like(s.z)
        np.add.at(z, self.edge_u, s.lam)
        np.subtract.at(z, self.edge_v, s.lam)
        return z

    def aggregate_drift(self, s: DualState) -> float:
        return float(np.max(np.abs(self.recompute_aggregates(s) - s.z), initial=0.0))

    def check_state(self, s: DualState, tol: float = AGGREGATE_DRIFT_TOL * 10) -> None:
        drift = self.aggregate_drift(s)
        if drift > tol:
            raise ValueError(f"aggregate drift {drift:.3e} exceeds {tol:.3e}")

    def _check_edge(self, ell: int) -> None:
        if not 0 <= ell < self.num_coordinates:
            raise IndexOutOfRange(f"edge {ell} out of range [0, {self.num_coordinates})")

    def coordinate_gradient(self, s: DualState, ell: int) -> np.ndarray:
        """Block gradient along edge ``ell``: signed difference of the two
        endpoint conjugate gradients."""
        self._check_edge(ell)
        u, v = int(self.edge_u[ell]), int(self.edge_v[ell])
        return self.functions[u].conjugate_gradient(s.z[u]) - self.functions[
            v
        ].conjugate_gradient(s.z[v])

    def apply_update(self, s: DualState, ell: int, eta: float) -> DualState:
        """Gradient step on block ``ell`` with incremental aggregate updates."""
        self._check_edge(ell)
        if eta <= 0:
            raise NonPositiveStep(f"eta must be positive, got {eta}")
        delta = -eta * self.coordinate_gradient(s, ell)
        u, v = int(self.edge_u[ell]), int(self.edge_v[ell])
        s.lam[ell] += delta
        s.z[u] += delta
        s.z[v] -= delta
        return s

    def dual_value(self, s: DualState) -> float:
        return float(
            sum(f.conjugate_value(z_i) for f, z_i in zip(self.functions, s.z))
        )

    value = dual_value

    def suboptimality(self, s: DualState) -> float:
        gap = self.dual_value(s) - self.F_star
        if gap < SUBOPTIMALITY_FLOOR:
            raise NegativeSuboptimality(f"suboptimality {gap:.3e} below floor")
        return gap

    def primal_recovery(self, s: DualState) -> np.ndarray:
        """Primal iterates attaining the conjugate suprema, one row per node."""
        return np.stack(
            [f.conjugate_gradient(z_i) for f, z_i in zip(self.functions, s.z)]
        )

    def full_gradient(self, s: DualState) -> np.ndarray:
        """All block gradients as an (E, d) array."""
        cg = np.stack(
            [f.conjugate_gradient(z_i) for f, z_i in zip(self.functions, s.z)]
        )
        return cg[self.edge_u] - cg[self.edge_v]

    def kernel_arrays(self) -> dict:
        """Contiguous arrays consumed by the simulation kernels."""
        n, d = self.n, self.block_dim
        qinv = np.ascontiguousarray(
            np.stack([f.Q_inv for f in self.functions]), dtype=np.float64
        )
        bvec = np.ascontiguousarray(
            np.stack([f.b for f in self.functions]), dtype=np.float64
        )
        c0 = np.ascontiguousarray([f.c0 for f in self.functions], dtype=np.float64)
        indptr, indices = self.sets.csr()
        return {
            "qinv": qinv.reshape(n, d, d),
            "bvec": bvec.reshape(n, d),
            "c0": c0,
            "f_star": float(self.F_star),
            "edge_u": np.ascontiguousarray(self.edge_u, dtype=np.int32),
            "edge_v": np.ascontiguousarray(self.edge_v, dtype=np.int32),
            "indptr": indptr,
            "indices": indices,
        }


def consensus_dual_problem(
    g: Graph, functions: Sequence[Quadratic], block_dim: int
) -> DualConsensusProblem:
    return DualConsensusProblem(g, functions, block_dim)


# backwards-friendly alias used in a few call sites
new_dual_problem = consensus_dual_problem


class SeparableQuadraticProblem:
    """Diagonal quadratic with coordinates grouped by a carrier graph."""

    setting = "separable"
    block_dim = 1

    def __init__(self, carrier: Graph, diag: np.ndarray):
        diag = np.asarray(diag, dtype=float).reshape(-1)
        if diag.shape[0] != carrier.num_edges:
            raise DimensionMismatch(
                f"{diag.shape[0]} diagonal entries for {carrier.num_edges} coordinates"
            )
        if np.any(diag <= 0):
            raise ValueError("diagonal entries must be positive")
        self.carrier = carrier
        self.diag = diag
        self.sets: SetSystem = neighbor_sets(carrier)
        self.L_smooth = 2.0 * float(diag.max())
        self.F_star = 0.0

    @property
    def n(self) -> int:
        return self.carrier.n

    @property
    def num_coordinates(self) -> int:
        return self.carrier.num_edges

    @property
    def strong_convexity(self) -> float:
        return 2.0 * float(self.diag.min())

    def initial_state(self, x0: np.ndarray | None = None) -> SeparableState:
        if x0 is None:
            x0 = np.ones(self.num_coordinates)
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if x0.shape[0] != self.num_coordinates:
            raise DimensionMismatch(f"x0 has {x0.shape[0]} entries")
        return SeparableState(x0.copy())

    def _check_coord(self, ell: int) -> None:
        if not 0 <= ell < self.num_coordinates:
            raise IndexOutOfRange(f"coordinate {ell} out of range")

    def coordinate_gradient(self, s: SeparableState, ell: int) -> np.ndarray:
        self._check_coord(ell)
        return np.array([2.0 * self.diag[ell] * s.x[ell]])

    def apply_update(self, s: SeparableState, ell: int, eta: float) -> SeparableState:
        self._check_coord(ell)
        if eta <= 0:
            raise NonPositiveStep(f"eta must be positive, got {eta}")
        s.x[ell] -= eta * 2.0 * self.diag[ell] * s.x[ell]
        return s

    def value(self, s: SeparableState) -> float:
        return float(s.x @ (self.diag * s.x))

    def suboptimality(self, s: SeparableState) -> float:
        return self.value(s)

    def full_gradient(self, s: SeparableState) -> np.ndarray:
        return (2.0 * self.diag * s.x).reshape(-1, 1)

    def kernel_arrays(self) -> dict:
        indptr, indices = self.sets.csr()
        return {
            "diag": np.ascontiguousarray(self.diag, dtype=np.float64),
            "indptr": indptr,
            "indices": indices,
        }


def separable_problem(
    g: Graph, mean: float, std: float, seed: int
) -> SeparableQuadraticProblem:
    """Diagonal entries drawn from Normal(mean, std), resampling any
    non-positive draw, grouped by the carrier graph's edge sets."""
    rng = np.random.default_rng(seed)
    diag = rng.normal(mean, std, size=g.num_edges)
    while np.any(diag <= 0):
        bad = diag <= 0
        diag[bad] = rng.normal(mean, std, size=int(bad.sum()))
    return SeparableQuadraticProblem(g, diag)


# -- problem config JSON ----------------------------------------------------

def problem_from_config(cfg: dict, base_dir: str | Path = "."):
    """Build a problem (and optional explicit initial state) from JSON config.

    Decentralized: ``{"setting": "decentralized", "graph": {...} | "graph_file":
    path, "functions": [spec, ...], "d": int}``. Separable: ``{"setting":
    "separable", "graph": {...}, "mean": 10, "std": 3, "seed": 0}`` with an
    optional ``"init": {"far_value": 100, "near_value": 1}`` that places
    ``far_value`` on the offset-1 perfect matching.

    Returns ``(problem, initial_state_or_None)``.
    """
    setting = cfg.get("setting", "decentralized")
    if "graph" in cfg:
        g = graph_from_json(cfg["graph"])
    elif "graph_file" in cfg:
        g = load_graph(Path(base_dir) / cfg["graph_file"])
    else:
        raise ValueError("config needs 'graph' or 'graph_file'")

    if setting == "decentralized":
        d = int(cfg["d"])
        fns = [quadratic_from_spec(spec) for spec in cfg["functions"]]
        return consensus_dual_problem(g, fns, d), None
    if setting == "separable":
        p = separable_problem(
            g, float(cfg.get("mean", 10.0)), float(cfg.get("std", 3.0)),
            int(cfg.get("seed", 0)),
        )
        state = None
        if "init" in cfg:
            from .graph import perfect_matching_circulant

            init = cfg["init"]
            x0 = np.full(p.num_coordinates, float(init.get("near_value", 1.0)))
            far = perfect_matching_circulant(g)
            x0[list(far)] = float(init.get("far_value", 100.0))
            state = p.initial_state(x0)
        return p, state
    raise ValueError(f"unknown setting {setting!r}")


def load_problem_config(path: str | Path):
    path = Path(path)
    return problem_from_config(json.loads(path.read_text()), base_dir=path.parent)

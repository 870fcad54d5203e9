"""Norm and projector machinery for verifying the analysis on small graphs.

Everything here is a pure function of immutable inputs. The brute-force
pieces (assignment enumeration, numeric dual-norm maximization) are capped at
desk scale; they exist to check inequalities, not to run inside the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InequalityViolated,
    MultipleZeroEigenvalues,
    NegativeQuadForm,
    TooManyEdges,
)
from .graph import (
    ZERO_EIGENVALUE_RTOL,
    Assignment,
    Graph,
    SetSystem,
    incidence_matrix,
    neighbor_sets,
)

# rounding guard for inequalities that hold exactly in real arithmetic
_ROUND_EPS = 1e-10


@dataclass(frozen=True)
class RangeProjector:
    """Orthogonal projector onto the row space of the incidence matrix."""

    matrix: np.ndarray
    rank: int


def range_projector(g: Graph) -> RangeProjector:
    a = incidence_matrix(g)
    m = a.T @ a
    vals, vecs = np.linalg.eigh(m)
    tol = ZERO_EIGENVALUE_RTOL * float(vals[-1])
    keep = vals > tol
    rank = int(keep.sum())
    if rank != g.n - 1:
        raise MultipleZeroEigenvalues(
            f"projector rank {rank} != n-1 = {g.n - 1}"
        )
    v = vecs[:, keep]
    return RangeProjector(matrix=v @ v.T, rank=rank)


def check_projector(p: RangeProjector, tol: float = 1e-9) -> None:
    """Raise :class:`InequalityViolated` unless ``p`` is a symmetric
    idempotent of the declared rank."""
    m = p.matrix
    scale = 1.0 + float(np.linalg.norm(m))
    if np.linalg.norm(m @ m - m) > tol * scale:
        raise InequalityViolated("projector is not idempotent")
    if np.linalg.norm(m - m.T) > tol * scale:
        raise InequalityViolated("projector is not symmetric")
    if abs(float(np.trace(m)) - p.rank) > 1e-6:
        raise InequalityViolated(
            f"projector trace {np.trace(m):.6f} != rank {p.rank}"
        )


def projector_seminorm(p: RangeProjector, x: np.ndarray) -> float:
    """sqrt(x' P x): the Euclidean norm of the projected component.

    Degenerate exactly on the incidence kernel (cycle space); equals the
    plain Euclidean norm for vectors already in the row space.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    q = float(x @ p.matrix @ x)
    if q < -1e-12:
        raise NegativeQuadForm(f"quadratic form {q:.3e}")
    return float(np.sqrt(max(q, 0.0)))


def set_max_norm(sets: SetSystem, x: np.ndarray) -> float:
    """sqrt of the summed per-set maxima of squared entries."""
    x = np.asarray(x, dtype=float).reshape(-1)
    total = 0.0
    for s in sets.sets:
        if s:
            total += max(x[j] ** 2 for j in s)
    return float(np.sqrt(total))


_NORM_KINDS = ("inf", "one", "two")


def assignment_value(a: Assignment, x: np.ndarray, norm_kind: str) -> float:
    """sqrt(sum over owned sets of the chosen norm squared), empty sets 0."""
    if norm_kind not in _NORM_KINDS:
        raise ValueError(f"norm_kind must be one of {_NORM_KINDS}")
    x = np.asarray(x, dtype=float).reshape(-1)
    total = 0.0
    for _, owned in a.sets_prime().items():
        v = x[list(owned)]
        if norm_kind == "inf":
            nv = float(np.max(np.abs(v)))
        elif norm_kind == "one":
            nv = float(np.sum(np.abs(v)))
        else:
            nv = float(np.linalg.norm(v))
        total += nv * nv
    return float(np.sqrt(total))


# -- vectorized enumeration over all 2^E assignments -------------------------

@dataclass
class _AssignmentTable:
    """Owner node per (assignment mask, edge), enumerated as in
    :func:`setwise_cd.graph.enumerate_assignments`."""

    owners: np.ndarray  # (2^E, E) int16
    n: int

    def scatter(self, w: np.ndarray) -> np.ndarray:
        """Per-(assignment, node) sums of ``w`` over owned edges."""
        m, e = self.owners.shape
        sums = np.zeros((m, self.n))
        rows = np.broadcast_to(np.arange(m)[:, None], (m, e))
        np.add.at(sums, (rows, self.owners), np.broadcast_to(w, (m, e)))
        return sums


def _assignment_table(g: Graph, max_edges: int) -> _AssignmentTable:
    e = g.num_edges
    if e > max_edges:
        raise TooManyEdges(f"E={e} exceeds brute-force cap {max_edges}")
    masks = np.arange(1 << e, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(e)) & 1
    u, v = g.endpoints()
    owners = np.where(bits == 1, v[None, :], u[None, :]).astype(np.int16)
    return _AssignmentTable(owners=owners, n=g.n)


def assignment_value_bounds(
    g: Graph, x: np.ndarray, max_edges: int = 16
) -> tuple[float, float]:
    """Min and max over all assignments of the l1-based assignment value.

    Brackets the non-overlapping dual-norm construction, whose coupled
    optimum has no direct formula; see :func:`check_set_max_dual_bound`.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    table = _assignment_table(g, max_edges)
    sums = table.scatter(np.abs(x))
    vals = np.sqrt(np.sum(sums * sums, axis=1))
    return float(vals.min()), float(vals.max())


@dataclass
class ChainReport:
    n_assignments: int
    worst_lower_margin: float
    worst_upper_margin: float
    worst_partition_err: float
    projected_norm_sq: float

    @property
    def passed(self) -> bool:
        return (
            self.worst_lower_margin >= 0.0
            and self.worst_upper_margin >= 0.0
            and self.worst_partition_err <= _ROUND_EPS
        )


def check_chain_inequality(
    g: Graph, x: np.ndarray, max_edges: int = 16, raise_on_violation: bool = True
) -> ChainReport:
    """Verify, for every assignment, the sandwich

        (1/max_degree) * value_l1^2  <=  ||Px||^2  <=  value_l1^2

    together with the exact per-assignment partition identity
    ``sum_i ||owned part||_2^2 = ||Px||^2``. ``x`` is projected onto the
    incidence row space first. Margins are slacks after a tiny rounding
    allowance; the worst ones are reported.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    proj = range_projector(g)
    xp = proj.matrix @ x
    nsq = float(xp @ xp)
    nmax = neighbor_sets(g).max_degree

    table = _assignment_table(g, max_edges)
    l1 = table.scatter(np.abs(xp))
    v1sq = np.sum(l1 * l1, axis=1)
    l2 = table.scatter(xp * xp)
    v2sq = np.sum(l2, axis=1)

    guard = _ROUND_EPS * (1.0 + nsq)
    lower_margin = nsq - v1sq / nmax + guard
    upper_margin = v1sq - nsq + guard
    partition_err = np.abs(v2sq - nsq)

    report = ChainReport(
        n_assignments=len(v1sq),
        worst_lower_margin=float(lower_margin.min()),
        worst_upper_margin=float(upper_margin.min()),
        worst_partition_err=float(partition_err.max()),
        projected_norm_sq=nsq,
    )
    if raise_on_violation and not report.passed:
        bad = int(np.argmin(np.minimum(lower_margin, upper_margin)))
        raise InequalityViolated(
            f"chain inequality violated at assignment mask {bad}", x, report
        )
    return report


# -- numeric dual-norm oracle -------------------------------------------------

def _set_index_matrix(sets: SetSystem, num_coords: int) -> np.ndarray:
    """(n, max_degree) edge indices padded with ``num_coords`` (a zero slot)."""
    width = max(sets.max_degree, 1)
    idx = np.full((sets.n, width), num_coords, dtype=np.int64)
    for i, s in enumerate(sets.sets):
        idx[i, : len(s)] = s
    return idx


def _set_max_norm_rows(idx: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Row-wise set-max norm for a batch ``x`` of shape (k, E)."""
    padded = np.concatenate([x * x, np.zeros((x.shape[0], 1))], axis=1)
    per_set = padded[:, idx].max(axis=2)
    return np.sqrt(per_set.sum(axis=1))


def set_max_dual_lower_bound(
    sets: SetSystem,
    z: np.ndarray,
    starts: int = 20,
    steps: int = 1000,
    step_size: float = 1e-2,
    seed: int = 0,
    extra_starts: np.ndarray | None = None,
) -> float:
    """Best feasible value of ``z'x`` over the set-max unit ball.

    Multi-start projected ascent (radial rescaling onto the ball). The result
    is always a valid under-estimate of the dual norm, since every evaluated
    point is feasible.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    e = z.shape[0]
    idx = _set_index_matrix(sets, e)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((starts, e))
    # deterministic warm starts: the target direction and its sign pattern
    warm = [np.where(z == 0, 0.0, np.sign(z)), z.copy()]
    if extra_starts is not None:
        warm.extend(np.atleast_2d(np.asarray(extra_starts, dtype=float)))
    x = np.vstack([x] + [w.reshape(1, -1) for w in warm])

    norms = _set_max_norm_rows(idx, x)
    x /= np.maximum(norms, 1.0)[:, None]
    best = float(np.max(x @ z, initial=0.0))
    for _ in range(steps):
        x += step_size * z
        norms = _set_max_norm_rows(idx, x)
        x /= np.maximum(norms, 1.0)[:, None]
        best = max(best, float(np.max(x @ z)))
    return best


@dataclass
class DualBoundReport:
    samples: int
    min_margin: float
    flagged: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.flagged


def check_set_max_dual_bound(
    g: Graph,
    samples: int,
    seed: int = 0,
    starts: int = 20,
    steps: int = 1000,
    step_size: float = 1e-2,
    max_edges: int = 10,
    strict: bool = False,
) -> DualBoundReport:
    """One-sided halving check between the two dual norms.

    For sampled ``z`` the squared numeric set-max dual value must cover half
    the squared non-overlapping value. The reference uses the tightest
    (minimum over assignments) l1 value, the computable upper bracket of the
    coupled construction; the numeric side is an under-estimate, so failures
    are flagged for review rather than proof of violation, and the tolerance
    ``1e-6 + 1e-3 * value`` absorbs the inner-maximization gap.
    """
    e = g.num_edges
    if e > max_edges:
        raise TooManyEdges(f"E={e} exceeds oracle cap {max_edges}")
    sets = neighbor_sets(g)
    table = _assignment_table(g, max_edges=max_edges)
    rng = np.random.default_rng(seed)
    report = DualBoundReport(samples=samples, min_margin=np.inf)

    for s_idx in range(samples):
        z = rng.standard_normal(e)
        l1 = table.scatter(np.abs(z))
        vals_sq = np.sum(l1 * l1, axis=1)
        best_mask = int(np.argmin(vals_sq))
        ref_sq = float(vals_sq[best_mask])

        # feasible candidate shaped like the fixed-assignment maximizer:
        # constant magnitude per owned set, proportional to its l1 mass
        owners = table.owners[best_mask]
        cand = np.sign(z) * l1[best_mask][owners]
        numeric = set_max_dual_lower_bound(
            sets, z, starts=starts, steps=steps, step_size=step_size,
            seed=seed + 1000 + s_idx, extra_starts=cand,
        )
        target = 0.5 * ref_sq
        tol = 1e-6 + 1e-3 * target
        margin = numeric * numeric - (target - tol)
        report.min_margin = min(report.min_margin, float(margin))
        if margin < 0:
            witness = {"z": z.tolist(), "numeric": numeric, "ref_sq": ref_sq}
            report.flagged.append(witness)
            if strict:
                raise InequalityViolated("dual-norm halving check flagged", witness)
    return report


# -- gradient range residual ---------------------------------------------------

def gradient_range_residual(p, s, proj: RangeProjector) -> float:
    """l2 distance between the full gradient and its row-space projection.

    Zero (to rounding) for every reachable state: the gradient never has a
    component in the cycle space. Blocks with d > 1 are handled column-wise.
    """
    grads = p.full_gradient(s)
    res = proj.matrix @ grads - grads
    return float(np.linalg.norm(res))


def cycle_null_vector(g: Graph) -> np.ndarray | None:
    """A nonzero +-1 vector in the incidence kernel, or None for trees.

    Built from one fundamental cycle: a non-tree edge plus the tree path
    between its endpoints, with signs chosen so the signed columns telescope.
    """
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(g.n)}
    for ell, (i, j) in enumerate(g.edges):
        adj[i].append((j, ell))
        adj[j].append((i, ell))

    parent = {0: (-1, -1)}
    order = [0]
    tree_edges = set()
    for node in order:
        for nxt, ell in adj[node]:
            if nxt not in parent:
                parent[nxt] = (node, ell)
                tree_edges.add(ell)
                order.append(nxt)

    extra = next(
        (ell for ell in range(g.num_edges) if ell not in tree_edges), None
    )
    if extra is None:
        return None

    u, v = g.edges[extra]

    def path_to_root(x: int) -> list[int]:
        out = [x]
        while parent[x][0] != -1:
            x = parent[x][0]
            out.append(x)
        return out

    pu, pv = path_to_root(u), path_to_root(v)
    common = set(pu) & set(pv)
    pu = pu[: [i for i, a in enumerate(pu) if a in common][0] + 1]
    pv = pv[: [i for i, a in enumerate(pv) if a in common][0] + 1]

    w = np.zeros(g.num_edges)
    w[extra] = 1.0  # column of the extra edge contributes +e_u - e_v
    # tree path v -> meet -> u as hops (a, b), each meant to add e_a - e_b so
    # the signed columns telescope to e_v - e_u and cancel the extra edge
    hops = list(zip(pv, pv[1:])) + [(b, a) for a, b in zip(pu[:-1], pu[1:])]
    for a, b in hops:
        ell = _tree_edge_between(g, parent, a, b)
        i, j = g.edges[ell]
        w[ell] += 1.0 if (a, b) == (i, j) else -1.0
    return w


def _tree_edge_between(g: Graph, parent, a: int, b: int) -> int:
    if parent.get(a, (-1, -1))[0] == b:
        return parent[a][1]
    if parent.get(b, (-1, -1))[0] == a:
        return parent[b][1]
    raise ValueError(f"nodes {a},{b} are not tree neighbors")

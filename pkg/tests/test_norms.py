import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setwise_cd import build_graph, enumerate_assignments
from setwise_cd.errors import InequalityViolated, NegativeQuadForm, TooManyEdges
from setwise_cd.graph import incidence_matrix, neighbor_sets
from setwise_cd.norms import (
    RangeProjector,
    assignment_value,
    assignment_value_bounds,
    check_chain_inequality,
    check_projector,
    check_set_max_dual_bound,
    cycle_null_vector,
    gradient_range_residual,
    projector_seminorm,
    range_projector,
    set_max_dual_lower_bound,
    set_max_norm,
)

from conftest import random_problem
from oracles import enumerate_assignment_values, random_connected_edges


class TestRangeProjector:
    def test_p2_identity(self, p2):
        proj = range_projector(p2)
        assert proj.matrix == pytest.approx(np.array([[1.0]]))
        assert proj.rank == 1

    def test_tree_identity(self, path3):
        proj = range_projector(path3)
        assert np.allclose(proj.matrix, np.eye(2), atol=1e-12)

    def test_k3_rank(self, k3):
        proj = range_projector(k3)
        assert proj.rank == 2
        check_projector(proj)

    def test_idempotent_on_random_graphs(self):
        rng = np.random.default_rng(0)
        for _ in range(8):
            n = int(rng.integers(3, 8))
            g = build_graph(n, random_connected_edges(rng, n, extra=3))
            proj = range_projector(g)
            check_projector(proj)
            assert proj.rank == n - 1

    def test_corrupted_projector_flagged(self, k3):
        proj = range_projector(k3)
        bad = RangeProjector(matrix=proj.matrix + 0.05, rank=proj.rank)
        with pytest.raises(InequalityViolated):
            check_projector(bad)


class TestSeminorm:
    def test_cycle_vector_degenerate(self, k3):
        proj = range_projector(k3)
        w = cycle_null_vector(k3)
        assert w is not None and np.linalg.norm(w) > 0
        assert np.allclose(incidence_matrix(k3) @ w, 0.0, atol=1e-12)
        assert projector_seminorm(proj, w) <= 1e-7 * np.linalg.norm(w)

    def test_equals_l2_on_row_space(self, k3):
        proj = range_projector(k3)
        a = incidence_matrix(k3)
        rng = np.random.default_rng(1)
        for _ in range(20):
            x = a.T @ rng.standard_normal(3)
            assert projector_seminorm(proj, x) == pytest.approx(
                np.linalg.norm(x), rel=1e-10
            )

    def test_homogeneity(self, c4):
        proj = range_projector(c4)
        rng = np.random.default_rng(2)
        x = rng.standard_normal(4)
        for t in (-3.0, -0.5, 0.0, 2.0):
            assert projector_seminorm(proj, t * x) == pytest.approx(
                abs(t) * projector_seminorm(proj, x), abs=1e-12
            )

    def test_negative_form_guard(self, k3):
        bad = RangeProjector(matrix=-np.eye(3), rank=2)
        with pytest.raises(NegativeQuadForm):
            projector_seminorm(bad, np.ones(3))


class TestSetMaxNorm:
    def test_triangle_ones(self, k3):
        sets = neighbor_sets(k3)
        assert set_max_norm(sets, np.ones(3)) == pytest.approx(np.sqrt(3))

    def test_zero(self, k3):
        assert set_max_norm(neighbor_sets(k3), np.zeros(3)) == 0.0

    def test_unit_vector_counted_twice(self, k3):
        sets = neighbor_sets(k3)
        for ell in range(3):
            e = np.zeros(3)
            e[ell] = 1.0
            assert set_max_norm(sets, e) == pytest.approx(np.sqrt(2))

    @settings(max_examples=100, deadline=None)
    @given(
        x=st.lists(st.floats(-50, 50), min_size=3, max_size=3),
        y=st.lists(st.floats(-50, 50), min_size=3, max_size=3),
        t=st.floats(-10, 10),
    )
    def test_norm_axioms(self, x, y, t):
        sets = neighbor_sets(build_graph(3, [(0, 1), (0, 2), (1, 2)]))
        x, y = np.asarray(x), np.asarray(y)
        nx, ny = set_max_norm(sets, x), set_max_norm(sets, y)
        assert set_max_norm(sets, x + y) <= nx + ny + 1e-10
        assert set_max_norm(sets, t * x) == pytest.approx(abs(t) * nx, abs=1e-10)
        # definiteness holds whenever squaring the entries cannot underflow
        if np.any(np.abs(x) > 1e-150):
            assert nx > 0


class TestAssignmentValue:
    def test_singleton_all_kinds(self, p2):
        x = np.array([3.0])
        for a in enumerate_assignments(p2):
            for kind in ("inf", "one", "two"):
                assert assignment_value(a, x, kind) == pytest.approx(3.0)

    def test_l2_kind_is_always_euclidean(self, c4):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(4)
        for a in enumerate_assignments(c4):
            assert assignment_value(a, x, "two") == pytest.approx(
                np.linalg.norm(x), rel=1e-12
            )

    def test_l1_matches_partition_sizes_for_ones(self, k3):
        x = np.ones(3)
        for a in enumerate_assignments(k3):
            sizes = [len(s) for s in a.sets_prime().values()]
            expected = np.sqrt(sum(s * s for s in sizes))
            assert assignment_value(a, x, "one") == pytest.approx(expected)

    def test_matches_direct_enumeration(self, c4):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(4)
        for kind in ("inf", "one", "two"):
            oracle = enumerate_assignment_values(c4, x, kind)
            values = [
                assignment_value(a, x, kind) for a in enumerate_assignments(c4)
            ]
            assert values == pytest.approx(oracle)


class TestAssignmentBounds:
    def test_p2_trivial(self, p2):
        lo, hi = assignment_value_bounds(p2, np.array([2.5]))
        assert lo == hi == pytest.approx(2.5)

    def test_single_nonzero(self, k3):
        x = np.array([0.0, -4.0, 0.0])
        lo, hi = assignment_value_bounds(k3, x)
        assert lo == pytest.approx(4.0) and hi == pytest.approx(4.0)

    def test_triangle_ones(self, k3):
        lo, hi = assignment_value_bounds(k3, np.ones(3))
        assert lo == pytest.approx(np.sqrt(3)) and hi == pytest.approx(np.sqrt(5))

    def test_matches_direct_enumeration(self, c4):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = rng.standard_normal(4)
            oracle = enumerate_assignment_values(c4, x, "one")
            lo, hi = assignment_value_bounds(c4, x)
            assert lo == pytest.approx(min(oracle)) and hi == pytest.approx(
                max(oracle)
            )

    def test_cap(self):
        from setwise_cd import circulant_regular

        g = circulant_regular(18, 2)
        with pytest.raises(TooManyEdges):
            assignment_value_bounds(g, np.ones(18))


class TestChainInequality:
    def test_unit_vector_near_tight(self, k3):
        e = np.zeros(3)
        e[0] = 1.0
        rep = check_chain_inequality(k3, e)
        assert rep.passed

    def test_random_graphs_no_violation(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(3, 7))
            g = build_graph(n, random_connected_edges(rng, n, extra=3))
            if g.num_edges > 12:
                continue
            for _ in range(20):
                rep = check_chain_inequality(g, rng.standard_normal(g.num_edges))
                assert rep.passed

    def test_clique_uniform_vector(self, k3):
        rep = check_chain_inequality(k3, np.ones(3))
        assert rep.passed
        # all-ones minus its cycle-direction component (1,-1,1)/sqrt(3):
        # residual (2/3, 4/3, 2/3) has squared norm 8/3
        assert rep.projected_norm_sq == pytest.approx(8.0 / 3.0, rel=1e-9)

    def test_partition_identity_exact(self, c4):
        rng = np.random.default_rng(7)
        rep = check_chain_inequality(c4, rng.standard_normal(4))
        assert rep.worst_partition_err <= 1e-10


class TestDualNormOracle:
    def test_unit_direction_value(self, k3):
        sets = neighbor_sets(k3)
        z = np.zeros(3)
        z[1] = 1.0
        val = set_max_dual_lower_bound(sets, z, seed=0)
        # optimum puts 1/sqrt(2) on the single coordinate (it lives in 2 sets)
        assert val == pytest.approx(1 / np.sqrt(2), abs=1e-6)
        assert val <= 1 / np.sqrt(2) + 1e-12

    def test_zero_vector(self, k3):
        assert set_max_dual_lower_bound(neighbor_sets(k3), np.zeros(3)) == 0.0

    def test_path3_samples_clean(self, path3):
        rep = check_set_max_dual_bound(path3, samples=100, seed=0, steps=400)
        assert rep.passed
        assert rep.min_margin >= 0

    def test_triangle_and_cycle_clean(self, k3, c4):
        for g in (k3, c4):
            rep = check_set_max_dual_bound(g, samples=25, seed=1)
            assert rep.passed

    def test_cap(self):
        from setwise_cd import circulant_regular

        g = circulant_regular(12, 2)
        with pytest.raises(TooManyEdges):
            check_set_max_dual_bound(g, samples=1)


class TestGradientRange:
    def test_tree_residual_zero(self, path3):
        rng = np.random.default_rng(8)
        p = random_problem(rng, n=3, d=1, extra=0)
        assert p.num_coordinates == 2  # tree
        proj = range_projector(p.graph)
        s = p.state_from_lambda(rng.standard_normal((2, 1)))
        assert gradient_range_residual(p, s, proj) <= 1e-12

    def test_random_states_triangle(self):
        rng = np.random.default_rng(9)
        p = random_problem(rng, n=3, d=2, extra=3)
        proj = range_projector(p.graph)
        for _ in range(30):
            s = p.state_from_lambda(
                2.0 * rng.standard_normal((p.num_coordinates, 2))
            )
            grads = p.full_gradient(s)
            scale = 1e-9 * (1 + np.linalg.norm(grads))
            assert gradient_range_residual(p, s, proj) <= scale

    def test_null_component_invisible(self):
        rng = np.random.default_rng(10)
        p = random_problem(rng, n=4, d=1, extra=3)
        w = cycle_null_vector(p.graph)
        assert w is not None
        proj = range_projector(p.graph)
        s = p.state_from_lambda(rng.standard_normal((p.num_coordinates, 1)))
        s2 = p.state_from_lambda(s.lam + 5.0 * w.reshape(-1, 1))
        g1, g2 = p.full_gradient(s), p.full_gradient(s2)
        assert np.allclose(g1, g2, atol=1e-9)
        assert gradient_range_residual(p, s2, proj) <= 1e-9 * (
            1 + np.linalg.norm(g2)
        )

import numpy as np
import pytest

from equilires.analysis import compare, numerical_rank, singular_values, spectral_report
from equilires.attack import AttackBudget, dice_attack
from equilires.defense import defend
from equilires.errors import InputError
from equilires.generators import gnp_graph, sbm_graph
from equilires.graph import Graph

from conftest import edgeless


class TestSingularValues:
    def test_zero_matrix(self):
        s = singular_values(edgeless(4))
        assert s.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_triangle_spectrum(self, k3):
        s = singular_values(k3)
        assert np.allclose(s, [2.0, 1.0, 1.0], atol=1e-12)

    def test_single_edge_block(self):
        adj = np.zeros((5, 5))
        adj[1, 3] = adj[3, 1] = 1.0
        s = singular_values(Graph(adj))
        assert np.allclose(s, [1.0, 1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_k_out_of_range(self, k3):
        with pytest.raises(InputError):
            singular_values(k3, k=4)
        with pytest.raises(InputError):
            singular_values(k3, k=0)

    def test_dense_vs_iterative_agree(self):
        rng = np.random.default_rng(14)
        for trial in range(20):
            n = int(rng.integers(40, 500))
            g = gnp_graph(n, 0.05, seed=trial)
            dense = singular_values(g)[:10]
            topk = singular_values(g, k=10)
            assert topk == pytest.approx(dense, rel=1e-8, abs=1e-10)

    def test_topk_deterministic(self):
        g = gnp_graph(200, 0.05, seed=5)
        a = singular_values(g, k=6)
        b = singular_values(g, k=6)
        assert np.array_equal(a, b)


class TestNumericalRank:
    def test_zero_matrix(self):
        assert numerical_rank(edgeless(6)) == 0

    def test_disjoint_edges_rank(self):
        # Five disjoint edges: five 2x2 blocks of rank 2 each.
        adj = np.zeros((10, 10))
        for i in range(0, 10, 2):
            adj[i, i + 1] = adj[i + 1, i] = 1.0
        assert numerical_rank(Graph(adj)) == 10

    def test_triangle_full_rank(self, k3):
        assert numerical_rank(k3) == 3

    def test_permutation_invariant(self):
        g = gnp_graph(40, 0.15, seed=9)
        rng = np.random.default_rng(10)
        perm = rng.permutation(40)
        permuted = Graph(g.adjacency[np.ix_(perm, perm)])
        assert numerical_rank(permuted) == numerical_rank(g)


class TestPerronMonotonicity:
    def test_entrywise_submatrices(self):
        rng = np.random.default_rng(11)
        for trial in range(15):
            g = gnp_graph(50, 0.2, seed=trial, weighted=True)
            mask = rng.random((50, 50)) < 0.7
            mask = np.triu(mask, 1)
            mask = mask | mask.T
            smaller = Graph(np.where(mask, g.adjacency, 0.0))
            assert (
                singular_values(smaller)[0]
                <= singular_values(g)[0] + 1e-10
            )

    def test_defense_output(self):
        g = sbm_graph(60, 3, 0.2, 0.03, seed=1)
        attacked = dice_attack(g, AttackBudget(rate=0.1), seed=2)
        defended, _ = defend(attacked, rop=0.1)
        assert (
            singular_values(defended)[0]
            <= singular_values(attacked)[0] + 1e-10
        )


class TestSpectralReport:
    def test_fields(self, k3):
        rep = spectral_report(k3, apr=0.25)
        assert rep.numerical_rank == 3
        assert rep.sigma_max == pytest.approx(2.0)
        assert rep.apr == 0.25
        assert rep.graph_state is not None
        assert not rep.rank_is_lower_bound

    def test_truncated_flagged(self):
        g = gnp_graph(50, 0.2, seed=3)
        rep = spectral_report(g, k=5)
        assert rep.rank_is_lower_bound
        assert len(rep.singular_values) == 5

    def test_edgeless_has_no_state(self):
        rep = spectral_report(edgeless(4))
        assert rep.graph_state is None and rep.numerical_rank == 0


class TestCompare:
    def test_identical_graphs_zero_deltas(self, k3):
        out = compare(k3, k3, k3)
        assert out["apr"] == 0.0
        assert out["rank_clean"] == out["rank_perturbed"] == out["rank_defended"]
        assert out["distance_to_clean_state"]["perturbed"] == 0.0
        assert out["distance_to_clean_state"]["defended"] == 0.0

    def test_defended_subset_has_smaller_sigma(self):
        g = sbm_graph(50, 2, 0.25, 0.05, seed=4)
        attacked = dice_attack(g, AttackBudget(rate=0.2), seed=5)
        defended, _ = defend(attacked, rop=0.2)
        out = compare(g, attacked, defended)
        assert out["sigma_max_defended"] <= out["sigma_max_perturbed"] + 1e-10
        assert out["elapsed_seconds"] >= 0.0

    def test_without_defended(self, k3, path3):
        out = compare(k3, path3)
        assert "rank_defended" not in out
        assert out["distance_to_clean_state"]["defended"] is None

    def test_dimension_mismatch(self, k3):
        with pytest.raises(InputError):
            compare(k3, edgeless(4))

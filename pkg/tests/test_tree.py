"""Tests for the centroid-decomposition tree solver."""

import networkx as nx
import pytest

from bvx.generators import random_tree, staggered_sites_tree
from bvx.graph import CostVector, NotAClassError, SiteList
from bvx.tree import alpha_all, beta_all, centroid, gamma_all, solve_tree, tree_scores
from bvx.voronoi import brute_force_balanced_vertex, brute_force_scores, witness_load

from .helpers import (
    costs_and_sites,
    naive_owner,
    nx_distances,
    path_graph,
    random_connected,
    star_graph,
)


class TestCentroid:
    """Test weighted centroids."""

    def test_path(self):
        """The middle of an odd path."""
        assert centroid(path_graph(5)) == 2

    def test_components_at_most_half(self, rng):
        """No component of T minus c holds more than half the weight."""
        for _ in range(20):
            tree = random_tree(rng.randint(1, 40), rng)
            weights = [rng.randint(0, 3) for _ in range(tree.n)]
            c = centroid(tree, weights)
            nxg = tree.to_networkx()
            nxg.remove_node(c)
            for part in nx.connected_components(nxg):
                assert 2 * sum(weights[v] for v in part) <= sum(weights)


class TestLoadTerms:
    """Test the per-vertex terms the recursion carries."""

    def test_alpha_matches_definition(self, rng):
        """alpha(v) sums the costs strictly closer to v than to s."""
        for _ in range(15):
            tree = random_tree(rng.randint(2, 30), rng)
            costs, _ = costs_and_sites(tree, rng)
            dist = nx_distances(tree)
            s = rng.randrange(tree.n)
            alpha = alpha_all(tree, s, costs)
            for v in range(tree.n):
                expected = sum(costs[x] for x in range(tree.n) if dist[v, x] < dist[s, x])
                assert int(alpha[v]) == expected

    def test_beta_matches_definition(self, rng):
        """beta(v) sums the costs won by v through c."""
        for _ in range(15):
            tree = random_tree(rng.randint(2, 30), rng)
            costs, s = costs_and_sites(tree, rng)
            dist = nx_distances(tree)
            d_s = dist[list(s)].min(axis=0)
            c = rng.randrange(tree.n)
            beta = beta_all(tree, c, s, costs)
            assert int(beta[c]) == 0
            for v in range(tree.n):
                if v == c:
                    continue
                expected = sum(
                    costs[x]
                    for x in range(tree.n)
                    if dist[v, x] == dist[v, c] + dist[c, x] and dist[v, x] < d_s[x]
                )
                assert int(beta[v]) == expected


class TestGamma:
    """Test the largest untouched load reached through c."""

    def test_path_example(self):
        """On s_a-a-c-b-s_b, a pulls c away from s_a and leaves s_b its two vertices."""
        tree = path_graph(5)
        costs = CostVector.from_values([1, 2, 4, 8, 16])
        gamma = gamma_all(tree, 2, SiteList((0, 4)), costs)
        assert int(gamma[1]) == int(costs[3] + costs[4])
        assert int(gamma[3]) == 0
        assert int(gamma[2]) == 0

    def test_single_site_owning_c(self, rng):
        """With one site there is no other territory to report."""
        for _ in range(10):
            tree = random_tree(rng.randint(2, 20), rng)
            costs, _ = costs_and_sites(tree, rng)
            c = rng.randrange(tree.n)
            gamma = gamma_all(tree, c, SiteList((rng.randrange(tree.n),)), costs)
            assert gamma.tolist() == [0] * tree.n

    def test_matches_definition(self, rng):
        """gamma(v) is the heaviest new-diagram load over sites beyond c that avoid c."""
        for _ in range(40):
            tree = random_tree(rng.randint(2, 30), rng)
            costs, s = costs_and_sites(tree, rng)
            dist = nx_distances(tree)
            owner = naive_owner(dist, s)
            c = rng.randrange(tree.n)
            gamma = gamma_all(tree, c, s, costs)
            for v in range(tree.n):
                if v == c or v in s:
                    continue
                _, breakdown = witness_load(tree, costs, s, v)
                beyond = [
                    i
                    for i, site in enumerate(s)
                    if owner[c] != i and dist[v, site] == dist[v, c] + dist[c, site]
                ]
                expected = max((breakdown[i][1] for i in beyond), default=0)
                assert int(gamma[v]) == expected


class TestSolveTree:
    """Test solve_tree against the brute-force oracle."""

    def test_star(self):
        """Star with a zero-cost center site."""
        result = solve_tree(star_graph(3), CostVector.from_values([0, 5, 2, 1]), SiteList((0,)))
        assert result.best_vertex == 1
        assert result.algorithm == "tree"

    def test_matches_brute_force(self, rng):
        """Every non-site score equals the oracle's."""
        for _ in range(60):
            tree = random_tree(rng.randint(2, 40), rng)
            costs, s = costs_and_sites(tree, rng, high=rng.choice([1, 5, 100]))
            assert (
                tree_scores(tree, costs, s).tolist()
                == brute_force_scores(tree, costs, s).tolist()
            )

    def test_site_balanced_centroids(self, rng):
        """Balancing sites instead of vertices gives the same scores."""
        for _ in range(30):
            tree = random_tree(rng.randint(2, 40), rng)
            costs, s = costs_and_sites(tree, rng)
            assert (
                tree_scores(tree, costs, s, centroid_mode="sites").tolist()
                == tree_scores(tree, costs, s).tolist()
            )

    def test_instrumented_identity(self, rng):
        """The chained load identity holds at every frame."""
        for _ in range(20):
            tree = random_tree(rng.randint(2, 25), rng)
            costs, s = costs_and_sites(tree, rng)
            result = solve_tree(tree, costs, s, instrument=True)
            assert result.best_load == brute_force_balanced_vertex(tree, costs, s).best_load

    def test_staggered_sites(self):
        """Sites hung at growing depths survive many recursion levels."""
        tree, s = staggered_sites_tree(6)
        costs = CostVector.unit(tree.n)
        stats = {}
        scores = tree_scores(tree, costs, s, stats=stats)
        assert scores.tolist() == brute_force_scores(tree, costs, s).tolist()
        assert stats["max_site_depth"] >= 1
        assert stats["max_depth"] >= stats["max_site_depth"]

    def test_unknown_centroid_mode(self):
        """Only the two centroid rules exist."""
        with pytest.raises(ValueError):
            tree_scores(path_graph(3), CostVector.unit(3), SiteList((0,)), centroid_mode="edges")

    def test_rejects_non_tree(self, rng):
        """Graphs with a cycle are refused."""
        g = random_connected(6, rng, extra=1.0)
        with pytest.raises(NotAClassError):
            solve_tree(g, CostVector.unit(6), SiteList((0,)))

    @pytest.mark.slow
    def test_large_sweep(self, rng):
        """A thousand random trees agree with the oracle."""
        for _ in range(1000):
            tree = random_tree(rng.randint(2, 60), rng)
            costs, s = costs_and_sites(tree, rng)
            assert (
                tree_scores(tree, costs, s).tolist()
                == brute_force_scores(tree, costs, s).tolist()
            )

"""Tests for prioritized Voronoi diagrams and the brute-force solver."""

import networkx as nx
import numpy as np
import pytest

from bvx.graph import SCALE, CostVector, Graph, InstanceError, SiteList
from bvx.voronoi import (
    brute_force_balanced_vertex,
    brute_force_scores,
    diagram_summary,
    insertion_loads,
    new_site_territory,
    owners_as_sites,
    prioritized_voronoi,
    witness_load,
)

from .helpers import (
    costs_and_sites,
    naive_loads,
    naive_owner,
    nx_distances,
    path_graph,
    random_connected,
    star_graph,
    units,
)


class TestPrioritizedVoronoi:
    """Test Vor(G, S)."""

    def test_path_priority(self):
        """A vertex tied between two sites goes to the earlier site."""
        diagram = prioritized_voronoi(path_graph(5), SiteList((3, 1)))
        assert owners_as_sites(diagram) == [1, 1, 3, 3, 3]
        assert diagram.dist.tolist() == [1, 0, 1, 0, 1]
        assert diagram.loads.tolist() == units(3, 2)

    def test_single_site_owns_everything(self):
        """One site owns the whole graph."""
        g = star_graph(5)
        diagram = prioritized_voronoi(g, SiteList((4,)))
        assert set(owners_as_sites(diagram)) == {4}
        assert diagram.max_load == 6 * SCALE

    def test_empty_sites(self):
        """An empty site list is rejected."""
        with pytest.raises(InstanceError, match="no sites"):
            prioritized_voronoi(path_graph(3), SiteList(()))

    def test_site_owns_itself(self):
        """Every site is in its own territory."""
        g = path_graph(6)
        s = SiteList((5, 0, 2))
        diagram = prioritized_voronoi(g, s)
        for i, site in enumerate(s):
            assert int(diagram.owner[site]) == i
        assert diagram_summary(diagram) == [(5, 2 * SCALE), (0, 2 * SCALE), (2, 2 * SCALE)]

    def test_matches_naive_oracle(self, rng):
        """Owners, distances and loads agree with all-pairs distances."""
        for _ in range(40):
            g = random_connected(rng.randint(2, 40), rng, extra=0.08)
            costs, s = costs_and_sites(g, rng)
            dist = nx_distances(g)
            diagram = prioritized_voronoi(g, s, costs)
            assert diagram.owner.tolist() == naive_owner(dist, s.sites).tolist()
            assert diagram.dist.tolist() == dist[list(s)].min(axis=0).tolist()
            assert diagram.loads.tolist() == naive_loads(dist, costs, s.sites).tolist()
            assert int(diagram.loads.sum()) == costs.total

    def test_territories_connected(self, rng):
        """Every territory induces a connected subgraph."""
        for _ in range(30):
            g = random_connected(rng.randint(2, 40), rng, extra=0.1)
            _, s = costs_and_sites(g, rng)
            diagram = prioritized_voronoi(g, s)
            nxg = g.to_networkx()
            for i in range(len(s)):
                assert nx.is_connected(nxg.subgraph(diagram.territory(i).tolist()))

    def test_weighted_matches_naive_oracle(self, rng):
        """Weighted graphs use Dijkstra with the same priority rule."""
        for _ in range(20):
            base = random_connected(rng.randint(2, 30), rng, extra=0.1)
            edges = [(u, v) for u, v, _ in base.edge_list()]
            g = Graph.from_edges(base.n, edges, [rng.randint(1, 3) for _ in edges])
            costs, s = costs_and_sites(g, rng)
            dist = nx_distances(g)
            diagram = prioritized_voronoi(g, s, costs)
            assert diagram.owner.tolist() == naive_owner(dist, s.sites).tolist()


class TestWitnessLoad:
    """Test from-scratch evaluation of L(S+v)."""

    def test_two_vertices(self):
        """K2 forces the partition."""
        g = path_graph(2)
        load, breakdown = witness_load(g, CostVector.from_values([3, 5]), SiteList((0,)), 1)
        assert load == 5 * SCALE
        assert breakdown == ((0, 3 * SCALE), (1, 5 * SCALE))

    def test_star_leaf(self):
        """A new leaf site only takes itself."""
        g = star_graph(3)
        costs = CostVector.from_values([0, 5, 2, 1])
        load, _ = witness_load(g, costs, SiteList((0,)), 1)
        assert load == 5 * SCALE

    def test_site_rejected(self):
        """A site cannot be added again."""
        with pytest.raises(InstanceError):
            witness_load(path_graph(3), CostVector.unit(3), SiteList((1,)), 1)

    def test_new_site_territory(self, rng):
        """The grown territory equals the new site's cell in Vor(G, S+v)."""
        for _ in range(20):
            g = random_connected(rng.randint(2, 30), rng, extra=0.1)
            costs, s = costs_and_sites(g, rng)
            diagram = prioritized_voronoi(g, s, costs)
            for v in range(g.n):
                if v in s:
                    continue
                territory, _ = new_site_territory(g, diagram.dist, v)
                after = prioritized_voronoi(g, s.with_site(v), costs)
                assert sorted(territory) == after.territory(len(s)).tolist()
                own, rest = insertion_loads(g, costs, diagram, v)
                assert own == int(after.loads[-1])
                assert rest.tolist() == after.loads[:-1].tolist()


class TestBruteForce:
    """Test the quadratic oracle solver."""

    def test_k4(self):
        """K4 with the heaviest non-site picked."""
        g = Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
        result = brute_force_balanced_vertex(g, CostVector.from_values([5, 1, 2, 3]), SiteList((0,)))
        assert result.best_vertex == 3
        assert result.best_load == 8 * SCALE

    def test_star(self):
        """Star with a zero-cost center."""
        g = star_graph(3)
        result = brute_force_balanced_vertex(g, CostVector.from_values([0, 5, 2, 1]), SiteList((0,)))
        assert result.best_vertex == 1
        assert result.best_load == 5 * SCALE

    def test_single_candidate(self):
        """With one non-site vertex it is the answer."""
        result = brute_force_balanced_vertex(path_graph(3), CostVector.unit(3), SiteList((0, 2)))
        assert result.best_vertex == 1

    def test_no_candidate(self):
        """Every vertex being a site is an error."""
        with pytest.raises(InstanceError, match="no candidate vertex"):
            brute_force_balanced_vertex(path_graph(2), CostVector.unit(2), SiteList((0, 1)))

    def test_best_load_is_minimum_witness(self, rng):
        """The optimum is the minimum witness load, smallest id on ties."""
        for _ in range(30):
            g = random_connected(rng.randint(2, 25), rng, extra=0.1)
            costs, s = costs_and_sites(g, rng, high=5)
            result = brute_force_balanced_vertex(g, costs, s)
            loads = {v: witness_load(g, costs, s, v)[0] for v in range(g.n) if v not in s}
            best = min(loads.values())
            assert result.best_load == best
            assert result.best_vertex == min(v for v, x in loads.items() if x == best)
            assert max(x for _, x in result.site_loads) == result.best_load
            assert result.site_loads[-1][0] == result.best_vertex

    def test_scores_mark_sites(self):
        """Sites never win."""
        scores = brute_force_scores(path_graph(4), CostVector.unit(4), SiteList((1,)))
        assert int(scores[1]) == np.iinfo(np.int64).max

    @pytest.mark.slow
    def test_large_sweep(self, rng):
        """A thousand graphs up to 60 vertices: diagrams and scores from scratch."""
        for _ in range(1000):
            g = random_connected(rng.randint(2, 60), rng, extra=rng.choice([0.02, 0.1, 0.4]))
            costs, s = costs_and_sites(g, rng)
            dist = nx_distances(g)
            diagram = prioritized_voronoi(g, s, costs)
            assert diagram.owner.tolist() == naive_owner(dist, s.sites).tolist()
            scores = brute_force_scores(g, costs, s)
            for v in range(g.n):
                if v not in s:
                    assert int(scores[v]) == witness_load(g, costs, s, v)[0]

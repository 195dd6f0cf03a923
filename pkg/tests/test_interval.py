"""Tests for proper interval recognition, σ orderings and the layer sweeps."""

from unittest.mock import patch

import numpy as np
import pytest

from bvx.config import get_settings
from bvx.generators import random_clique, random_cycle, random_proper_interval
from bvx.graph import CostVector, SiteList
from bvx.interval import (
    RecognitionError,
    SigmaOrdering,
    SigmaValidationError,
    SweepInvariantError,
    _check_backward,
    lex_bfs,
    proper_interval_scores,
    recognize_proper_interval,
    sigma_ordering,
    solve_proper_interval,
    validate_sigma,
)
from bvx.structures import FenwickTree
from bvx.voronoi import brute_force_balanced_vertex, brute_force_scores, prioritized_voronoi

from .helpers import costs_and_sites, nx_distances, path_graph, star_graph


def _is_umbrella(g, order):
    pos = {v: p for p, v in enumerate(order)}
    for v in range(g.n):
        spots = sorted([pos[v]] + [pos[w] for w in g.neighbors(v)])
        if spots[-1] - spots[0] + 1 != len(spots):
            return False
    return True


class TestLexBFS:
    """Test lexicographic BFS."""

    def test_visits_everything_once(self, rng):
        """The result is a permutation starting at the first tie-break vertex."""
        g = random_proper_interval(30, rng)
        initial = list(range(30))
        rng.shuffle(initial)
        order = lex_bfs(g, initial)
        assert sorted(order) == list(range(30))
        assert order[0] == initial[0]

    def test_path(self):
        """On a path LexBFS from an end walks the path."""
        assert lex_bfs(path_graph(5), [0, 1, 2, 3, 4]) == [0, 1, 2, 3, 4]


class TestRecognition:
    """Test umbrella-order recognition."""

    def test_random_proper_interval(self, rng):
        """Unit interval graphs are recognized with a valid umbrella order."""
        for _ in range(30):
            g = random_proper_interval(rng.randint(1, 40), rng, max_gap=rng.choice([0, 300, 700]))
            order = recognize_proper_interval(g)
            assert _is_umbrella(g, order.order.tolist())
            assert (np.diff(order.lo) >= 0).all() and (np.diff(order.hi) >= 0).all()

    def test_claw_rejected(self):
        """K_{1,3} is not a proper interval graph."""
        with pytest.raises(RecognitionError) as info:
            recognize_proper_interval(star_graph(3))
        assert info.value.triple is not None
        assert len(set(info.value.triple)) == 3

    def test_four_cycle_rejected(self):
        """C4 is not even chordal."""
        with pytest.raises(RecognitionError) as info:
            recognize_proper_interval(random_cycle(4))
        i, j, k = info.value.triple
        assert random_cycle(4).has_edge(i, k)


class TestSigma:
    """Test σ orderings and their validation."""

    def test_formula_matches_bfs(self, rng):
        """Predicted distances equal networkx distances from every source."""
        for _ in range(20):
            g = random_proper_interval(rng.randint(1, 50), rng, max_gap=rng.choice([300, 600, 900]))
            sig = sigma_ordering(g, recognize_proper_interval(g), validate=False)
            dist = nx_distances(g)
            for u in range(g.n):
                assert sig.expected_distances(u).tolist() == dist[u].tolist()

    @pytest.mark.slow
    def test_formula_sweep(self, rng):
        """Two hundred graphs up to 300 vertices, every source checked."""
        for _ in range(200):
            g = random_proper_interval(rng.randint(1, 300), rng, max_gap=rng.randint(0, 999))
            sig = sigma_ordering(g, recognize_proper_interval(g), validate=False)
            dist = nx_distances(g)
            for u in range(g.n):
                assert sig.expected_distances(u).tolist() == dist[u].tolist()

    def test_validation_samples_large_graphs(self, rng):
        """Beyond the full-check size only a sample of sources is used."""
        g = random_proper_interval(60, rng)
        sig = sigma_ordering(g, recognize_proper_interval(g), validate=False)
        assert validate_sigma(g, sig, full_check_n=10, samples=7) == 7
        assert validate_sigma(g, sig, full_check_n=100) == 60

    def test_bad_sigma_rejected(self):
        """A σ that predicts a detour on a path is caught."""
        sig = SigmaOrdering(layer=np.array([0, 1, 2]), sigma=np.array([0, 1, 2]))
        with pytest.raises(SigmaValidationError):
            validate_sigma(path_graph(3), sig, full_check_n=10)


class TestProperIntervalSolver:
    """Test the sweep solver against the brute-force oracle."""

    def test_matches_brute_force(self, rng):
        """Random unit interval graphs, with invariant checks on."""
        for _ in range(60):
            g = random_proper_interval(rng.randint(2, 45), rng, max_gap=rng.choice([200, 500, 800]))
            costs, s = costs_and_sites(g, rng, high=rng.choice([3, 100]))
            assert (
                proper_interval_scores(g, costs, s, check=True).tolist()
                == brute_force_scores(g, costs, s).tolist()
            )

    def test_debug_setting_checks_both_sweeps(self, rng):
        """BVX_DEBUG_CHECKS turns on the forward and backward invariant checks."""
        g = random_proper_interval(20, rng)
        costs, s = costs_and_sites(g, rng)
        with patch.dict("os.environ", {"BVX_DEBUG_CHECKS": "1"}):
            get_settings.cache_clear()
            with patch("bvx.interval._check_forward") as forward, patch(
                "bvx.interval._check_backward"
            ) as backward:
                proper_interval_scores(g, costs, s)
        assert forward.call_count > 0
        assert backward.call_count > 0

    def test_backward_check_rejects_stale_counter(self, rng):
        """A counter holding more than the whole cost is caught."""
        g = random_proper_interval(15, rng)
        costs, s = costs_and_sites(g, rng)
        sig = sigma_ordering(g, recognize_proper_interval(g))
        diagram = prioritized_voronoi(g, s, costs)
        with pytest.raises(SweepInvariantError, match="backward counter"):
            _check_backward(
                0, costs.total + 1, FenwickTree(g.n), sig.layer, diagram.dist, sig.sigma, costs.values
            )

    def test_clique(self):
        """A clique is a proper interval graph."""
        g = random_clique(5)
        costs = CostVector.from_values([5, 1, 2, 3, 0])
        result = solve_proper_interval(g, costs, SiteList((0,)))
        oracle = brute_force_balanced_vertex(g, costs, SiteList((0,)))
        assert (result.best_vertex, result.best_load) == (oracle.best_vertex, oracle.best_load)
        assert result.algorithm == "proper-interval"

    def test_reuses_given_order(self, rng):
        """A previously recognized order is accepted as is."""
        g = random_proper_interval(25, rng)
        costs, s = costs_and_sites(g, rng)
        order = recognize_proper_interval(g)
        result = solve_proper_interval(g, costs, s, order=order)
        assert result.best_load == brute_force_balanced_vertex(g, costs, s).best_load

    def test_rejects_claw(self):
        """Non-members are refused."""
        with pytest.raises(RecognitionError):
            solve_proper_interval(star_graph(3), CostVector.unit(4), SiteList((0,)))

    @pytest.mark.slow
    def test_large_sweep(self, rng):
        """A thousand random instances agree with the oracle."""
        for _ in range(1000):
            g = random_proper_interval(rng.randint(2, 60), rng, max_gap=rng.randint(0, 999))
            costs, s = costs_and_sites(g, rng)
            assert (
                proper_interval_scores(g, costs, s).tolist()
                == brute_force_scores(g, costs, s).tolist()
            )

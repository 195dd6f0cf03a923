"""Tests for the Hitting Set reductions and the hardness graph."""

import itertools
import math

import pytest

from bvx.graph import SCALE, InstanceError
from bvx.hardness import (
    HSInstance,
    brute_force_hitting_set,
    build_hardness_graph,
    random_hs_instance,
    reduce_cardinality,
    reduce_halving,
    set_size,
)
from bvx.voronoi import brute_force_balanced_vertex, witness_load


def _yes_instance():
    return HSInstance.of(["1", "2", "3"], [["1"], ["2", "3"]], [["2"], ["3", "1"]])


def _no_instance():
    return HSInstance.of(["1", "2", "3"], [["1"], ["2"]], [["2"], ["1"]])


class TestHSInstance:
    """Test instances and the brute-force answer."""

    def test_stray_element(self):
        """Sets may only use universe elements."""
        with pytest.raises(InstanceError, match="outside the universe"):
            HSInstance.of(["1"], [["1", "2"]], [["1"]])

    def test_duplicate_universe(self):
        """Universe elements are distinct."""
        with pytest.raises(InstanceError):
            HSInstance.of(["1", "1"], [["1"]], [["1"]])

    def test_brute_force(self):
        """A hitting set is found exactly when one exists."""
        found, witness = brute_force_hitting_set(_yes_instance())
        assert found and witness == frozenset({"2", "3"})
        assert brute_force_hitting_set(_no_instance()) == (False, None)


class TestReductions:
    """Test the normalizing reductions."""

    def test_halving_structure(self, rng):
        """Each B-set meets exactly half of the B-sets."""
        for _ in range(20):
            inst = random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 4))
            halved = reduce_halving(inst)
            assert len(halved.a) == 2 * len(inst.a)
            assert len(halved.b) == 2 * len(inst.b)
            for b in halved.b:
                assert sum(1 for other in halved.b if b & other) == len(inst.b)

    def test_cardinality_structure(self, rng):
        """A-sets share one size t and |U| = alpha*t + beta."""
        for alpha, beta in ((2, -1), (3, 2), (2, 5)):
            for _ in range(15):
                inst = random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 6))
                padded = reduce_cardinality(inst, alpha, beta)
                t = set_size(padded)
                assert len(padded.universe) == alpha * t + beta

    def test_reductions_preserve_answer(self, rng):
        """Both reductions keep the yes/no answer."""
        for _ in range(60):
            inst = random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 4), rng.random())
            expected = brute_force_hitting_set(inst)[0]
            assert brute_force_hitting_set(reduce_halving(inst))[0] == expected
            assert brute_force_hitting_set(reduce_cardinality(inst, 2, -1))[0] == expected

    @pytest.mark.slow
    @pytest.mark.parametrize("size", [1, 2, 3, 4])
    def test_reductions_preserve_answer_exhaustively(self, size):
        """Every pair of lists of up to four distinct sets over a small universe."""
        universe = [str(e) for e in range(size)]
        subsets = [
            frozenset(c)
            for r in range(1, size + 1)
            for c in itertools.combinations(universe, r)
        ]
        lists = [
            combo
            for count in range(1, min(4, len(subsets)) + 1)
            for combo in itertools.combinations(subsets, count)
        ]
        for a, b in itertools.product(lists, repeat=2):
            inst = HSInstance(universe=tuple(universe), a=a, b=b)
            expected = brute_force_hitting_set(inst)[0]
            assert brute_force_hitting_set(reduce_halving(inst))[0] == expected
            assert brute_force_hitting_set(reduce_cardinality(inst, 2, -1))[0] == expected

    def test_cardinality_rejects_small_alpha(self):
        """alpha must be at least 2."""
        with pytest.raises(InstanceError):
            reduce_cardinality(_yes_instance(), 1, 0)

    def test_cardinality_rejects_empty_a(self):
        """Set sizes cannot be equalized without sets."""
        with pytest.raises(InstanceError):
            reduce_cardinality(HSInstance.of(["1"], [], [["1"]]), 2, 0)

    def test_set_size_requires_equal_sizes(self):
        """Differing A-set sizes have no common t."""
        with pytest.raises(InstanceError):
            set_size(_yes_instance())


class TestHardnessGraph:
    """Test the encoded Balanced Vertex instance."""

    def test_layout(self, rng):
        """|V| = 2(n + t + 1) with s, x and y first."""
        for _ in range(10):
            hg = build_hardness_graph(random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 3)))
            assert hg.graph.n == 2 * (hg.n + hg.t + 1)
            assert hg.labels[:3] == ("s", "x", "y")
            assert len(hg.vertices("u#")) == 2 * hg.t - 1
            assert len(hg.vertices("a#")) == hg.n
            assert len(hg.vertices("b#")) == hg.n
            assert tuple(hg.sites) == (0,)
            assert hg.threshold_fixed == (hg.n + hg.t + 1) * SCALE

    def test_reference_loads(self, rng):
        """L(S_x) = n + 2t, L(S_y) = 2(n + t), and U never beats n + 2t - 1."""
        for _ in range(50):
            hg = build_hardness_graph(random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 3)))
            x_load, _ = witness_load(hg.graph, hg.costs, hg.sites, hg.X_VERTEX)
            y_load, _ = witness_load(hg.graph, hg.costs, hg.sites, hg.Y_VERTEX)
            assert x_load == (hg.n + 2 * hg.t) * SCALE
            assert y_load == 2 * (hg.n + hg.t) * SCALE
            for u in hg.vertices("u#"):
                load, _ = witness_load(hg.graph, hg.costs, hg.sites, u)
                assert load >= (hg.n + 2 * hg.t - 1) * SCALE

    @pytest.mark.parametrize("sets", [4, 16, 64, 256])
    def test_edges_near_linear(self, rng, sets):
        """With |U| about log2 of the set count, m stays within 8 |V| log2 |V|."""
        universe = max(1, math.ceil(math.log2(sets)))
        hg = build_hardness_graph(random_hs_instance(rng, sets, universe))
        size = hg.graph.n
        assert hg.graph.m <= 8 * size * math.log2(size)

    def test_b_vertices_leave_s_heavy(self, rng):
        """A B-set vertex leaves s all of A, x, y and half of B: load >= 3n/2 + 3."""
        for _ in range(20):
            hg = build_hardness_graph(random_hs_instance(rng, rng.randint(1, 4), rng.randint(1, 3)))
            for b in hg.vertices("b#"):
                load, breakdown = witness_load(hg.graph, hg.costs, hg.sites, b)
                assert 2 * breakdown[0][1] >= (3 * hg.n + 6) * SCALE
                assert load >= breakdown[0][1]

    def test_rejects_empty_lists(self):
        """Both lists must be nonempty."""
        with pytest.raises(InstanceError):
            build_hardness_graph(HSInstance.of(["1"], [], [["1"]]))

    @pytest.mark.parametrize("inst,answer", [(_yes_instance(), True), (_no_instance(), False)])
    def test_fixed_examples(self, inst, answer):
        """The threshold separates the yes and no examples."""
        hg = build_hardness_graph(inst)
        result = brute_force_balanced_vertex(hg.graph, hg.costs, hg.sites)
        if hg.thresholds_valid:
            assert (result.best_load <= hg.threshold_fixed) == answer
        if answer:
            assert result.best_load <= hg.threshold_fixed

    def test_equivalence_when_valid(self, rng):
        """With valid thresholds the optimum decides the HS instance."""
        checked = 0
        for _ in range(25):
            inst = random_hs_instance(rng, rng.randint(4, 5), 2, rng.random())
            hg = build_hardness_graph(inst)
            if not hg.thresholds_valid:
                continue
            checked += 1
            found = brute_force_hitting_set(inst)[0]
            result = brute_force_balanced_vertex(hg.graph, hg.costs, hg.sites)
            assert (result.best_load <= hg.threshold_fixed) == found
            if found:
                assert hg.labels[result.best_vertex].startswith("a#")
        assert checked > 0

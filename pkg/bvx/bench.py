"""Wall-time ladders over generated instances for every solver."""

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .config import get_settings
from .dispatch import ProblemInstance, run_solver
from .generators import (
    random_costs,
    random_cycle,
    random_partial_ktree,
    random_proper_interval,
    random_sites,
    random_tree,
)
from .graph import Graph, InstanceError, format_fixed
from .hardness import build_hardness_graph, random_hs_instance
from .schemas import BenchRow
from .treewidth import TreeDecomposition

logger = logging.getLogger(__name__)

Builder = Callable[[int, random.Random], ProblemInstance]

LARGE_LADDER = tuple(1 << k for k in range(14, 19))
BRUTE_LADDER = (1 << 11, 1 << 12, 1 << 13)


@dataclass(frozen=True)
class BenchSuite:
    """
    A family of generated instances, the size ladder and the solvers to time.

    ``brute_sizes`` is the shorter ladder the brute-force solver runs on when
    no override is given; empty means it shares ``sizes``.
    """

    name: str
    build: Builder
    sizes: Tuple[int, ...]
    solvers: Tuple[str, ...]
    brute_sizes: Tuple[int, ...] = ()

    def ladder(self, solver: str) -> Tuple[int, ...]:
        if solver == "brute" and self.brute_sizes:
            return self.brute_sizes
        return self.sizes


def _with_costs(
    g: Graph, rng: random.Random, p: int, td: Optional[TreeDecomposition] = None
) -> ProblemInstance:
    return ProblemInstance(
        graph=g,
        costs=random_costs(g.n, rng, high=100),
        sites=random_sites(g.n, min(p, g.n - 1), rng),
        td=td,
    )


def _tree(n: int, rng: random.Random) -> ProblemInstance:
    return _with_costs(random_tree(n, rng), rng, max(1, n // 256))


def _cycle(n: int, rng: random.Random) -> ProblemInstance:
    return _with_costs(random_cycle(n, rng), rng, max(1, n // 256))


def _proper_interval(n: int, rng: random.Random) -> ProblemInstance:
    return _with_costs(random_proper_interval(n, rng), rng, max(1, n // 256))


def _partial_ktree(n: int, rng: random.Random) -> ProblemInstance:
    g, td = random_partial_ktree(n, 2, rng)
    return _with_costs(g, rng, 3, td)


def _hardness(n: int, rng: random.Random) -> ProblemInstance:
    """``n`` is the number of sets per list before the reductions."""
    universe = max(2, n.bit_length())
    hg = build_hardness_graph(random_hs_instance(rng, n, universe))
    return ProblemInstance(graph=hg.graph, costs=hg.costs, sites=hg.sites)


SUITES: Dict[str, BenchSuite] = {
    "tree": BenchSuite("tree", _tree, LARGE_LADDER, ("tree", "brute"), BRUTE_LADDER),
    "cycle": BenchSuite("cycle", _cycle, LARGE_LADDER, ("cycle", "brute"), BRUTE_LADDER),
    "proper-interval": BenchSuite(
        "proper-interval",
        _proper_interval,
        LARGE_LADDER,
        ("proper-interval", "brute"),
        BRUTE_LADDER,
    ),
    "partial-ktree": BenchSuite(
        "partial-ktree", _partial_ktree, (1 << 8, 1 << 9, 1 << 10), ("treewidth", "brute")
    ),
    "hardness": BenchSuite("hardness", _hardness, (8, 16, 32, 64), ("brute",)),
}


def _time_case(suite: BenchSuite, solver: str, n: int, seed: int) -> BenchRow:
    inst = suite.build(n, random.Random(seed))
    start = time.perf_counter()
    result = run_solver(inst, solver)
    seconds = time.perf_counter() - start
    row = BenchRow(
        suite=suite.name,
        solver=solver,
        n=inst.graph.n,
        m=inst.graph.m,
        sites=len(inst.sites),
        seconds=seconds,
        best_load=format_fixed(result.best_load),
    )
    logger.info(f"bench {suite.name}/{solver}: n={row.n} m={row.m} {seconds:.4f}s")
    return row


def _with_ratios(rows: List[BenchRow]) -> List[BenchRow]:
    """Fill each row's ratio against the previous rung of the same suite and solver."""
    last: Dict[Tuple[str, str], float] = {}
    out = []
    for row in rows:
        key = (row.suite, row.solver)
        prev = last.get(key)
        ratio = row.seconds / prev if prev else None
        out.append(row.model_copy(update={"ratio": ratio}))
        last[key] = row.seconds
    return out


def bench_command(
    suites: Sequence[str],
    sizes: Optional[Sequence[int]] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    brute_max_n: int = 1 << 13,
) -> List[BenchRow]:
    """
    Time every solver of every named suite along its size ladder.

    Args:
        suites: Suite names from SUITES; an empty list gives an empty report
        sizes: Ladder override applied to every suite
        seed: Base seed; each rung draws its instance from seed + rung index
        workers: Thread count (settings default); each solve stays single-threaded
        brute_max_n: Largest generated size the brute-force solver is timed on

    Returns:
        Rows in suite, solver and size order with ratios filled in

    Raises:
        InstanceError: On an unknown suite name
    """
    unknown = [name for name in suites if name not in SUITES]
    if unknown:
        raise InstanceError(f"Unknown bench suite(s) {unknown}; choose from {sorted(SUITES)}")
    if workers is None:
        workers = get_settings().bench_workers

    cases = []
    for name in suites:
        suite = SUITES[name]
        for solver in suite.solvers:
            ladder = tuple(sizes) if sizes else suite.ladder(solver)
            for k, n in enumerate(ladder):
                if solver == "brute" and suite.name != "hardness" and n > brute_max_n:
                    continue
                cases.append((suite, solver, n, seed + k))
    if not cases:
        return []

    logger.info(f"Running {len(cases)} bench cases on {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda case: _time_case(*case), cases))
    return _with_ratios(rows)

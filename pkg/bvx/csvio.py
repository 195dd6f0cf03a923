"""CSV export utilities for bench reports and site-load tables."""

import csv
import io
from typing import Iterable, List

from fastapi.responses import Response

from .schemas import BenchRow, SolveResponse

BENCH_HEADER = ["suite", "solver", "n", "m", "sites", "seconds", "ratio", "best_load"]

SITE_LOAD_HEADER = ["priority", "site", "load", "new_site", "best_vertex", "best_load", "algorithm"]


def bench_csv(rows: Iterable[BenchRow]) -> str:
    """
    Render bench rows with a fixed header.

    Args:
        rows: Timed runs in ladder order

    Returns:
        CSV text, header only for an empty report
    """
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow([
            row.suite,
            row.solver,
            row.n,
            row.m,
            row.sites,
            f"{row.seconds:.6f}",
            "" if row.ratio is None else f"{row.ratio:.3f}",
            row.best_load,
        ])
    return output.getvalue()


def site_load_rows(result: SolveResponse) -> List[List[object]]:
    """One row per site of Vor(G, S+v); the new site comes last."""
    last = len(result.site_loads) - 1
    return [
        [
            i + 1,
            entry.site,
            entry.load,
            int(i == last),
            result.best_vertex,
            result.best_load,
            result.algorithm,
        ]
        for i, entry in enumerate(result.site_loads)
    ]


def site_load_csv(result: SolveResponse) -> str:
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(SITE_LOAD_HEADER)
    writer.writerows(site_load_rows(result))
    return output.getvalue()


def create_csv_response(result: SolveResponse) -> Response:
    """
    Create a FastAPI Response object for CSV download.

    Args:
        result: Solve result to tabulate

    Returns:
        FastAPI Response with CSV content
    """
    return Response(
        content=site_load_csv(result),
        media_type="text/csv; charset=utf-8",
        headers={
            "Content-Disposition": "attachment; filename=\"site_loads.csv\""
        },
    )

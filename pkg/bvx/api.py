"""FastAPI application exposing the solvers over HTTP."""

import logging
from typing import Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import __version__
from .config import configure_logging
from .csvio import create_csv_response
from .dispatch import ProblemInstance, instance_from_request, solve_command, voronoi_command
from .fileio import ParseError, parse_graph, parse_sites
from .graph import InstanceError, PreconditionError
from .schemas import ALGORITHMS, SolveRequest, SolveResponse, VersionResponse, VoronoiResponse

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Balanced Vertex API",
    description="Prioritized graph Voronoi diagrams and Balanced Vertex solvers",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _http_error(e: Exception) -> HTTPException:
    """InstanceError is the caller's input (400); PreconditionError is the graph's class (422)."""
    if isinstance(e, PreconditionError):
        logger.warning(f"Precondition failed: {e}")
        return HTTPException(status_code=422, detail=str(e))
    logger.warning(f"Invalid instance: {e}")
    return HTTPException(status_code=400, detail=str(e))


def _solve(inst: ProblemInstance, request_algorithm: str, assume_diam2: bool) -> SolveResponse:
    try:
        return solve_command(inst, request_algorithm, assume_diam2)
    except (InstanceError, PreconditionError) as e:
        raise _http_error(e) from e


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"ok": True}


@app.get("/version", response_model=VersionResponse)
async def get_version():
    """Version information endpoint."""
    return VersionResponse(version=__version__)


def _instance(request: SolveRequest) -> ProblemInstance:
    try:
        return instance_from_request(request)
    except InstanceError as e:
        raise _http_error(e) from e


@app.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest):
    """
    Solve Balanced Vertex for a JSON instance.

    Args:
        request: Graph, costs, sites and algorithm

    Returns:
        Certified SolveResponse
    """
    inst = _instance(request)
    return _solve(inst, request.algorithm, request.assume_diam2)


@app.post("/solve.csv")
def solve_csv(request: SolveRequest) -> Response:
    """Same as /solve, rendered as a per-site load table."""
    inst = _instance(request)
    return create_csv_response(_solve(inst, request.algorithm, request.assume_diam2))


@app.post("/solve/upload", response_model=SolveResponse)
async def solve_upload(
    graph: UploadFile = File(..., description="Graph file in the p/e/c/s format"),
    algorithm: str = Form("auto"),
    sites: Optional[str] = Form(None, description="Site list overriding the file's 's' line"),
    assume_diam2: bool = Form(False),
):
    """Solve Balanced Vertex for an uploaded graph file."""
    if algorithm not in ALGORITHMS:
        raise HTTPException(status_code=400, detail=f"Unknown algorithm {algorithm!r}")
    try:
        text = (await graph.read()).decode("utf-8")
    except UnicodeDecodeError as e:
        raise HTTPException(
            status_code=400, detail=f"{graph.filename}: not valid UTF-8 (byte {e.start})"
        ) from e
    try:
        parsed = parse_graph(text.splitlines())
        site_list = parse_sites(sites, parsed.graph.n) if sites is not None else parsed.sites
        if site_list is None or len(site_list) == 0:
            raise InstanceError("no sites")
        inst = ProblemInstance(
            graph=parsed.graph,
            costs=parsed.costs,
            sites=site_list,
            declared=algorithm,
            labels=parsed.labels,
        )
    except ParseError as e:
        raise HTTPException(status_code=400, detail=f"{graph.filename}: {e}") from e
    except InstanceError as e:
        raise _http_error(e) from e
    logger.info(f"Upload {graph.filename}: n={inst.graph.n}, m={inst.graph.m}")
    return _solve(inst, algorithm, assume_diam2)


@app.post("/voronoi", response_model=VoronoiResponse)
def voronoi(request: SolveRequest):
    """Prioritized Voronoi diagram of a JSON instance."""
    inst = _instance(request)
    try:
        return voronoi_command(inst)
    except InstanceError as e:
        raise _http_error(e) from e

"""Pydantic schemas for command output, HTTP bodies and HS instance files."""

from typing import Any, List, Literal, Optional, Tuple, Union, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Algorithm = Literal[
    "auto",
    "brute",
    "clique",
    "diam2",
    "path",
    "cycle",
    "tree",
    "treewidth",
    "proper-interval",
]

ALGORITHMS: Tuple[str, ...] = get_args(Algorithm)


class SiteLoad(BaseModel):
    """Load of one site, as a decimal string."""
    site: int
    load: str


class SolveResponse(BaseModel):
    """Result of `bvx solve` and POST /solve."""

    best_vertex: int = Field(..., description="Optimal new site (smallest id on ties)")
    best_load: str = Field(..., description="L(S+v) as a decimal string")
    site_loads: List[SiteLoad] = Field(..., description="Loads of Vor(G, S+v), new site last")
    certified: bool = Field(..., description="Whether an independent evaluation agrees")
    algorithm: str
    wall_ms: float = Field(..., ge=0)


class VoronoiResponse(BaseModel):
    """Prioritized Voronoi diagram of an instance."""

    sites: List[int]
    owner: List[int] = Field(..., description="Owning site vertex per vertex")
    dist: List[int] = Field(..., description="Distance to the closest site per vertex")
    loads: List[SiteLoad]
    max_load: str
    total_cost: str


class CheckResult(BaseModel):
    """Outcome of one invariant check."""
    name: str
    passed: bool
    detail: Optional[str] = None


class ValidationReport(BaseModel):
    """Output of `bvx validate`."""

    n: int
    m: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class BenchRow(BaseModel):
    """One timed solver run of a bench ladder."""

    suite: str
    solver: str
    n: int
    m: int
    sites: int
    seconds: float
    ratio: Optional[float] = Field(None, description="Time relative to the previous rung")
    best_load: str


class SolveRequest(BaseModel):
    """Request body for POST /solve, /solve.csv and /voronoi."""

    n: int = Field(..., ge=1, description="Vertex count")
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    weights: Optional[List[int]] = Field(None, description="Positive length per edge")
    costs: Optional[List[Union[str, int, float]]] = Field(None, description="Decimal cost per vertex (default 1)")
    sites: List[int] = Field(..., min_length=1)
    algorithm: Algorithm = "auto"
    assume_diam2: bool = False
    bags: Optional[List[List[int]]] = Field(None, description="Tree decomposition bags")
    bag_edges: Optional[List[Tuple[int, int]]] = Field(None, description="Bag tree edges (0-indexed bags)")

    @field_validator("costs")
    @classmethod
    def validate_costs(cls, v: Optional[List[Union[str, int, float]]]) -> Optional[List[str]]:
        """Keep costs as strings so the fixed-point parser sees the exact decimal."""
        if v is None:
            return v
        return [str(c) for c in v]

    @model_validator(mode="after")
    def validate_lengths(self) -> "SolveRequest":
        if self.weights is not None and len(self.weights) != len(self.edges):
            raise ValueError("weights must have one entry per edge")
        if self.costs is not None and len(self.costs) != self.n:
            raise ValueError("costs must have one entry per vertex")
        if (self.bags is None) != (self.bag_edges is None):
            raise ValueError("bags and bag_edges must be given together")
        return self


class HSInstanceModel(BaseModel):
    """HS instance file: {"universe": [...], "A": [[...], ...], "B": [[...], ...]}."""

    model_config = ConfigDict(populate_by_name=True)

    universe: List[str]
    a: List[List[str]] = Field(..., alias="A")
    b: List[List[str]] = Field(..., alias="B")

    @field_validator("universe", mode="before")
    @classmethod
    def stringify_universe(cls, v: Any) -> Any:
        if isinstance(v, list):
            return [str(e) for e in v]
        return v

    @field_validator("a", "b", mode="before")
    @classmethod
    def stringify_sets(cls, v: Any) -> Any:
        if isinstance(v, list):
            return [[str(e) for e in s] if isinstance(s, list) else s for s in v]
        return v


class VersionResponse(BaseModel):
    """Version information response."""
    version: str
    api_version: str = "v1"
    algorithms: List[str] = Field(default_factory=lambda: list(ALGORITHMS))

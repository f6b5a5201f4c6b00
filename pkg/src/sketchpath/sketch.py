"""Bounded-turn patches, coresets and the reduced obstacle set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidEpsilon, NonConvexObstacle
from .geometry import ConvexPolygon, PolygonalDomain, SimplePolygon

__all__ = [
    "Mode",
    "EpsilonParams",
    "make_params",
    "Patch",
    "Coreset",
    "Corepolygon",
    "Sketch",
    "exterior_turns",
    "greedy_patch_runs",
    "partition_patches",
    "coreset_of",
    "build_sketch",
]

# below 7 cones the cone construction loses its stretch argument
MIN_CONES = 7


class Mode(str, Enum):
    SINGLE_SHOT = "single_shot"
    TWO_POINT_QUERY = "two_point_query"


@dataclass(frozen=True)
class EpsilonParams:
    eps: float
    mode: Mode
    eps_prime: float
    patch_angle: float
    cone_angle: float
    cone_count: int


def make_params(eps: float, mode: Mode | str = Mode.SINGLE_SHOT) -> EpsilonParams:
    mode = Mode(mode)
    if not (isinstance(eps, (int, float)) and math.isfinite(eps) and eps > 0):
        raise InvalidEpsilon(f"eps must be a positive finite number, got {eps!r}")
    eps = float(eps)
    if mode is Mode.SINGLE_SHOT:
        eps_prime = math.sqrt(1.0 + eps) - 1.0
    else:
        eps_prime = ((2.0 + eps) / 2.0) ** (1.0 / 3.0) - 1.0
    angle = math.sqrt(eps_prime)
    # the small guard keeps exact multiples (2pi/angle = 20) from rounding up
    count = max(MIN_CONES, math.ceil(2 * math.pi / angle - 1e-9))
    return EpsilonParams(eps, mode, eps_prime, angle, angle, count)


@dataclass(frozen=True)
class Patch:
    obstacle_id: int
    edge_range: tuple[int, ...]
    subtended_angle: float

    @property
    def first_vertex(self) -> int:
        return self.edge_range[0]

    def last_vertex(self, n: int) -> int:
        return (self.edge_range[-1] + 1) % n


@dataclass(frozen=True)
class Coreset:
    obstacle_id: int
    vertex_indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertex_indices)


@dataclass(frozen=True)
class Corepolygon:
    obstacle_id: int
    polygon: SimplePolygon
    # index into the original obstacle for each corepolygon vertex
    original_indices: tuple[int, ...]


@dataclass
class Sketch:
    params: EpsilonParams
    domain: PolygonalDomain
    corepolygons: list[Corepolygon]
    coresets: list[Coreset]
    coreset_to_original: dict[tuple[int, int], int]
    patches: list[list[Patch]] = field(default_factory=list)
    # per obstacle, extra corridor-path shortcuts between coreset vertices
    corridor_paths: list = field(default_factory=list)
    _reduced: PolygonalDomain | None = field(default=None, repr=False)

    @property
    def reduced_domain(self) -> PolygonalDomain:
        """The corepolygons as a domain of their own."""
        if self._reduced is None:
            self._reduced = PolygonalDomain(
                [c.polygon for c in self.corepolygons], self.domain.bounding_rect
            )
        return self._reduced

    @property
    def total_coreset_size(self) -> int:
        return sum(len(c) for c in self.coresets)


def exterior_turns(coords: np.ndarray, closed: bool = True) -> np.ndarray:
    """Signed turn angle at each vertex (left turns positive).

    For an open chain the two end vertices get zero.
    """
    d_in = coords - np.roll(coords, 1, axis=0)
    d_out = np.roll(coords, -1, axis=0) - coords
    cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
    dot = (d_in * d_out).sum(axis=1)
    turns = np.arctan2(cross, dot)
    if not closed:
        turns[0] = 0.0
        turns[-1] = 0.0
    return turns


def greedy_patch_runs(end_turns: Sequence[float], angle: float) -> list[tuple[int, int, float]]:
    """Split edges 0..m-1 into maximal runs greedily.

    ``end_turns[i]`` is the absolute turn at the far end of edge i. A run
    e_j..e_k accumulates the turns at the ends of all its edges; a single
    edge is always accepted. Returns (first edge, last edge, angle) triples.
    """
    runs = []
    m = len(end_turns)
    j = 0
    while j < m:
        acc = float(end_turns[j])
        k = j
        while k + 1 < m and acc + end_turns[k + 1] <= angle:
            k += 1
            acc += float(end_turns[k])
        runs.append((j, k, acc))
        j = k + 1
    return runs


def partition_patches(poly: ConvexPolygon, params: EpsilonParams, obstacle_id: int = 0) -> list[Patch]:
    n = poly.n
    turns = np.abs(exterior_turns(poly.coords))
    # the far end of edge i is vertex i+1
    end_turns = np.roll(turns, -1)
    return [
        Patch(obstacle_id, tuple(range(j, k + 1)), acc)
        for j, k, acc in greedy_patch_runs(end_turns, params.patch_angle)
    ]


def coreset_of(poly: SimplePolygon, patches: list[Patch], obstacle_id: int | None = None) -> Coreset:
    n = poly.n
    if obstacle_id is None:
        obstacle_id = patches[0].obstacle_id if patches else 0
    if n < 2 * len(patches):
        return Coreset(obstacle_id, tuple(range(n)))
    idx = set()
    for p in patches:
        idx.add(p.first_vertex % n)
        idx.add(p.last_vertex(n))
    return Coreset(obstacle_id, tuple(sorted(idx)))


def build_sketch(domain: PolygonalDomain, params: EpsilonParams) -> Sketch:
    corepolys: list[Corepolygon] = []
    coresets: list[Coreset] = []
    mapping: dict[tuple[int, int], int] = {}
    all_patches: list[list[Patch]] = []
    for i, obs in enumerate(domain.obstacles):
        if not isinstance(obs, ConvexPolygon) and not obs.is_convex():
            raise NonConvexObstacle(f"obstacle {i} is not convex; use the simple-polygon pipeline")
    domain = domain.convexified()
    for i, obs in enumerate(domain.obstacles):
        patches = partition_patches(obs, params, i)
        cs = coreset_of(obs, patches, i)
        corepolys.append(_hull_of_coreset(obs, cs, i))
        coresets.append(cs)
        all_patches.append(patches)
        for k, v in enumerate(corepolys[-1].original_indices):
            mapping[(i, k)] = v
    return Sketch(params, domain, corepolys, coresets, mapping, all_patches)


def _hull_of_coreset(obs: SimplePolygon, cs: Coreset, i: int) -> Corepolygon:
    idx = cs.vertex_indices
    if len(idx) == obs.n or len(idx) < 3:
        return Corepolygon(i, obs, tuple(range(obs.n)))
    # coreset vertices of a convex polygon are already in convex position
    return Corepolygon(i, ConvexPolygon([obs.vertices[j] for j in idx], validate=False), idx)

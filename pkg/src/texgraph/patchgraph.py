"""Per-pixel patch graphs: Euclidean windows, morphological amoebas, Dijkstra trees.

Vertices are (row, col) pixel coordinates. Edge weights combine spatial
distance and intensity contrast: w(p,q) = sqrt(|p-q|^2 + beta^2 (u_p-u_q)^2).
Six graph settings are exposed through build_setting:

  GwE  weighted subgraph on the Euclidean rho-ball around the center
  GwA  weighted subgraph induced on the amoeba (path weight <= rho)
  TwE / TwA  Dijkstra trees of the above, rooted at the center
  TuE / TuA  the same trees with weights dropped (hop distances)
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .image import Image

OFFSETS = {
    "four": ((-1, 0), (0, -1), (0, 1), (1, 0)),
    "eight": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}

SETTINGS = ("GwE", "GwA", "TwE", "TwA", "TuE", "TuA")


@dataclass
class PatchGraph:
    center: tuple[int, int]       # (row, col)
    vertices: np.ndarray          # (n, 2) int64, center first
    edges: np.ndarray             # (m, 2) int64 vertex indices, i < j
    weights: np.ndarray           # (m,) float64
    weighted: bool = True

    def __post_init__(self) -> None:
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=np.int64))
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if len(self.vertices) < 1:
            raise ValueError("patch graph needs at least one vertex")
        if len(self.edges) != len(self.weights):
            raise ValueError("edge/weight length mismatch")

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass
class DijkstraTree:
    vertices: np.ndarray          # (n, 2) int64, in settle order (root first)
    parent: np.ndarray            # (n,) int64, -1 at the root
    dist: np.ndarray              # (n,) float64 root distances
    weighted: bool
    root: int = 0

    def __post_init__(self) -> None:
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=np.int64))
        self.parent = np.asarray(self.parent, dtype=np.int64).reshape(-1)
        self.dist = np.asarray(self.dist, dtype=np.float64).reshape(-1)

    @property
    def n(self) -> int:
        return len(self.vertices)


def _as_plane(u) -> np.ndarray:
    if isinstance(u, Image):
        if u.channels != 1:
            raise ValueError("patch graphs need a single-channel image")
        return u.plane(0)
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D intensity grid")
    return arr


def edge_weight(p: tuple[int, int], q: tuple[int, int], u, beta: float) -> float:
    """sqrt(spatial^2 + beta^2 * contrast^2) for neighboring pixels p, q."""
    plane = _as_plane(u)
    dy = p[0] - q[0]
    dx = p[1] - q[1]
    du = plane[p] - plane[q]
    return math.sqrt(dy * dy + dx * dx + beta * beta * du * du)


def euclidean_patch_graph(u, p: tuple[int, int], rho: float, beta: float,
                          nbhd: str = "eight") -> PatchGraph:
    """Weighted subgraph on all pixels q with ||q - p|| <= rho (clipped at borders)."""
    plane = _as_plane(u)
    h, w = plane.shape
    py, px = p
    if not (0 <= py < h and 0 <= px < w):
        raise ValueError(f"center {p} outside the {h}x{w} image")

    r = int(math.floor(rho))
    coords = [(py, px)]
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dy == 0 and dx == 0:
                continue
            if dy * dy + dx * dx > rho * rho:
                continue
            y, x = py + dy, px + dx
            if 0 <= y < h and 0 <= x < w:
                coords.append((y, x))
    index = {c: i for i, c in enumerate(coords)}

    edges = []
    weights = []
    offsets = OFFSETS[nbhd]
    for i, (y, x) in enumerate(coords):
        for dy, dx in offsets:
            j = index.get((y + dy, x + dx))
            if j is not None and j > i:
                du = plane[y, x] - plane[y + dy, x + dx]
                edges.append((i, j))
                weights.append(math.sqrt(dy * dy + dx * dx + beta * beta * du * du))
    return PatchGraph((py, px), np.array(coords), np.array(edges).reshape(-1, 2),
                      np.array(weights), weighted=True)


def _adjacency(g: PatchGraph) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    for (i, j), w in zip(g.edges, g.weights):
        adj[i].append((int(j), float(w)))
        adj[j].append((int(i), float(w)))
    return adj


def dijkstra(g: PatchGraph, limit: float | None = None) -> DijkstraTree:
    """Shortest-path tree from the center (vertex 0).

    Ties on tentative distance settle the smaller row-major pixel first;
    parents update only on strict improvement, so among equal-distance
    parent candidates the first settled one is kept. With a limit, only
    vertices with dist <= limit are retained (in settle order).
    """
    adj = _adjacency(g)
    n = g.n
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    dist[0] = 0.0
    cy, cx = (int(g.vertices[0][0]), int(g.vertices[0][1]))
    heap = [(0.0, cy, cx, 0)]
    settled = np.zeros(n, dtype=bool)
    order = []
    while heap:
        d, _, _, i = heapq.heappop(heap)
        if settled[i] or d > dist[i]:
            continue
        if limit is not None and d > limit:
            break
        settled[i] = True
        order.append(i)
        for j, w in adj[i]:
            nd = d + w
            if nd < dist[j]:
                dist[j] = nd
                parent[j] = i
                heapq.heappush(heap, (nd, int(g.vertices[j][0]), int(g.vertices[j][1]), j))

    remap = np.full(n, -1, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    tree_parent = np.array(
        [-1 if parent[old] < 0 else remap[parent[old]] for old in order], dtype=np.int64
    )
    return DijkstraTree(g.vertices[order], tree_parent, dist[order], weighted=g.weighted)


def _grid_dijkstra(plane: np.ndarray, p: tuple[int, int], rho: float, beta: float,
                   nbhd: str) -> tuple[list[tuple[int, int]], list[int], list[float]]:
    """Dijkstra on the full pixel graph, cut off on the fly at dist <= rho.

    Returns settle-ordered coords, parent indices into that order, and dists.
    """
    h, w = plane.shape
    offsets = OFFSETS[nbhd]
    spatial_sq = {o: float(o[0] * o[0] + o[1] * o[1]) for o in offsets}
    b2 = beta * beta
    dist: dict[tuple[int, int], float] = {p: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    settled: dict[tuple[int, int], int] = {}
    coords: list[tuple[int, int]] = []
    parents: list[int] = []
    dists: list[float] = []
    heap = [(0.0, p[0], p[1])]
    while heap:
        d, y, x = heapq.heappop(heap)
        q = (y, x)
        if q in settled or d > dist[q]:
            continue
        if d > rho:
            break
        settled[q] = len(coords)
        coords.append(q)
        parents.append(-1 if q == p else settled[parent[q]])
        dists.append(d)
        uq = plane[y, x]
        for dy, dx in offsets:
            ny, nx = y + dy, x + dx
            if not (0 <= ny < h and 0 <= nx < w):
                continue
            du = uq - plane[ny, nx]
            nd = d + math.sqrt(spatial_sq[(dy, dx)] + b2 * du * du)
            nq = (ny, nx)
            if nd < dist.get(nq, math.inf):
                dist[nq] = nd
                parent[nq] = q
                heapq.heappush(heap, (nd, ny, nx))
    return coords, parents, dists


def adaptive_patch_graph(u, p: tuple[int, int], rho: float, beta: float,
                         nbhd: str = "eight") -> tuple[PatchGraph, DijkstraTree]:
    """Amoeba around p: pixels reachable by paths of total weight <= rho.

    Returns the weighted subgraph induced on the amoeba and the Dijkstra
    tree of the run that produced it. Paths may wander outside the
    Euclidean rho-ball; only the path weight matters.
    """
    plane = _as_plane(u)
    h, w = plane.shape
    py, px = p
    if not (0 <= py < h and 0 <= px < w):
        raise ValueError(f"center {p} outside the {h}x{w} image")
    coords, parents, dists = _grid_dijkstra(plane, (py, px), rho, beta, nbhd)
    index = {c: i for i, c in enumerate(coords)}

    edges = []
    weights = []
    offsets = OFFSETS[nbhd]
    for i, (y, x) in enumerate(coords):
        for dy, dx in offsets:
            j = index.get((y + dy, x + dx))
            if j is not None and j > i:
                du = plane[y, x] - plane[y + dy, x + dx]
                edges.append((i, j))
                weights.append(math.sqrt(dy * dy + dx * dx + beta * beta * du * du))
    graph = PatchGraph((py, px), np.array(coords), np.array(edges).reshape(-1, 2),
                       np.array(weights), weighted=True)
    tree = DijkstraTree(np.array(coords), np.array(parents, dtype=np.int64),
                        np.array(dists), weighted=True)
    return graph, tree


def strip_weights(t: DijkstraTree) -> DijkstraTree:
    """Same topology with unit edges; dist becomes the hop count from the root."""
    if not t.weighted:
        raise ValueError("tree is already unweighted")
    hops = np.zeros(t.n, dtype=np.float64)
    for i in range(t.n):
        if t.parent[i] >= 0:
            hops[i] = hops[t.parent[i]] + 1.0  # parents settle first
    return DijkstraTree(t.vertices.copy(), t.parent.copy(), hops, weighted=False)


def build_setting(u, p: tuple[int, int], setting: str, rho: float, beta: float,
                  nbhd: str = "eight"):
    """Dispatch one of the six graph settings for the patch around p."""
    if setting == "GwE":
        return euclidean_patch_graph(u, p, rho, beta, nbhd)
    if setting == "GwA":
        return adaptive_patch_graph(u, p, rho, beta, nbhd)[0]
    if setting == "TwA":
        return adaptive_patch_graph(u, p, rho, beta, nbhd)[1]
    if setting == "TuA":
        return strip_weights(adaptive_patch_graph(u, p, rho, beta, nbhd)[1])
    if setting == "TwE":
        return dijkstra(euclidean_patch_graph(u, p, rho, beta, nbhd))
    if setting == "TuE":
        return strip_weights(dijkstra(euclidean_patch_graph(u, p, rho, beta, nbhd)))
    raise ValueError(f"unknown graph setting {setting!r}; expected one of {SETTINGS}")


def all_pairs_distances(g) -> np.ndarray:
    """Shortest-path distance matrix of a PatchGraph or DijkstraTree.

    Floyd-Warshall on the (tree) adjacency; for unweighted inputs the
    entries are exact hop counts.
    """
    if isinstance(g, PatchGraph):
        n = g.n
        D = np.full((n, n), np.inf)
        np.fill_diagonal(D, 0.0)
        w = g.weights if g.weighted else np.ones(len(g.edges))
        for (i, j), wij in zip(g.edges, w):
            if wij < D[i, j]:
                D[i, j] = wij
                D[j, i] = wij
    elif isinstance(g, DijkstraTree):
        n = g.n
        D = np.full((n, n), np.inf)
        np.fill_diagonal(D, 0.0)
        for i in range(n):
            pi = g.parent[i]
            if pi >= 0:
                wij = g.dist[i] - g.dist[pi]
                D[i, pi] = wij
                D[pi, i] = wij
    else:
        raise TypeError(f"expected PatchGraph or DijkstraTree, got {type(g)}")
    for k in range(n):
        dk = D[k]
        np.minimum(D, D[:, k : k + 1] + dk[None, :], out=D)
    return D


def dump_edge_list(g: PatchGraph) -> str:
    """Debug dump: vertex coords and edges with 9-significant-digit weights."""
    lines = [f"v {y} {x}" for y, x in g.vertices]
    for (i, j), w in zip(g.edges, g.weights):
        y1, x1 = g.vertices[i]
        y2, x2 = g.vertices[j]
        lines.append(f"e {y1} {x1} {y2} {x2} {w:.9g}")
    return "\n".join(lines) + "\n"

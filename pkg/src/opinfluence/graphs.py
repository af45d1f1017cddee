"""Graph topologies for neighbourhood-based opinion collection.

Supported families: complete, d-regular, Erdos-Renyi, Barabasi-Albert and
hub-and-spoke.  Random families are deterministic given ``seed``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np

KINDS = ("complete", "d_regular", "erdos_renyi", "barabasi_albert", "hub_spoke")


class GraphSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GraphTopology:
    """Undirected simple graph on ``node_count`` nodes.

    ``adjacency[i]`` is the sorted tuple of neighbours of node ``i``.
    """

    node_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.node_count < 2:
            raise GraphSpecError("node_count must be >= 2")
        if len(self.adjacency) != self.node_count:
            raise GraphSpecError("adjacency must have one entry per node")
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphSpecError(f"neighbours of {i} must be sorted and unique")
            for j in nbrs:
                if j == i:
                    raise GraphSpecError(f"self-loop at node {i}")
                if not 0 <= j < self.node_count:
                    raise GraphSpecError(f"neighbour {j} of {i} out of range")
                if i not in self.adjacency[j]:
                    raise GraphSpecError(f"edge ({i}, {j}) is not symmetric")

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "GraphTopology":
        nbrs: list[set[int]] = [set() for _ in range(node_count)]
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise GraphSpecError(f"self-loop at node {i}")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls(node_count, tuple(tuple(sorted(s)) for s in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    @property
    def edge_count(self) -> int:
        return sum(len(n) for n in self.adjacency) // 2

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (read-only, int8)."""
        a = np.zeros((self.node_count, self.node_count), dtype=np.int8)
        for i, nbrs in enumerate(self.adjacency):
            a[i, list(nbrs)] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def degree_array(self) -> np.ndarray:
        d = np.array([len(n) for n in self.adjacency], dtype=np.int64)
        d.setflags(write=False)
        return d


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    node_count: int
    d: Optional[int] = None
    edge_prob: Optional[float] = None
    m_attach: Optional[int] = None
    seed: Optional[int] = None

    def problems(self) -> list[str]:
        """All constraint violations, empty when the spec is valid."""
        out = []
        M = self.node_count
        if self.kind not in KINDS:
            out.append(f"kind must be one of {', '.join(KINDS)} (got {self.kind!r})")
            return out
        if not isinstance(M, (int, np.integer)) or M < 2:
            out.append("node_count must be an integer >= 2")
            return out
        if self.kind == "d_regular":
            if self.d is None or not 1 <= self.d < M:
                out.append("d must satisfy 1 <= d < node_count")
            elif (self.d * M) % 2:
                out.append(f"d * node_count must be even (d={self.d}, node_count={M})")
        elif self.kind == "erdos_renyi":
            if self.edge_prob is None or not 0.0 <= self.edge_prob <= 1.0:
                out.append("edge_prob must lie in [0,1]")
        elif self.kind == "barabasi_albert":
            if self.m_attach is None or not 1 <= self.m_attach < M:
                out.append("m_attach must satisfy 1 <= m_attach < node_count")
        return out

    def label(self) -> str:
        extra = {
            "d_regular": f"d={self.d}",
            "erdos_renyi": f"edge_prob={self.edge_prob}",
            "barabasi_albert": f"m_attach={self.m_attach}",
        }.get(self.kind)
        return f"{self.kind}({extra})" if extra else self.kind


def generate(spec: GraphSpec) -> GraphTopology:
    errs = spec.problems()
    if errs:
        raise GraphSpecError("; ".join(errs))
    M = int(spec.node_count)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "complete":
        edges = [(i, j) for i in range(M) for j in range(i + 1, M)]
    elif spec.kind == "hub_spoke":
        edges = [(0, j) for j in range(1, M)]
    elif spec.kind == "erdos_renyi":
        iu, ju = np.triu_indices(M, k=1)
        keep = rng.random(iu.size) < spec.edge_prob
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    elif spec.kind == "barabasi_albert":
        edges = _barabasi_albert(M, int(spec.m_attach), rng)
    else:
        edges = _d_regular(M, int(spec.d), rng)
    return GraphTopology.from_edges(M, edges)


def _barabasi_albert(M, m, rng):
    # seed: complete graph on m+1 nodes
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    deg = np.zeros(M, dtype=float)
    deg[: m + 1] = m
    for new in range(m + 1, M):
        w = deg[:new] / deg[:new].sum()
        targets = rng.choice(new, size=m, replace=False, p=w)
        for t in targets.tolist():
            edges.append((t, new))
            deg[t] += 1
        deg[new] = m
    return edges


def _d_regular(M, d, rng):
    # pairing model; a self-loop or repeated pair is redrawn, a stuck pairing restarts
    for _ in range(10 * M):
        stubs = np.repeat(np.arange(M), d).tolist()
        seen: set[tuple[int, int]] = set()
        while stubs:
            for _ in range(50):
                a, b = rng.choice(len(stubs), size=2, replace=False).tolist()
                u, v = stubs[a], stubs[b]
                e = (min(u, v), max(u, v))
                if u != v and e not in seen:
                    break
            else:
                break
            seen.add(e)
            for pos in sorted((a, b), reverse=True):
                stubs[pos] = stubs[-1]
                stubs.pop()
        if not stubs:
            return sorted(seen)
    raise GraphSpecError(f"d-regular pairing failed after {10 * M} restarts (M={M}, d={d})")


def degrees(g: GraphTopology) -> list[int]:
    return [len(n) for n in g.adjacency]


def write_edge_list(g: GraphTopology, path) -> None:
    edges = g.edges()
    lines = [f"{g.node_count} {len(edges)}"] + [f"{i} {j}" for i, j in edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> GraphTopology:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise GraphSpecError("edge list must start with a 'M E' header")
    M, E = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != E:
        raise GraphSpecError(f"header declares {E} edges, found {len(body)}")
    edges = []
    for r in body:
        i, j = int(r[0]), int(r[1])
        if not i < j:
            raise GraphSpecError(f"edge line '{i} {j}' must have i < j")
        edges.append((i, j))
    return GraphTopology.from_edges(M, edges)

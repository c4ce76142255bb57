"""Graphs, hypergraphs, bipartitions and the stochastic edge-selection processes.

Vertex subsets are stored as single-word bitmasks (vertex capacity 64), which
doubles as the basis label for the swap-operator engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import ValidationError

MAX_VERTICES = 64


@dataclass(frozen=True)
class VertexSet:
    """Subset of the vertices 0..n-1, stored as a bitmask."""

    bits: int
    n: int

    def __post_init__(self):
        if not (1 <= self.n <= MAX_VERTICES):
            raise ValidationError(f"vertex count {self.n} outside 1..{MAX_VERTICES}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValidationError(
                f"bitmask {self.bits:#x} has bits outside 0..{self.n - 1}"
            )

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "VertexSet":
        bits = 0
        for i in indices:
            if not (0 <= i < n):
                raise ValidationError(f"vertex index {i} out of range 0..{n - 1}")
            bits |= 1 << i
        return cls(bits, n)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool((self.bits >> i) & 1)

    def __iter__(self) -> Iterator[int]:
        b = self.bits
        while b:
            low = b & -b
            yield low.bit_length() - 1
            b ^= low

    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits | other.bits, self.n)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits & other.bits, self.n)

    def difference(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits & ~other.bits, self.n)

    def complement(self) -> "VertexSet":
        return VertexSet(((1 << self.n) - 1) ^ self.bits, self.n)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __repr__(self) -> str:
        return f"VertexSet({{{','.join(map(str, self))}}}, n={self.n})"


@dataclass(frozen=True)
class Graph:
    """(Hyper)graph with qudit dimension d attached to every vertex."""

    n_vertices: int
    edges: tuple[VertexSet, ...]
    d: int

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_set(self, indices: Iterable[int]) -> VertexSet:
        return VertexSet.from_indices(indices, self.n_vertices)

    def full_set(self) -> VertexSet:
        return VertexSet((1 << self.n_vertices) - 1, self.n_vertices)


def build_graph(n: int, edges: Sequence[Iterable[int]], d: int) -> Graph:
    """Validate and construct a Graph; edge order is preserved."""
    if n < 1:
        raise ValidationError(f"need at least one vertex, got n={n}")
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    if not edges:
        raise ValidationError("edge list is empty")
    out: list[VertexSet] = []
    seen: set[int] = set()
    for raw in edges:
        e = VertexSet.from_indices(raw, n)
        if len(e) < 2:
            raise ValidationError(f"edge {e} has cardinality < 2")
        if e.bits in seen:
            raise ValidationError(f"duplicate edge {e}")
        seen.add(e.bits)
        out.append(e)
    return Graph(n, tuple(out), d)


def complete_graph(n: int, d: int = 2) -> Graph:
    """K_n with all vertex pairs as edges."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return build_graph(n, edges, d)


def chain_graph(length: int, d: int = 2) -> Graph:
    """Linear chain 0-1-...-(length-1)."""
    return build_graph(length, [(i, i + 1) for i in range(length - 1)], d)


def load_graph(path: str) -> Graph:
    """Read the JSON graph format {"n": int, "d": int, "edges": [[int,...],...]}."""
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("n", "d", "edges"):
        if key not in doc:
            raise ValidationError(f"graph file {path} missing key '{key}'")
    return build_graph(doc["n"], doc["edges"], doc["d"])


def load_partition(path: str, g: Graph) -> "Bipartition":
    """Read a partition file {"A": [int,...]} against graph g."""
    with open(path) as fh:
        doc = json.load(fh)
    if "A" not in doc:
        raise ValidationError(f"partition file {path} missing key 'A'")
    return Bipartition(g.vertex_set(doc["A"]))


@dataclass(frozen=True)
class Bipartition:
    """Bipartition V = A u B given by the subsystem A."""

    a_set: VertexSet

    @property
    def b_set(self) -> VertexSet:
        return self.a_set.complement()


def boundary_edges(g: Graph, p: Bipartition) -> tuple[tuple[VertexSet, ...], float]:
    """Edges straddling the bipartition, and the boundary fraction q = |dA|/|E|."""
    a = p.a_set.bits
    b = p.b_set.bits
    cross = tuple(e for e in g.edges if (e.bits & a) and (e.bits & b))
    return cross, len(cross) / g.n_edges


# --- edge-selection processes -------------------------------------------------


@dataclass(frozen=True)
class UniformIID:
    """Each step draws an edge uniformly at random, independently."""

    graph: Graph


@dataclass(frozen=True)
class FixedSequence:
    """Deterministic ordered edge list, cycled when more steps are requested.

    Edges are in application-to-state order (first entry hits the state first).
    """

    graph: Graph
    sequence: tuple[VertexSet, ...]

    def __post_init__(self):
        valid = {e.bits for e in self.graph.edges}
        for e in self.sequence:
            if e.bits not in valid:
                raise ValidationError(f"sequence edge {e} is not an edge of the graph")
        if not self.sequence:
            raise ValidationError("fixed sequence is empty")


@dataclass(frozen=True)
class MarkovChain:
    """Markov edge selection: initial distribution + row-stochastic kernel.

    Both are indexed over the graph's edge list.
    """

    graph: Graph
    initial: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...] = field(repr=False)

    def __post_init__(self):
        m = self.graph.n_edges
        if len(self.initial) != m:
            raise ValidationError("initial vector length != number of edges")
        if abs(sum(self.initial) - 1.0) > 1e-12:
            raise ValidationError("initial probability vector does not sum to 1")
        if len(self.transition) != m:
            raise ValidationError("transition matrix is not |E| x |E|")
        for i, row in enumerate(self.transition):
            if len(row) != m:
                raise ValidationError(f"transition row {i} has wrong length")
            if abs(sum(row) - 1.0) > 1e-12:
                raise ValidationError(f"transition row {i} does not sum to 1")


EdgeProcess = Union[UniformIID, FixedSequence, MarkovChain]


def sample_sequence(proc: EdgeProcess, k: int, seed: int) -> tuple[VertexSet, ...]:
    """Draw a length-k edge sequence; deterministic given (proc, k, seed)."""
    if k < 0:
        raise ValidationError(f"steps must be >= 0, got {k}")
    if k == 0:
        return ()
    g = proc.graph
    if isinstance(proc, FixedSequence):
        seq = proc.sequence
        return tuple(seq[i % len(seq)] for i in range(k))
    if g.n_edges == 0:
        raise ValidationError("cannot sample from an empty edge list")
    rng = np.random.default_rng(seed)
    return draw_sequence(proc, k, rng)


def draw_sequence(proc: EdgeProcess, k: int, rng: np.random.Generator) -> tuple[VertexSet, ...]:
    """Like sample_sequence but consuming an externally owned generator."""
    g = proc.graph
    if isinstance(proc, FixedSequence):
        seq = proc.sequence
        return tuple(seq[i % len(seq)] for i in range(k))
    if isinstance(proc, UniformIID):
        idx = rng.integers(0, g.n_edges, size=k)
        return tuple(g.edges[i] for i in idx)
    # MarkovChain
    trans = np.asarray(proc.transition)
    out = []
    state = rng.choice(g.n_edges, p=np.asarray(proc.initial))
    out.append(g.edges[state])
    for _ in range(k - 1):
        state = rng.choice(g.n_edges, p=trans[state])
        out.append(g.edges[state])
    return tuple(out)


def step_distributions(proc: EdgeProcess, k: int) -> list[np.ndarray]:
    """Marginal edge distribution at each of the k steps.

    For UniformIID this is flat; for FixedSequence a point mass on the cycled
    entry; for MarkovChain the propagated marginal p_{t+1} = p_t M.
    """
    if k < 0:
        raise ValidationError(f"steps must be >= 0, got {k}")
    g = proc.graph
    m = g.n_edges
    if isinstance(proc, UniformIID):
        flat = np.full(m, 1.0 / m)
        return [flat] * k
    if isinstance(proc, FixedSequence):
        lookup = {e.bits: i for i, e in enumerate(g.edges)}
        out = []
        for t in range(k):
            p = np.zeros(m)
            p[lookup[proc.sequence[t % len(proc.sequence)].bits]] = 1.0
            out.append(p)
        return out
    trans = np.asarray(proc.transition)
    p = np.asarray(proc.initial, dtype=float)
    out = []
    for _ in range(k):
        out.append(p)
        p = p @ trans
    return out


def cem_position_sequence(l_a: int, l_b: int, kind: str) -> tuple[int, ...]:
    """One contiguous-edge-model cycle as left-vertex positions of chain edges.

    Position v stands for the edge {v, v+1} on the chain 0..L-1 (A occupies
    0..L_A-1, so the straddling edge e sits at v = L_A-1; a_i at L_A-1-i and
    b_i at L_A+i-1).  Returned in application-to-state order.  Not limited by
    the 64-vertex swap-basis cap.
    """
    if l_a < 1 or l_b < 1:
        raise ValidationError("both chain segments need at least one site")
    if kind not in ("best", "worst"):
        raise ValidationError(f"kind must be 'best' or 'worst', got {kind!r}")
    e = l_a - 1
    a_pos = [l_a - 1 - i for i in range(1, l_a)]  # a_1 .. a_{L_A-1}
    b_pos = [l_a + i - 1 for i in range(1, l_b)]  # b_1 .. b_{L_B-1}
    if kind == "best":
        # far end inward on each side, boundary edge last
        return tuple(reversed(b_pos)) + tuple(reversed(a_pos)) + (e,)
    return (e,) + tuple(a_pos) + tuple(b_pos)


def cem_sequence(l_a: int, l_b: int, kind: str) -> tuple[VertexSet, ...]:
    """cem_position_sequence as VertexSet edges (chain must fit 64 vertices)."""
    n = l_a + l_b
    return tuple(
        VertexSet.from_indices((v, v + 1), n)
        for v in cem_position_sequence(l_a, l_b, kind)
    )

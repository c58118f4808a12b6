"""
Graph data model: vertex-ordered multigraphs with labeled external legs and
species-tagged internal edges, their canonical forms, and the brute-force
symmetry factor.

A graph with v vertices is the image of a monomial in the v-fold tensor
product of the field algebra: vertex i is the i-th tensor factor, a leg
(vertex, label, species) is a field operator sitting in that factor, and an
edge (i, j, species) is an internal edge (i == j is a self-loop).
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from networkx.utils import UnionFind

from backend.errors import GraphError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, int]
Leg = Tuple[int, int, int]
LabelSpec = Union[int, Tuple[int, int]]

DEFAULT_SPECIES = 1
# Reserved for the two ends of the edge glued by the alternative recursion.
VIRTUAL_U = -1
VIRTUAL_W = -2

CANONICAL_METHODS = ("exhaustive", "refined")


@dataclass(frozen=True, order=True)
class Graph:
    """
    A multigraph in canonical ordered form.

    `edges` holds sorted (i, j, species) triples with i <= j; `legs` holds sorted
    (vertex, label, species) triples. Build instances with `canonicalize_ordered`;
    the constructor itself does not sort or validate.
    """

    v: int
    edges: Tuple[Edge, ...] = ()
    legs: Tuple[Leg, ...] = ()

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return len(self.legs)

    def labels(self) -> Tuple[int, ...]:
        return tuple(sorted(label for _, label, _ in self.legs))

    def legs_at(self, vertex: int) -> List[Tuple[int, int]]:
        return [(label, species) for host, label, species in self.legs if host == vertex]


class GraphStats(NamedTuple):
    v: int
    e: int
    n: int
    loops: Optional[int]
    connected: bool


def _make(v: int, edges: Iterable[Edge], legs: Iterable[Leg]) -> Graph:
    """Build a Graph from already-normalized triples (no validation)."""
    return Graph(v, tuple(sorted(edges)), tuple(sorted(legs)))


def canonicalize_ordered(v: int, edges: Iterable[Sequence[int]] = (), legs: Iterable[Sequence[int]] = ()) -> Graph:
    """
    Normalize raw vertex-ordered graph data.

    Args:
        v: Vertex count (>= 1).
        edges: (i, j) or (i, j, species) items; endpoints in any order.
        legs: (vertex, label) or (vertex, label, species) items.

    Returns:
        The canonical ordered Graph: edges as sorted (min, max, species) triples,
        legs as sorted (vertex, label, species) triples.

    Raises:
        GraphError: If an index is out of range, a species is < 1, or a label repeats.
    """
    if v < 1:
        raise GraphError(f"vertex count must be >= 1, got {v}")

    def check_vertex(index: int) -> int:
        if not 1 <= index <= v:
            raise GraphError(f"vertex index {index} out of range 1..{v}")
        return index

    norm_edges: List[Edge] = []
    for raw in edges:
        i, j = check_vertex(int(raw[0])), check_vertex(int(raw[1]))
        species = int(raw[2]) if len(raw) > 2 else DEFAULT_SPECIES
        if species < 1:
            raise GraphError(f"species must be >= 1, got {species}")
        norm_edges.append((min(i, j), max(i, j), species))

    norm_legs: List[Leg] = []
    seen = set()
    for raw in legs:
        host, label = check_vertex(int(raw[0])), int(raw[1])
        species = int(raw[2]) if len(raw) > 2 else DEFAULT_SPECIES
        if species < 1:
            raise GraphError(f"species must be >= 1, got {species}")
        if label in seen:
            raise GraphError(f"external label {label} appears twice")
        seen.add(label)
        norm_legs.append((host, label, species))

    return _make(v, norm_edges, norm_legs)


def normalize_labels(labels: Sequence[LabelSpec], allow_virtual: bool = False) -> Tuple[Tuple[int, int], ...]:
    """
    Turn user label specs into (label, species) pairs.

    Plain integers get the default species. User labels must be >= 1 and distinct;
    the virtual labels are only accepted when `allow_virtual` is set.
    """
    out: List[Tuple[int, int]] = []
    for spec in labels:
        if isinstance(spec, int):
            label, species = spec, DEFAULT_SPECIES
        else:
            label, species = int(spec[0]), int(spec[1])
        if label < 1 and not (allow_virtual and label in (VIRTUAL_U, VIRTUAL_W)):
            raise GraphError(f"external labels must be >= 1, got {label}")
        if species < 1:
            raise GraphError(f"species must be >= 1, got {species}")
        out.append((label, species))
    if len({label for label, _ in out}) != len(out):
        raise GraphError(f"external labels must be distinct: {[label for label, _ in out]}")
    return tuple(out)


# -----------------------------
# Connectivity bookkeeping
# -----------------------------
def _components(v: int, edges: Iterable[Edge]) -> List[frozenset]:
    uf = UnionFind(range(1, v + 1))
    for i, j, _ in edges:
        uf.union(i, j)
    return [frozenset(c) for c in uf.to_sets()]


def is_connected(g: Graph) -> bool:
    return len(_components(g.v, g.edges)) == 1


def graph_stats(g: Graph) -> GraphStats:
    """Return (v, e, n, loops, connected); loops is None for disconnected graphs."""
    connected = is_connected(g)
    loops = g.e - g.v + 1 if connected else None
    return GraphStats(g.v, g.e, g.n, loops, connected)


def vertex_degrees(g: Graph) -> Tuple[int, ...]:
    """Total degree per vertex (legs plus half-edges; a self-loop counts twice)."""
    deg = [0] * (g.v + 1)
    for i, j, _ in g.edges:
        deg[i] += 1
        deg[j] += 1
    for host, _, _ in g.legs:
        deg[host] += 1
    return tuple(deg[1:])


def min_valence(g: Graph) -> int:
    return min(vertex_degrees(g))


def is_tree(g: Graph) -> bool:
    return g.e == g.v - 1 and is_connected(g)


def _bridges(g: Graph) -> Iterator[Tuple[Edge, frozenset, frozenset]]:
    """Yield each bridge with the vertex sets on either side of it."""
    counts = Counter(g.edges)
    for edge, mult in counts.items():
        i, j, _ = edge
        if i == j or mult > 1:
            continue
        rest = list(g.edges)
        rest.remove(edge)
        comps = _components(g.v, rest)
        side_i = next(c for c in comps if i in c)
        if j not in side_i:
            side_j = next(c for c in comps if j in c)
            yield edge, side_i, side_j


def is_one_particle_irreducible(g: Graph) -> bool:
    """Connected and stays connected after deleting any single internal edge."""
    return is_connected(g) and next(_bridges(g), None) is None


def has_tadpole(g: Graph) -> bool:
    """
    True if some line cuts off a part carrying no external leg.

    With a single external leg the leg itself is such a line; otherwise only
    internal bridges qualify.
    """
    if g.n == 1:
        return True
    hosts = {host for host, _, _ in g.legs}
    for _, side_i, side_j in _bridges(g):
        if not (side_i & hosts) or not (side_j & hosts):
            return True
    return False


# -----------------------------
# Canonical unordered form
# -----------------------------
def _relabelled(g: Graph, new_index: Sequence[int]) -> Tuple[Tuple[Edge, ...], Tuple[Leg, ...]]:
    """Edges/legs after moving old vertex k to position new_index[k - 1]."""
    edges = []
    for i, j, s in g.edges:
        a, b = new_index[i - 1], new_index[j - 1]
        edges.append((a, b, s) if a <= b else (b, a, s))
    legs = [(new_index[host - 1], label, s) for host, label, s in g.legs]
    edges.sort()
    legs.sort()
    return tuple(edges), tuple(legs)


@lru_cache(maxsize=1 << 17)
def _canonical_exhaustive(g: Graph) -> Graph:
    best = None
    for perm in itertools.permutations(range(1, g.v + 1)):
        cand = _relabelled(g, perm)
        if best is None or cand < best:
            best = cand
    return Graph(g.v, *best)


def vertex_colours(g: Graph) -> Tuple[int, ...]:
    """
    Isomorphism-invariant vertex colours by iterated refinement.

    Initial colour: the vertex's legs and self-loops. Each round appends the
    multiset of (neighbour colour, species, multiplicity) and re-ranks.
    """
    loops: Dict[int, List[int]] = {k: [] for k in range(1, g.v + 1)}
    nbrs: Dict[int, Counter] = {k: Counter() for k in range(1, g.v + 1)}
    for i, j, s in g.edges:
        if i == j:
            loops[i].append(s)
        else:
            nbrs[i][(j, s)] += 1
            nbrs[j][(i, s)] += 1
    sigs = {
        k: (tuple(sorted(g.legs_at(k))), tuple(sorted(loops[k])), sum(nbrs[k].values()))
        for k in range(1, g.v + 1)
    }
    colours = _rank(sigs)
    for _ in range(g.v):
        sigs = {
            k: (colours[k], tuple(sorted((colours[j], s, m) for (j, s), m in nbrs[k].items())))
            for k in range(1, g.v + 1)
        }
        refined = _rank(sigs)
        if len(set(refined.values())) == len(set(colours.values())):
            break
        colours = refined
    return tuple(colours[k] for k in range(1, g.v + 1))


def _rank(sigs: Mapping[int, tuple]) -> Dict[int, int]:
    order = {sig: rank for rank, sig in enumerate(sorted(set(sigs.values())))}
    return {k: order[sig] for k, sig in sigs.items()}


@lru_cache(maxsize=1 << 18)
def _canonical_refined(g: Graph) -> Graph:
    colours = vertex_colours(g)
    cells: List[List[int]] = []
    for colour in sorted(set(colours)):
        cells.append([k + 1 for k, c in enumerate(colours) if c == colour])

    best = None
    for arrangement in itertools.product(*(itertools.permutations(cell) for cell in cells)):
        new_index = [0] * g.v
        position = 1
        for block in arrangement:
            for old in block:
                new_index[old - 1] = position
                position += 1
        cand = _relabelled(g, new_index)
        if best is None or cand < best:
            best = cand
    return Graph(g.v, *best)


def canonical_unordered(g: Graph, method: str = "exhaustive") -> Graph:
    """
    Canonical representative of g's class under vertex relabeling.

    Legs are not permuted: they move with their host vertex.

    Args:
        g: Canonical ordered graph.
        method: "exhaustive" (default) takes the lexicographically least graph over
            all v! relabelings. "refined" takes the least one among relabelings that
            sort vertices by their refinement colour; it separates the same classes
            with fewer candidates but picks a different representative.
    """
    if method == "exhaustive":
        return _canonical_exhaustive(g)
    if method == "refined":
        return _canonical_refined(g)
    raise GraphError(f"unknown canonical method {method!r}; expected one of {CANONICAL_METHODS}")


def permute_vertices(g: Graph, new_index: Sequence[int]) -> Graph:
    """Apply a vertex permutation (old vertex k moves to new_index[k - 1])."""
    if sorted(new_index) != list(range(1, g.v + 1)):
        raise GraphError(f"not a permutation of 1..{g.v}: {list(new_index)}")
    return Graph(g.v, *_relabelled(g, new_index))


# -----------------------------
# Symmetry factor
# -----------------------------
def symmetry_factor(g: Graph) -> int:
    """
    Order of the automorphism group acting on vertices and internal half-edges.

    Automorphisms fix every external leg pointwise, so vertices carrying legs are
    fixed and only leg-free vertices are permuted. Every vertex permutation that
    maps the edge multiset onto itself contributes the same number of half-edge
    bijections: k! per class of k parallel edges and 2 per self-loop.

    Raises:
        GraphError: If g is disconnected.
    """
    if not is_connected(g):
        raise GraphError("symmetry_factor requires a connected graph")

    edge_count = Counter(g.edges)
    fixed = {host for host, _, _ in g.legs}
    free = [k for k in range(1, g.v + 1) if k not in fixed]

    vertex_maps = 0
    for image in itertools.permutations(free):
        new_index = list(range(1, g.v + 1))
        for old, new in zip(free, image):
            new_index[old - 1] = new
        mapped = Counter()
        for i, j, s in g.edges:
            a, b = new_index[i - 1], new_index[j - 1]
            mapped[(min(a, b), max(a, b), s)] += 1
        if mapped == edge_count:
            vertex_maps += 1

    half_edge_maps = 1
    for (i, j, _), mult in edge_count.items():
        half_edge_maps *= factorial(mult)
        if i == j:
            half_edge_maps *= 2 ** mult
    return vertex_maps * half_edge_maps


# -----------------------------
# Leg relabeling and gluing
# -----------------------------
def relabel_legs(g: Graph, mapping: Mapping[int, Tuple[int, int]]) -> Graph:
    """Replace each leg label k by mapping[k] = (label, species); unmapped legs stay."""
    legs = []
    for host, label, species in g.legs:
        new_label, new_species = mapping.get(label, (label, species))
        legs.append((host, new_label, new_species))
    return Graph(g.v, g.edges, tuple(sorted(legs)))


def glue_legs(g: Graph, u: int, w: int, species: int) -> Graph:
    """Delete legs u and w and join their host vertices by an edge of `species`."""
    hosts = {label: host for host, label, _ in g.legs}
    if u not in hosts or w not in hosts:
        raise GraphError(f"cannot glue legs {u}, {w}: not both present")
    a, b = hosts[u], hosts[w]
    legs = [leg for leg in g.legs if leg[1] not in (u, w)]
    return _make(g.v, list(g.edges) + [(min(a, b), max(a, b), species)], legs)


def disjoint_union(first: Graph, second: Graph) -> Graph:
    """Place `second` after `first`, shifting its vertex indices by first.v."""
    shift = first.v
    edges = list(first.edges) + [(i + shift, j + shift, s) for i, j, s in second.edges]
    legs = list(first.legs) + [(host + shift, label, s) for host, label, s in second.legs]
    return _make(first.v + second.v, edges, legs)


def graph_signature(g: Graph) -> str:
    """Short text form, e.g. `v=2 E[1-2 1-2] L[1:x1 2:x2]`; non-default species as `/s`."""

    def tag(species: int) -> str:
        return "" if species == DEFAULT_SPECIES else f"/{species}"

    edges = " ".join(f"{i}-{j}{tag(s)}" for i, j, s in g.edges)
    legs = " ".join(f"{host}:x{label}{tag(s)}" for host, label, s in g.legs)
    return f"v={g.v} E[{edges}] L[{legs}]"


# -----------------------------
# Graph sums
# -----------------------------
class GraphSum:
    """
    A finite linear combination of canonical graphs with exact rational weights.

    Terms merge by canonical-form equality with weight addition; zero weights are
    pruned. Iteration yields terms in sorted graph order, so any two equal sums
    print identically regardless of how they were assembled.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping[Graph, Fraction], Iterable[Tuple[Graph, Fraction]], None] = None):
        acc: Dict[Graph, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for graph, weight in items:
                accumulate(acc, graph, Fraction(weight))
        self._terms = acc

    @classmethod
    def from_accumulator(cls, acc: Dict[Graph, Fraction]) -> "GraphSum":
        """Adopt a dict built with `accumulate` without copying."""
        out = cls()
        out._terms = {g: w for g, w in acc.items() if w != 0}
        return out

    @classmethod
    def single(cls, graph: Graph, weight: Union[int, Fraction] = 1) -> "GraphSum":
        return cls({graph: Fraction(weight)})

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Graph, Fraction]]:
        return iter(self.items())

    def __contains__(self, graph: Graph) -> bool:
        return graph in self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSum):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self) -> str:
        return f"GraphSum({len(self._terms)} terms, total={self.total_weight()})"

    def items(self) -> List[Tuple[Graph, Fraction]]:
        return sorted(self._terms.items())

    def iter_terms(self) -> Iterator[Tuple[Graph, Fraction]]:
        """Terms in insertion order, without sorting."""
        return iter(self._terms.items())

    def weight(self, graph: Graph) -> Fraction:
        return self._terms.get(graph, Fraction(0))

    def support(self) -> frozenset:
        return frozenset(self._terms)

    def total_weight(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def vertex_count(self) -> Optional[int]:
        counts = {g.v for g in self._terms}
        if len(counts) > 1:
            raise GraphError(f"mixed vertex counts in one sum: {sorted(counts)}")
        return next(iter(counts), None)

    def __add__(self, other: "GraphSum") -> "GraphSum":
        acc = dict(self._terms)
        for graph, weight in other._terms.items():
            accumulate(acc, graph, weight)
        return GraphSum.from_accumulator(acc)

    def scaled(self, factor: Union[int, Fraction]) -> "GraphSum":
        factor = Fraction(factor)
        return GraphSum.from_accumulator({g: w * factor for g, w in self._terms.items()})

    def relabel(self, mapping: Mapping[int, Tuple[int, int]]) -> "GraphSum":
        acc: Dict[Graph, Fraction] = {}
        for graph, weight in self._terms.items():
            accumulate(acc, relabel_legs(graph, mapping), weight)
        return GraphSum.from_accumulator(acc)

    def filtered(self, keep) -> "GraphSum":
        return GraphSum.from_accumulator({g: w for g, w in self._terms.items() if keep(g)})


def accumulate(acc: Dict[Graph, Fraction], graph: Graph, weight: Fraction) -> None:
    """Add `weight` to acc[graph], deleting the entry when it cancels to zero."""
    total = acc.get(graph, 0) + weight
    if total == 0:
        acc.pop(graph, None)
    else:
        acc[graph] = total


def merge_sums(sums: Iterable[GraphSum]) -> GraphSum:
    acc: Dict[Graph, Fraction] = {}
    for s in sums:
        for graph, weight in s._terms.items():
            accumulate(acc, graph, weight)
    return GraphSum.from_accumulator(acc)


def forget_order(s: GraphSum, method: str = "exhaustive") -> GraphSum:
    """Replace every term by its canonical unordered form, summing colliding weights."""
    acc: Dict[Graph, Fraction] = {}
    for graph, weight in s._terms.items():
        accumulate(acc, canonical_unordered(graph, method), weight)
    logger.debug("forget_order: %d ordered terms -> %d unordered", len(s), len(acc))
    return GraphSum.from_accumulator(acc)

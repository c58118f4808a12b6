"""
The linear maps T_i (self-loop attachment) and Q_i (coproduct-driven vertex
split) acting on graph sums.

T_i = 1/2 R_{i,i}: adds a self-loop at vertex i.
Q_i = 1/2 R_{i,i+1} . Delta_i: splits vertex i into i and i+1, distributes
everything attached to i between the two in all possible ways, and joins them
by a new edge. Vertices after i shift up by one.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterator, List, NamedTuple, Tuple

from backend.errors import GraphError
from backend.graph import Edge, Graph, GraphSum, Leg, _make, accumulate

HALF = Fraction(1, 2)

Split = Tuple[List[Edge], List[Leg], int]


class Attachment(NamedTuple):
    """
    One thing attached to a vertex: a leg, the near end of an edge, or one of
    the two half-edges of a self-loop.

    `ref` is the leg label, the far endpoint, or the self-loop's index.
    """

    kind: str
    ref: int
    species: int
    half: int = 0


def _check_index(i: int, v: int) -> None:
    if not 1 <= i <= v:
        raise GraphError(f"vertex index {i} out of range 1..{v}")


def _shift(k: int, i: int) -> int:
    return k + 1 if k > i else k


def _pair(a: int, b: int, species: int) -> Edge:
    return (a, b, species) if a <= b else (b, a, species)


def attachments(g: Graph, i: int) -> List[Attachment]:
    """Attachments at vertex i in enumeration order: legs first, then edge ends, then loop halves."""
    _check_index(i, g.v)
    legs = [Attachment("leg", label, s) for host, label, s in g.legs if host == i]
    ends = []
    loops = []
    for a, b, s in g.edges:
        if a == i and b == i:
            index = len(loops) // 2
            loops += [Attachment("loop", index, s, 0), Attachment("loop", index, s, 1)]
        elif a == i:
            ends.append(Attachment("end", b, s))
        elif b == i:
            ends.append(Attachment("end", a, s))
    return sorted(legs) + sorted(ends) + loops


def _rest(g: Graph, i: int) -> Tuple[List[Edge], List[Leg]]:
    """Edges and legs not attached to i, re-indexed for v + 1 vertices."""
    edges = [(_shift(a, i), _shift(b, i), s) for a, b, s in g.edges if a != i and b != i]
    legs = [(_shift(host, i), label, s) for host, label, s in g.legs if host != i]
    return edges, legs


def raw_vertex_splits(g: Graph, i: int) -> Iterator[Split]:
    """
    All 2^d assignments of the d attachments at i to the new vertices i and i+1.

    The two half-edges of a self-loop are assigned independently: both on one
    side keeps a self-loop there, one on each side opens it into an (i, i+1) edge.
    Yields (edges, legs, 1) without the connecting edge.
    """
    atts = attachments(g, i)
    base_edges, base_legs = _rest(g, i)
    for sides in itertools.product((i, i + 1), repeat=len(atts)):
        edges = list(base_edges)
        legs = list(base_legs)
        loop_sides: Dict[Tuple[int, int], List[int]] = {}
        for att, side in zip(atts, sides):
            if att.kind == "leg":
                legs.append((side, att.ref, att.species))
            elif att.kind == "end":
                edges.append(_pair(_shift(att.ref, i), side, att.species))
            else:
                loop_sides.setdefault((att.ref, att.species), []).append(side)
        for (_, species), (a, b) in loop_sides.items():
            edges.append(_pair(a, b, species))
        yield edges, legs, 1


def vertex_splits(g: Graph, i: int) -> Iterator[Split]:
    """
    The assignments of `raw_vertex_splits` with identical outcomes grouped.

    Parallel half-edges to the same far vertex are indistinguishable after the
    merge, so choosing k of c of them for vertex i has multiplicity C(c, k); c
    self-loops split into c1 stay / c2 move / c3 open with multiplicity
    c!/(c1! c2! c3!) * 2^c3. Multiplicities sum to 2^d.
    """
    _check_index(i, g.v)
    base_edges, base_legs = _rest(g, i)
    ends: Counter = Counter()
    loops: Counter = Counter()
    own_legs = []
    for a, b, s in g.edges:
        if a == i and b == i:
            loops[s] += 1
        elif a == i:
            ends[(_shift(b, i), s)] += 1
        elif b == i:
            ends[(_shift(a, i), s)] += 1
    for host, label, s in g.legs:
        if host == i:
            own_legs.append((label, s))

    groups: List[List[Split]] = []
    for label, s in sorted(own_legs):
        groups.append([([], [(i, label, s)], 1), ([], [(i + 1, label, s)], 1)])
    for (far, s), c in sorted(ends.items()):
        near, other = _pair(far, i, s), _pair(far, i + 1, s)
        groups.append([([near] * k + [other] * (c - k), [], comb(c, k)) for k in range(c + 1)])
    for s, c in sorted(loops.items()):
        options = []
        for c1 in range(c + 1):
            for c2 in range(c - c1 + 1):
                c3 = c - c1 - c2
                mult = factorial(c) // (factorial(c1) * factorial(c2) * factorial(c3)) * 2 ** c3
                edges = [(i, i, s)] * c1 + [(i + 1, i + 1, s)] * c2 + [(i, i + 1, s)] * c3
                options.append((edges, [], mult))
        groups.append(options)

    for choice in itertools.product(*groups):
        edges = list(base_edges)
        legs = list(base_legs)
        mult = 1
        for part_edges, part_legs, part_mult in choice:
            edges += part_edges
            legs += part_legs
            mult *= part_mult
        yield edges, legs, mult


def apply_T(i: int, s: GraphSum, species_count: int = 1) -> GraphSum:
    """
    T_i: add one self-loop (i, i) per species to every term, weight times 1/2.

    Raises:
        GraphError: If i is outside 1..v.
    """
    v = s.vertex_count()
    if v is None:
        return GraphSum()
    _check_index(i, v)
    acc: Dict[Graph, Fraction] = {}
    for g, w in s.iter_terms():
        for species in range(1, species_count + 1):
            graph = Graph(g.v, tuple(sorted(g.edges + ((i, i, species),))), g.legs)
            accumulate(acc, graph, w * HALF)
    return GraphSum.from_accumulator(acc)


def apply_Q(i: int, s: GraphSum, species_count: int = 1, expand_half_edges: bool = False) -> GraphSum:
    """
    Q_i: split vertex i of every term, join the halves by an edge of each species.

    Args:
        i: Vertex to split (1..v).
        s: Input sum on v vertices.
        species_count: Number of edge species summed over in R_{i,i+1}.
        expand_half_edges: Enumerate all 2^d distinguished assignments instead of
            the grouped ones. Same result after merging; slower.

    Returns:
        A GraphSum on v + 1 vertices.
    """
    v = s.vertex_count()
    if v is None:
        return GraphSum()
    _check_index(i, v)
    splitter = raw_vertex_splits if expand_half_edges else vertex_splits
    acc: Dict[Graph, Fraction] = {}
    for g, w in s.iter_terms():
        for edges, legs, mult in splitter(g, i):
            for species in range(1, species_count + 1):
                graph = _make(g.v + 1, edges + [(i, i + 1, species)], legs)
                accumulate(acc, graph, w * mult * HALF)
    return GraphSum.from_accumulator(acc)

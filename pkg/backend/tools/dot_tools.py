"""Graphviz DOT emission for graphs and graph sums. No layout beyond what DOT does itself."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from backend.graph import DEFAULT_SPECIES, Graph, GraphSum
from backend.series import format_fraction

# line styles cycle through species
SPECIES_STYLES = ("solid", "dashed", "dotted", "bold")


def _style(species: int) -> str:
    return SPECIES_STYLES[(species - 1) % len(SPECIES_STYLES)]


def _attrs(species: int) -> str:
    if species == DEFAULT_SPECIES:
        return ""
    return f' [style={_style(species)}, label="{species}"]'


def graph_to_dot(g: Graph, name: str = "G", weight: Optional[Fraction] = None) -> str:
    """
    One multigraph as an undirected DOT graph.

    Vertices are circles v1..vn; each external leg is a stub to an invisible
    node labeled x<label>; parallel edges and self-loops get one DOT edge each.
    """
    lines: List[str] = [f"graph {name} {{"]
    if weight is not None:
        lines.append(f'  label="weight {format_fraction(weight)}";')
    lines.append("  node [shape=circle, label=\"\"];")
    for k in range(1, g.v + 1):
        lines.append(f"  v{k};")
    for host, label, species in g.legs:
        stub = f"x{label}"
        lines.append(f"  {stub} [shape=point, style=invis];")
        lines.append(f'  v{host} -- {stub} [label="{stub}"{_leg_style(species)}];')
    for i, j, species in g.edges:
        lines.append(f"  v{i} -- v{j}{_attrs(species)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _leg_style(species: int) -> str:
    return "" if species == DEFAULT_SPECIES else f", style={_style(species)}"


def graph_sum_to_dot(s: GraphSum, prefix: str = "G") -> str:
    """All terms of a sum, one DOT graph per term, in sorted order."""
    return "".join(graph_to_dot(g, f"{prefix}{k}", w) for k, (g, w) in enumerate(s, start=1))

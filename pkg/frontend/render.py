from __future__ import annotations

from typing import Dict, Tuple

from rich import box
from rich.console import Console
from rich.table import Table

from backend.graph import GraphSum, graph_signature, symmetry_factor
from backend.series import Series, format_fraction

CHECK = "✓"
CROSS = "✗"


def make_console(width: int, stderr: bool = False) -> Console:
    """Plain console of fixed width so repeated runs print identical bytes."""
    return Console(width=width, stderr=stderr, no_color=True, highlight=False, emoji=False, soft_wrap=False)


def graph_table(s: GraphSum, title: str, unordered: bool = True) -> Table:
    """
    One row per term: signature, weight, symmetry factor and (for unordered
    sums) whether weight * S = 1.
    """
    table = Table(title=title, box=box.SIMPLE, show_footer=True)
    table.add_column("#", justify="right", footer="")
    table.add_column("graph", footer=f"{len(s)} terms")
    table.add_column("weight", justify="right", footer=format_fraction(s.total_weight()))
    table.add_column("S", justify="right")
    if unordered:
        table.add_column("w*S=1", justify="center")
    for k, (g, w) in enumerate(s, start=1):
        sym = symmetry_factor(g)
        row = [str(k), graph_signature(g), format_fraction(w), str(sym)]
        if unordered:
            row.append(CHECK if w * sym == 1 else CROSS)
        table.add_row(*row)
    return table


def parts_table(parts: Dict[Tuple[int, int], Series], title: str) -> Table:
    """sigma^{l,v} contributions by loop and vertex count."""
    table = Table(title=title, box=box.SIMPLE)
    table.add_column("l", justify="right")
    table.add_column("v", justify="right")
    table.add_column("value")
    for (l, v), value in sorted(parts.items()):
        table.add_row(str(l), str(v), "; ".join(value.table()))
    return table

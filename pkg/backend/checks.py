"""
Property suites run by the `check` command.

Every suite walks its grid in increasing size (edges, then vertices, then legs)
and stops at the first failure, so the reported counterexample is a smallest one.
Each returns `{"ok": bool, "suite": str, "checked": int, "counterexample": dict | None}`.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, Dict, Iterator, Optional, Tuple

from backend.feynman import connected_npoint, load_model
from backend.generator import OmegaGenerator
from backend.graph import graph_stats, symmetry_factor
from backend.one_pi import connected_from_1pi, connected_from_1pi_rec, connected_from_1pi_total, max_modified_vertices
from backend.oracle import legendre_one_pi, zero_d_connected_oracle
from backend.series import format_fraction
from backend.tools.data_tools import graph_to_record
from data.bundled import model_path, oracle_cases

logger = logging.getLogger(__name__)

SUITES = ("weights", "equivalence", "completeness", "oracle", "trees")


def _result(suite: str, checked: int, counterexample: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {"ok": counterexample is None, "suite": suite, "checked": checked, "counterexample": counterexample}


def _grid(max_edges: int, max_legs: int) -> Iterator[Tuple[int, int, int]]:
    """(l, v, n) with l + v - 1 <= max_edges, ordered by edges, vertices, legs."""
    for e in range(max_edges + 1):
        for v in range(1, e + 2):
            for n in range(max_legs + 1):
                yield e - v + 1, v, n


def check_weights(gen: OmegaGenerator, max_edges: int, max_legs: int) -> Dict[str, Any]:
    """weight * symmetry factor = 1 and edge/connectivity/leg bookkeeping on every emitted graph."""
    checked = 0
    for l, v, n in _grid(max_edges, max_legs):
        labels = list(range(1, n + 1))
        for g, weight in gen.enumerate_connected(l, v, labels):
            checked += 1
            stats = graph_stats(g)
            problem = None
            if not stats.connected or stats.loops != l or stats.v != v:
                problem = "bookkeeping"
            elif g.labels() != tuple(labels):
                problem = "legs"
            elif weight * symmetry_factor(g) != 1:
                problem = "weight"
            if problem:
                return _result(
                    "weights",
                    checked,
                    {
                        "l": l, "v": v, "n": n, "problem": problem,
                        "graph": graph_to_record(g),
                        "weight": format_fraction(weight),
                        "symmetry_factor": symmetry_factor(g) if stats.connected else None,
                    },
                )
        logger.info("weights: (l=%d, v=%d, n=%d) ok", l, v, n)
    return _result("weights", checked)


def check_equivalence(gen: OmegaGenerator, max_edges: int, max_legs: int) -> Dict[str, Any]:
    """The two recursions give the same vertex-ordered sums."""
    checked = 0
    for l, v, n in _grid(max_edges, max_legs):
        if (l, v) == (0, 1):
            continue
        labels = list(range(1, n + 1))
        first, second = gen.omega(l, v, labels), gen.omega_alt(l, v, labels)
        checked += 1
        if first != second:
            diff = first + second.scaled(-1)
            g, w = diff.items()[0]
            return _result(
                "equivalence",
                checked,
                {"l": l, "v": v, "n": n, "graph": graph_to_record(g), "omega_minus_alt": format_fraction(w)},
            )
    return _result("equivalence", checked)


def check_completeness(gen: OmegaGenerator, max_edges: int, max_legs: int) -> Dict[str, Any]:
    """Support of the recursion equals the brute-force enumeration."""
    checked = 0
    for l, v, n in _grid(min(max_edges, gen.brute_force_max_edges), max_legs):
        support = gen.enumerate_connected(l, v, list(range(1, n + 1))).support()
        expected = gen.brute_force_enumerate(l, v, n)
        checked += 1
        if support != expected:
            missing, extra = sorted(expected - support), sorted(support - expected)
            return _result(
                "completeness",
                checked,
                {
                    "l": l, "v": v, "n": n,
                    "missing": [graph_to_record(g) for g in missing[:1]],
                    "extra": [graph_to_record(g) for g in extra[:1]],
                },
            )
    return _result("completeness", checked)


def check_trees(gen: OmegaGenerator, max_edges: int, max_legs: int) -> Dict[str, Any]:
    """Trees of minimal valence 2 have weight 1; the valence-3 tree count stops at v = n - 2."""
    checked = 0
    for v in range(1, max_edges + 2):
        for n in range(max_legs + 1):
            for g, weight in gen.trees(v, list(range(1, n + 1)), min_degree=2):
                checked += 1
                if weight != 1:
                    return _result(
                        "trees", checked, {"v": v, "n": n, "graph": graph_to_record(g), "weight": format_fraction(weight)}
                    )
    for n in range(3, max_legs + 1):
        last = max_modified_vertices(n)
        if last + 1 > max_edges + 1:
            break
        labels = list(range(1, n + 1))
        checked += 1
        if not len(gen.trees(last, labels, min_degree=3)) or len(gen.trees(last + 1, labels, min_degree=3)):
            return _result("trees", checked, {"n": n, "max_modified_vertices": last})
    return _result("trees", checked)


def check_oracle(gen: OmegaGenerator, max_order: int, max_legs: int) -> Dict[str, Any]:
    """
    Bundled models: graph sums against the log Z oracle, and 1PI tree sums
    (standard and modified, with Legendre-transform tables) against the
    source-shifted oracle.
    """
    checked = 0
    for name, legs in oracle_cases:
        model = load_model(model_path(name), max_order)
        for n in (k for k in legs if k <= max_legs):
            labels = list(range(1, n + 1))
            expected = zero_d_connected_oracle(model, n)
            got = connected_npoint(model, labels, one_point="keep", generator=gen)
            checked += 1
            if got != expected:
                return _result(
                    "oracle", checked,
                    {"model": name, "n": n, "method": "graphs", "graphs": got.table(), "oracle": expected.table()},
                )
        shifted_legs = list(range(2, max_legs + 1))
        if not shifted_legs:
            continue
        for modified in (False, True):
            tau, edge = legendre_one_pi(model, max(shifted_legs), modified=modified)
            for n in shifted_legs:
                labels = list(range(1, n + 1))
                expected = zero_d_connected_oracle(model, n, source_shift=True)
                got = connected_from_1pi_total(labels, tau, edge, generator=gen)
                checked += 1
                if got != expected:
                    return _result(
                        "oracle", checked,
                        {
                            "model": name, "n": n, "method": "modified-1pi" if modified else "1pi",
                            "trees": got.table(), "oracle": expected.table(),
                        },
                    )
            for v in range(1, min(max_order, gen.max_edges + 1) + 1):
                labels = list(range(1, max(shifted_legs) + 1))
                checked += 1
                direct = connected_from_1pi(v, labels, tau, edge, generator=gen)
                if direct != connected_from_1pi_rec(v, labels, tau, edge):
                    return _result("oracle", checked, {"model": name, "v": v, "method": "1pi-recursion"})
        logger.info("oracle: %s ok through order %d", name, max_order)
    return _result("oracle", checked)


def run_suite(
    suite: str,
    gen: OmegaGenerator,
    max_edges: int = 4,
    max_legs: int = 2,
    max_order: int = 3,
) -> Dict[str, Any]:
    """Dispatch a suite by name."""
    runners: Dict[str, Callable[[], Dict[str, Any]]] = {
        "weights": lambda: check_weights(gen, max_edges, max_legs),
        "equivalence": lambda: check_equivalence(gen, max_edges, max_legs),
        "completeness": lambda: check_completeness(gen, max_edges, max_legs),
        "trees": lambda: check_trees(gen, max_edges, max_legs),
        "oracle": lambda: check_oracle(gen, max_order, max_legs),
    }
    if suite not in runners:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    return runners[suite]()

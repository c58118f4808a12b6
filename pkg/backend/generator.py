"""
Recursive generation of all connected graphs with inverse-symmetry-factor weights.

Omega^{0,1} is the identity (one vertex carrying every leg); otherwise

    Omega^{l,v} = 1/(l+v-1) [ sum_{i<v} Q_i Omega^{l,v-1} + sum_{i<=v} T_i Omega^{l-1,v} ],

with the Q summands absent for v = 1 and the T summands absent for l = 0. The
alternative recursion glues one edge either onto an (l-1)-loop graph with two
extra legs or between an ordered pair of smaller graphs. Both are memoized on
(l, v, n) with generic labels 1..n.
"""

from __future__ import annotations

import itertools
import logging
import threading
from concurrent.futures import Executor, ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple

from backend.errors import RecursionDomainError, ResourceGuardError
from backend.graph import (
    DEFAULT_SPECIES,
    VIRTUAL_U,
    VIRTUAL_W,
    Graph,
    GraphSum,
    LabelSpec,
    _components,
    _make,
    accumulate,
    canonical_unordered,
    disjoint_union,
    forget_order,
    glue_legs,
    merge_sums,
    min_valence,
    normalize_labels,
)
from backend.hopf import HALF, apply_Q, apply_T

logger = logging.getLogger(__name__)

OmegaKey = Tuple[int, int, int]


def _call(task: tuple) -> GraphSum:
    fn, *args = task
    return fn(*args)


class OmegaGenerator:
    """
    Memoized generator for Omega^{l,v} and its alternative recursion.

    Args:
        species_count: Number m of edge species (R = sum_a R^a).
        memoize: Keep generic results keyed on (l, v, n).
        workers: Processes for the Q_i / T_i summands of one step; 1 runs inline.
            Results are merged in summand order, so output does not depend on it.
        max_edges: Resource guard on e = l + v - 1.
        brute_force_max_edges: Resource guard for `brute_force_enumerate`.
        canonical_method: Canonicalizer used when forgetting vertex order.
    """

    def __init__(
        self,
        species_count: int = 1,
        memoize: bool = True,
        workers: int = 1,
        max_edges: int = 10,
        brute_force_max_edges: int = 6,
        canonical_method: str = "exhaustive",
    ):
        if species_count < 1:
            raise RecursionDomainError(f"species_count must be >= 1, got {species_count}")
        self.species_count = species_count
        self.memoize = memoize
        self.workers = workers
        self.max_edges = max_edges
        self.brute_force_max_edges = brute_force_max_edges
        self.canonical_method = canonical_method
        self._memo: Dict[OmegaKey, GraphSum] = {}
        self._lock = threading.Lock()
        self._executor: Optional[Executor] = None

    @classmethod
    def from_settings(cls, settings, species_count: int = 1, **kwargs) -> "OmegaGenerator":
        return cls(
            species_count=species_count,
            workers=settings.workers,
            max_edges=settings.max_edges,
            brute_force_max_edges=settings.brute_force_max_edges,
            canonical_method=settings.canonical_method,
            **kwargs,
        )

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def __enter__(self) -> "OmegaGenerator":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def memo_keys(self) -> List[OmegaKey]:
        with self._lock:
            return sorted(self._memo)

    def clear_memo(self) -> None:
        with self._lock:
            self._memo.clear()

    # -----------------------------
    # Validation
    # -----------------------------
    def _check_domain(self, l: int, v: int) -> None:
        if l < 0 or v < 1:
            raise RecursionDomainError(f"need l >= 0 and v >= 1, got l={l}, v={v}")
        e = l + v - 1
        if e > self.max_edges:
            raise ResourceGuardError(f"e = l + v - 1 = {e} exceeds the edge cap {self.max_edges}")

    # -----------------------------
    # Omega
    # -----------------------------
    def generic(self, l: int, v: int, n: int) -> GraphSum:
        """Omega^{l,v} on generic labels 1..n (all default species)."""
        self._check_domain(l, v)
        key = (l, v, n)
        if self.memoize:
            with self._lock:
                cached = self._memo.get(key)
            if cached is not None:
                return cached
        result = self._compute(l, v, n)
        if self.memoize:
            with self._lock:
                # first writer wins; a concurrent duplicate is equal anyway
                result = self._memo.setdefault(key, result)
        return result

    def _compute(self, l: int, v: int, n: int) -> GraphSum:
        if (l, v) == (0, 1):
            legs = [(1, k, DEFAULT_SPECIES) for k in range(1, n + 1)]
            return GraphSum.single(_make(1, (), legs))

        tasks: List[tuple] = []
        if v > 1:
            below = self.generic(l, v - 1, n)
            tasks += [(apply_Q, i, below, self.species_count) for i in range(1, v)]
        if l > 0:
            fewer_loops = self.generic(l - 1, v, n)
            tasks += [(apply_T, i, fewer_loops, self.species_count) for i in range(1, v + 1)]
        parts = self._run(tasks)
        result = merge_sums(parts).scaled(Fraction(1, l + v - 1))
        logger.debug("Omega^{%d,%d} with %d legs: %d ordered terms", l, v, n, len(result))
        return result

    def _run(self, tasks: List[tuple]) -> List[GraphSum]:
        if self.workers <= 1 or len(tasks) <= 1:
            return [_call(task) for task in tasks]
        if self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return list(self._executor.map(_call, tasks))

    def _omega(self, l: int, v: int, pairs: Tuple[Tuple[int, int], ...]) -> GraphSum:
        generic = self.generic(l, v, len(pairs))
        mapping = {k + 1: pair for k, pair in enumerate(pairs)}
        if all(pair == (k, DEFAULT_SPECIES) for k, pair in mapping.items()):
            return generic
        return generic.relabel(mapping)

    def omega(self, l: int, v: int, labels: Sequence[LabelSpec] = ()) -> GraphSum:
        """
        Weighted sum of all vertex-ordered connected graphs with l loops, v vertices
        and the given external labels.

        Args:
            l: Loop number (>= 0).
            v: Vertex count (>= 1).
            labels: Distinct labels >= 1, each an int or a (label, species) pair.

        Raises:
            RecursionDomainError: l < 0 or v < 1.
            ResourceGuardError: l + v - 1 above the edge cap.
            GraphError: Invalid or repeated labels.
        """
        self._check_domain(l, v)
        return self._omega(l, v, normalize_labels(labels))

    def omega_alt(self, l: int, v: int, labels: Sequence[LabelSpec] = ()) -> GraphSum:
        """
        Omega^{l,v} through the alternative recursion (not defined for l = 0, v = 1).

        The first part glues the two virtual legs of Omega^{l-1,v}(labels, u, w)
        into an edge; the second joins Omega^{a,b}(A, u) and Omega^{l-a,v-b}(B, w)
        through an edge for every a, b and ordered bipartition (A, B) of labels.
        """
        self._check_domain(l, v)
        if (l, v) == (0, 1):
            raise RecursionDomainError("the alternative recursion excludes l = 0, v = 1")
        pairs = normalize_labels(labels)
        u, w = (VIRTUAL_U, DEFAULT_SPECIES), (VIRTUAL_W, DEFAULT_SPECIES)
        species = range(1, self.species_count + 1)
        acc: Dict[Graph, Fraction] = {}

        if l > 0:
            for g, weight in self._omega(l - 1, v, pairs + (u, w)).iter_terms():
                for a in species:
                    accumulate(acc, glue_legs(g, VIRTUAL_U, VIRTUAL_W, a), weight * HALF)

        if v > 1:
            for loops_left in range(l + 1):
                for b in range(1, v):
                    for mask in itertools.product((0, 1), repeat=len(pairs)):
                        left_labels = tuple(p for p, bit in zip(pairs, mask) if not bit) + (u,)
                        right_labels = tuple(p for p, bit in zip(pairs, mask) if bit) + (w,)
                        left = self._omega(loops_left, b, left_labels)
                        right = self._omega(l - loops_left, v - b, right_labels)
                        for g1, w1 in left.iter_terms():
                            for g2, w2 in right.iter_terms():
                                joined = disjoint_union(g1, g2)
                                for a in species:
                                    accumulate(acc, glue_legs(joined, VIRTUAL_U, VIRTUAL_W, a), w1 * w2 * HALF)

        return GraphSum.from_accumulator(acc).scaled(Fraction(1, l + v - 1))

    def enumerate_connected(self, l: int, v: int, labels: Sequence[LabelSpec] = ()) -> GraphSum:
        """Unordered connected graphs with weights 1/symmetry factor."""
        return forget_order(self.omega(l, v, labels), self.canonical_method)

    def trees(self, v: int, labels: Sequence[LabelSpec] = (), min_degree: int = 2) -> GraphSum:
        """Unordered trees from Omega^{0,v} whose vertices all have degree >= min_degree."""
        return self.enumerate_connected(0, v, labels).filtered(lambda g: min_valence(g) >= min_degree)

    # -----------------------------
    # Independent completeness oracle
    # -----------------------------
    def brute_force_enumerate(self, l: int, v: int, n: int) -> Set[Graph]:
        """
        Canonical unordered forms of all connected multigraphs with l loops, v vertices
        and n legs labeled 1..n, by exhaustive listing of edge multisets and leg
        placements. No weights.

        Raises:
            ResourceGuardError: e = l + v - 1 above `brute_force_max_edges`.
        """
        if l < 0 or v < 1:
            raise RecursionDomainError(f"need l >= 0 and v >= 1, got l={l}, v={v}")
        e = l + v - 1
        if e > self.brute_force_max_edges:
            raise ResourceGuardError(f"brute force limited to e <= {self.brute_force_max_edges}, got {e}")
        slots = [
            (i, j, s)
            for i in range(1, v + 1)
            for j in range(i, v + 1)
            for s in range(1, self.species_count + 1)
        ]
        found: Set[Graph] = set()
        for edges in itertools.combinations_with_replacement(slots, e):
            if len(_components(v, edges)) != 1:
                continue
            for hosts in itertools.product(range(1, v + 1), repeat=n):
                legs = [(host, k + 1, DEFAULT_SPECIES) for k, host in enumerate(hosts)]
                found.add(canonical_unordered(_make(v, edges, legs), self.canonical_method))
        logger.debug("brute force (%d, %d, %d): %d graphs", l, v, n, len(found))
        return found


@lru_cache(maxsize=None)
def default_generator(species_count: int = 1) -> OmegaGenerator:
    """Process-wide generator with default guards, shared by the evaluators."""
    return OmegaGenerator(species_count=species_count)


def reset_default_generators() -> None:
    """Drop the shared generators and their memo tables."""
    default_generator.cache_clear()

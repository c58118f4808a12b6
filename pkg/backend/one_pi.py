"""
Connected functions as trees of 1PI vertices.

sigma^v = tau^{(x)v} . Omega^{0,v}: every tree in Omega^{0,v} contributes its
weight times tau(degree) per vertex and 1/P per internal edge, where P is the
edge propagator. In the modified expansion the 2-point entry vanishes and P is
the full connected 2-point function, so only trees with all degrees >= 3
contribute and the sum over v stops at v = n - 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Mapping, Optional, Sequence, Union

from backend.errors import OnePIConventionError
from backend.generator import OmegaGenerator, default_generator
from backend.graph import LabelSpec, normalize_labels, vertex_degrees
from backend.series import Series, SeriesRing

logger = logging.getLogger(__name__)

EntryValue = Union[Series, int, Fraction, str]


@dataclass(frozen=True)
class OnePITable:
    """
    1PI values by leg count for a single-species model.

    Entries for 0 and 1 legs must be zero (all 1-point functions vanish); in the
    modified table the 2-leg entry must be zero too. Missing entries are zero.
    """

    ring: SeriesRing
    entries: Dict[int, Series] = field(default_factory=dict)
    modified: bool = False

    def __post_init__(self) -> None:
        for degree, value in self.entries.items():
            if degree < 0:
                raise OnePIConventionError(f"negative leg count {degree} in 1PI table")
            if value.ring != self.ring:
                raise OnePIConventionError(f"entry {degree} lives in {value.ring!r}, expected {self.ring!r}")
        for degree in (0, 1):
            if not self.value(degree).is_zero():
                raise OnePIConventionError(f"the {degree}-leg 1PI entry must vanish")
        if self.modified and not self.value(2).is_zero():
            raise OnePIConventionError("the modified 1PI table must have a vanishing 2-leg entry")

    @classmethod
    def from_values(
        cls, ring: SeriesRing, values: Mapping[int, EntryValue], modified: bool = False
    ) -> "OnePITable":
        """Build a table from numbers, expressions or series."""
        entries = {}
        for degree, value in values.items():
            if isinstance(value, Series):
                entries[degree] = value
            elif isinstance(value, str):
                entries[degree] = ring.parse(value)
            else:
                entries[degree] = ring.constant(value)
        return cls(ring, entries, modified)

    def value(self, degree: int) -> Series:
        return self.entries.get(degree, self.ring.zero())

    def valuation(self) -> Optional[int]:
        """Least truncated degree over nonzero entries; None if all vanish."""
        vals = [v.valuation() for v in self.entries.values() if not v.is_zero()]
        return min(vals) if vals else None


def max_modified_vertices(n: int) -> int:
    """Largest v with a tree of all degrees >= 3 carrying n legs (v + 2 legs at least)."""
    return max(n - 2, 0)


def _edge_factor(two_point: Union[Series, int, Fraction], ring: SeriesRing) -> Series:
    value = two_point if isinstance(two_point, Series) else ring.constant(two_point)
    if value.ring != ring:
        raise OnePIConventionError(f"edge propagator lives in {value.ring!r}, expected {ring!r}")
    return value.inverse()


def connected_from_1pi(
    v: int,
    labels: Sequence[LabelSpec],
    tau: OnePITable,
    two_point: Union[Series, int, Fraction],
    generator: Optional[OmegaGenerator] = None,
) -> Series:
    """
    sigma^v evaluated from the trees of Omega^{0,v}.

    Args:
        v: Vertex count (>= 1).
        labels: External labels.
        tau: 1PI entries by degree.
        two_point: Edge propagator P; each internal edge contributes 1/P.
    """
    if v < 1:
        raise OnePIConventionError(f"v must be >= 1, got {v}")
    if tau.modified and v > max_modified_vertices(len(labels)):
        return tau.ring.zero()
    gen = generator or default_generator(1)
    inverse = _edge_factor(two_point, tau.ring)
    edge_power = inverse ** (v - 1)
    total = tau.ring.zero()
    for g, weight in gen.enumerate_connected(0, v, labels):
        term = edge_power * weight
        for degree in vertex_degrees(g):
            term = term * tau.value(degree)
            if term.is_zero():
                break
        total = total + term
    return total


def connected_from_1pi_rec(
    v: int,
    labels: Sequence[LabelSpec],
    tau: OnePITable,
    two_point: Union[Series, int, Fraction],
) -> Series:
    """
    sigma^v from sigma^v = 1/(v-1) sum_i (sigma^i (x) sigma^{v-i}) . Q.

    Only the number of labels matters, so ordered bipartitions (A, B) collapse to
    binomial counts C(n, |A|).
    """
    if v < 1:
        raise OnePIConventionError(f"v must be >= 1, got {v}")
    n = len(normalize_labels(labels))
    inverse = _edge_factor(two_point, tau.ring)
    memo: Dict[tuple, Series] = {}

    def sigma(vertices: int, legs: int) -> Series:
        key = (vertices, legs)
        if key in memo:
            return memo[key]
        if vertices == 1:
            result = tau.value(legs)
        else:
            result = tau.ring.zero()
            for i in range(1, vertices):
                for k in range(legs + 1):
                    result = result + sigma(i, k + 1) * sigma(vertices - i, legs - k + 1) * comb(legs, k)
            result = result * inverse * Fraction(1, 2 * (vertices - 1))
        memo[key] = result
        return result

    return sigma(v, n)


def connected_from_1pi_total(
    labels: Sequence[LabelSpec],
    tau: OnePITable,
    two_point: Union[Series, int, Fraction],
    generator: Optional[OmegaGenerator] = None,
) -> Series:
    """
    sigma^0 + sum_v sigma^v, with sigma^0 the edge propagator when n = 2.

    The modified expansion stops at v = n - 2. The standard one stops where the
    vertex values fall below truncation.

    Raises:
        OnePIConventionError: The standard sum does not terminate (an entry with
            a constant term, or no truncated variable).
    """
    n = len(normalize_labels(labels))
    ring = tau.ring
    total = ring.zero()
    if n == 2:
        total = two_point if isinstance(two_point, Series) else ring.constant(two_point)
    if tau.modified:
        last = max_modified_vertices(n)
    else:
        valuation = tau.valuation()
        budget = sum(o for o in ring.orders if o is not None)
        if valuation is None:
            return total
        if valuation < 1 or not any(o is not None for o in ring.orders):
            raise OnePIConventionError("standard 1PI tree sum does not terminate: entries need positive valuation")
        last = budget // valuation
    for v in range(1, last + 1):
        total = total + connected_from_1pi(v, labels, tau, two_point, generator)
        logger.debug("1PI trees: summed through v=%d", v)
    return total

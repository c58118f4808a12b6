"""
Feynman-rule evaluation of graph sums in a zero-dimensional field model.

A graph is mapped to a Series: the `bare` convention multiplies a propagator
per internal edge, a coupling per vertex and (unless amputated) a propagator
per external leg; the `dressed` convention divides by the propagator on every
internal edge and dresses each vertex with a propagator per attachment. Both
conventions give the same value for every graph.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator
from sympy import SympifyError, sympify

from backend.errors import ModelError
from backend.generator import OmegaGenerator, default_generator
from backend.graph import (
    DEFAULT_SPECIES,
    Graph,
    GraphSum,
    LabelSpec,
    has_tadpole,
    is_one_particle_irreducible,
    normalize_labels,
)
from backend.series import Series, SeriesRing

logger = logging.getLogger(__name__)

Profile = Tuple[int, ...]
RESERVED_NAMES = ("j", "x", "t")


class FieldModel(BaseModel):
    """
    Feynman rules of a zero-dimensional model.

    `couplings` is keyed by the sorted species profile of a vertex (one entry per
    leg or half-edge at it), so its length is the vertex degree. Profiles missing
    from the table are absent interactions and evaluate to zero, unless `strict`
    is set, in which case they are an error.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = "model"
    ring: SeriesRing
    species: Tuple[int, ...] = (DEFAULT_SPECIES,)
    propagators: Dict[int, Series]
    couplings: Dict[Profile, Series]
    convention: Literal["bare", "dressed"] = "bare"
    amputated: bool = False
    one_point: Literal["keep", "drop"] = "keep"
    strict: bool = False

    @model_validator(mode="after")
    def _check_tables(self) -> "FieldModel":
        if self.species != tuple(range(1, len(self.species) + 1)):
            raise ValueError(f"species must be numbered 1..m, got {self.species}")
        for s in self.species:
            if s not in self.propagators:
                raise ValueError(f"no propagator for species {s}")
        for s, value in self.propagators.items():
            if value.ring != self.ring:
                raise ValueError(f"propagator of species {s} lives in {value.ring!r}, expected {self.ring!r}")
            if value.is_zero():
                raise ValueError(f"propagator of species {s} is zero")
        for profile, value in self.couplings.items():
            if list(profile) != sorted(profile) or any(s not in self.species for s in profile):
                raise ValueError(f"coupling profile {profile} must be sorted and use declared species")
            if value.ring != self.ring:
                raise ValueError(f"coupling {profile} lives in {value.ring!r}, expected {self.ring!r}")
        return self

    @property
    def single_species(self) -> bool:
        return self.species == (DEFAULT_SPECIES,)

    def propagator(self, species: int = DEFAULT_SPECIES) -> Series:
        try:
            return self.propagators[species]
        except KeyError:
            raise ModelError(f"model {self.name!r} has no species {species}") from None

    def coupling(self, profile: Profile) -> Series:
        value = self.couplings.get(tuple(sorted(profile)))
        if value is None:
            if self.strict:
                raise ModelError(f"model {self.name!r} has no coupling for vertex profile {tuple(profile)}")
            return self.ring.zero()
        return value

    def declares(self, g: Graph) -> bool:
        """True if every vertex profile of g has an entry in the coupling table."""
        return all(tuple(sorted(profile)) in self.couplings for profile in _vertex_profiles(g))

    def coupling_degrees(self) -> List[int]:
        return sorted({len(p) for p, value in self.couplings.items() if not value.is_zero()})

    def truncation_budget(self) -> int:
        """Largest total degree in truncated variables that survives truncation."""
        orders = [o for o in self.ring.orders if o is not None]
        if not orders:
            raise ModelError(f"model {self.name!r} declares no truncated coupling variable")
        return sum(orders)

    def coupling_valuation(self) -> int:
        """Least truncated degree over all nonzero couplings."""
        vals = [value.valuation() for value in self.couplings.values() if not value.is_zero()]
        if not vals:
            raise ModelError(f"model {self.name!r} has no nonzero coupling")
        return min(vals)

    def with_max_order(self, max_order: int) -> "FieldModel":
        """Same rules with every truncated variable cut at `max_order`."""
        ring = self.ring.with_orders({v: max_order for v, o in zip(self.ring.variables, self.ring.orders) if o is not None})
        return self.model_copy(
            update={
                "ring": ring,
                "propagators": {s: p.to_ring(ring) for s, p in self.propagators.items()},
                "couplings": {k: c.to_ring(ring) for k, c in self.couplings.items()},
            }
        )


def phi_k_model(
    k: int,
    max_order: int,
    propagator: Union[int, Fraction, str] = 1,
    coupling: str = "g",
    **options,
) -> FieldModel:
    """
    Single scalar with interaction g x^k / k!: vertex factor g at degree k.

    `propagator` may be a number or an expression in an extra untruncated symbol
    (for example "G"), which is then added to the ring.
    """
    if k < 1:
        raise ModelError(f"interaction degree must be >= 1, got {k}")
    try:
        expr = sympify(str(propagator))
    except SympifyError as exc:
        raise ModelError(f"cannot read propagator {propagator!r}: {exc}") from exc
    symbols = sorted(str(sym) for sym in expr.free_symbols if str(sym) != coupling)
    ring = SeriesRing([coupling] + symbols, {coupling: max_order})
    prop = ring.parse(str(propagator))
    try:
        return FieldModel(
            name=options.pop("name", f"phi{k}"),
            ring=ring,
            propagators={DEFAULT_SPECIES: prop},
            couplings={(DEFAULT_SPECIES,) * k: ring.variable(coupling)},
            **options,
        )
    except ValidationError as exc:
        raise ModelError(str(exc)) from exc


def load_model(path: Union[str, Path], max_order: int) -> FieldModel:
    """
    Read a TOML model file and build its FieldModel truncated at `max_order`.

    Raises:
        ModelError: Unreadable file, unknown keys, bad expressions or tables.
    """
    from backend.tools.data_tools import read_model_file

    spec = read_model_file(Path(path))
    clash = set(spec.variables + spec.symbols) & set(RESERVED_NAMES)
    if clash:
        raise ModelError(f"variable names {sorted(clash)} are reserved")
    ring = SeriesRing(spec.variables + spec.symbols, {v: max_order for v in spec.variables})
    try:
        propagators = {int(s): ring.parse(expr) for s, expr in spec.propagators.items()}
        couplings = {}
        for entry in spec.couplings:
            profile = tuple(sorted(entry.legs))
            if profile in couplings:
                raise ModelError(f"coupling profile {profile} declared twice")
            couplings[profile] = ring.parse(entry.value)
        model = FieldModel(
            name=spec.name,
            ring=ring,
            species=tuple(sorted(propagators)),
            propagators=propagators,
            couplings=couplings,
            convention=spec.convention,
            amputated=spec.amputated,
            one_point=spec.one_point,
            strict=spec.strict,
        )
    except ModelError:
        raise
    except ValueError as exc:
        raise ModelError(f"invalid model {path}: {exc}") from exc
    logger.info("loaded model %s from %s (max order %d)", model.name, path, max_order)
    return model


# -----------------------------
# Evaluation
# -----------------------------
def _vertex_profiles(g: Graph) -> List[List[int]]:
    profiles: List[List[int]] = [[] for _ in range(g.v + 1)]
    for i, j, s in g.edges:
        profiles[i].append(s)
        profiles[j].append(s)
    for host, _, s in g.legs:
        profiles[host].append(s)
    return profiles[1:]


def evaluate_graph(g: Graph, model: FieldModel) -> Series:
    """
    Feynman value of one graph (its weight is not included).

    Raises:
        ModelError: Unknown species, or a missing coupling in a strict model.
    """
    value = model.ring.one()
    profiles = _vertex_profiles(g)
    if model.convention == "bare":
        for _, _, s in g.edges:
            value = value * model.propagator(s)
        for profile in profiles:
            value = value * model.coupling(tuple(profile))
        if not model.amputated:
            for _, _, s in g.legs:
                value = value * model.propagator(s)
        return value

    for _, _, s in g.edges:
        value = value / model.propagator(s)
    for profile in profiles:
        dressed = model.coupling(tuple(profile))
        for s in profile:
            dressed = dressed * model.propagator(s)
        value = value * dressed
    if model.amputated:
        for _, _, s in g.legs:
            value = value / model.propagator(s)
    return value


def evaluate_sum(s: GraphSum, model: FieldModel) -> Series:
    """Sum of weight times graph value over all terms."""
    total = model.ring.zero()
    for g, weight in s:
        total = total + evaluate_graph(g, model) * weight
    return total


# -----------------------------
# n-point functions from graphs
# -----------------------------
def vertex_bound(model: FieldModel) -> int:
    """Most vertices a graph can have before its value falls below truncation."""
    if not model.coupling_degrees():
        return 0
    valuation = model.coupling_valuation()
    if valuation < 1:
        raise ModelError(f"model {model.name!r} has a coupling with a constant term; the vertex sum is unbounded")
    return model.truncation_budget() // valuation


def loop_range(model: FieldModel, v: int, n: int) -> range:
    """Loop numbers for which a v-vertex graph with n legs can have all vertex degrees declared."""
    degrees = model.coupling_degrees()
    if not degrees:
        return range(0)
    half_edges = v * max(degrees) - n
    if half_edges < 2 * (v - 1):
        return range(0)
    return range(0, half_edges // 2 - v + 2)


def free_two_point(model: FieldModel, pairs: Sequence[Tuple[int, int]]) -> Series:
    """sigma^{0,0}: the bare line joining two legs of equal species."""
    if len(pairs) != 2 or pairs[0][1] != pairs[1][1]:
        return model.ring.zero()
    prop = model.propagator(pairs[0][1])
    return 1 / prop if model.amputated else prop


def npoint_parts(
    model: FieldModel,
    labels: Sequence[LabelSpec],
    one_point: Optional[str] = None,
    generator: Optional[OmegaGenerator] = None,
) -> Dict[Tuple[int, int], Series]:
    """
    sigma^{l,v} for every (l, v) that survives truncation, keyed (l, v).

    (0, 0) holds the free line for two legs. Only graphs whose vertex profiles
    all appear in the coupling table are evaluated, so a strict model never
    sees an undeclared vertex here. With `one_point="drop"` graphs with
    a tadpole are discarded, which sets every 1-point function to zero.
    """
    pairs = normalize_labels(labels)
    one_point = one_point or model.one_point
    if one_point == "drop" and not pairs:
        raise ModelError("one_point=drop needs at least one external leg")
    gen = generator or default_generator(len(model.species))
    if gen.species_count != len(model.species):
        raise ModelError(f"generator has {gen.species_count} species, model {model.name!r} has {len(model.species)}")

    parts: Dict[Tuple[int, int], Series] = {}
    free = free_two_point(model, pairs)
    if not free.is_zero():
        parts[(0, 0)] = free
    for v in range(1, vertex_bound(model) + 1):
        for l in loop_range(model, v, len(pairs)):
            graphs = gen.enumerate_connected(l, v, pairs).filtered(model.declares)
            if one_point == "drop":
                graphs = graphs.filtered(lambda g: not has_tadpole(g))
            value = evaluate_sum(graphs, model)
            logger.debug("sigma^{%d,%d}: %d graphs", l, v, len(graphs))
            if not value.is_zero():
                parts[(l, v)] = value
    return parts


def connected_npoint(
    model: FieldModel,
    labels: Sequence[LabelSpec],
    one_point: Optional[str] = None,
    generator: Optional[OmegaGenerator] = None,
) -> Series:
    """Connected n-point function: sigma^{0,0} plus every sigma^{l,v} within truncation."""
    total = model.ring.zero()
    for value in npoint_parts(model, labels, one_point, generator).values():
        total = total + value
    return total


# -----------------------------
# Evaluated alternative recursion
# -----------------------------
class EvaluatedRecursion:
    """
    The alternative recursion pushed through the Feynman rules.

    Values depend only on the number of legs, so sigma^{l,v}(n) is memoized on
    (l, v, n) and label bipartitions collapse to binomial counts. Single species only.
    """

    def __init__(self, model: FieldModel):
        if not model.single_species:
            raise ModelError("the evaluated recursion supports single-species models only")
        self.model = model
        prop = model.propagator()
        self.glue = prop if model.amputated else 1 / prop
        self.leg = model.ring.one() if model.amputated else prop
        self._memo: Dict[Tuple[int, int, int], Series] = {}

    def sigma(self, l: int, v: int, n: int) -> Series:
        key = (l, v, n)
        if key not in self._memo:
            self._memo[key] = self._compute(l, v, n)
        return self._memo[key]

    def _compute(self, l: int, v: int, n: int) -> Series:
        if l < 0 or v < 1 or n < 0:
            raise ModelError(f"sigma^{{{l},{v}}}({n}) is outside the recursion domain")
        model = self.model
        if (l, v) == (0, 1):
            return model.coupling((DEFAULT_SPECIES,) * n) * self.leg ** n
        total = model.ring.zero()
        if l > 0:
            total = total + self.sigma(l - 1, v, n + 2)
        for a in range(l + 1):
            for b in range(1, v):
                for k in range(n + 1):
                    total = total + self.sigma(a, b, k + 1) * self.sigma(l - a, v - b, n - k + 1) * comb(n, k)
        return total * self.glue * Fraction(1, 2 * (l + v - 1))


def sigma_recursive(model: FieldModel, l: int, v: int, n: int) -> Series:
    """sigma^{l,v} on n legs from the evaluated alternative recursion."""
    return EvaluatedRecursion(model).sigma(l, v, n)


def recursive_parts(model: FieldModel, n: int) -> Dict[Tuple[int, int], Series]:
    """`npoint_parts` through the evaluated recursion (one_point=keep only)."""
    if model.one_point == "drop":
        raise ModelError("tadpoles cannot be dropped at the evaluated level; use the graph method")
    rec = EvaluatedRecursion(model)
    parts: Dict[Tuple[int, int], Series] = {}
    if n == 2:
        parts[(0, 0)] = free_two_point(model, [(1, DEFAULT_SPECIES), (2, DEFAULT_SPECIES)])
    for v in range(1, vertex_bound(model) + 1):
        for l in loop_range(model, v, n):
            value = rec.sigma(l, v, n)
            if not value.is_zero():
                parts[(l, v)] = value
    return parts


def connected_npoint_recursive(model: FieldModel, n: int) -> Series:
    """`connected_npoint` computed through the evaluated recursion."""
    total = model.ring.zero()
    for value in recursive_parts(model, n).values():
        total = total + value
    return total


# -----------------------------
# 1PI functions from graphs
# -----------------------------
def one_pi_from_graphs(
    model: FieldModel,
    n: int,
    generator: Optional[OmegaGenerator] = None,
) -> Series:
    """
    Amputated sum over one-particle irreducible graphs with n legs.

    For n >= 3 this is the n-th derivative of the effective action at zero
    field; for n = 2 it is the self-energy.
    """
    amputated = model.model_copy(update={"amputated": True})
    gen = generator or default_generator(len(model.species))
    labels = list(range(1, n + 1))
    total = model.ring.zero()
    for v in range(1, vertex_bound(model) + 1):
        for l in loop_range(model, v, n):
            graphs = gen.enumerate_connected(l, v, labels).filtered(model.declares)
            graphs = graphs.filtered(is_one_particle_irreducible)
            total = total + evaluate_sum(graphs, amputated)
    return total

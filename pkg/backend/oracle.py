"""
Zero-dimensional path-integral oracle.

For a single scalar with propagator G and interaction V(x) = sum_k c_k x^k / k!,

    Z(j) = < exp(V(x) + j x) >,   <x^(2m)> = (2m-1)!! G^m,   W(j) = log Z(j),

and the connected n-point function is the n-th j-derivative of W at j = 0. The
series are computed exactly and independently of any graph enumeration.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple

from sympy import factorial2

from backend.errors import ModelError
from backend.feynman import FieldModel
from backend.graph import DEFAULT_SPECIES
from backend.one_pi import OnePITable
from backend.series import Series, SeriesRing

logger = logging.getLogger(__name__)

SOURCE = "j"
FIELD = "x"
SHIFT = "t"


def gaussian_moment(m: int, propagator: Series) -> Series:
    """<x^m> for the Gaussian weight with variance `propagator`."""
    if m % 2:
        return propagator.ring.zero()
    return propagator ** (m // 2) * int(factorial2(m - 1))


def _interaction(model: FieldModel) -> Dict[int, Series]:
    if not model.single_species:
        raise ModelError(f"the oracle needs a single-species model, {model.name!r} has {model.species}")
    by_degree: Dict[int, Series] = {}
    for profile, value in model.couplings.items():
        if not value.is_zero():
            by_degree[len(profile)] = value
    if 0 in by_degree:
        raise ModelError("a degree-0 coupling is a vacuum constant, not an interaction")
    return by_degree


def generating_function(model: FieldModel, source_order: int) -> Series:
    """Z(j) truncated at j^source_order, in the model ring extended by j."""
    ring_j = model.ring.extended([SOURCE], {SOURCE: source_order})
    ring_jx = ring_j.extended([FIELD])
    x = ring_jx.variable(FIELD)
    exponent = ring_jx.variable(SOURCE) * x
    for degree, value in _interaction(model).items():
        exponent = exponent + value.to_ring(ring_jx) * x ** degree * Fraction(1, factorial(degree))
    integrand = exponent.exp()

    # replace x^m by <x^m>
    field_index = len(ring_j.variables)
    by_power: Dict[int, List[Tuple[Tuple[int, ...], Fraction]]] = {}
    for monom, coeff in integrand.terms():
        by_power.setdefault(monom[field_index], []).append((monom[:field_index], coeff))
    propagator = model.propagator().to_ring(ring_j)
    z = ring_j.zero()
    for power, terms in sorted(by_power.items()):
        if power % 2 == 0:
            z = z + ring_j.from_terms(terms) * gaussian_moment(power, propagator)
    return z


def _coefficient(series: Series, name: str, power: int, target: SeriesRing) -> Series:
    index = series.ring.variables.index(name)
    terms = [(m[:index] + m[index + 1:], c) for m, c in series.terms() if m[index] == power]
    return target.from_terms(terms)


def cumulants(model: FieldModel, count: int) -> List[Series]:
    """W^(m)(0) for m = 0..count, as series in the model ring."""
    if count < 0:
        raise ModelError(f"cumulant count must be >= 0, got {count}")
    w = generating_function(model, count).log()
    return [_coefficient(w, SOURCE, m, model.ring) * factorial(m) for m in range(count + 1)]


def shifted_cumulants(model: FieldModel, count: int) -> List[Series]:
    """
    W^(m)(j0) for m = 0..count, where the source j0 solves W'(j0) = 0.

    j0 starts at order one in the couplings, so its powers vanish past the
    truncation budget and a fixed-point iteration of that many steps is exact.
    """
    budget = model.truncation_budget()
    w = cumulants(model, max(count, 1) + budget + 1)
    j0 = model.ring.zero()
    inv_w2 = w[2].inverse()
    for _ in range(budget + 1):
        rest = w[1]
        for k in range(2, budget + 2):
            rest = rest + w[k + 1] * j0 ** k * Fraction(1, factorial(k))
        j0 = -rest * inv_w2
    logger.debug("vacuum source j0 = %s", j0.table())
    shifted = []
    for m in range(count + 1):
        value = model.ring.zero()
        for r in range(budget + 1):
            value = value + w[m + r] * j0 ** r * Fraction(1, factorial(r))
        shifted.append(value)
    return shifted


def zero_d_connected_oracle(
    model: FieldModel,
    n: int,
    max_coupling_order: Optional[int] = None,
    source_shift: bool = False,
) -> Series:
    """
    Connected n-point function of the zero-dimensional model, order by order.

    Args:
        model: Single-species model; the oracle ignores its evaluation convention.
        n: Number of external legs (>= 0).
        max_coupling_order: Re-truncate the model's couplings first.
        source_shift: Evaluate at the source where the 1-point function vanishes.

    Returns:
        The unamputated value, or the value divided by G^n for amputated models.
    """
    if n < 0:
        raise ModelError(f"leg count must be >= 0, got {n}")
    if max_coupling_order is not None:
        model = model.with_max_order(max_coupling_order)
    values = shifted_cumulants(model, n) if source_shift else cumulants(model, n)
    value = values[n]
    if model.amputated:
        value = value / model.propagator() ** n
    return value


def legendre_one_pi(model: FieldModel, max_legs: int, modified: bool = False) -> Tuple[OnePITable, Series]:
    """
    1PI functions from the Legendre transform of W at the vacuum where the
    1-point function vanishes.

    With gamma_2 = -1/W'' and gamma_{k+1} = gamma_k' / W'' (derivatives in j):
    standard entries tau(2) = G + G^2 gamma_2, tau(k) = gamma_k G^k with edge
    propagator G; modified entries tau(2) = 0, tau(k) = gamma_k D^k with the
    full propagator D = W'' as edge propagator.

    Returns:
        (table, edge propagator).
    """
    if max_legs < 2:
        raise ModelError(f"max_legs must be >= 2, got {max_legs}")
    c = shifted_cumulants(model, max_legs)
    depth = max_legs - 2
    ring_t = model.ring.extended([SHIFT], {SHIFT: depth})
    t = ring_t.variable(SHIFT)
    w2 = ring_t.zero()
    for m in range(depth + 1):
        w2 = w2 + c[m + 2].to_ring(ring_t) * t ** m * Fraction(1, factorial(m))
    inv = w2.inverse()
    gammas = {2: -inv}
    for k in range(2, max_legs):
        gammas[k + 1] = gammas[k].diff(SHIFT) * inv
    gamma = {k: value.at_zero(SHIFT).to_ring(model.ring) for k, value in gammas.items()}

    if modified:
        edge = c[2]
        entries = {2: model.ring.zero()}
    else:
        edge = model.propagator(DEFAULT_SPECIES)
        entries = {2: edge + edge ** 2 * gamma[2]}
    for k in range(3, max_legs + 1):
        entries[k] = gamma[k] * edge ** k
    return OnePITable(model.ring, entries, modified=modified), edge

"""
Truncated multivariate power series with exact rational coefficients.

A `SeriesRing` fixes the variable names and, per variable, an inclusive
truncation order (None = polynomial in that variable, never truncated).
Storage and arithmetic are sympy sparse polynomials over QQ; every product is
truncated right away.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Symbol
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, PolyRing

from backend.errors import SeriesError, TruncationError

Scalar = Union[int, Fraction]


def to_qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class SeriesRing:
    """Variables and truncation orders shared by a family of series."""

    def __init__(self, variables: Sequence[str], orders: Optional[Mapping[str, Optional[int]]] = None):
        if not variables:
            raise SeriesError("a series ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise SeriesError(f"duplicate variable names: {list(variables)}")
        orders = dict(orders or {})
        unknown = set(orders) - set(variables)
        if unknown:
            raise SeriesError(f"truncation orders given for unknown variables: {sorted(unknown)}")
        self.variables: Tuple[str, ...] = tuple(variables)
        self.orders: Tuple[Optional[int], ...] = tuple(orders.get(name) for name in variables)
        self.poly_ring = PolyRing(self.variables, QQ)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeriesRing):
            return NotImplemented
        return self.variables == other.variables and self.orders == other.orders

    def __hash__(self) -> int:
        return hash((self.variables, self.orders))

    def __repr__(self) -> str:
        spec = ", ".join(f"{v}<={o}" if o is not None else v for v, o in zip(self.variables, self.orders))
        return f"SeriesRing({spec})"

    def order(self, name: str) -> Optional[int]:
        return self.orders[self._index(name)]

    def _index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise SeriesError(f"unknown variable {name!r}; ring has {self.variables}") from None

    def extended(self, variables: Sequence[str], orders: Optional[Mapping[str, Optional[int]]] = None) -> "SeriesRing":
        """A ring with extra variables appended."""
        merged = dict(zip(self.variables, self.orders))
        merged.update(orders or {})
        return SeriesRing(self.variables + tuple(variables), merged)

    def with_orders(self, orders: Mapping[str, Optional[int]]) -> "SeriesRing":
        merged = dict(zip(self.variables, self.orders))
        merged.update(orders)
        return SeriesRing(self.variables, merged)

    # constructors
    def zero(self) -> "Series":
        return Series(self, self.poly_ring.zero)

    def one(self) -> "Series":
        return self.constant(1)

    def constant(self, value: Scalar) -> "Series":
        return Series(self, self.poly_ring.ground_new(to_qq(value)))

    def variable(self, name: str) -> "Series":
        return Series(self, self.poly_ring.gens[self._index(name)])

    def parse(self, text: str) -> "Series":
        """Parse an expression such as `g/6` or `2*g**2 + 1` in the ring's variables."""
        local = {name: Symbol(name) for name in self.variables}
        try:
            expr = parse_expr(str(text), local_dict=local)
            return Series(self, self.poly_ring.from_expr(expr))
        except Exception as exc:
            raise SeriesError(f"cannot read {text!r} as a polynomial in {self.variables}: {exc}") from exc

    def from_terms(self, terms: Iterable[Tuple[Sequence[int], Scalar]]) -> "Series":
        poly = self.poly_ring.zero
        for monom, coeff in terms:
            poly += self.poly_ring({tuple(monom): to_qq(coeff)})
        return Series(self, poly)


class Series:
    """An element of a SeriesRing; immutable, always truncated."""

    __slots__ = ("ring", "poly")

    def __init__(self, ring: SeriesRing, poly: PolyElement):
        self.ring = ring
        self.poly = _truncate(ring, poly)

    # -----------------------------
    # Inspection
    # -----------------------------
    def is_zero(self) -> bool:
        return not self.poly

    def constant_term(self) -> Fraction:
        return to_fraction(self.poly.get((0,) * len(self.ring.variables), QQ.zero))

    def coefficient(self, **exponents: int) -> Fraction:
        """Coefficient of the monomial with the given exponents (missing variables: 0)."""
        monom = [0] * len(self.ring.variables)
        for name, exp in exponents.items():
            index = self.ring._index(name)
            limit = self.ring.orders[index]
            if limit is not None and exp > limit:
                raise TruncationError(f"{name}^{exp} lies above the truncation order {limit}")
            monom[index] = exp
        return to_fraction(self.poly.get(tuple(monom), QQ.zero))

    def terms(self) -> List[Tuple[Tuple[int, ...], Fraction]]:
        return sorted((monom, to_fraction(c)) for monom, c in self.poly.items())

    def valuation(self) -> Optional[int]:
        """Least total degree in the truncated variables over all monomials; None for zero."""
        if self.is_zero():
            return None
        return min(self._truncated_degree(m) for m in self.poly)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.poly)

    def _truncated_degree(self, monom: Tuple[int, ...]) -> int:
        return sum(e for e, o in zip(monom, self.ring.orders) if o is not None)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Series):
            return NotImplemented
        return self.ring == other.ring and self.poly == other.poly

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Series({self.poly.as_expr()}, {self.ring!r})"

    # -----------------------------
    # Arithmetic
    # -----------------------------
    def _coerce(self, other) -> "Series":
        if isinstance(other, Series):
            if other.ring != self.ring:
                raise SeriesError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        raise TypeError(f"cannot combine Series with {type(other).__name__}")

    def __add__(self, other) -> "Series":
        return Series(self.ring, self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(self.ring, -self.poly)

    def __sub__(self, other) -> "Series":
        return Series(self.ring, self.poly - self._coerce(other).poly)

    def __rsub__(self, other) -> "Series":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return Series(self.ring, self.poly.mul_ground(to_qq(other)))
        return Series(self.ring, self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise SeriesError("division by zero")
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "Series":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Series":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def diff(self, name: str) -> "Series":
        gen = self.ring.poly_ring.gens[self.ring._index(name)]
        return Series(self.ring, self.poly.diff(gen))

    def at_zero(self, name: str) -> "Series":
        """Set variable `name` to zero."""
        index = self.ring._index(name)
        kept = {m: c for m, c in self.poly.items() if m[index] == 0}
        return Series(self.ring, self.ring.poly_ring.from_dict(kept) if kept else self.ring.poly_ring.zero)

    def to_ring(self, target: SeriesRing) -> "Series":
        """
        Re-express in another ring matching variables by name.

        Raises:
            SeriesError: If a monomial uses a variable the target ring lacks.
        """
        positions = []
        for name in self.ring.variables:
            positions.append(target.variables.index(name) if name in target.variables else None)
        out: Dict[Tuple[int, ...], object] = {}
        for monom, coeff in self.poly.items():
            new = [0] * len(target.variables)
            for exp, pos, name in zip(monom, positions, self.ring.variables):
                if exp and pos is None:
                    raise SeriesError(f"variable {name!r} is not in {target!r}")
                if pos is not None:
                    new[pos] = exp
            out[tuple(new)] = out.get(tuple(new), QQ.zero) + coeff
        poly = target.poly_ring.from_dict(out) if out else target.poly_ring.zero
        return Series(target, poly)

    # -----------------------------
    # Transcendental operations
    # -----------------------------
    def _nilpotent_part(self, constant: Fraction) -> "Series":
        rest = self - constant
        for monom in rest.poly:
            if self._truncated_degree(monom) == 0:
                raise SeriesError(
                    "expansion would not terminate: a non-constant term involves only untruncated variables"
                )
        return rest

    def _power_sum(self, coefficients) -> "Series":
        """sum_k coefficients(k) * self^k for nilpotent self, k >= 0, until the powers vanish."""
        total = self.ring.zero()
        power = self.ring.one()
        k = 0
        while not power.is_zero():
            total = total + power * coefficients(k)
            power = power * self
            k += 1
        return total

    def inverse(self) -> "Series":
        """Multiplicative inverse; the constant term must be nonzero."""
        c = self.constant_term()
        if c == 0:
            raise SeriesError("cannot invert a series with zero constant term")
        x = self._nilpotent_part(c) * (1 / c)
        return (-x)._power_sum(lambda k: Fraction(1)) * (1 / c)

    def log(self) -> "Series":
        """Logarithm; the constant term must be 1."""
        if self.constant_term() != 1:
            raise SeriesError(f"log needs constant term 1, got {self.constant_term()}")
        x = self._nilpotent_part(Fraction(1))
        return x._power_sum(lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0))

    def exp(self) -> "Series":
        """Exponential; the constant term must be 0."""
        if self.constant_term() != 0:
            raise SeriesError(f"exp needs constant term 0, got {self.constant_term()}")
        x = self._nilpotent_part(Fraction(0))
        return x._power_sum(lambda k: Fraction(1, factorial(k)))

    # -----------------------------
    # Formatting
    # -----------------------------
    def table(self, variables: Optional[Sequence[str]] = None) -> List[str]:
        """Rows `g^p j^q: p/q` in increasing monomial order; zero series gives `0`."""
        names = list(variables or self.ring.variables)
        index = [self.ring._index(name) for name in names]
        rows = []
        for monom, coeff in self.terms():
            if any(monom[k] for k in range(len(monom)) if k not in index):
                head = " ".join(f"{v}^{e}" for v, e in zip(self.ring.variables, monom))
            else:
                head = " ".join(f"{name}^{monom[k]}" for name, k in zip(names, index))
            rows.append(f"{head}: {format_fraction(coeff)}")
        return rows or ["0"]


def _truncate(ring: SeriesRing, poly: PolyElement) -> PolyElement:
    if all(o is None for o in ring.orders):
        return poly
    drop = {m for m in poly if any(o is not None and e > o for e, o in zip(m, ring.orders))}
    if not drop:
        return poly
    kept = {m: c for m, c in poly.items() if m not in drop}
    return ring.poly_ring.from_dict(kept) if kept else ring.poly_ring.zero


def format_fraction(value: Fraction) -> str:
    """`p/q`, or `p` when the denominator is 1."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Inverse of `format_fraction`; rejects decimal points and exponents."""
    text = str(text).strip()
    if any(ch in text for ch in ".eE "):
        raise ValueError(f"weights must be decimal-free rationals like '1/2', got {text!r}")
    return Fraction(text)

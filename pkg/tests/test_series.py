from fractions import Fraction

import pytest

from backend.errors import SeriesError, TruncationError
from backend.series import SeriesRing, format_fraction, parse_fraction


@pytest.fixture
def ring():
    return SeriesRing(["g"], {"g": 4})


class TestRing:
    def test_duplicate_variables(self):
        with pytest.raises(SeriesError):
            SeriesRing(["g", "g"])

    def test_unknown_order(self):
        with pytest.raises(SeriesError):
            SeriesRing(["g"], {"h": 2})

    def test_extended_keeps_orders(self, ring):
        wider = ring.extended(["j"], {"j": 3})
        assert wider.variables == ("g", "j")
        assert wider.order("g") == 4 and wider.order("j") == 3

    def test_parse(self, ring):
        s = ring.parse("g/6 + 2*g**2")
        assert s.coefficient(g=1) == Fraction(1, 6)
        assert s.coefficient(g=2) == 2

    def test_parse_unknown_symbol(self, ring):
        with pytest.raises(SeriesError):
            ring.parse("h + 1")


class TestArithmetic:
    def test_products_are_truncated(self, ring):
        g = ring.variable("g")
        assert (g ** 3 * g ** 2).is_zero()
        assert (1 + g) ** 5 == ring.parse("1 + 5*g + 10*g**2 + 10*g**3 + 5*g**4")

    def test_coefficient_above_order(self, ring):
        with pytest.raises(TruncationError):
            ring.one().coefficient(g=5)

    def test_ring_mismatch(self, ring):
        with pytest.raises(SeriesError):
            ring.one() + SeriesRing(["g"], {"g": 2}).one()

    def test_inverse(self, ring):
        s = ring.parse("1 - g")
        assert s.inverse() == ring.parse("1 + g + g**2 + g**3 + g**4")
        assert s * s.inverse() == 1

    def test_inverse_needs_constant(self, ring):
        with pytest.raises(SeriesError):
            ring.variable("g").inverse()

    def test_division(self, ring):
        g = ring.variable("g")
        assert (g / (1 + g)) * (1 + g) == g
        with pytest.raises(SeriesError):
            g / 0

    def test_exp_log_round_trip(self, ring):
        s = ring.parse("g - g**2/3 + 2*g**3")
        assert s.exp().log() == s
        assert ring.variable("g").exp().coefficient(g=3) == Fraction(1, 6)

    def test_exp_needs_truncated_variable(self):
        mixed = SeriesRing(["g", "t"], {"g": 2})
        with pytest.raises(SeriesError):
            mixed.variable("t").exp()
        assert (mixed.variable("t") * mixed.variable("g")).exp().coefficient(g=2, t=2) == Fraction(1, 2)

    def test_log_needs_unit_constant(self, ring):
        with pytest.raises(SeriesError):
            ring.constant(2).log()

    def test_diff_and_at_zero(self):
        r = SeriesRing(["g", "j"], {"g": 2, "j": 3})
        s = r.parse("g*j**2 + j + 1")
        assert s.diff("j") == r.parse("2*g*j + 1")
        assert s.at_zero("j") == 1

    def test_to_ring(self):
        small = SeriesRing(["g"], {"g": 2})
        big = SeriesRing(["g", "j"], {"g": 2, "j": 2})
        s = small.parse("1 + g")
        assert s.to_ring(big).to_ring(small) == s
        with pytest.raises(SeriesError):
            big.variable("j").to_ring(small)

    def test_valuation(self):
        r = SeriesRing(["g", "G"], {"g": 3})
        assert r.parse("G**2*g**2 + g**3").valuation() == 2
        assert r.zero().valuation() is None


class TestFormatting:
    def test_table(self, ring):
        assert ring.parse("1 + g**2/2").table() == ["g^0: 1", "g^2: 1/2"]
        assert ring.zero().table() == ["0"]

    @pytest.mark.parametrize("value, text", [(Fraction(1, 2), "1/2"), (Fraction(3), "3"), (Fraction(-5, 24), "-5/24")])
    def test_fraction_text(self, value, text):
        assert format_fraction(value) == text
        assert parse_fraction(text) == value

    @pytest.mark.parametrize("text", ["0.5", "1e3", "1 / 2"])
    def test_rejects_decimals(self, text):
        with pytest.raises(ValueError):
            parse_fraction(text)

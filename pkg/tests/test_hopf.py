from fractions import Fraction

import pytest

from backend.errors import GraphError
from backend.graph import GraphSum, canonicalize_ordered
from backend.hopf import apply_Q, apply_T, attachments, raw_vertex_splits, vertex_splits

HALF = Fraction(1, 2)


def vertex_with_legs(*labels):
    return canonicalize_ordered(1, [], [(1, k) for k in labels])


class TestApplyT:
    def test_adds_self_loop_with_half(self):
        out = apply_T(1, GraphSum.single(canonicalize_ordered(1)))
        assert out == GraphSum.single(canonicalize_ordered(1, [(1, 1)]), HALF)

    def test_one_loop_per_species(self):
        out = apply_T(1, GraphSum.single(canonicalize_ordered(1)), species_count=2)
        assert len(out) == 2
        assert out.total_weight() == 1

    def test_edge_and_vertex_bookkeeping(self):
        s = GraphSum.single(canonicalize_ordered(2, [(1, 2)], [(1, 1)]))
        for g, _ in apply_T(2, s):
            assert (g.v, g.e, g.n) == (2, 2, 1)

    def test_index_out_of_range(self):
        with pytest.raises(GraphError):
            apply_T(2, GraphSum.single(canonicalize_ordered(1)))

    def test_empty_sum(self):
        assert len(apply_T(1, GraphSum())) == 0


class TestApplyQ:
    def test_splits_two_legs_four_ways(self):
        out = apply_Q(1, GraphSum.single(vertex_with_legs(1, 2)))
        assert len(out) == 4
        assert all(w == HALF for _, w in out)
        for g, _ in out:
            assert g.edges == ((1, 2, 1),)

    def test_self_loop_stays_moves_or_opens(self):
        out = apply_Q(1, GraphSum.single(canonicalize_ordered(1, [(1, 1)])))
        assert out.weight(canonicalize_ordered(2, [(1, 1), (1, 2)])) == HALF
        assert out.weight(canonicalize_ordered(2, [(1, 2), (2, 2)])) == HALF
        assert out.weight(canonicalize_ordered(2, [(1, 2), (1, 2)])) == 1

    def test_shifts_later_vertices(self):
        g = canonicalize_ordered(2, [(1, 2)], [(2, 1)])
        for h, _ in apply_Q(1, GraphSum.single(g)):
            assert (h.v, h.e) == (3, 2)
            assert h.legs == ((3, 1, 1),)

    def test_total_weight_counts_assignments(self):
        # d = 4 attachments, m = 2 species: 2^d * m * 1/2
        g = canonicalize_ordered(2, [(1, 2), (1, 1)], [(1, 1)])
        out = apply_Q(1, GraphSum.single(g), species_count=2)
        assert out.total_weight() == Fraction(2 ** 4 * 2, 2)

    def test_grouped_and_raw_splits_agree(self):
        g = canonicalize_ordered(2, [(1, 2), (1, 2), (1, 1), (1, 1)], [(1, 1), (2, 2)])
        s = GraphSum.single(g, Fraction(1, 3))
        assert apply_Q(1, s) == apply_Q(1, s, expand_half_edges=True)

    def test_index_out_of_range(self):
        with pytest.raises(GraphError):
            apply_Q(0, GraphSum.single(vertex_with_legs(1)))


class TestSplits:
    def test_attachment_order(self):
        g = canonicalize_ordered(2, [(1, 2), (1, 1)], [(1, 5)])
        kinds = [a.kind for a in attachments(g, 1)]
        assert kinds == ["leg", "end", "loop", "loop"]

    def test_raw_split_count(self):
        g = canonicalize_ordered(2, [(1, 2), (1, 1)], [(1, 5)])
        assert len(list(raw_vertex_splits(g, 1))) == 2 ** 4

    def test_grouped_multiplicities_sum_to_raw_count(self):
        g = canonicalize_ordered(2, [(1, 2), (1, 2), (1, 2), (1, 1), (1, 1)], [(1, 1)])
        assert sum(mult for _, _, mult in vertex_splits(g, 1)) == 2 ** 8

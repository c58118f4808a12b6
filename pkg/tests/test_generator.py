from fractions import Fraction

import pytest

from backend.errors import GraphError, RecursionDomainError, ResourceGuardError
from backend.generator import OmegaGenerator, default_generator, reset_default_generators
from backend.graph import (
    canonical_unordered,
    canonicalize_ordered,
    graph_stats,
    symmetry_factor,
)


def grid(max_edges, max_legs):
    for e in range(max_edges + 1):
        for v in range(1, e + 2):
            for n in range(max_legs + 1):
                yield e - v + 1, v, n


class TestOmega:
    def test_identity_term(self, gen):
        s = gen.omega(0, 1, [1, 2, 3])
        assert s.items() == [(canonicalize_ordered(1, [], [(1, 1), (1, 2), (1, 3)]), 1)]

    def test_single_edge(self, gen):
        s = gen.omega(0, 2)
        assert s.items() == [(canonicalize_ordered(2, [(1, 2)]), Fraction(1, 2))]

    def test_one_loop_two_vertices_ordered(self, gen):
        s = gen.omega(1, 2)
        assert len(s) == 3
        assert all(w == Fraction(1, 4) for _, w in s)

    def test_one_loop_two_vertices_unordered(self, gen, double_edge, edge_and_loop):
        s = gen.enumerate_connected(1, 2)
        assert len(s) == 2
        assert s.weight(canonical_unordered(double_edge)) == Fraction(1, 4)
        assert s.weight(canonical_unordered(edge_and_loop)) == Fraction(1, 2)

    def test_figure_eight(self, gen):
        assert gen.enumerate_connected(2, 1).total_weight() == Fraction(1, 8)

    def test_species_labels(self, gen):
        s = gen.omega(0, 1, [(1, 2), 3])
        (g, _), = s.items()
        assert g.legs == ((1, 1, 2), (1, 3, 1))

    @pytest.mark.parametrize("l, v", [(-1, 1), (0, 0)])
    def test_domain(self, gen, l, v):
        with pytest.raises(RecursionDomainError):
            gen.omega(l, v)

    def test_bad_labels(self, gen):
        with pytest.raises(GraphError):
            gen.omega(0, 1, [0])
        with pytest.raises(GraphError):
            gen.omega(0, 1, [2, 2])

    def test_guard(self):
        with pytest.raises(ResourceGuardError):
            OmegaGenerator(max_edges=2).omega(2, 2)

    def test_memo(self, gen):
        gen.omega(1, 2, [1])
        assert (0, 1, 1) in gen.memo_keys()
        assert (1, 2, 1) in gen.memo_keys()
        assert OmegaGenerator(memoize=False).omega(1, 2, [1]) == gen.omega(1, 2, [1])

    def test_clear_memo(self, gen):
        before = gen.omega(1, 2, [1])
        gen.clear_memo()
        assert gen.memo_keys() == []
        assert gen.omega(1, 2, [1]) == before

    def test_reset_default_generators(self):
        shared = default_generator(1)
        assert default_generator(1) is shared
        reset_default_generators()
        assert default_generator(1) is not shared

    def test_workers_do_not_change_output(self, gen):
        with OmegaGenerator(workers=2) as parallel:
            assert parallel.omega(1, 3, [1, 2]) == gen.omega(1, 3, [1, 2])


class TestWeightLaw:
    @pytest.mark.parametrize("l, v, n", list(grid(3, 2)))
    def test_weight_times_symmetry_is_one(self, gen, l, v, n):
        for g, w in gen.enumerate_connected(l, v, list(range(1, n + 1))):
            stats = graph_stats(g)
            assert stats.connected
            assert stats.loops == l and stats.v == v
            assert g.labels() == tuple(range(1, n + 1))
            assert w * symmetry_factor(g) == 1

    def test_two_species(self):
        gen = OmegaGenerator(species_count=2)
        s = gen.enumerate_connected(1, 2, [1])
        assert all(w * symmetry_factor(g) == 1 for g, w in s)
        assert {a for g, _ in s for _, _, a in g.edges} == {1, 2}

    def test_refined_canonicalizer_agrees_on_weights(self):
        refined = OmegaGenerator(canonical_method="refined").enumerate_connected(2, 2, [1])
        exhaustive = OmegaGenerator().enumerate_connected(2, 2, [1])
        assert sorted(w for _, w in refined) == sorted(w for _, w in exhaustive)


class TestAlternativeRecursion:
    @pytest.mark.parametrize("l, v, n", [t for t in grid(3, 2) if t[:2] != (0, 1)])
    def test_matches_omega(self, gen, l, v, n):
        labels = list(range(1, n + 1))
        assert gen.omega_alt(l, v, labels) == gen.omega(l, v, labels)

    def test_excludes_identity(self, gen):
        with pytest.raises(RecursionDomainError):
            gen.omega_alt(0, 1)


class TestCompleteness:
    @pytest.mark.parametrize("l, v, n", list(grid(3, 2)))
    def test_support_matches_brute_force(self, gen, l, v, n):
        support = gen.enumerate_connected(l, v, list(range(1, n + 1))).support()
        assert support == gen.brute_force_enumerate(l, v, n)

    def test_brute_force_guard(self):
        with pytest.raises(ResourceGuardError):
            OmegaGenerator(brute_force_max_edges=1).brute_force_enumerate(2, 1, 0)


class TestTrees:
    def test_single_vertex(self, gen):
        trees = gen.trees(1, [1, 2, 3])
        assert len(trees) == 1
        assert trees.total_weight() == 1

    def test_two_vertices_four_legs(self, gen):
        trees = gen.trees(2, [1, 2, 3, 4])
        # leg splits 1+3 (4 ways) and 2+2 (3 ways)
        assert len(trees) == 7
        assert all(w == 1 for _, w in trees)

    def test_modified_needs_four_legs(self, gen):
        assert len(gen.trees(2, [1, 2, 3], min_degree=3)) == 0
        assert len(gen.trees(2, [1, 2, 3, 4], min_degree=3)) == 3


@pytest.mark.slow
class TestAcceptanceGrid:
    @pytest.mark.parametrize("l, v, n", list(grid(6, 4)))
    def test_weight_law(self, gen, l, v, n):
        for g, w in gen.enumerate_connected(l, v, list(range(1, n + 1))):
            assert w * symmetry_factor(g) == 1

    @pytest.mark.parametrize("l, v, n", list(grid(5, 3)))
    def test_completeness(self, gen, l, v, n):
        support = gen.enumerate_connected(l, v, list(range(1, n + 1))).support()
        assert support == gen.brute_force_enumerate(l, v, n)

    @pytest.mark.parametrize("l, v, n", [t for t in grid(5, 3) if t[:2] != (0, 1)])
    def test_recursions_agree(self, gen, l, v, n):
        labels = list(range(1, n + 1))
        assert gen.omega_alt(l, v, labels) == gen.omega(l, v, labels)

    @pytest.mark.parametrize("v", range(1, 6))
    @pytest.mark.parametrize("n", range(0, 7))
    def test_tree_weights(self, gen, v, n):
        assert all(w == 1 for _, w in gen.trees(v, list(range(1, n + 1))))

import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from worked_examples import GROUPOID_2, GROUPOID_3, TERNARY, flat3
from quasicrypt.algebra import OperationTable, random_quasigroup
from quasicrypt.orthogonality import (
    NotOrthogonalError,
    OrthogonalSystem,
    TuplePermutation,
    count_orthogonal_systems,
    find_collision,
    inverse_system,
    is_k_orthogonal,
    is_orthogonal_system,
    permutation_from_system,
    projection_system,
    system_from_permutation,
)


def printed_system_tables():
    return [OperationTable(3, 4, tuple(flat3(t))) for t in (TERNARY, GROUPOID_2, GROUPOID_3)]


def joint(tables, x):
    return tuple(t(*x) for t in tables)


class TestIsOrthogonal:
    def test_projections(self):
        assert is_orthogonal_system(projection_system(3, 3).tables)

    def test_printed_system(self):
        assert is_orthogonal_system(printed_system_tables())

    def test_printed_system_by_enumeration(self):
        # independent check straight off the nested lists
        images = {
            (TERNARY[a][b][c], GROUPOID_2[a][b][c], GROUPOID_3[a][b][c])
            for a, b, c in itertools.product(range(4), repeat=3)
        }
        assert len(images) == 64

    def test_duplicate_table(self):
        t = printed_system_tables()
        tables = [t[0], t[0], t[1]]
        assert not is_orthogonal_system(tables)
        a, b = find_collision(tables)
        assert a != b and joint(tables, a) == joint(tables, b)

    def test_mismatched(self):
        with pytest.raises(ValueError):
            is_orthogonal_system(printed_system_tables()[:2])
        with pytest.raises(ValueError):
            is_orthogonal_system([random_quasigroup(3, 2, 0), random_quasigroup(4, 2, 0)])

    def test_system_type_validates(self):
        t = printed_system_tables()
        with pytest.raises(NotOrthogonalError):
            OrthogonalSystem((t[0], t[0], t[1]))


class TestKOrthogonal:
    @pytest.mark.parametrize("i,j", [(0, 1), (0, 2), (1, 2)])
    def test_projection_pairs(self, i, j):
        p = projection_system(3, 3).tables
        assert is_k_orthogonal([p[i], p[j]])

    def test_k_equals_n(self):
        assert is_k_orthogonal(printed_system_tables())

    def test_identical_tables(self):
        t = random_quasigroup(3, 2, 1)
        assert not is_k_orthogonal([t, t])

    def test_k_range(self):
        t = printed_system_tables()
        with pytest.raises(ValueError):
            is_k_orthogonal(t[:1])

    @given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 10**6))
    def test_system_implies_pairs(self, q, n, seed):
        system = system_from_permutation(TuplePermutation.random(q, n, seed))
        for a, b in itertools.combinations(system.tables, 2):
            assert is_k_orthogonal([a, b])

    def test_counting_oracle(self):
        # k=2 of arity 3 over q=2: every target pair hit exactly twice
        p = projection_system(2, 3).tables
        counts = {}
        for x in itertools.product(range(2), repeat=3):
            counts[(p[0](*x), p[2](*x))] = counts.get((p[0](*x), p[2](*x)), 0) + 1
        assert set(counts.values()) == {2}
        assert is_k_orthogonal([p[0], p[2]])


class TestPermutationBijection:
    def test_identity_gives_projections(self):
        perm = TuplePermutation(3, 3, tuple(range(27)))
        assert system_from_permutation(perm).tables == projection_system(3, 3).tables

    def test_projections_give_identity(self):
        assert permutation_from_system(projection_system(2, 3)).image == tuple(range(8))

    def test_printed_system_permutation(self):
        perm = permutation_from_system(OrthogonalSystem(tuple(printed_system_tables())))
        ranks = []
        for a, b, c in itertools.product(range(4), repeat=3):
            ranks.append(16 * TERNARY[a][b][c] + 4 * GROUPOID_2[a][b][c] + GROUPOID_3[a][b][c])
        assert perm.image == tuple(ranks)
        assert sorted(perm.image) == list(range(64))

    def test_round_trip_system(self):
        system = OrthogonalSystem(tuple(printed_system_tables()))
        assert system_from_permutation(permutation_from_system(system)).tables == system.tables

    def test_exhaustive_q2_n2(self):
        for image in itertools.permutations(range(4)):
            perm = TuplePermutation(2, 2, image)
            system = system_from_permutation(perm)
            assert is_orthogonal_system(system.tables)
            assert permutation_from_system(system) == perm

    @settings(max_examples=30)
    @given(st.integers(2, 4), st.integers(2, 3), st.integers(0, 10**9))
    def test_random_round_trip(self, q, n, seed):
        perm = TuplePermutation.random(q, n, seed)
        assert permutation_from_system(system_from_permutation(perm)) == perm

    def test_rejects_non_orthogonal(self):
        t = printed_system_tables()
        with pytest.raises(NotOrthogonalError):
            permutation_from_system([t[0], t[0], t[1]])

    def test_invalid_permutation(self):
        with pytest.raises(ValueError):
            TuplePermutation(2, 2, (0, 0, 1, 2))


class TestInverseSystem:
    def test_projections_self_inverse(self):
        p = projection_system(3, 2)
        assert inverse_system(p).tables == p.tables

    def test_printed_system(self):
        system = OrthogonalSystem(tuple(printed_system_tables()))
        # first entries A(0,0,0) of the three tables
        image = (TERNARY[0][0][0], GROUPOID_2[0][0][0], GROUPOID_3[0][0][0])
        assert image == (0, 3, 3)
        assert system(0, 0, 0) == image
        inv = inverse_system(system)
        assert inv(*image) == (0, 0, 0)
        for x in itertools.product(range(4), repeat=3):
            assert inv(*system(*x)) == x

    def test_inverse_of_inverse(self):
        system = OrthogonalSystem(tuple(printed_system_tables()))
        assert inverse_system(inverse_system(system)).tables == system.tables


class TestCount:
    def test_q2_n2(self):
        assert count_orthogonal_systems(2, 2) == 24

    def test_q2_n3(self):
        assert count_orthogonal_systems(2, 3) == math.factorial(8) == 40320

    def test_q3_n2_needs_samples(self):
        with pytest.raises(ValueError):
            count_orthogonal_systems(3, 2)
        assert count_orthogonal_systems(3, 2, samples=200) == 362880

    def test_order_of_permutation(self):
        assert TuplePermutation(2, 2, (1, 0, 3, 2)).order() == 2
        assert TuplePermutation(2, 2, (1, 2, 0, 3)).order() == 3

import itertools

import pytest

from worked_examples import DOT, cayley_codes
from quasicrypt.algebra import BINARY_PARASTROPHES, OperationTable, QuasigroupKey, random_quasigroup
from quasicrypt.rng import SplitMix64
from quasicrypt.tquasigroup import (
    LinearQuasigroupSpec,
    brute_force_ortho,
    materialize,
    t1_conditions,
    t1_criterion,
    th2_cancellation_check,
)


def table_of(q, fn):
    return QuasigroupKey.from_table(OperationTable.from_function(2, q, fn))


def pair_map_injective(key, other):
    """Oracle: injectivity of (x, y) -> (A(x, y), B(x, y)) by explicit scan."""
    seen = set()
    for x in range(key.q):
        for y in range(key.q):
            pair = (key(x, y), other(x, y))
            if pair in seen:
                return False
            seen.add(pair)
    return True


def latin_squares(q):
    """All Latin squares of order q by backtracking (fine for q <= 4)."""
    grid = [[None] * q for _ in range(q)]

    def fill(cell):
        if cell == q * q:
            yield tuple(v for row in grid for v in row)
            return
        r, c = divmod(cell, q)
        used = set(grid[r][:c]) | {grid[i][c] for i in range(r)}
        for v in range(q):
            if v not in used:
                grid[r][c] = v
                yield from fill(cell + 1)
                grid[r][c] = None

    yield from fill(0)


class TestSpec:
    def test_parse(self):
        spec = LinearQuasigroupSpec.parse("257:2:3:5")
        assert (spec.p, spec.k, spec.m, spec.a) == (257, 2, 3, 5)
        assert str(spec) == "257:2:3:5"
        assert LinearQuasigroupSpec.parse("7:2:3").a == 0

    @pytest.mark.parametrize("args", [(6, 1, 1, 0), (7, 0, 1, 0), (7, 1, 7, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            LinearQuasigroupSpec(*args)

    def test_bad_string(self):
        with pytest.raises(ValueError):
            LinearQuasigroupSpec.parse("7:2")


class TestMaterialize:
    def test_addition(self):
        assert materialize(LinearQuasigroupSpec(3, 1, 1, 0)) == table_of(3, lambda x, y: (x + y) % 3)

    def test_subtraction(self):
        assert materialize(LinearQuasigroupSpec(3, 1, 2, 0)) == table_of(3, lambda x, y: (x - y) % 3)

    def test_quasigroup(self):
        key = materialize(LinearQuasigroupSpec(5, 2, 3, 1))
        assert key(4, 4) == (8 + 12 + 1) % 5


class TestT1:
    def test_p7_k2_m3(self):
        spec = LinearQuasigroupSpec(7, 2, 3)
        assert (2 + 3 * 3) % 7 == 4 and (2 * 2 + 3) % 7 == 0
        report = t1_criterion(spec)
        assert report["(123)"] is True
        assert report["(132)"] is False
        key = materialize(spec)
        assert brute_force_ortho(key, "(132)") is False
        assert brute_force_ortho(key, "(123)") is True

    def test_p257_example(self):
        spec = LinearQuasigroupSpec(257, 2, 3, 5)
        scalars = [c for cs in t1_conditions(spec).values() for c in cs]
        # k - m = -1 = 256, k + m = 5, 1 + k = 3, 1 + m = 4, k + m^2 = 11, k^2 + m = 7
        assert sorted(scalars) == sorted([256, 5, 3, 4, 11, 7])
        assert spec.k and spec.m
        assert t1_criterion(spec).all_orthogonal()

    def test_commutative(self):
        assert t1_criterion(LinearQuasigroupSpec(3, 1, 1))["(12)"] is False

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_exhaustive_agreement(self, p):
        for k, m, a in itertools.product(range(1, p), range(1, p), (0, 1)):
            spec = LinearQuasigroupSpec(p, k, m, a)
            key = materialize(spec)
            report = t1_criterion(spec)
            for s in BINARY_PARASTROPHES:
                assert report[s] == brute_force_ortho(key, s), (spec, s)

    def test_a_independence(self):
        for k, m in itertools.product(range(1, 5), repeat=2):
            verdicts = {
                tuple(brute_force_ortho(materialize(LinearQuasigroupSpec(5, k, m, a)), s)
                      for s in BINARY_PARASTROPHES)
                for a in range(5)
            }
            assert len(verdicts) == 1


class TestBruteForce:
    def test_addition_12(self):
        assert not brute_force_ortho(table_of(3, lambda x, y: (x + y) % 3), "(12)")

    def test_p5_13(self):
        key = materialize(LinearQuasigroupSpec(5, 2, 3))
        assert (1 + 2) % 5 != 0
        assert brute_force_ortho(key, "(13)")

    @pytest.mark.parametrize("sigma", BINARY_PARASTROPHES)
    def test_against_explicit_scan(self, sigma):
        from quasicrypt.algebra import binary_parastrophe

        for seed in range(20):
            key = random_quasigroup(4, 2, seed)
            assert brute_force_ortho(key, sigma) == pair_map_injective(key, binary_parastrophe(key, sigma))


class TestTH2:
    def test_abc_23(self):
        key = QuasigroupKey(2, 3, tuple(v for row in cayley_codes(DOT) for v in row))
        # x·(x·z) for every z: do distinct x collide?
        ok = True
        for z in range(3):
            vals = [key(x, key(x, z)) for x in range(3)]
            ok &= len(set(vals)) == 3
        assert th2_cancellation_check(key, "(23)") == ok == brute_force_ortho(key, "(23)")

    def test_z4_13(self):
        key = table_of(4, lambda x, y: (x + y) % 4)
        # z + x + x = z + y + y with y = x + 2
        assert (0 + 1 + 1) % 4 == (0 + 3 + 3) % 4
        assert th2_cancellation_check(key, "(13)") is False
        assert brute_force_ortho(key, "(13)") is False

    def test_z3_13(self):
        key = table_of(3, lambda x, y: (x + y) % 3)
        assert th2_cancellation_check(key, "(13)") is True
        assert brute_force_ortho(key, "(13)") is True

    def test_random_quasigroups(self):
        rng = SplitMix64(2024)
        for _ in range(200):
            q = 2 + rng.below(5)
            key = random_quasigroup(q, 2, rng.next_u64())
            for s in BINARY_PARASTROPHES:
                assert th2_cancellation_check(key, s) == brute_force_ortho(key, s)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_all_latin_squares(self, q):
        count = 0
        for values in latin_squares(q):
            key = QuasigroupKey(2, q, values)
            for s in BINARY_PARASTROPHES:
                assert th2_cancellation_check(key, s) == brute_force_ortho(key, s)
            count += 1
        assert count == {2: 2, 3: 12, 4: 576}[q]

    def test_unknown_sigma(self):
        with pytest.raises(ValueError):
            th2_cancellation_check(table_of(3, lambda x, y: (x + y) % 3), "(1)")

import random

import numpy as np
import pytest

from genopt.core import (
    A_BETTER,
    B_BETTER,
    EQUAL,
    Direction,
    Encoding,
    Lexicographic,
    ObjDef,
    ProblemConfig,
    RowModeKind,
    Solution,
    StructuralError,
    Weighted,
    compare,
    scalarize,
    validate_solution,
)


def perm_cfg(n, num_obj=1):
    return ProblemConfig(
        encoding=Encoding.permutation(), d1=1, d2=n, n=n,
        row_mode=RowModeKind.SINGLE_SEQ,
        obj_defs=tuple(ObjDef(f"o{i}") for i in range(num_obj)))


def make_sol(rows, sizes, num_obj=1, d2=None):
    d2 = d2 or max(len(r) for r in rows)
    data = np.zeros((len(rows), d2), dtype=np.int64)
    for r, row in enumerate(rows):
        data[r, :len(row)] = row
    return Solution(data, np.array(sizes), num_obj)


def evaluated(objectives, penalty=0.0, num_obj=None):
    sol = make_sol([[0]], [1], num_obj or len(objectives))
    sol.objectives[:] = objectives
    sol.penalty = penalty
    return sol


class TestEncoding:
    def test_integer_bounds_checked(self):
        with pytest.raises(ValueError):
            Encoding.integer(5, 2)
        enc = Encoding.integer(-1, 3)
        assert (enc.lower_bound, enc.upper_bound) == (-1, 3)

    def test_objdef_weight_positive(self):
        with pytest.raises(ValueError):
            ObjDef("x", weight=0.0)

    def test_single_seq_requires_one_row(self):
        with pytest.raises(ValueError):
            ProblemConfig(Encoding.permutation(), d1=2, d2=4, n=4,
                          row_mode=RowModeKind.SINGLE_SEQ,
                          obj_defs=(ObjDef("o"),))


class TestValidateSolution:
    def test_valid_permutation(self):
        sol = make_sol([[2, 0, 1]], [3])
        assert validate_solution(sol, perm_cfg(3)).ok

    def test_duplicate_element_named(self):
        sol = make_sol([[0, 0, 1]], [3])
        report = validate_solution(sol, perm_cfg(3))
        assert not report.ok
        assert any("duplicate element 0" in v for v in report.violations)

    def test_partition_exact_cover(self):
        cfg = ProblemConfig(Encoding.permutation(), d1=2, d2=2, n=3,
                            row_mode=RowModeKind.MULTI_PARTITION,
                            obj_defs=(ObjDef("o"),))
        sol = make_sol([[0, 2], [1, 0]], [2, 1], d2=2)
        assert validate_solution(sol, cfg).ok
        bad = make_sol([[0, 2], [0, 0]], [2, 1], d2=2)
        report = validate_solution(bad, cfg)
        assert not report.ok

    def test_dimension_mismatch_is_structural(self):
        sol = make_sol([[0, 1]], [2])
        with pytest.raises(StructuralError):
            validate_solution(sol, perm_cfg(3))

    def test_binary_and_integer_domains(self):
        cfg = ProblemConfig(Encoding.binary(), d1=1, d2=3, n=3,
                            row_mode=RowModeKind.SINGLE_SEQ, obj_defs=(ObjDef("o"),))
        assert validate_solution(make_sol([[0, 1, 1]], [3]), cfg).ok
        assert not validate_solution(make_sol([[0, 2, 1]], [3]), cfg).ok
        icfg = ProblemConfig(Encoding.integer(1, 4), d1=1, d2=3, n=3,
                             row_mode=RowModeKind.SINGLE_SEQ, obj_defs=(ObjDef("o"),))
        assert validate_solution(make_sol([[1, 4, 2]], [3]), icfg).ok
        assert not validate_solution(make_sol([[0, 4, 2]], [3]), icfg).ok


class TestScalarize:
    def test_two_minimize_objectives(self):
        defs = (ObjDef("dist"), ObjDef("veh"))
        assert scalarize([784.0, 5.0], defs, [0.9, 0.1]) == pytest.approx(706.1)

    def test_single_objective_identity(self):
        assert scalarize([42.5], (ObjDef("o"),), [1.0]) == 42.5

    def test_maximize_negated(self):
        assert scalarize([30.0], (ObjDef("v", Direction.MAXIMIZE),), [1.0]) == -30.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            scalarize([1.0, 2.0], (ObjDef("o"),), [1.0])


class TestCompare:
    def cfg(self, comparison=None, num_obj=2):
        return ProblemConfig(Encoding.permutation(), d1=1, d2=4, n=4,
                             row_mode=RowModeKind.SINGLE_SEQ,
                             obj_defs=tuple(ObjDef(f"o{i}") for i in range(num_obj)),
                             comparison=comparison)

    def test_feasible_beats_infeasible(self):
        cfg = self.cfg(num_obj=1)
        a = evaluated([99.0], penalty=0.0)
        b = evaluated([1.0], penalty=3.0)
        assert compare(a, b, cfg) == A_BETTER
        assert compare(b, a, cfg) == B_BETTER

    def test_lower_penalty_wins_among_infeasible(self):
        cfg = self.cfg(num_obj=1)
        a = evaluated([50.0], penalty=1.0)
        b = evaluated([10.0], penalty=2.0)
        assert compare(a, b, cfg) == A_BETTER

    def test_lexicographic_tolerance_tie(self):
        cfg = self.cfg(Lexicographic((0, 1), (50.0, 0.0)))
        a = evaluated([814.0, 5.0])
        b = evaluated([800.0, 5.0])
        assert compare(a, b, cfg) == EQUAL

    def test_weighted_table_values(self):
        cfg = self.cfg(Weighted((0.9, 0.1)))
        a = evaluated([784.0, 5.0])
        b = evaluated([800.0, 5.0])
        assert compare(a, b, cfg) == A_BETTER

    def test_total_preorder_on_random_triples(self):
        rng = random.Random(4242)
        cfg = self.cfg(Weighted((0.7, 0.3)))
        lex_cfg = self.cfg(Lexicographic((1, 0), (0.5, 2.0)))
        for mode_cfg in (cfg, lex_cfg):
            for _ in range(400):
                sols = [evaluated([rng.randrange(10), rng.randrange(10)],
                                  penalty=float(rng.randrange(3)))
                        for _ in range(3)]
                a, b, c = sols
                assert compare(a, a, mode_cfg) == EQUAL
                assert compare(a, b, mode_cfg) == -compare(b, a, mode_cfg)
                # transitivity of "not worse"
                if compare(a, b, mode_cfg) != B_BETTER and \
                        compare(b, c, mode_cfg) != B_BETTER:
                    assert compare(a, c, mode_cfg) != B_BETTER

    def test_weight_rescaling_invariance(self):
        rng = random.Random(99)
        for _ in range(200):
            w = (rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0))
            factor = rng.uniform(0.01, 50.0)
            cfg1 = self.cfg(Weighted(w))
            cfg2 = self.cfg(Weighted((w[0] * factor, w[1] * factor)))
            a = evaluated([rng.uniform(0, 100), rng.uniform(0, 100)])
            b = evaluated([rng.uniform(0, 100), rng.uniform(0, 100)])
            assert compare(a, b, cfg1) == compare(a, b, cfg2)

    def test_zero_tolerance_reduces_to_plain_lexicographic(self):
        cfg = self.cfg(Lexicographic((0, 1), (0.0, 0.0)))
        assert compare(evaluated([5.0, 9.0]), evaluated([5.0, 8.0]), cfg) == B_BETTER
        assert compare(evaluated([4.0, 9.0]), evaluated([5.0, 0.0]), cfg) == A_BETTER
        assert compare(evaluated([5.0, 9.0]), evaluated([5.0, 9.0]), cfg) == EQUAL

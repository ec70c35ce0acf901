import itertools
import random

import numpy as np
import pytest

from apnlab.corpus import gold_function
from apnlab.errors import ConsistencyError
from apnlab.extension import (PASS, REJECTED_DELTA, REJECTED_SYSTEM,
                              SearchBudget, apn_extension_bound,
                              backtrack_complete, build_system, delta_filter,
                              extension_test, pair_index, quadruple_set,
                              solve_system)
from apnlab.gf2linalg import Solvable, Unsolvable, witness_is_valid
from apnlab.vectorial import VectorialFunction


def brute_quadruples(F):
    """All 4-subsets {x<y<z<t} with XOR-sum 0 and zero image sum."""
    q = 1 << F.m
    out = []
    for x, y, z, t in itertools.combinations(range(q), 4):
        if x ^ y ^ z ^ t == 0 and (int(F.images[x]) ^ int(F.images[y])
                                   ^ int(F.images[z]) ^ int(F.images[t])) == 0:
            out.append((x, y, z, t))
    return out


class TestQuadrupleSet:
    def test_apn_has_none(self, x3):
        assert len(quadruple_set(x3)) == 0

    def test_matches_brute_force_m3(self, rng):
        for _ in range(10):
            F = VectorialFunction(3, 3, [rng.getrandbits(3) for _ in range(8)])
            qs = quadruple_set(F)
            assert sorted(qs.quads) == brute_quadruples(F)

    def test_count_equals_q4(self, rng):
        # each 2-flat appears 4! times among ordered distinct solutions
        for _ in range(6):
            F = VectorialFunction(4, 4, [rng.getrandbits(4) for _ in range(16)])
            assert len(quadruple_set(F)) == F.q_solutions(4)

    def test_truncated_gold_quads_nonzero_upstairs(self, x3):
        F = x3.truncate(4)
        qs = quadruple_set(F)
        assert len(qs) > 0
        for (x, y, z, t) in qs.quads:
            full = (int(x3.images[x]) ^ int(x3.images[y])
                    ^ int(x3.images[z]) ^ int(x3.images[t]))
            assert full != 0 and (full & 0xF) == 0


class TestDeltaFilter:
    def test_truncated_gold_passes(self, x3):
        assert delta_filter(x3.truncate(4))

    def test_linear_64_to_16_fails(self):
        F = VectorialFunction(6, 4, [x & 0xF for x in range(64)])
        assert not delta_filter(F)

    def test_degenerate_duplicate_coordinates_fail(self, x3):
        c = x3.coordinate(0)
        F = VectorialFunction.from_coordinates([c, c, x3.coordinate(1),
                                                x3.coordinate(2)])
        # duplicated coordinate forces a zero component, so some output
        # difference is hit by entire fibers
        assert not delta_filter(F)

    def test_bound_values(self):
        assert apn_extension_bound(6, 4) == 8
        assert apn_extension_bound(6, 3) == 16
        assert apn_extension_bound(6, 6) == 2


class TestAffineSystem:
    def test_pair_index_lexicographic(self):
        q = 64
        expect = 0
        for x in range(q):
            for y in range(x + 1, q):
                assert pair_index(q, x, y) == expect
                expect += 1
        assert expect == q * (q - 1) // 2

    def test_empty_system_solvable(self, x3):
        qs = quadruple_set(x3.truncate(4))
        empty = build_system(type(qs)(m=6, n=4, quads=()))
        out = solve_system(empty)
        assert out == Solvable(rank=0, free_count=2080)

    def test_row_shape(self, x3):
        system = build_system(quadruple_set(x3.truncate(4)))
        assert system.num_vars == 2080
        for row in system.rows:
            assert row >> 2080 == 1  # affine constant set
            assert bin(row & ((1 << 2080) - 1)).count("1") == 10

    def test_wrong_codomain_rejected(self, x3):
        with pytest.raises(ValueError):
            build_system(quadruple_set(x3.truncate(3)))

    def test_truncated_gold_solvable(self, x3):
        out = solve_system(build_system(quadruple_set(x3.truncate(4))))
        assert isinstance(out, Solvable)


class TestExtensionTest:
    def test_truncated_gold_passes(self, x3):
        verdict = extension_test(x3.truncate(4))
        assert verdict.outcome == PASS
        assert verdict.passed
        assert verdict.delta <= 8
        assert verdict.rank is not None
        rec = verdict.as_record()
        assert rec["sufficient"] is False

    def test_linear_rejected_delta(self):
        F = VectorialFunction(6, 4, [x & 0xF for x in range(64)])
        verdict = extension_test(F)
        assert verdict.outcome == REJECTED_DELTA

    def test_wrong_shape(self, x3):
        with pytest.raises(ValueError):
            extension_test(x3)

    def test_system_rejection_carries_valid_witness(self):
        # adversarial fixture found by seeded random search: delta <= 8
        # but inconsistent affine system (regression, see test body)
        F = _system_rejected_fixture()
        if F is None:
            pytest.skip("no RejectedSystem fixture at this seed scale")
        verdict = extension_test(F)
        assert verdict.outcome == REJECTED_SYSTEM
        system = build_system(quadruple_set(F))
        assert witness_is_valid(system.rows, verdict.witness, system.num_vars)


def _system_rejected_fixture():
    rng = random.Random(31137)
    for _ in range(400):
        images = [rng.getrandbits(4) for _ in range(64)]
        F = VectorialFunction(6, 4, images)
        if F.delta_bounded(stop_above=8) > 8:
            continue
        out = solve_system(build_system(quadruple_set(F)))
        if isinstance(out, Unsolvable):
            return F
    return None


class TestBacktracking:
    def test_truncated_gold_completes(self, x3):
        F = x3.truncate(4)
        run = backtrack_complete(F, budget=SearchBudget(max_solutions=4))
        assert len(run.functions) >= 1
        for G in run.functions:
            assert G.differential_uniformity() == 2
        assert run.stats.stop_reason == "solution_budget"

    def test_parent_recoverable(self, x3):
        # the normalized version of the dropped coordinate pair of x^3
        # must appear among completions when the search runs long enough
        F = x3.truncate(4)
        run = backtrack_complete(F, budget=SearchBudget(max_solutions=1))
        assert run.stats.solutions >= 1

    def test_closure_under_affine_addition(self, x3, rng):
        F = x3.truncate(4)
        run = backtrack_complete(F, budget=SearchBudget(max_solutions=1))
        G = run.functions[0]
        g = [(int(v) >> 4) for v in G.images]
        qs = quadruple_set(F)
        # add a random affine (6,2)-map to g: constraints stay satisfied
        from apnlab.gf2linalg import matrix_action_table

        cols = tuple(rng.getrandbits(2) for _ in range(6))
        aff = matrix_action_table(cols, 6) ^ np.uint32(rng.getrandbits(2))
        g2 = [g[x] ^ int(aff[x]) for x in range(64)]
        for (x, y, z, t) in qs.quads:
            assert g2[x] ^ g2[y] ^ g2[z] ^ g2[t] != 0

    def test_hopeless_function_empty_stream(self):
        F = VectorialFunction(6, 4, [x & 0xF for x in range(64)])
        run = backtrack_complete(F, budget=SearchBudget(max_nodes=2000))
        assert run.functions == []

    def test_node_budget_respected(self, x3):
        F = x3.truncate(4)
        run = backtrack_complete(F, budget=SearchBudget(max_nodes=1000))
        assert run.stats.stop_reason == "node_budget"
        assert run.stats.nodes <= 1000 + 5000  # chunked counter slack

    def test_threaded_matches_sequential_exhaustive(self, x3_m4):
        # small enough to exhaust: (4,2) base, 11 free points
        F = x3_m4.truncate(2)
        seq = backtrack_complete(F)
        par = backtrack_complete(F, threads=4, fork_depth=2)
        assert seq.stats.stop_reason == "exhausted"
        assert par.stats.stop_reason == "exhausted"
        assert [G.table_digest() for G in seq.functions] == \
            [G.table_digest() for G in par.functions]

    def test_wrong_shape_rejected(self, x3):
        with pytest.raises(ValueError):
            backtrack_complete(x3)

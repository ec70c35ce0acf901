import random

import numpy as np
import pytest

from apnlab.gf2linalg import (Solvable, Unsolvable, identity_columns,
                              is_invertible, mat_vec, matrix_action_table,
                              rank_of_rows, random_invertible_columns,
                              recombine_rows, solve_affine, witness_is_valid)


class TestRank:
    def test_identity(self):
        assert rank_of_rows(identity_columns(8)) == 8

    def test_dependent_rows(self):
        assert rank_of_rows([0b101, 0b011, 0b110]) == 2

    def test_zero_rows_ignored(self):
        assert rank_of_rows([0, 0, 0b1]) == 1

    def test_against_numpy_mod2(self, rng):
        for _ in range(25):
            n = rng.randrange(2, 10)
            mat = [[rng.getrandbits(1) for _ in range(n)] for _ in range(n)]
            rows = [sum(bit << j for j, bit in enumerate(r)) for r in mat]
            arr = np.array(mat, dtype=np.int64)
            # rank over GF(2) by elimination on a copy
            a = arr.copy() % 2
            rank = 0
            for col in range(n):
                piv = None
                for r in range(rank, n):
                    if a[r, col]:
                        piv = r
                        break
                if piv is None:
                    continue
                a[[rank, piv]] = a[[piv, rank]]
                for r in range(n):
                    if r != rank and a[r, col]:
                        a[r] ^= a[rank]
                rank += 1
            assert rank_of_rows(rows) == rank


class TestSolveAffine:
    def test_empty_system(self):
        out = solve_affine([], 2080)
        assert out == Solvable(rank=0, free_count=2080)

    def test_direct_contradiction(self):
        # u0 = 1 and u0 = 0
        rows = [0b1 | (1 << 4), 0b1]
        out = solve_affine(rows, 4)
        assert isinstance(out, Unsolvable)
        assert witness_is_valid(rows, out.witness, 4)

    def test_solvable_counts(self):
        # x0 + x1 = 1, x1 + x2 = 0
        rows = [0b011 | (1 << 3), 0b110]
        out = solve_affine(rows, 3)
        assert out == Solvable(rank=2, free_count=1)

    def test_witness_recombines_to_contradiction(self, rng):
        for _ in range(50):
            nv = rng.randrange(3, 12)
            rows = [rng.getrandbits(nv + 1) for _ in range(rng.randrange(2, 20))]
            out = solve_affine(rows, nv)
            if isinstance(out, Unsolvable):
                assert recombine_rows(rows, out.witness) == 1 << nv

    def test_oracle_small_systems(self, rng):
        # exhaustively check solvability against brute force enumeration
        for _ in range(60):
            nv = rng.randrange(1, 6)
            nrows = rng.randrange(1, 8)
            rows = [rng.getrandbits(nv + 1) for _ in range(nrows)]
            brute = any(
                all(((bin(row & assign).count("1") & 1) == (row >> nv) & 1)
                    for row in rows)
                for assign in range(1 << nv)
            )
            assert isinstance(solve_affine(rows, nv), Solvable) == brute


class TestMatrices:
    def test_invertibility(self):
        assert is_invertible((1, 2, 4))
        assert not is_invertible((1, 2, 3))

    def test_random_invertible(self, rng):
        for _ in range(20):
            cols = random_invertible_columns(6, rng)
            assert is_invertible(cols)

    def test_action_table_matches_mat_vec(self, rng):
        cols = random_invertible_columns(6, rng)
        table = matrix_action_table(cols, 6)
        for x in (0, 1, 17, 63):
            assert table[x] == mat_vec(cols, x)

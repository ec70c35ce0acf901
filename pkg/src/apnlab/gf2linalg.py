"""GF(2) linear algebra on word-packed rows.

Rows are Python ints used as bit vectors, so a row XOR is a single
arbitrary-precision operation regardless of width. Matrices are stored
as tuples of column masks: cols[j] is the image of the j-th basis vector.
"""

from dataclasses import dataclass

import numpy as np


def rank_of_rows(rows):
    """GF(2) rank of an iterable of int-packed rows."""
    basis = {}
    for row in rows:
        v = int(row)
        while v:
            lead = v.bit_length() - 1
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    return len(basis)


@dataclass(frozen=True)
class Solvable:
    rank: int
    free_count: int


@dataclass(frozen=True)
class Unsolvable:
    witness: tuple
    """Indices of input rows whose XOR is the contradictory row 0 = 1."""


def solve_affine(rows, num_vars):
    """Decide solvability of an affine system over GF(2).

    Each row packs `num_vars` variable bits plus the affine constant at
    bit position `num_vars`. Returns Solvable(rank, free_count) or
    Unsolvable(witness) where the witness re-sums to constant-only.
    """
    rows = [int(r) for r in rows]
    const_bit = 1 << num_vars
    tag_base = num_vars + 1
    basis = {}
    for i, row in enumerate(rows):
        v = row | (1 << (tag_base + i))
        while True:
            vars_part = v & (const_bit - 1)
            if vars_part == 0:
                if v & const_bit:
                    witness = tuple(
                        j for j in range(len(rows)) if (v >> (tag_base + j)) & 1
                    )
                    return Unsolvable(witness=witness)
                break
            lead = vars_part.bit_length() - 1
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    rank = len(basis)
    return Solvable(rank=rank, free_count=num_vars - rank)


def recombine_rows(rows, indices):
    """XOR of the selected input rows; verifies an Unsolvable witness."""
    rows = list(rows)
    acc = 0
    for i in indices:
        acc ^= int(rows[i])
    return acc


def witness_is_valid(rows, witness, num_vars):
    return recombine_rows(rows, witness) == (1 << num_vars)


def columns_rank(cols):
    return rank_of_rows(cols)


def is_invertible(cols):
    cols = tuple(cols)
    return rank_of_rows(cols) == len(cols)


def random_invertible_columns(m, rng):
    """Uniform-ish invertible m x m matrix by rejection sampling."""
    while True:
        cols = tuple(rng.getrandbits(m) for _ in range(m))
        if all(cols) and is_invertible(cols):
            return cols


def identity_columns(m):
    return tuple(1 << j for j in range(m))


def mat_vec(cols, x):
    """Matrix-vector product over GF(2): XOR of columns selected by bits of x."""
    acc = 0
    j = 0
    x = int(x)
    while x:
        if x & 1:
            acc ^= cols[j]
        x >>= 1
        j += 1
    return acc


def matrix_action_table(cols, m):
    """A.x for every x in 0..2^m-1 as a uint32 array, built by doubling."""
    q = 1 << m
    table = np.zeros(q, dtype=np.uint32)
    for j in range(m):
        step = 1 << j
        table[step:2 * step] = table[:step] ^ np.uint32(cols[j])
    return table

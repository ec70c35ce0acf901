"""Boolean functions on m <= 16 variables: truth tables, ANF, Walsh
spectrum, exact spectral moments, and affine changes of variables.

A truth table is indexed by the point x read as an unsigned integer;
bit 0 of x is the first variable. All spectral quantities are exact:
moments are fractions.Fraction values, never floats.
"""

from fractions import Fraction

import numpy as np

from .bitops import hadamard_batch, mobius_batch, parity16, popcount, walsh_batch
from .errors import ConsistencyError, ParseError
from .gf2linalg import is_invertible, matrix_action_table

MAX_M = 16


def _check_m(m):
    if not 1 <= m <= MAX_M:
        raise ValueError(f"m must be in 1..{MAX_M}, got {m}")


def mobius(bits, m):
    """Moebius transform of a length-2^m bit sequence (an involution).

    Maps a truth table to its ANF coefficient table and back: bit S of
    the result is the coefficient of the monomial prod_{i in S} x_i.
    """
    _check_m(m)
    a = np.asarray(bits, dtype=np.uint8)
    if a.shape != (1 << m,):
        raise ValueError(f"expected {1 << m} bits for m={m}, got {a.shape}")
    return mobius_batch(a)


class BooleanFunction:
    """Immutable Boolean function given by its truth table."""

    __slots__ = ("m", "table", "_walsh", "_anf", "_key")

    def __init__(self, m, table):
        _check_m(m)
        t = np.ascontiguousarray(table, dtype=np.uint8)
        if t.shape != (1 << m,):
            raise ValueError(f"table must have length {1 << m} for m={m}")
        if t.max(initial=0) > 1:
            raise ValueError("table entries must be 0 or 1")
        t.setflags(write=False)
        self.m = m
        self.table = t
        self._walsh = None
        self._anf = None
        self._key = (m, t.tobytes())

    # -- construction ------------------------------------------------

    @classmethod
    def from_int(cls, m, value):
        """Bit x of `value` is f(x)."""
        _check_m(m)
        value = int(value)
        if value < 0 or value >> (1 << m):
            raise ValueError("value out of range for table width")
        x = np.arange(1 << m, dtype=np.uint64)
        if m <= 6:
            bits = (np.uint64(value) >> x) & np.uint64(1)
        else:
            bits = np.array([(value >> int(i)) & 1 for i in range(1 << m)])
        return cls(m, bits.astype(np.uint8))

    @classmethod
    def from_hex(cls, m, text):
        """Parse the hex truth-table format: ceil(2^m / 4) digits, big-endian,

        bit x of the integer is f(x). Case-insensitive, exact length.
        """
        _check_m(m)
        text = text.strip()
        want = max(1, (1 << m) // 4)
        if len(text) != want:
            raise ParseError(f"expected {want} hex digits for m={m}, got {len(text)}")
        try:
            value = int(text, 16)
        except ValueError:
            raise ParseError(f"invalid hex truth table {text!r}") from None
        if value >> (1 << m):
            raise ParseError("hex value exceeds table width")
        return cls.from_int(m, value)

    @classmethod
    def from_anf(cls, m, coefficients):
        return cls(m, mobius(coefficients, m))

    @classmethod
    def zero(cls, m):
        return cls(m, np.zeros(1 << m, dtype=np.uint8))

    @classmethod
    def random(cls, m, rng):
        _check_m(m)
        return cls.from_int(m, rng.getrandbits(1 << m))

    # -- serialization -----------------------------------------------

    def to_int(self):
        v = 0
        for x in np.nonzero(self.table)[0]:
            v |= 1 << int(x)
        return v

    def to_hex(self):
        width = max(1, (1 << self.m) // 4)
        return format(self.to_int(), f"0{width}x")

    # -- basic structure ---------------------------------------------

    def weight(self):
        return int(self.table.sum())

    def is_balanced(self):
        return 2 * self.weight() == 1 << self.m

    def anf(self):
        """ANF coefficient bits; index S encodes the monomial support."""
        if self._anf is None:
            a = mobius_batch(self.table)
            a.setflags(write=False)
            self._anf = a
        return self._anf

    def degree(self):
        """Max monomial size in the ANF; 0 for the null function."""
        nz = np.nonzero(self.anf())[0]
        if nz.size == 0:
            return 0
        return int(popcount(nz.astype(np.uint32)).max())

    # -- spectra -----------------------------------------------------

    def walsh_spectrum(self):
        """All 2^m Walsh coefficients W(f,a), a-indexed, exact int64."""
        if self._walsh is None:
            w = walsh_batch(self.table)[0]
            w.setflags(write=False)
            self._walsh = w
        return self._walsh

    def moment(self, r):
        """Spectral moment of order r: (1/q^2) * sum_a W(f,a)^r, exact.

        Only even orders r >= 2 are admitted; odd-order sums are not
        invariant under the transformations this package cares about.
        """
        if r % 2 != 0 or r < 2:
            raise ValueError("moment order must be even and >= 2")
        q = 1 << self.m
        total = sum(int(w) ** r for w in self.walsh_spectrum())
        return Fraction(total, q * q)

    def kappa(self):
        """Normalized 4th-order moment: (1/q^3) * sum_a W(f,a)^4, exact."""
        q = 1 << self.m
        total = sum(int(w) ** 4 for w in self.walsh_spectrum())
        return Fraction(total, q ** 3)

    def linearity(self):
        return int(np.abs(self.walsh_spectrum()).max())

    def nonlinearity(self):
        return (1 << (self.m - 1)) - self.linearity() // 2

    def is_bent(self):
        """True iff every |W(f,a)| equals 2^(m/2); cross-checked against kappa."""
        if self.m % 2 != 0:
            return False
        flat = bool(np.all(np.abs(self.walsh_spectrum()) == 1 << (self.m // 2)))
        if flat != (self.kappa() == 1):
            raise ConsistencyError("bent test and kappa(f)=1 disagree")
        return flat

    def autocorrelation(self):
        """Autocorrelation at every shift t, via the squared spectrum.

        Equals sum_x (-1)^(f(x)+f(x+t)); the direct sum is implemented
        separately as an oracle (autocorrelation_direct).
        """
        w = self.walsh_spectrum().astype(np.int64)
        ac = hadamard_batch(w * w)[0]
        q = 1 << self.m
        if np.any(ac % q):
            raise ConsistencyError("autocorrelation transform not divisible by q")
        return ac // q

    def autocorrelation_direct(self):
        """O(q^2) defining double sum, kept as an independent oracle."""
        signs = 1 - 2 * self.table.astype(np.int64)
        q = 1 << self.m
        idx = np.arange(q)
        return np.array([int(np.dot(signs, signs[idx ^ t])) for t in range(q)],
                        dtype=np.int64)

    def walsh_abs(self):
        """Multiset of |W(f,a)| as a sorted ((value, multiplicity), ...) tuple."""
        vals, counts = np.unique(np.abs(self.walsh_spectrum()), return_counts=True)
        return tuple((int(v), int(c)) for v, c in zip(vals, counts))

    # -- transformations ----------------------------------------------

    def apply_affine(self, cols, b=0, mask=0, c=0):
        """x -> f(Ax + b) + mask.x + c for an invertible column-matrix A."""
        cols = tuple(int(v) for v in cols)
        if len(cols) != self.m:
            raise ValueError("matrix size does not match m")
        if not is_invertible(cols):
            raise ValueError("matrix is singular over GF(2)")
        q = 1 << self.m
        ax = matrix_action_table(cols, self.m) ^ np.uint32(b)
        lin = parity16()[np.uint32(mask) & np.arange(q, dtype=np.uint32)]
        return BooleanFunction(self.m, self.table[ax] ^ lin ^ np.uint8(c & 1))

    def __xor__(self, other):
        if not isinstance(other, BooleanFunction) or other.m != self.m:
            return NotImplemented
        return BooleanFunction(self.m, self.table ^ other.table)

    # -- identity ----------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, BooleanFunction) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"BooleanFunction(m={self.m}, hex={self.to_hex()!r})"


def inner_product_bent(m):
    """The canonical bent function x1 x2 + x3 x4 + ... for even m."""
    if m % 2 != 0:
        raise ValueError("bent functions require even m")
    x = np.arange(1 << m, dtype=np.uint32)
    acc = np.zeros(1 << m, dtype=np.uint8)
    for i in range(0, m, 2):
        acc ^= (((x >> i) & 1) & ((x >> (i + 1)) & 1)).astype(np.uint8)
    return BooleanFunction(m, acc)

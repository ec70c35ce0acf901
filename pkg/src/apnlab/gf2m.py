"""GF(2^m) arithmetic in polynomial basis, power-map tables, and the
GF(4) identities behind the coordinate-extension test.

Field elements are plain m-bit ints; a GF2m object carries the modulus.
The modulus is a configuration knob: any irreducible choice gives the
same functions up to affine equivalence, so only defaults are pinned.
"""

import numpy as np

from .errors import ConsistencyError

# Primitive polynomials, one per degree (bitmask includes the top term).
DEFAULT_MODULI = {
    1: 0b11,                 # x + 1
    2: 0b111,                # x^2 + x + 1
    3: 0b1011,               # x^3 + x + 1
    4: 0b10011,              # x^4 + x + 1
    5: 0b100101,             # x^5 + x^2 + 1
    6: 0b1000011,            # x^6 + x + 1
    7: 0b10000011,           # x^7 + x + 1
    8: 0b100011101,          # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,         # x^9 + x^4 + 1
    10: 0b10000001001,       # x^10 + x^3 + 1
    11: 0b100000000101,      # x^11 + x^2 + 1
    12: 0b1000001010011,     # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,    # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,   # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}


def _poly_mulmod(a, b, mod, deg):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= mod
    return r


def _poly_mod(a, mod):
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def _poly_gcd(a, b):
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def is_irreducible(poly):
    """Ben-Or style test over GF(2): x^(2^m) = x mod p, and no factor of
    degree dividing a proper m/r."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return poly in (0b10, 0b11)

    def x_pow_2k(k):
        # x^(2^k) mod poly by repeated squaring of the residue
        r = 0b10
        for _ in range(k):
            r = _poly_mulmod(r, r, poly, m)
        return r

    if x_pow_2k(m) != 0b10:
        return False
    for p in _prime_divisors(m):
        h = x_pow_2k(m // p) ^ 0b10
        if _poly_gcd(poly, h) != 1:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class GF2m:
    """The field GF(2^m) over a fixed irreducible modulus."""

    def __init__(self, m, modulus=None):
        if not 1 <= m <= 16:
            raise ValueError("supported field degrees are 1..16")
        self.m = m
        self.q = 1 << m
        self.modulus = DEFAULT_MODULI[m] if modulus is None else int(modulus)
        if self.modulus.bit_length() - 1 != m:
            raise ValueError("modulus degree does not match m")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#b} is reducible over GF(2)")

    def mul(self, a, b):
        return _poly_mulmod(int(a) & (self.q - 1), int(b) & (self.q - 1),
                            self.modulus, self.m)

    def pow(self, a, e):
        a = int(a)
        e = int(e)
        if e < 0:
            raise ValueError("negative exponents not supported")
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inverse(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.q - 2)

    def element(self, value):
        return FieldElement(self, value)

    def power_table(self, d):
        """Images of x -> x^d for all x, with 0^d = 0 (0^0 = 1 by convention)."""
        if not 0 <= d < self.q:
            raise ValueError("exponent must satisfy 0 <= d < 2^m")
        out = np.empty(self.q, dtype=np.uint32)
        out[0] = 1 if d == 0 else 0
        for x in range(1, self.q):
            out[x] = self.pow(x, d)
        return out

    def __eq__(self, other):
        return (isinstance(other, GF2m) and other.m == self.m
                and other.modulus == self.modulus)

    def __hash__(self):
        return hash((self.m, self.modulus))

    def __repr__(self):
        return f"GF2m(m={self.m}, modulus={self.modulus:#b})"


class FieldElement:
    """An element bound to its field context; mixing contexts is an error."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        value = int(value)
        if not 0 <= value < field.q:
            raise ValueError("value out of field range")
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("field context mismatch")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.field, self.value ^ self._coerce(other))

    __sub__ = __add__

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"FieldElement({self.value})"


def power_function(d, m, modulus=None):
    """The (m,m)-function x -> x^d as a VectorialFunction."""
    from .vectorial import VectorialFunction

    field = GF2m(m, modulus)
    return VectorialFunction(m, m, field.power_table(d))


# -- GF(4), used for the two added coordinates of an extension ---------

GF4_MUL = ((0, 0, 0, 0),
           (0, 1, 2, 3),
           (0, 2, 3, 1),
           (0, 3, 1, 2))  # modulus x^2 + x + 1


def gf4_mul(a, b):
    return GF4_MUL[a][b]


def gf4_cube(a):
    """a^3 in GF(4); lands in {0, 1}, and equals 1 exactly when a != 0."""
    return gf4_mul(gf4_mul(a, a), a)


def gf4_cube_expansion_check():
    """Exhaustively verify the cube-of-a-sum expansion over GF(4)^4.

    For all (a,b,c,d): (a+b+c+d)^3 equals the sum of the four cubes plus
    the six pair terms xy(x+y), and every summand lies in {0,1}. This is
    what lets the quadruple conditions become affine equations over GF(2).
    """
    for a in range(4):
        for b in range(4):
            for c in range(4):
                for d in range(4):
                    lhs = gf4_cube(a ^ b ^ c ^ d)
                    terms = [gf4_cube(a), gf4_cube(b), gf4_cube(c), gf4_cube(d)]
                    for x, y in ((a, b), (a, c), (a, d), (b, c), (b, d), (c, d)):
                        terms.append(gf4_mul(gf4_mul(x, y), x ^ y))
                    if any(t not in (0, 1) for t in terms):
                        return False
                    rhs = 0
                    for t in terms:
                        rhs ^= t
                    if lhs != rhs:
                        return False
    return True


def require_cube_expansion():
    if not gf4_cube_expansion_check():
        raise ConsistencyError("GF(4) cube expansion identity failed")

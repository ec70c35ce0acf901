"""Low-level bit machinery: parity tables, batched butterfly transforms,
and XOR-translation of bit-indexed rows.

Truth tables are numpy arrays of 0/1 values indexed by the input point x,
where bit i of x is the value of the (i+1)-th variable.
"""

import numpy as np

_PARITY16 = None


def parity16():
    """Parity lookup table for 16-bit values (uint8, length 65536)."""
    global _PARITY16
    if _PARITY16 is None:
        v = np.arange(1 << 16, dtype=np.uint16)
        _PARITY16 = (np.bitwise_count(v) & 1).astype(np.uint8)
        _PARITY16.setflags(write=False)
    return _PARITY16


def popcount(values):
    """Population count, elementwise."""
    return np.bitwise_count(np.asarray(values))


def dot_parity(a, x):
    """Parity of the bitwise AND a & x (the GF(2) inner product a.x)."""
    return int(int(a & x).bit_count() & 1)


def hadamard_batch(rows):
    """Apply the 2^m-point Hadamard butterfly to each row of `rows`.

    rows: (k, q) integer array with q a power of two. Returns int64.
    Used both for the forward Walsh transform (on sign vectors) and for
    its inverse (which is the same butterfly scaled by 1/q).
    """
    a = np.array(rows, dtype=np.int64)
    if a.ndim == 1:
        a = a[None, :]
    k, q = a.shape
    h = 1
    while h < q:
        a = a.reshape(k, -1, 2, h)
        top = a[:, :, 0, :] + a[:, :, 1, :]
        bot = a[:, :, 0, :] - a[:, :, 1, :]
        a = np.stack([top, bot], axis=2)
        h *= 2
    return a.reshape(k, q)


def walsh_batch(tables):
    """Walsh coefficients of each 0/1 truth table row: W[a] = sum_x (-1)^(f(x)+a.x)."""
    t = np.asarray(tables)
    if t.ndim == 1:
        t = t[None, :]
    return hadamard_batch(1 - 2 * t.astype(np.int64))


def mobius_batch(tables):
    """Binary Moebius transform of each row (truth table <-> ANF coefficients).

    The transform is an involution; it XOR-folds along each variable axis.
    """
    a = np.array(tables, dtype=np.uint8)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    k, q = a.shape
    h = 1
    while h < q:
        a = a.reshape(k, -1, 2, h)
        a[:, :, 1, :] ^= a[:, :, 0, :]
        a = a.reshape(k, q)
        h *= 2
    return a[0] if single else a


def component_tables(images, n, include_zero=False):
    """Truth tables of the components b.F for all masks b.

    images: array of 2^m values below 2^n. Returns (2^n, q) or
    (2^n - 1, q) uint8 rows ordered by mask b.
    """
    if n > 16:
        raise ValueError("component batching supports n <= 16")
    bs = np.arange(1 << n, dtype=np.uint32)
    tabs = parity16()[np.bitwise_and.outer(bs, np.asarray(images, dtype=np.uint32))]
    return tabs if include_zero else tabs[1:]


def int_from_bits(bits):
    """Pack a 0/1 sequence into an int, bit x of the result = bits[x]."""
    v = 0
    for x, b in enumerate(bits):
        if b:
            v |= 1 << x
    return v


def bits_from_int(value, length):
    """Unpack an int into a uint8 array of `length` bits, index = bit position."""
    out = np.zeros(length, dtype=np.uint8)
    x = 0
    v = int(value)
    while v:
        if v & 1:
            out[x] = 1
        v >>= 1
        x += 1
        if x > length:
            raise ValueError("value has more bits than requested length")
    return out


class XorTranslator:
    """Translates the bit positions of a width-2^w integer by XOR with u.

    Row u of the incidence matrix M[u][v] = chi(u ^ v) is exactly the
    characteristic integer of chi with its bit positions permuted by
    v -> v ^ u; the permutation factors into w block swaps.
    """

    def __init__(self, wlog):
        self.wlog = wlog
        self.width = 1 << wlog
        self.full = (1 << self.width) - 1
        self.masks = []
        for k in range(wlog):
            blk = (1 << (1 << k)) - 1
            m = 0
            pos = 0
            while pos < self.width:
                m |= blk << pos
                pos += 2 << k
            self.masks.append(m)

    def translate(self, x, u):
        for k in range(self.wlog):
            if (u >> k) & 1:
                s = 1 << k
                lo = x & self.masks[k]
                hi = x & (self.full ^ self.masks[k])
                x = (lo << s) | (hi >> s)
        return x

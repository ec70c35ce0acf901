"""Equivalence invariants used as search filters and distinguishers.

The cheap filters are invariant under affine changes of input plus
addition of affine functions; the signature bundle (graph rank, derivative
rank, extended Walsh and differential spectra) survives the coarser
graph-affine equivalence as well. Digests are stable 128-bit hashes of
canonical serializations: equal multisets give equal digests no matter
how they were assembled.
"""

import hashlib
import threading
from dataclasses import dataclass

import numpy as np

from .bitops import XorTranslator, walsh_batch
from .boolfun import BooleanFunction
from .gf2linalg import rank_of_rows

HASH_SPEC = "blake2b-128/v1"


def _digest(kind, payload):
    h = hashlib.blake2b(digest_size=16)
    h.update(kind.encode())
    h.update(b"\x00")
    h.update(payload)
    return InvariantDigest(kind=kind, data=h.digest())


@dataclass(frozen=True)
class InvariantDigest:
    kind: str
    data: bytes

    @property
    def hex(self):
        return self.data.hex()

    def __str__(self):
        return f"{self.kind}:{self.hex}"


# -- rank-2 homogeneous quadratics -------------------------------------

class Rank2Quadratics:
    """All homogeneous degree-2 functions whose bilinear form has rank 2.

    These are exactly the affine-orbit of x1*x2 among homogeneous
    quadratics; there are 651 of them for m = 6.
    """

    def __init__(self, m, tables):
        self.m = m
        self.tables = tables          # (count, 2^m) uint8, fixed order
        self.count = tables.shape[0]

    def functions(self):
        return [BooleanFunction(self.m, row) for row in self.tables]


_R2_CACHE = {}
_R2_LOCK = threading.Lock()


def rank2_quadratics(m):
    """Enumerate and cache the rank-2 quadratic set for 2 <= m <= 6."""
    if not 2 <= m <= 6:
        raise ValueError("rank-2 quadratic enumeration supports 2 <= m <= 6")
    with _R2_LOCK:
        if m not in _R2_CACHE:
            _R2_CACHE[m] = Rank2Quadratics(m, _enumerate_rank2(m))
        return _R2_CACHE[m]


def _enumerate_rank2(m):
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    npairs = len(pairs)
    q = 1 << m
    keep_masks = []
    for mask in range(1, 1 << npairs):
        rows = [0] * m
        mm = mask
        for k in range(npairs):
            if (mm >> k) & 1:
                i, j = pairs[k]
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        if rank_of_rows(rows) == 2:
            keep_masks.append(mask)
    # truth tables via the Moebius transform of the coefficient vectors
    from .bitops import mobius_batch

    coeffs = np.zeros((len(keep_masks), q), dtype=np.uint8)
    for row, mask in enumerate(keep_masks):
        for k in range(npairs):
            if (mask >> k) & 1:
                i, j = pairs[k]
                coeffs[row, (1 << i) | (1 << j)] = 1
    tables = mobius_batch(coeffs)
    tables.setflags(write=False)
    return tables


# -- Walsh-multiset invariants ------------------------------------------

def w_multiset(f):
    """Sorted run-length multiset of |W(f,a)|."""
    return f.walsh_abs()


def w_digest(f):
    return _digest("w", _rl_bytes(f.walsh_abs()))


def _rl_bytes(run_length):
    return b"".join(int(v).to_bytes(4, "little") + int(c).to_bytes(4, "little")
                    for v, c in run_length)


def _abs_sorted_rows(f):
    """|W(f+g)| rows over all rank-2 quadratics g, each row sorted, the
    rows in lexicographic order: the canonical form of the I multiset."""
    quad = rank2_quadratics(f.m)
    tabs = quad.tables ^ f.table[None, :]
    aw = np.abs(walsh_batch(tabs))
    aw.sort(axis=1)
    order = np.lexsort(aw.T[::-1])
    return np.ascontiguousarray(aw[order].astype(np.int32))


def inv_I(f):
    """The multiset {{ w(f+g) : g rank-2 quadratic }} in canonical form:
    a tuple of per-g run-length multisets, outer-sorted."""
    rows = _abs_sorted_rows(f)
    out = []
    for row in rows:
        vals, counts = np.unique(row, return_counts=True)
        out.append(tuple((int(v), int(c)) for v, c in zip(vals, counts)))
    return tuple(out)


def inv_I_digest(f):
    return _digest("I", _abs_sorted_rows(f).tobytes())


def component_I_digests(F):
    """inv_I digests of every nonzero component, indexed by mask b - 1."""
    from .bitops import component_tables

    tabs = component_tables(F.images, F.n, include_zero=False)
    quad = rank2_quadratics(F.m)
    out = []
    for tab in tabs:
        rows = quad.tables ^ tab[None, :]
        aw = np.abs(walsh_batch(rows))
        aw.sort(axis=1)
        order = np.lexsort(aw.T[::-1])
        payload = np.ascontiguousarray(aw[order].astype(np.int32)).tobytes()
        out.append(_digest("I", payload))
    return out


def inv_Jprime(F):
    """Sorted multiset of the component I digests (hex), nonzero masks only."""
    return tuple(sorted(d.hex for d in component_I_digests(F)))


def inv_Jprime_digest(F, parts=None):
    parts = inv_Jprime(F) if parts is None else tuple(sorted(parts))
    return _digest("Jprime", ",".join(parts).encode())


# -- graph-based signatures ------------------------------------------------

def _incidence_rank(points, width_log):
    """GF(2) rank of the matrix M[u][v] = [u ^ v in points]."""
    tr = XorTranslator(width_log)
    base = 0
    for p in points:
        base |= 1 << int(p)
    basis = {}
    for u in range(1 << width_log):
        v = tr.translate(base, u)
        while v:
            lead = v.bit_length() - 1
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    return len(basis)


def _check_rank_dims(F):
    if F.m != F.n:
        raise ValueError("graph ranks are defined for (m,m)-functions here")
    if F.m > 6:
        raise ValueError("rank computation is limited to m <= 6 "
                         "(matrix side 2^(2m))")


def gamma_rank(F):
    """Rank of the incidence structure generated by the graph {(x, F(x))}.

    Points (x, y) are encoded as x | y << m.
    """
    _check_rank_dims(F)
    pts = [int(x) | (int(F.images[x]) << F.m) for x in range(1 << F.m)]
    return _incidence_rank(pts, 2 * F.m)


def delta_rank(F):
    """Same rank for the derivative set {(a, F(x)+F(x+a)) : a != 0}."""
    _check_rank_dims(F)
    q = 1 << F.m
    pts = set()
    for a in range(1, q):
        diffs = F.images ^ F.images[np.arange(q) ^ a]
        for d in np.unique(diffs):
            pts.add(a | (int(d) << F.m))
    return _incidence_rank(sorted(pts), 2 * F.m)


def extended_walsh_multiset(F):
    """Multiset of |W(F,a,b)| over all pairs (a,b), as run-length pairs."""
    w = np.abs(F.walsh_matrix(include_zero=True))
    vals, counts = np.unique(w, return_counts=True)
    return tuple((int(v), int(c)) for v, c in zip(vals, counts))


def differential_spectrum_multiset(F):
    """Multiset of DDT entries N_F(u,v) over u != 0, all v."""
    vals, counts = np.unique(F.ddt(), return_counts=True)
    return tuple((int(v), int(c)) for v, c in zip(vals, counts))


@dataclass(frozen=True)
class CczSignature:
    gamma_rank: int
    delta_rank: int
    extended_walsh: tuple
    differential_spectrum: tuple

    def digest(self):
        payload = (self.gamma_rank.to_bytes(4, "little")
                   + self.delta_rank.to_bytes(4, "little")
                   + _rl_bytes(self.extended_walsh)
                   + b"|" + _rl_bytes(self.differential_spectrum))
        return _digest("ccz", payload)

    def as_record(self):
        return {
            "gamma_rank": self.gamma_rank,
            "delta_rank": self.delta_rank,
            "extended_walsh": [list(p) for p in self.extended_walsh],
            "differential_spectrum": [list(p) for p in self.differential_spectrum],
            "digest": self.digest().hex,
        }


def ccz_signature(F):
    """Invariant evidence bundle; equal signatures never prove equivalence."""
    return CczSignature(
        gamma_rank=gamma_rank(F),
        delta_rank=delta_rank(F),
        extended_walsh=extended_walsh_multiset(F),
        differential_spectrum=differential_spectrum_multiset(F),
    )

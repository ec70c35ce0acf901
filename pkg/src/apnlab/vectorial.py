"""Vectorial (m,n)-functions: components, difference tables, the four
APN characterizations, solution-counting formulas, counting functions,
spectral level profiles, and the two-level pair equations.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitops import component_tables, mobius_batch, popcount, walsh_batch
from .boolfun import BooleanFunction
from .errors import ConsistencyError
from .gf2linalg import is_invertible, matrix_action_table
from .rationals import frac_str


def _fourth_power_sums(walsh_rows):
    """Row-wise sum of W^4 as exact Python ints (int64 is safe to m=10)."""
    w = walsh_rows
    if w.shape[1] <= (1 << 10):
        sq = w.astype(np.int64) ** 2
        return [int(v) for v in (sq * sq).sum(axis=1)]
    return [sum(int(x) ** 4 for x in row) for row in w]


class VectorialFunction:
    """Immutable (m,n)-function given by its 2^m image values."""

    __slots__ = ("m", "n", "images", "_key", "_ctabs")

    def __init__(self, m, n, images):
        if not (1 <= m <= 16 and 1 <= n <= 16):
            raise ValueError("m and n must be in 1..16")
        imgs = np.ascontiguousarray(images, dtype=np.uint32)
        if imgs.shape != (1 << m,):
            raise ValueError(f"expected {1 << m} images for m={m}")
        if imgs.max(initial=0) >> n:
            raise ValueError(f"image does not fit in {n} bits")
        imgs.setflags(write=False)
        self.m = m
        self.n = n
        self.images = imgs
        self._key = (m, n, imgs.tobytes())
        self._ctabs = None

    # -- construction / serialization ---------------------------------

    @classmethod
    def from_coordinates(cls, coords):
        """Assemble from coordinate functions, lowest coordinate first."""
        if not coords:
            raise ValueError("need at least one coordinate")
        m = coords[0].m
        images = np.zeros(1 << m, dtype=np.uint32)
        for i, f in enumerate(coords):
            if f.m != m:
                raise ValueError("coordinate arity mismatch")
            images |= f.table.astype(np.uint32) << np.uint32(i)
        return cls(m, len(coords), images)

    @classmethod
    def from_boolean(cls, f):
        return cls(f.m, 1, f.table.astype(np.uint32))

    def to_hex_line(self):
        return " ".join(format(int(v), "x") for v in self.images)

    # -- components ----------------------------------------------------

    def component(self, b):
        """The Boolean function x -> b.F(x); b = 0 gives the zero function."""
        if not 0 <= b < (1 << self.n):
            raise ValueError("component mask out of range")
        from .bitops import parity16

        return BooleanFunction(self.m, parity16()[np.uint32(b) & self.images])

    def coordinate(self, i):
        if not 0 <= i < self.n:
            raise ValueError("coordinate index out of range")
        return BooleanFunction(self.m, ((self.images >> np.uint32(i)) & 1).astype(np.uint8))

    def coordinates(self):
        return [self.coordinate(i) for i in range(self.n)]

    def component_tables(self, include_zero=False):
        if self._ctabs is None:
            tabs = component_tables(self.images, self.n, include_zero=True)
            tabs.setflags(write=False)
            self._ctabs = tabs
        return self._ctabs if include_zero else self._ctabs[1:]

    def walsh_matrix(self, include_zero=True):
        """W(F,a,b) for all (a,b): row index b, column index a."""
        return walsh_batch(self.component_tables(include_zero=include_zero))

    def degree(self):
        anf = mobius_batch(np.stack([
            ((self.images >> np.uint32(i)) & 1).astype(np.uint8) for i in range(self.n)
        ]))
        deg = 0
        for row in anf:
            nz = np.nonzero(row)[0]
            if nz.size:
                deg = max(deg, int(popcount(nz.astype(np.uint32)).max()))
        return deg

    # -- differential structure -----------------------------------------

    def ddt_row(self, u):
        """N_F(u, .) for one nonzero input difference u."""
        if not 0 < u < (1 << self.m):
            raise ValueError("input difference must be nonzero")
        idx = np.arange(1 << self.m)
        return np.bincount(self.images[idx ^ u] ^ self.images, minlength=1 << self.n)

    def diff_count(self, u, v):
        if not 0 <= v < (1 << self.n):
            raise ValueError("output difference out of range")
        return int(self.ddt_row(u)[v])

    def ddt(self):
        """Full table, rows u = 1 .. 2^m - 1."""
        return np.stack([self.ddt_row(u) for u in range(1, 1 << self.m)])

    def differential_uniformity(self):
        return self.delta_bounded()

    def delta_bounded(self, stop_above=None):
        """Max DDT entry; stops early once it exceeds `stop_above`."""
        delta = 0
        for u in range(1, 1 << self.m):
            delta = max(delta, int(self.ddt_row(u).max()))
            if stop_above is not None and delta > stop_above:
                return delta
        return delta

    def zero_sum_flat_count(self):
        """Number of 2-flats {x,y,z,t} (distinct, XOR-sum 0) with zero image sum.

        Canonical form x < y < z < t with t = x^y^z counts each flat once.
        Enumeration is chunked over x, practical through m ~ 10.
        """
        if self.m > 10:
            raise ValueError("flat enumeration is limited to m <= 10")
        q = 1 << self.m
        imgs = self.images
        rng = np.arange(q)
        total = 0
        for x in range(q - 3):
            ys = rng[x + 1:]
            zs = rng[x + 1:]
            ymat, zmat = np.meshgrid(ys, zs, indexing="ij")
            keep = zmat > ymat
            t = x ^ ymat ^ zmat
            keep &= t > zmat
            fsum = imgs[x] ^ imgs[ymat] ^ imgs[zmat] ^ imgs[t]
            total += int(np.count_nonzero(keep & (fsum == 0)))
        return total

    # -- APN criteria -----------------------------------------------------

    def is_apn(self):
        """Evaluate the four equivalent APN characterizations and cross-check.

        Returns ApnEvidence; a verdict disagreement raises ConsistencyError
        because it can only come from an implementation bug.
        """
        if self.m != self.n:
            raise ValueError("APN criteria apply to (m,m)-functions")
        q = 1 << self.m
        delta = self.differential_uniformity()
        flats = self.zero_sum_flat_count()
        n4 = self.n_solutions(4)
        ksum = self.kappa_sum()
        crit = {
            "delta_is_2": delta == 2,
            "no_zero_sum_flat": flats == 0,
            "n4_equals_trivial": n4 == 3 * q * q - 2 * q,
            "kappa_sum": ksum == 2 * (q - 1),
        }
        verdicts = set(crit.values())
        if len(verdicts) != 1:
            raise ConsistencyError(f"APN criteria disagree: {crit}")
        return ApnEvidence(
            m=self.m, apn=verdicts.pop(), delta=delta, zero_sum_flats=flats,
            n4=n4, t4=3 * q * q - 2 * q, kappa_sum=ksum, criteria=crit,
        )

    def kappa_sum(self):
        """Sum of kappa over the nonzero components, exact."""
        w = walsh_batch(self.component_tables(include_zero=False))
        q = 1 << self.m
        return Fraction(sum(_fourth_power_sums(w)), q ** 3)

    # -- solution counting (x1+...+xr = 0, F-sum = 0) ----------------------

    def n_solutions(self, r):
        """Number of r-tuple solutions, computed spectrally from the
        order-r moments of all 2^n components (zero included)."""
        self._check_r(r)
        if self.m < self.n:
            raise ValueError("n_solutions requires m >= n")
        w = self.walsh_matrix(include_zero=True)
        total = sum(sum(int(x) ** r for x in row) for row in w)
        q2 = 1 << (2 * self.m)
        scaled = total << (self.m - self.n)
        if scaled % q2:
            raise ConsistencyError("spectral solution count is not an integer")
        return scaled // q2

    def n_solutions_direct(self, r):
        """Brute-force oracle for n_solutions (enumerates q^(r-1) tuples)."""
        self._check_r(r)
        return self._enumerate_solutions(r, distinct_filter=None)

    def t_solutions(self, r):
        """Trivial (not-all-distinct) solution count.

        Closed forms hold only for APN functions; otherwise this falls
        back to direct enumeration.
        """
        self._check_r(r)
        q = 1 << self.m
        if self.m == self.n and self.is_apn().apn:
            if r == 4:
                return 3 * q * q - 2 * q
            return q + 15 * q * (q - 1) + 15 * q * (q - 1) * (q - 2)
        return self.t_solutions_direct(r)

    def t_solutions_direct(self, r):
        self._check_r(r)
        return self._enumerate_solutions(r, distinct_filter=False)

    def q_solutions(self, r):
        """(N_r - T_r) / r!, the number of essentially distinct solutions."""
        self._check_r(r)
        import math

        diff = self.n_solutions(r) - self.t_solutions(r)
        fact = math.factorial(r)
        if diff < 0 or diff % fact:
            raise ConsistencyError("N_r - T_r is not a nonnegative multiple of r!")
        return diff // fact

    @staticmethod
    def _check_r(r):
        if r not in (4, 6):
            raise ValueError("supported solution-count orders are 4 and 6")

    def _enumerate_solutions(self, r, distinct_filter):
        """Count solutions by enumerating the first r-1 coordinates.

        distinct_filter: None counts all, False counts only tuples with a
        repeated value. Practical for m <= 4 at r = 6.
        """
        q = 1 << self.m
        imgs = self.images
        if r == 4:
            x1, x2, x3 = np.meshgrid(*(np.arange(q),) * 3, indexing="ij")
            x4 = x1 ^ x2 ^ x3
            good = (imgs[x1] ^ imgs[x2] ^ imgs[x3] ^ imgs[x4]) == 0
            if distinct_filter is False:
                rep = ((x1 == x2) | (x1 == x3) | (x1 == x4)
                       | (x2 == x3) | (x2 == x4) | (x3 == x4))
                good &= rep
            return int(np.count_nonzero(good))
        # r = 6: fix (x1, x2) in Python, vectorize (x3, x4, x5); x6 is forced
        total = 0
        x3, x4, x5 = np.meshgrid(*(np.arange(q),) * 3, indexing="ij")
        partial = x3 ^ x4 ^ x5
        fpart = imgs[x3] ^ imgs[x4] ^ imgs[x5]
        grid_rep = (x3 == x4) | (x3 == x5) | (x4 == x5)
        for x1 in range(q):
            for x2 in range(q):
                x6 = x1 ^ x2 ^ partial
                good = (imgs[x1] ^ imgs[x2] ^ fpart ^ imgs[x6]) == 0
                if distinct_filter is False:
                    rep = (grid_rep | (x1 == x2)
                           | (x1 == x3) | (x1 == x4) | (x1 == x5) | (x1 == x6)
                           | (x2 == x3) | (x2 == x4) | (x2 == x5) | (x2 == x6)
                           | (x3 == x6) | (x4 == x6) | (x5 == x6))
                    good &= rep
                total += int(np.count_nonzero(good))
        return total

    # -- counting functions -------------------------------------------------

    def counting_function(self, u):
        """Indicator n_u of output differences attained twice; APN input only."""
        if self.m != self.n:
            raise ValueError("counting functions require m = n")
        row = self.ddt_row(u)
        if not np.all((row == 0) | (row == 2)):
            raise ValueError(f"function is not APN at u={u}: DDT row has entries "
                             f"outside {{0,2}}")
        return BooleanFunction(self.m, (row == 2).astype(np.uint8))

    def counting_link_report(self):
        """Check W(n_u, b) = -(F_b x F_b)(u) for all u != 0, b, plus balance.

        The left side comes from the transform of n_u, the right side from
        the direct O(q^2) autocorrelation sums, computed independently.
        Returns (holds, max_abs_gap).
        """
        q = 1 << self.m
        autoc = np.stack([
            self.component(b).autocorrelation_direct() for b in range(q)
        ])
        gap = 0
        for u in range(1, q):
            w = self.counting_function(u).walsh_spectrum()
            if w[0] != 0:
                gap = max(gap, abs(int(w[0])))
            lhs = w[1:]
            rhs = -autoc[1:, u]
            gap = max(gap, int(np.abs(lhs - rhs).max(initial=0)))
        return gap == 0, gap

    def is_crooked(self):
        """True iff every counting function n_u has degree at most 1."""
        return all(self.counting_function(u).degree() <= 1
                   for u in range(1, 1 << self.m))

    # -- bent components ------------------------------------------------------

    def bent_component_count(self):
        if self.m % 2 != 0:
            return 0
        w = walsh_batch(self.component_tables(include_zero=False))
        flat = np.all(np.abs(w) == 1 << (self.m // 2), axis=1)
        return int(np.count_nonzero(flat))

    def is_mnbc(self):
        """Maximum-number-of-bent-components test for (2k, n) with n > k."""
        if self.m % 2 != 0:
            raise ValueError("MNBC is defined for even m only")
        k = self.m // 2
        if self.n <= k:
            raise ValueError("MNBC requires n > m/2")
        return self.bent_component_count() == (1 << self.n) - (1 << (self.n - k))

    # -- spectral profile --------------------------------------------------------

    def spectral_profile(self):
        """Kappa level structure of the nonzero components."""
        w = walsh_batch(self.component_tables(include_zero=False))
        anf = mobius_batch(self.component_tables(include_zero=False))
        q = 1 << self.m
        q3 = q ** 3
        by_level = {}
        for idx, total in enumerate(_fourth_power_sums(w)):
            kap = Fraction(total, q3)
            nz = np.nonzero(anf[idx])[0]
            deg = int(popcount(nz.astype(np.uint32)).max()) if nz.size else 0
            entry = by_level.setdefault(kap, {"count": 0, "degrees": set(), "masks": []})
            entry["count"] += 1
            entry["degrees"].add(deg)
            entry["masks"].append(idx + 1)
        levels = tuple(sorted(by_level))
        return SpectralProfile(
            m=self.m,
            n=self.n,
            levels=tuple((k, by_level[k]["count"]) for k in levels),
            degrees={k: tuple(sorted(by_level[k]["degrees"])) for k in levels},
            masks={k: tuple(by_level[k]["masks"]) for k in levels},
        )

    # -- reshaping ---------------------------------------------------------------

    def truncate(self, n_new):
        """Keep the n_new low-order coordinates."""
        if not 0 < n_new < self.n:
            raise ValueError("truncation width must satisfy 0 < n' < n")
        return VectorialFunction(self.m, n_new,
                                 self.images & np.uint32((1 << n_new) - 1))

    def extend(self, f):
        """Append a Boolean coordinate on top; comp(self) embeds in the result."""
        if f.m != self.m:
            raise ValueError("new coordinate has wrong arity")
        if self.n + 1 > 16:
            raise ValueError("cannot extend beyond 16 output bits")
        return VectorialFunction(
            self.m, self.n + 1,
            self.images | (f.table.astype(np.uint32) << np.uint32(self.n)))

    # -- equivalence moves ----------------------------------------------------------

    def apply_ea(self, in_cols, in_shift=0, out_cols=None, lin_cols=None, out_shift=0):
        """B o F o A plus an affine map: x -> B.F(A.x + a) + L.x + c."""
        if not is_invertible(in_cols):
            raise ValueError("input transform is singular")
        ax = matrix_action_table(tuple(in_cols), self.m) ^ np.uint32(in_shift)
        imgs = self.images[ax]
        if out_cols is not None:
            if not is_invertible(out_cols):
                raise ValueError("output transform is singular")
            imgs = matrix_action_table(tuple(out_cols), self.n)[imgs]
        if lin_cols is not None:
            imgs = imgs ^ matrix_action_table(tuple(lin_cols), self.m)
        return VectorialFunction(self.m, self.n, imgs ^ np.uint32(out_shift))

    # -- identity ----------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, VectorialFunction) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def table_digest(self):
        """Stable 128-bit hex digest of (m, n, images), for logs and dedup."""
        import hashlib

        h = hashlib.blake2b(digest_size=16)
        h.update(f"func:{self.m}:{self.n}:".encode())
        h.update(self._key[2])
        return h.hexdigest()

    def __repr__(self):
        return f"VectorialFunction(m={self.m}, n={self.n})"


@dataclass(frozen=True)
class ApnEvidence:
    m: int
    apn: bool
    delta: int
    zero_sum_flats: int
    n4: int
    t4: int
    kappa_sum: Fraction
    criteria: dict

    def __bool__(self):
        return self.apn


@dataclass(frozen=True)
class SpectralProfile:
    m: int
    n: int
    levels: tuple            # ((kappa, count), ...) sorted by kappa
    degrees: dict            # kappa -> tuple of component degrees
    masks: dict              # kappa -> tuple of component masks b

    @property
    def level_set(self):
        return tuple(k for k, _ in self.levels)

    @property
    def level_count(self):
        return len(self.levels)

    def count_at(self, kappa):
        for k, c in self.levels:
            if k == kappa:
                return c
        return 0

    def kappa_sum(self):
        return sum((k * c for k, c in self.levels), Fraction(0))

    def matches_type(self, alpha, beta):
        """Exactly two levels, equal to {alpha, beta}."""
        return self.level_set == tuple(sorted((Fraction(alpha), Fraction(beta))))

    def level_is_subspace(self, kappa):
        """Whether this level's masks together with 0 are XOR-closed."""
        masks = set(self.masks.get(kappa, ())) | {0}
        return all((a ^ b) in masks for a in masks for b in masks)

    def as_record(self):
        return {
            "levels": {frac_str(k): c for k, c in self.levels},
            "degrees": {frac_str(k): list(v) for k, v in self.degrees.items()},
            "subspace_levels": [frac_str(k) for k in self.level_set
                                if self.level_is_subspace(k)],
        }


@dataclass(frozen=True)
class PairSolution:
    """Solution of the two-level count equations for a pair alpha < beta."""

    alpha: Fraction
    A: int
    beta: Fraction
    B: int

    def __post_init__(self):
        q = self.A + self.B + 1
        if self.alpha >= self.beta:
            raise ValueError("pair requires alpha < beta")
        if self.A <= 0 or self.B <= 0:
            raise ValueError("counts must be positive")
        if self.alpha * self.A + self.beta * self.B != 2 * (q - 1):
            raise ValueError("pair does not satisfy the weighted sum identity")

    @property
    def q(self):
        return self.A + self.B + 1


def pair_solutions(kappas, q):
    """All (alpha, A, beta, B) with alpha < beta drawn from `kappas` and
    positive integers A, B solving alpha*A + beta*B = 2(q-1), A+B = q-1."""
    vals = [Fraction(k) for k in kappas]
    if len(set(vals)) != len(vals):
        raise ValueError("kappa values must be distinct")
    if any(v <= 0 for v in vals):
        raise ValueError("kappa values must be positive")
    out = []
    vals = sorted(vals)
    for i, alpha in enumerate(vals):
        for beta in vals[i + 1:]:
            a_exact = Fraction((beta - 2) * (q - 1), 1) / (beta - alpha)
            if a_exact.denominator != 1:
                continue
            A = int(a_exact)
            B = (q - 1) - A
            if A <= 0 or B <= 0:
                continue
            out.append(PairSolution(alpha=alpha, A=A, beta=beta, B=B))
    return out

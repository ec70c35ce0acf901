"""Coordinate-extension machinery: quadruple enumeration, the delta
bound filter, the affine solvability test over GF(2), and backtracking
completion of an (m, m-2)-function to APN (m, m)-functions.

The chain of filters is sound in one direction only: a failed delta
bound or an unsolvable system proves no APN extension exists, while
passing both is necessary but not sufficient.
"""

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .gf2linalg import Solvable, Unsolvable, solve_affine
from .vectorial import VectorialFunction

PASS = "Pass"
REJECTED_DELTA = "RejectedDelta"
REJECTED_SYSTEM = "RejectedSystem"


@dataclass(frozen=True)
class QuadrupleSet:
    """Canonical zero-image-sum 2-flats of the base function.

    Each flat {x,y,z,t} is stored once as x < y < z < t (t = x^y^z is
    then automatic), so the count equals Q_4 of the solution-count
    formulas; the unit tests pin that relation down at small m.
    """

    m: int
    n: int
    quads: tuple

    def __len__(self):
        return len(self.quads)


def quadruple_set(F):
    """Enumerate 2-flats with zero F-image sum, canonically ordered."""
    q = 1 << F.m
    imgs = F.images
    found = []
    rng = np.arange(q)
    for x in range(q - 3):
        ys, zs = np.meshgrid(rng[x + 1:], rng[x + 1:], indexing="ij")
        t = x ^ ys ^ zs
        keep = (zs > ys) & (t > zs) & ((imgs[x] ^ imgs[ys] ^ imgs[zs] ^ imgs[t]) == 0)
        for yy, zz in zip(ys[keep], zs[keep]):
            found.append((x, int(yy), int(zz), x ^ int(yy) ^ int(zz)))
    return QuadrupleSet(m=F.m, n=F.n, quads=tuple(found))


def apn_extension_bound(m, n):
    """Largest differential uniformity compatible with an APN extension."""
    return 1 << (m - n + 1)


def delta_filter(F):
    """True iff Delta_F <= 2^(m-n+1); False proves no APN extension exists."""
    bound = apn_extension_bound(F.m, F.n)
    return F.delta_bounded(stop_above=bound) <= bound


@dataclass(frozen=True)
class AffineSystem:
    """Affine GF(2) system over q + q(q-1)/2 unknowns.

    Variable u_x (index x) stands for g(x)^3 and v_{x,y} (x < y, index
    q + pair_index) for g(x)g(y)(g(x)+g(y)); one row per quadruple
    requires their ten-term sum to equal 1.
    """

    q: int
    rows: tuple

    @property
    def num_vars(self):
        return self.q * (self.q + 1) // 2


def pair_index(q, x, y):
    """Lexicographic index of the unordered pair x < y."""
    if not 0 <= x < y < q:
        raise ValueError("pair_index requires 0 <= x < y < q")
    return x * (2 * q - x - 1) // 2 + (y - x - 1)


def build_system(quadset):
    """One row per quadruple: 4 u-bits, 6 v-bits, affine constant 1."""
    if quadset.n != quadset.m - 2:
        raise ValueError("the affine system applies to (m, m-2)-functions")
    q = 1 << quadset.m
    num_vars = q * (q + 1) // 2
    rows = []
    for (x, y, z, t) in quadset.quads:
        row = 0
        for v in (x, y, z, t):
            row |= 1 << v
        for a, b in ((x, y), (x, z), (x, t), (y, z), (y, t), (z, t)):
            row |= 1 << (q + pair_index(q, a, b))
        row |= 1 << num_vars
        rows.append(row)
    return AffineSystem(q=q, rows=tuple(rows))


def solve_system(system):
    """Word-packed elimination; Unsolvable carries a re-verifiable witness."""
    return solve_affine(system.rows, system.num_vars)


@dataclass(frozen=True)
class ExtensionVerdict:
    """Outcome of the two-stage extension test.

    Pass means both necessary conditions hold; it does NOT certify that
    an APN extension exists, because the u/v unknowns of the affine
    system are not constrained to come from an actual GF(4)-valued map.
    """

    outcome: str
    delta: int
    bound: int
    rank: int = None
    free_count: int = None
    witness: tuple = None

    @property
    def passed(self):
        return self.outcome == PASS

    def as_record(self):
        rec = {"outcome": self.outcome, "delta": self.delta, "bound": self.bound,
               "sufficient": False}
        if self.rank is not None:
            rec["rank"] = self.rank
            rec["free_count"] = self.free_count
        if self.witness is not None:
            rec["witness_rows"] = list(self.witness)
        return rec


def extension_test(F):
    """Delta bound first, then solvability of the affine system."""
    if F.n != F.m - 2:
        raise ValueError("extension test applies to (m, m-2)-functions")
    bound = apn_extension_bound(F.m, F.n)
    delta = F.delta_bounded(stop_above=bound)
    if delta > bound:
        return ExtensionVerdict(outcome=REJECTED_DELTA, delta=delta, bound=bound)
    outcome = solve_system(build_system(quadruple_set(F)))
    if isinstance(outcome, Unsolvable):
        return ExtensionVerdict(outcome=REJECTED_SYSTEM, delta=delta, bound=bound,
                                witness=outcome.witness)
    return ExtensionVerdict(outcome=PASS, delta=delta, bound=bound,
                            rank=outcome.rank, free_count=outcome.free_count)


# -- backtracking completion ----------------------------------------------


@dataclass
class SearchBudget:
    max_nodes: int = None
    max_seconds: float = None
    max_solutions: int = None


@dataclass
class CompletionStats:
    nodes: int = 0
    solutions: int = 0
    elapsed: float = 0.0
    stop_reason: str = "exhausted"
    normalized: bool = True


@dataclass
class CompletionRun:
    functions: list
    stats: CompletionStats


class _SharedState:
    """Node counter, deadline and solution sink shared by subtree tasks."""

    def __init__(self, budget):
        self.lock = threading.Lock()
        self.nodes = 0
        self.solutions = []
        self.stop_reason = None
        self.budget = budget
        self.deadline = (time.monotonic() + budget.max_seconds
                         if budget.max_seconds else None)

    def bump_nodes(self, k):
        with self.lock:
            self.nodes += k
            if (self.budget.max_nodes is not None
                    and self.nodes > self.budget.max_nodes):
                self.stop_reason = self.stop_reason or "node_budget"
        if self.deadline is not None and time.monotonic() > self.deadline:
            with self.lock:
                self.stop_reason = self.stop_reason or "time_budget"

    def add_solution(self, sol):
        with self.lock:
            self.solutions.append(sol)
            if (self.budget.max_solutions is not None
                    and len(self.solutions) >= self.budget.max_solutions):
                self.stop_reason = self.stop_reason or "solution_budget"

    @property
    def stopped(self):
        return self.stop_reason is not None


class _Subsearch:
    """DFS over GF(4) values with unit propagation on the quadruples.

    Each quadruple tracks its number of unassigned points; when it drops
    to one, the sum of the other three becomes forbidden for the last
    point, so conflicts surface before leaves.
    """

    NODE_CHUNK = 4096  # shared-counter update granularity

    def __init__(self, q, quads, incident, order, fixed, shared):
        self.q = q
        self.quads = quads
        self.incident = incident
        self.order = order
        self.shared = shared
        self.g = [-1] * q
        for x, val in fixed.items():
            self.g[x] = val
        self.unassigned = [sum(1 for v in qd if self.g[v] < 0) for qd in quads]
        self.forb = [[0, 0, 0, 0] for _ in range(q)]
        self.local_nodes = 0

    def assign_prefix(self, values):
        """Apply forced values for the first len(values) order positions.

        Returns False if the prefix is already contradictory.
        """
        for i, val in enumerate(values):
            x = self.order[i]
            if self.forb[x][val]:
                return False
            self.g[x] = val
            ok, _ = self._propagate(x)
            if not ok:
                return False
        return True

    def _propagate(self, x):
        g = self.g
        quads = self.quads
        trail = []
        for qi in self.incident[x]:
            self.unassigned[qi] -= 1
            u = self.unassigned[qi]
            if u == 0:
                a, b, c, d = quads[qi]
                if g[a] ^ g[b] ^ g[c] ^ g[d] == 0:
                    return False, (trail, qi)
            elif u == 1:
                a, b, c, d = quads[qi]
                s = 0
                y = -1
                for v in (a, b, c, d):
                    if g[v] < 0:
                        y = v
                    else:
                        s ^= g[v]
                fy = self.forb[y]
                fy[s] += 1
                trail.append((fy, s))
                if fy[0] and fy[1] and fy[2] and fy[3]:
                    return False, (trail, qi)
        return True, (trail, -1)

    def _undo(self, x, trail, upto_qi):
        for fy, s in trail:
            fy[s] -= 1
        for qi in self.incident[x]:
            self.unassigned[qi] += 1
            if qi == upto_qi:
                break

    def run(self, start_depth):
        self._dfs(start_depth)
        if self.local_nodes:
            self.shared.bump_nodes(self.local_nodes)
            self.local_nodes = 0

    def _dfs(self, i):
        if self.shared.stopped:
            return
        if i == len(self.order):
            self.shared.add_solution(tuple(self.g))
            return
        x = self.order[i]
        fx = self.forb[x]
        for val in range(4):
            if fx[val]:
                continue
            self.local_nodes += 1
            if self.local_nodes >= self.NODE_CHUNK:
                self.shared.bump_nodes(self.local_nodes)
                self.local_nodes = 0
                if self.shared.stopped:
                    return
            self.g[x] = val
            ok, (trail, conflict_qi) = self._propagate(x)
            if ok:
                self._dfs(i + 1)
                self._undo(x, trail, -1)
            else:
                self._undo(x, trail, conflict_qi)
            self.g[x] = -1
            if self.shared.stopped:
                return


def backtrack_complete(F, budget=None, normalize=True, threads=1, fork_depth=0,
                       quadset=None):
    """Complete an (m, m-2)-function with a GF(4)-valued coordinate pair.

    Every complete assignment with all quadruple sums nonzero yields an
    APN (m,m)-function; each emitted function is still re-verified by an
    independent DDT scan. With `normalize`, g vanishes on 0 and a fixed
    basis, picking one representative per coset of affine additions.

    Results are sorted canonically, so output order never depends on
    thread scheduling. With threads > 1 the tree forks into subtree
    tasks at `fork_depth` (default 2 when threading).
    """
    if F.n != F.m - 2:
        raise ValueError("completion applies to (m, m-2)-functions")
    budget = budget or SearchBudget()
    q = 1 << F.m
    quadset = quadset if quadset is not None else quadruple_set(F)
    quads = quadset.quads
    incident = [[] for _ in range(q)]
    for qi, qd in enumerate(quads):
        for v in qd:
            incident[v].append(qi)

    fixed = {}
    if normalize:
        for x in [0] + [1 << i for i in range(F.m)]:
            fixed[x] = 0
    order = sorted((x for x in range(q) if x not in fixed),
                   key=lambda x: (-len(incident[x]), x))

    shared = _SharedState(budget)
    started = time.monotonic()

    if threads > 1 and fork_depth == 0:
        fork_depth = 2
    fork_depth = min(fork_depth, len(order))

    if threads <= 1 or fork_depth == 0:
        search = _Subsearch(q, quads, incident, order, fixed, shared)
        search.run(0)
    else:
        prefixes = [()]
        for _ in range(fork_depth):
            prefixes = [p + (v,) for p in prefixes for v in range(4)]

        def task(prefix):
            sub = _Subsearch(q, quads, incident, order, fixed, shared)
            if sub.assign_prefix(prefix):
                sub.run(fork_depth)
            elif sub.local_nodes:
                shared.bump_nodes(sub.local_nodes)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(task, prefixes))

    stats = CompletionStats(
        nodes=shared.nodes,
        solutions=len(shared.solutions),
        elapsed=time.monotonic() - started,
        stop_reason=shared.stop_reason or "exhausted",
        normalized=normalize,
    )

    functions = []
    for sol in sorted(set(shared.solutions)):
        g = np.array(sol, dtype=np.uint32)
        images = F.images | (g << np.uint32(F.n))
        G = VectorialFunction(F.m, F.m, images)
        evidence = G.is_apn()
        if not evidence.apn:
            raise ConsistencyError(
                "backtracking emitted a non-APN completion "
                f"(delta={evidence.delta}); quadruple constraints are broken")
        functions.append(G)
    return CompletionRun(functions=functions, stats=stats)

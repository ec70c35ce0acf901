"""Staged coordinate-extension search.

Starting from single-coordinate seeds, each level extends every member
by every pool function, keeping extensions whose new components respect
the two-level type and degree policy, whose differential uniformity
stays under the extension bound for the current shape, and whose
component-invariant digest is new. Level-3 members face the affine
solvability test; survivors are completed by backtracking, and the
completions are verified, profiled, and grouped by signature.
"""

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bitops import mobius_batch, popcount, walsh_batch
from .boolfun import BooleanFunction
from .corpus import random_affine_orbit
from .errors import ConsistencyError
from .extension import (PASS, SearchBudget, apn_extension_bound,
                        backtrack_complete, extension_test)
from .invariants import ccz_signature, component_I_digests, inv_Jprime_digest
from .io import (TOOL_NAME, TOOL_VERSION, RunManifest, config_digest,
                 load_boolean_functions, store_vectorial_functions)
from .rationals import frac_str
from .vectorial import VectorialFunction


@dataclass
class SearchConfig:
    """Everything a search run depends on; hashable for manifests."""

    alpha: Fraction
    beta: Fraction
    seeds: list
    pool: list
    m: int = 6
    enforce_degree_policy: bool = True
    jprime_on_extension: bool = True   # filter digests of G, not of F
    max_level_members: int = 512
    budget_nodes: int = 2_000_000
    budget_seconds: float = None
    max_solutions_per_candidate: int = 16
    threads: int = 1
    normalize: bool = True
    output_dir: str = None
    checkpoint: bool = False

    def validate(self):
        self.alpha = Fraction(self.alpha)
        self.beta = Fraction(self.beta)
        if self.alpha >= self.beta:
            raise ValueError("config requires alpha < beta")
        if not self.seeds:
            raise ValueError("at least one seed function is required")
        for f in self.seeds:
            if f.m != self.m:
                raise ValueError("seed arity does not match m")
            kappa = f.kappa()
            if self.enforce_degree_policy:
                if f.degree() != 4 or kappa != self.alpha:
                    raise ValueError(
                        "seeds must be degree-4 functions at the alpha level "
                        f"(got degree {f.degree()}, kappa {frac_str(kappa)})")
            elif kappa not in (self.alpha, self.beta):
                raise ValueError("seed kappa is outside {alpha, beta}")
        for f in self.pool:
            if f.m != self.m:
                raise ValueError("pool arity does not match m")
        if not self.pool:
            raise ValueError("candidate pool is empty")
        return self

    def fingerprint(self):
        return config_digest({
            "alpha": str(self.alpha), "beta": str(self.beta), "m": self.m,
            "seeds": [f.to_hex() for f in self.seeds],
            "pool": [f.to_hex() for f in self.pool],
            "enforce_degree_policy": self.enforce_degree_policy,
            "jprime_on_extension": self.jprime_on_extension,
            "max_level_members": self.max_level_members,
            "budget_nodes": self.budget_nodes,
            "budget_seconds": self.budget_seconds,
            "max_solutions_per_candidate": self.max_solutions_per_candidate,
            "normalize": self.normalize,
        })


@dataclass
class LevelMember:
    function: VectorialFunction
    jprime_parts: tuple      # sorted component I-digest hexes
    digest: str              # J' digest hex
    idigests: tuple          # per-mask I-digest hexes, index = mask - 1
    parent_digest: str = None
    pool_index: int = None


@dataclass
class LevelSet:
    level: int
    members: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def digests(self):
        return [m.digest for m in self.members]


def _member_from_function(G, parent=None, pool_index=None):
    idigs = tuple(d.hex for d in component_I_digests(G))
    parts = tuple(sorted(idigs))
    return LevelMember(
        function=G,
        jprime_parts=parts,
        digest=inv_Jprime_digest(G, parts=parts).hex,
        idigests=idigs,
        parent_digest=parent,
        pool_index=pool_index,
    )


def seed_level(cfg):
    """Level 0: one (m,1)-function per seed, deduplicated by digest."""
    level = LevelSet(level=0)
    seen = {}
    stats = {"generated": 0, "rejected_type": 0, "rejected_delta": 0,
             "rejected_dup": 0, "kept": 0, "truncated": False}
    for f in cfg.seeds:
        stats["generated"] += 1
        member = _member_from_function(VectorialFunction.from_boolean(f))
        if member.digest in seen:
            stats["rejected_dup"] += 1
            continue
        seen[member.digest] = member
        level.members.append(member)
        stats["kept"] += 1
    level.members.sort(key=lambda mm: mm.digest)
    level.stats = stats
    return level


def _new_component_check(F_tabs_all, f, alpha, beta, degree_policy, q3):
    """Vectorized kappa/degree policy check for the 2^n new components."""
    new_tabs = F_tabs_all ^ f.table[None, :]
    w = walsh_batch(new_tabs)
    sq = w.astype(np.int64) ** 2
    sums = (sq * sq).sum(axis=1)
    anf = mobius_batch(new_tabs)
    for row in range(new_tabs.shape[0]):
        kappa = Fraction(int(sums[row]), q3)
        if kappa != alpha and kappa != beta:
            return False
        if degree_policy:
            nz = np.nonzero(anf[row])[0]
            deg = int(popcount(nz.astype(np.uint32)).max()) if nz.size else 0
            if kappa == alpha and deg != 4:
                return False
            if kappa == beta and deg > 3:
                return False
    return True


def ext_operator(level, pool, cfg):
    """One expansion step: type filter, delta bound, digest dedup."""
    q3 = (1 << cfg.m) ** 3
    next_level = LevelSet(level=level.level + 1)
    stats = {"generated": 0, "rejected_type": 0, "rejected_delta": 0,
             "rejected_dup": 0, "kept": 0, "truncated": False}
    collisions = []

    candidates = [(member, idx) for member in level.members
                  for idx in range(len(pool))]

    def evaluate(pair):
        member, idx = pair
        F = member.function
        f = pool[idx]
        tabs_all = F.component_tables(include_zero=True)
        if not _new_component_check(tabs_all, f, cfg.alpha, cfg.beta,
                                    cfg.enforce_degree_policy, q3):
            return ("rejected_type", None)
        G = F.extend(f)
        bound = apn_extension_bound(G.m, G.n)
        if G.delta_bounded(stop_above=bound) > bound:
            return ("rejected_delta", None)
        if cfg.jprime_on_extension:
            new_tabs = tabs_all ^ f.table[None, :]
            new_digs = _idigests_for_tables(new_tabs, cfg.m)
            idigs = member.idigests + (new_digs[0],) + tuple(new_digs[1:])
        else:
            idigs = member.idigests
        parts = tuple(sorted(idigs))
        digest = inv_Jprime_digest(G, parts=parts).hex
        return ("candidate", LevelMember(
            function=G, jprime_parts=parts, digest=digest, idigests=idigs,
            parent_digest=member.digest, pool_index=idx))

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool_exec:
            outcomes = list(pool_exec.map(evaluate, candidates))
    else:
        outcomes = [evaluate(pair) for pair in candidates]

    seen = {}
    for (kind, member) in outcomes:
        stats["generated"] += 1
        if kind != "candidate":
            stats[kind] += 1
            continue
        if member.digest in seen:
            stats["rejected_dup"] += 1
            kept = seen[member.digest]
            collisions.append({
                "digest": member.digest,
                "kept": {"parent": kept.parent_digest,
                         "pool_index": kept.pool_index,
                         "jprime": list(kept.jprime_parts)},
                "dropped": {"parent": member.parent_digest,
                            "pool_index": member.pool_index,
                            "jprime": list(member.jprime_parts)},
            })
            continue
        if len(seen) >= cfg.max_level_members:
            stats["truncated"] = True
            continue
        seen[member.digest] = member
        stats["kept"] += 1

    next_level.members = sorted(seen.values(), key=lambda mm: mm.digest)
    stats["collisions"] = collisions
    next_level.stats = stats
    return next_level


def _idigests_for_tables(tabs, m):
    """I-digests for raw component tables, mask order preserved."""
    out = []
    for tab in tabs:
        out.append(_i_digest_of_table(tab, m))
    return out


def _i_digest_of_table(tab, m):
    from .invariants import _digest, rank2_quadratics

    quad = rank2_quadratics(m)
    rows = quad.tables ^ tab[None, :]
    aw = np.abs(walsh_batch(rows))
    aw.sort(axis=1)
    order = np.lexsort(aw.T[::-1])
    return _digest("I", np.ascontiguousarray(aw[order].astype(np.int32))
                   .tobytes()).hex


def run_search(cfg):
    """Execute levels 0..3, extension tests, completion, classification.

    Returns the report dict; identical configs and pools give identical
    reports except for the timing block.
    """
    cfg.validate()
    t_start = time.monotonic()
    timing = {}
    fingerprint = cfg.fingerprint()

    levels = [seed_level(cfg)]
    level_records = [dict(levels[0].stats, level=0)]
    for step in range(3):
        t0 = time.monotonic()
        nxt = ext_operator(levels[-1], cfg.pool, cfg)
        timing[f"level_{step + 1}_seconds"] = time.monotonic() - t0
        levels.append(nxt)
        rec = dict(nxt.stats, level=step + 1)
        rec["collisions"] = len(nxt.stats.get("collisions", []))
        level_records.append(rec)
        if cfg.checkpoint and cfg.output_dir:
            store_vectorial_functions(
                [m.function for m in nxt.members],
                os.path.join(cfg.output_dir, f"level_{step + 1}.txt"))

    final = levels[-1]
    verdict_records = []
    passers = []
    t0 = time.monotonic()
    for member in final.members:
        verdict = extension_test(member.function)
        verdict_records.append({
            "digest": member.digest,
            "outcome": verdict.outcome,
            "delta": verdict.delta,
            "rank": verdict.rank,
            "free_count": verdict.free_count,
        })
        if verdict.outcome == PASS:
            passers.append(member)
    timing["extension_test_seconds"] = time.monotonic() - t0

    budget = SearchBudget(max_nodes=cfg.budget_nodes,
                          max_seconds=cfg.budget_seconds,
                          max_solutions=cfg.max_solutions_per_candidate)
    completions = {}
    completion_stats = []
    t0 = time.monotonic()
    for member in passers:
        run = backtrack_complete(member.function, budget=budget,
                                 normalize=cfg.normalize,
                                 threads=cfg.threads)
        completion_stats.append({
            "digest": member.digest,
            "nodes": run.stats.nodes,
            "solutions": run.stats.solutions,
            "stop_reason": run.stats.stop_reason,
        })
        for G in run.functions:
            completions.setdefault(G.table_digest(), G)
    timing["backtracking_seconds"] = time.monotonic() - t0

    two_level = []
    ccz_groups = {}
    t0 = time.monotonic()
    for key in sorted(completions):
        G = completions[key]
        if not G.is_apn().apn:
            raise ConsistencyError("completion failed the APN re-check")
        profile = G.spectral_profile()
        if profile.matches_type(cfg.alpha, cfg.beta):
            sig = ccz_signature(G)
            sig_hex = sig.digest().hex
            two_level.append({
                "digest": key,
                "profile": profile.as_record(),
                "ccz_signature": sig_hex,
            })
            group = ccz_groups.setdefault(sig_hex, {
                "ccz_signature": sig_hex,
                "gamma_rank": sig.gamma_rank,
                "delta_rank": sig.delta_rank,
                "members": [],
            })
            group["members"].append(key)
    timing["classification_seconds"] = time.monotonic() - t0
    timing["total_seconds"] = time.monotonic() - t_start

    report = {
        "tool": f"{TOOL_NAME} {TOOL_VERSION}",
        "config_digest": fingerprint,
        "config": {
            "m": cfg.m,
            "alpha": frac_str(cfg.alpha),
            "beta": frac_str(cfg.beta),
            "seed_count": len(cfg.seeds),
            "pool_size": len(cfg.pool),
            "enforce_degree_policy": cfg.enforce_degree_policy,
            "jprime_on_extension": cfg.jprime_on_extension,
            "max_level_members": cfg.max_level_members,
        },
        "levels": level_records,
        "extension_tests": {
            "total": len(verdict_records),
            "pass": sum(1 for v in verdict_records if v["outcome"] == PASS),
            "rejected_delta": sum(1 for v in verdict_records
                                  if v["outcome"] == "RejectedDelta"),
            "rejected_system": sum(1 for v in verdict_records
                                   if v["outcome"] == "RejectedSystem"),
            "verdicts": verdict_records,
        },
        "completions": {
            "unique": len(completions),
            "per_candidate": completion_stats,
            "digests": sorted(completions),
        },
        "two_level": {
            "count": len(two_level),
            "results": two_level,
        },
        "ccz_groups": [ccz_groups[k] for k in sorted(ccz_groups)],
        "exhaustive": (not any(r.get("truncated") for r in level_records)
                       and all(s["stop_reason"] in ("exhausted",
                                                    "solution_budget")
                               for s in completion_stats)),
        "timing": timing,
    }
    return report, completions


def write_report(report, completions, cfg):
    """Persist the report, completions, and a manifest into output_dir."""
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    store_vectorial_functions(
        [completions[k] for k in sorted(completions)],
        os.path.join(out, "completions.txt"))
    manifest = RunManifest(command="search", config_digest=report["config_digest"])
    manifest.finish(
        levels=[{k: v for k, v in rec.items() if k != "collisions"}
                for rec in report["levels"]],
        completions=report["completions"]["unique"],
        two_level=report["two_level"]["count"],
    )
    manifest.write(os.path.join(out, "manifest.json"))
    return manifest


def build_pool(cfg_dict, m):
    """Pool loader: explicit file plus optional seeded affine orbits."""
    import random

    pool = []
    if cfg_dict.get("pool"):
        pool.extend(load_boolean_functions(cfg_dict["pool"], m))
    samples = cfg_dict.get("pool_orbit_samples", 0)
    if samples:
        rng = random.Random(cfg_dict.get("pool_orbit_seed", 0))
        base = list(pool)
        for f in base:
            pool.extend(random_affine_orbit(f, rng, samples))
    return pool

"""Random instance generators and reproducible experiment campaigns.

Every trial draws its own seed from the master seed via
``SeedSequence(master, spawn_key=(n, index))``, so the per-trial records do
not depend on how trials are spread over workers. Reports are assembled in
trial order; :func:`strip_timing` removes the wall-clock fields before
comparing two runs.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidArgumentError, InvariantViolation
from .extremal import gen_tight_witness
from .io import dump_json, write_instance
from .model import BipartiteCollection, Digraph, DigraphCollection, collection_semi_degree
from .oracle import DEFAULT_ORACLE_BOUND, oracle_transversal_hamilton_cycle
from .solvers import SearchConfig, Status, find_transversal_hamilton_cycle, find_transversal_perfect_matching

__all__ = [
    "CampaignReport",
    "gen_random_bipartite_collection",
    "gen_random_collection",
    "strip_timing",
    "sweep_bradshaw",
    "sweep_threshold",
    "trial_seed",
]

TIMING_KEYS = frozenset({"wall_time_s"})


def trial_seed(master: int, n: int, index: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=(n, index)).generate_state(1, dtype=np.uint64)[0])


def _repair_rows(rng: random.Random, n: int, out: list[int], k: int, log: list[tuple[int, int]]) -> list[int]:
    """Add random missing edges until every out- and in-degree is at least ``k``."""
    while True:
        changed = False
        for v in range(n):
            while out[v].bit_count() < k:
                free = [w for w in range(n) if w != v and not out[v] >> w & 1]
                w = rng.choice(free)
                out[v] |= 1 << w
                log.append((v, w))
                changed = True
        inn = [0] * n
        for u in range(n):
            for w in range(n):
                if out[u] >> w & 1:
                    inn[w] |= 1 << u
        for v in range(n):
            while inn[v].bit_count() < k:
                free = [u for u in range(n) if u != v and not inn[v] >> u & 1]
                u = rng.choice(free)
                inn[v] |= 1 << u
                out[u] |= 1 << v
                log.append((u, v))
                changed = True
        if not changed:
            return out


@dataclass(frozen=True)
class RandomCollection:
    collection: DigraphCollection | BipartiteCollection
    repairs: tuple[tuple[int, int, int], ...]     # (color, u, v), 0-based


def gen_random_collection(n: int, m: int, p: float, min_semidegree: int | None = None,
                          seed: int = 0) -> RandomCollection:
    """Each ordered pair enters each color independently with probability ``p``.

    With ``min_semidegree`` set, deficient vertices receive uniformly random
    missing edges until every color meets the bound; added edges are logged.
    """
    if not 0 <= p <= 1:
        raise InvalidArgumentError(f"p must lie in [0, 1], got {p}")
    if min_semidegree is not None and min_semidegree > n - 1:
        raise InvalidArgumentError(f"semi-degree {min_semidegree} is infeasible on {n} vertices")
    rng = random.Random(seed)
    digraphs = []
    repairs: list[tuple[int, int, int]] = []
    for c in range(m):
        rows = [0] * n
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < p:
                    rows[u] |= 1 << v
        if min_semidegree:
            log: list[tuple[int, int]] = []
            rows = _repair_rows(rng, n, rows, min_semidegree, log)
            repairs.extend((c, u, v) for u, v in log)
        digraphs.append(Digraph(n, tuple(rows)))
    return RandomCollection(DigraphCollection(n, tuple(digraphs)), tuple(repairs))


def gen_random_bipartite_collection(n: int, m: int, p: float, seed: int = 0) -> RandomCollection:
    """Random bipartite colors repaired so left degrees exceed ``n/2`` and right degrees reach ``n/2``."""
    if not 0 <= p <= 1:
        raise InvalidArgumentError(f"p must lie in [0, 1], got {p}")
    rng = random.Random(seed)
    left_need = n // 2 + 1
    right_need = math.ceil(n / 2)
    if left_need > n:
        raise InvalidArgumentError(f"left degree above {n}/2 is infeasible for n={n}")
    graphs = []
    repairs: list[tuple[int, int, int]] = []
    for c in range(m):
        rows = [sum(1 << v for v in range(n) if rng.random() < p) for _ in range(n)]
        for u in range(n):
            while rows[u].bit_count() < left_need:
                v = rng.choice([v for v in range(n) if not rows[u] >> v & 1])
                rows[u] |= 1 << v
                repairs.append((c, u, v))
        for v in range(n):
            while sum(rows[u] >> v & 1 for u in range(n)) < right_need:
                u = rng.choice([u for u in range(n) if not rows[u] >> v & 1])
                rows[u] |= 1 << v
                repairs.append((c, u, v))
        graphs.append(tuple(rows))
    return RandomCollection(BipartiteCollection(n, tuple(graphs)), tuple(repairs))


@dataclass
class CampaignReport:
    campaign: str
    config: dict[str, Any]
    trials: list[dict[str, Any]] = field(default_factory=list)
    companion: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def campaign_id(self) -> str:
        digest = hashlib.sha256(json.dumps(self.config, sort_keys=True).encode()).hexdigest()
        return f"{self.campaign}-{digest[:12]}"

    def to_dict(self) -> dict[str, Any]:
        return {"campaign": self.campaign, "campaign_id": self.campaign_id, "config": self.config,
                "trials": self.trials, "companion": self.companion, "summary": self.summary}

    def to_json(self) -> str:
        return dump_json(self.to_dict())


def strip_timing(obj: Any) -> Any:
    """Copy of a report with every wall-clock field removed."""
    if isinstance(obj, CampaignReport):
        obj = obj.to_dict()
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def _map(fn, jobs: Sequence[Any], workers: int) -> list[Any]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------------------
# semi-degree threshold sweep


def _threshold_trial(job: tuple) -> dict[str, Any]:
    n, index, seed, p, bound, time_budget, oracle_bound, source = job
    t0 = time.perf_counter()
    if source == "tight-witness":
        dc, repairs = gen_tight_witness(n), ()
    else:
        rc = gen_random_collection(n, n, p, bound, seed)
        dc, repairs = rc.collection, rc.repairs
    out = find_transversal_hamilton_cycle(dc, SearchConfig(time_budget=time_budget))
    rec: dict[str, Any] = {
        "n": n, "index": index, "seed": seed, "source": source, "p": p,
        "semi_degree": collection_semi_degree(dc), "repairs": len(repairs),
        "status": out.status.value, "nodes": out.stats.nodes, "oracle": None,
    }
    if out.status is Status.NONE and n <= oracle_bound:
        rec["oracle"] = oracle_transversal_hamilton_cycle(dc, oracle_bound).exists
    rec["wall_time_s"] = time.perf_counter() - t0
    rec["_instance"] = dc if out.status is Status.NONE else None
    return rec


def sweep_threshold(n_values: Iterable[int], trials: int, seed: int, *, p: float = 0.5,
                    time_budget: float = 60.0, workers: int = 1, companion_trials: int | None = None,
                    companion_p: float = 0.3, oracle_bound: int = DEFAULT_ORACLE_BOUND,
                    out_dir: str | Path | None = None) -> CampaignReport:
    """Search for transversal Hamilton cycles in random collections at the semi-degree threshold.

    Main trials have every color repaired to semi-degree at least
    ``ceil(n/2)``. A solver "none" is re-checked by the oracle (``n`` up to
    ``oracle_bound``); a confirmed one is a counterexample and is written to
    ``out_dir`` as an instance file. The companion trials sit one below the
    threshold and always include the tight witness.
    """
    ns = sorted(set(int(n) for n in n_values))
    if any(n < 2 for n in ns) or trials < 0:
        raise InvalidArgumentError("need n >= 2 and trials >= 0")
    if companion_trials is None:
        companion_trials = trials // 10
    config = {"n_values": ns, "trials": trials, "seed": seed, "p": p, "time_budget": time_budget,
              "companion_trials": companion_trials, "companion_p": companion_p, "oracle_bound": oracle_bound}
    main = [(n, i, trial_seed(seed, n, i), p, math.ceil(n / 2), time_budget, oracle_bound, "random")
            for n in ns for i in range(trials)]
    comp = []
    for n in ns:
        if trials == 0:
            break
        if n >= 4:
            comp.append((n, -1, 0, None, math.ceil(n / 2) - 1, time_budget, oracle_bound, "tight-witness"))
        comp += [(n, i, trial_seed(seed, n, trials + i), companion_p, math.ceil(n / 2) - 1, time_budget,
                  oracle_bound, "random") for i in range(companion_trials)]
    main_recs = _map(_threshold_trial, main, workers)
    comp_recs = _map(_threshold_trial, comp, workers)
    report = CampaignReport("sweep-threshold", config)
    found_cx: list[str] = []
    for is_main, rec in [(True, r) for r in main_recs] + [(False, r) for r in comp_recs]:
        dc = rec.pop("_instance")
        if rec["oracle"] is True:
            raise InvariantViolation(f"solver reported none but the oracle found a cycle (n={rec['n']}, "
                                     f"seed={rec['seed']})")
        cx = is_main and rec["status"] == "none" and rec["oracle"] is False
        rec["counterexample"] = None
        if cx:
            name = f"counterexample-n{rec['n']}-t{rec['index']}.json"
            rec["counterexample"] = name
            found_cx.append(name)
            if out_dir is not None:
                Path(out_dir).mkdir(parents=True, exist_ok=True)
                write_instance(Path(out_dir) / name, dc, {"seed": rec["seed"], "n": rec["n"],
                                                          "trial": rec["index"], "campaign": "sweep-threshold"})
    report.trials = main_recs
    report.companion = comp_recs
    per_n = {}
    for n in ns:
        rs = [r for r in main_recs if r["n"] == n]
        cs = [r for r in comp_recs if r["n"] == n]
        per_n[str(n)] = {
            "found": sum(r["status"] == "found" for r in rs),
            "none": sum(r["status"] == "none" for r in rs),
            "timeout": sum(r["status"] == "timeout" for r in rs),
            "confirmed_counterexamples": sum(r["counterexample"] is not None for r in rs),
            "companion_none": sum(r["status"] == "none" for r in cs),
            "tight_witness_none": next((r["status"] == "none" for r in cs if r["source"] == "tight-witness"), None),
        }
    report.summary = {
        "per_n": per_n,
        "counterexamples": found_cx,
        "wall_time_s": sum(r["wall_time_s"] for r in main_recs + comp_recs),
    }
    return report


# ---------------------------------------------------------------------------
# transversal perfect matching sweep


def _bradshaw_trial(job: tuple) -> dict[str, Any]:
    n, index, seed, p, time_budget = job
    t0 = time.perf_counter()
    rc = gen_random_bipartite_collection(n, n, p, seed)
    bc = rc.collection
    out = find_transversal_perfect_matching(bc, SearchConfig(time_budget=time_budget))
    return {
        "n": n, "index": index, "seed": seed, "p": p, "repairs": len(rc.repairs),
        "min_left_degree": min(bc.left_degree(c, u) for c in range(bc.m) for u in range(n)),
        "min_right_degree": min(bc.right_degree(c, v) for c in range(bc.m) for v in range(n)),
        "status": out.status.value, "nodes": out.stats.nodes,
        "wall_time_s": time.perf_counter() - t0,
    }


def sweep_bradshaw(n_values: Iterable[int], trials: int, seed: int, *, p: float = 0.5, time_budget: float = 60.0,
                   workers: int = 1) -> CampaignReport:
    """Transversal perfect matchings in bipartite collections above the degree condition.

    Every color has left degrees above ``n/2`` and right degrees at least
    ``n/2``; every trial is expected to find a matching, so ``summary.misses``
    counts definite failures.
    """
    ns = sorted(set(int(n) for n in n_values))
    if any(n < 1 for n in ns) or trials < 0:
        raise InvalidArgumentError("need n >= 1 and trials >= 0")
    config = {"n_values": ns, "trials": trials, "seed": seed, "p": p, "time_budget": time_budget}
    jobs = [(n, i, trial_seed(seed, n, i), p, time_budget) for n in ns for i in range(trials)]
    recs = _map(_bradshaw_trial, jobs, workers)
    report = CampaignReport("sweep-bradshaw", config, recs)
    report.summary = {
        "per_n": {str(n): {s: sum(r["status"] == s for r in recs if r["n"] == n) for s in ("found", "none", "timeout")}
                  for n in ns},
        "misses": sum(r["status"] == "none" for r in recs),
        "timeouts": sum(r["status"] == "timeout" for r in recs),
        "wall_time_s": sum(r["wall_time_s"] for r in recs),
    }
    return report

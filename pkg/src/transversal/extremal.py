"""Extremal digraph templates: niceness testing, planted generators,
partition verification and partition search.

Three templates are supported:

* ``EC1`` two near-complete blocks ``A``, ``B`` with one direction between
  them sparse;
* ``EC2`` ``A`` and ``B`` nearly complete to each other in both directions,
  one of them sparse inside;
* ``EC3`` four blocks ``C1 -> C2 -> C3 -> C4 -> C1`` (cyclic), ``C1`` and
  ``C3`` dense inside, ``C2 <-> C4`` dense, with ``C1``/``C3`` sparse in one
  direction and one of ``C2``/``C4`` sparse inside.

Leftover vertices form the exceptional set ``L``. All thresholds are compared
as exact rationals.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BudgetExceededError, InvalidArgumentError
from .model import BipartiteCollection, Digraph, DigraphCollection, bits, mask_of, semi_degree
from .rational import as_fraction, round_half_up

__all__ = [
    "DEFAULT_NICE_BUDGET",
    "DEFAULT_ZETA_GRID",
    "CharacteristicPartition",
    "ClassifyResult",
    "ClauseCheck",
    "ECKind",
    "ExtremalInstance",
    "NicenessVerdict",
    "PartitionReport",
    "classify_extremal",
    "expected_sizes",
    "gen_extremal",
    "gen_tight_witness",
    "is_eps_extremal_bipartite",
    "is_eps_nice",
    "is_eps_nice_bipartite",
    "min_pair_value",
    "niceness_set_size",
    "partition_agreement",
    "verify_partition",
    "zeta_feasible",
]

DEFAULT_NICE_BUDGET = 2 * 10**8
DEFAULT_ZETA_GRID = tuple(Fraction(k, 100) for k in (10, 15, 20, 25, 30, 35))
SAMPLED_RESTARTS = 64
SAMPLED_STEPS_PER_VERTEX = 50


class ECKind(str, enum.Enum):
    EC1 = "EC1"
    EC2 = "EC2"
    EC3 = "EC3"


# ---------------------------------------------------------------------------
# niceness


@dataclass(frozen=True)
class NicenessVerdict:
    """Outcome of a niceness test.

    ``witness`` is ``(A, B, e(A, B))`` with ``e(A, B)`` strictly below the
    threshold; it is present exactly when ``nice`` is false. A sampled
    ``nice = True`` is uncertified (``certified`` is false).
    """

    nice: bool
    witness: tuple[frozenset[int], frozenset[int], int] | None
    mode: str
    certified: bool
    threshold: Fraction
    set_size: int
    minimum: int | None = None
    trials: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "nice": self.nice,
            "certified": self.certified,
            "mode": self.mode,
            "threshold": str(self.threshold),
            "set_size": self.set_size,
            "minimum": self.minimum,
            "trials": self.trials,
            "seed": self.seed,
            "witness": None if w is None else {"A": sorted(w[0]), "B": sorted(w[1]), "edges": w[2]},
        }


def niceness_set_size(n: int, eps: Fraction | float) -> int:
    """Smallest admissible set size ``ceil((1/2 - eps) n)`` (at least 0)."""
    return max(0, math.ceil((Fraction(1, 2) - as_fraction(eps)) * n))


def _matrix(n: int, rows: Sequence[int]) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int64)
    for u, row in enumerate(rows):
        for v in bits(row):
            out[u, v] = 1
    return out


def min_pair_value(weights: np.ndarray, k: int, budget: int = DEFAULT_NICE_BUDGET,
                   ) -> tuple[int, frozenset[int], frozenset[int]]:
    """Exact ``min e(A, B)`` over ``|A| = |B| = k``; ``weights[a, b]`` counts edges ``a -> b``.

    For a fixed ``A`` the best ``B`` takes the ``k`` heads with the fewest
    edges from ``A``, so only the ``A`` side is enumerated.
    """
    n = weights.shape[0]
    if k == 0:
        return 0, frozenset(), frozenset()
    if math.comb(n, k) ** 2 > budget:
        raise BudgetExceededError(f"exact niceness needs C({n},{k})^2 > {budget} subset pairs")
    best: tuple[int, tuple[int, ...] | None] = (1 << 62, None)
    combos = itertools.combinations(range(n), k)
    while True:
        chunk = list(itertools.islice(combos, 1 << 15))
        if not chunk:
            break
        idx = np.array(chunk, dtype=np.int64)
        counts = weights[idx].sum(axis=1)
        vals = np.sort(counts, axis=1)[:, :k].sum(axis=1)
        i = int(np.argmin(vals))
        if int(vals[i]) < best[0]:
            best = (int(vals[i]), chunk[i])
    a = best[1]
    counts = weights[list(a)].sum(axis=0)
    b = np.argsort(counts, kind="stable")[:k]
    return best[0], frozenset(a), frozenset(int(x) for x in b)


def _sampled_min(weights: np.ndarray, k: int, threshold: Fraction, seed: int,
                 restarts: int, steps: int) -> tuple[int, frozenset[int], frozenset[int]]:
    """Hill descent over ``A`` (single swaps) with the optimal ``B``; stops early below ``threshold``."""
    n = weights.shape[0]
    rng = random.Random(seed)
    best = (1 << 62, frozenset(), frozenset())
    if k == 0:
        return 0, frozenset(), frozenset()
    for _ in range(restarts):
        a = rng.sample(range(n), k)
        in_a = [False] * n
        for x in a:
            in_a[x] = True
        counts = weights[a].sum(axis=0)
        val = int(np.sort(counts)[:k].sum())
        for _ in range(steps):
            if val < threshold:
                break
            if k == n:
                break
            i = rng.randrange(k)
            x = rng.randrange(n)
            if in_a[x]:
                continue
            cand = counts - weights[a[i]] + weights[x]
            cval = int(np.sort(cand)[:k].sum())
            if cval <= val:
                in_a[a[i]] = False
                in_a[x] = True
                a[i] = x
                counts = cand
                val = cval
        if val < best[0]:
            b = np.argsort(counts, kind="stable")[:k]
            best = (val, frozenset(a), frozenset(int(x) for x in b))
        if best[0] < threshold:
            break
    return best


def _niceness(weights: np.ndarray, k: int, threshold: Fraction, mode: str, seed: int,
              budget: int, restarts: int, steps: int | None) -> NicenessVerdict:
    n = weights.shape[0]
    if mode not in ("exact", "sampled", "auto"):
        raise InvalidArgumentError(f"mode must be exact, sampled or auto, got {mode!r}")
    if mode == "auto":
        mode = "exact" if math.comb(n, k) ** 2 <= budget else "sampled"
    if mode == "exact":
        val, a, b = min_pair_value(weights, k, budget)
        nice = val >= threshold
        return NicenessVerdict(nice, None if nice else (a, b, val), "exact", True, threshold, k, minimum=val)
    steps = SAMPLED_STEPS_PER_VERTEX * n if steps is None else steps
    val, a, b = _sampled_min(weights, k, threshold, seed, restarts, steps)
    nice = val >= threshold
    return NicenessVerdict(nice, None if nice else (a, b, val), "sampled", not nice, threshold, k,
                           trials=restarts, seed=seed)


def is_eps_nice(d: Digraph, eps: float | Fraction, mode: str = "auto", *, seed: int = 0,
                budget: int = DEFAULT_NICE_BUDGET, restarts: int = SAMPLED_RESTARTS,
                steps: int | None = None) -> NicenessVerdict:
    """Is ``e(A, B) >= eps n^2`` for all ``A, B`` of size at least ``(1/2 - eps) n``?

    ``mode`` is ``exact`` (refused above ``budget``), ``sampled``, or ``auto``
    (exact when affordable).
    """
    e = as_fraction(eps)
    if not 0 < e < Fraction(1, 2):
        raise InvalidArgumentError(f"eps must lie in (0, 1/2), got {eps}")
    n = d.n
    return _niceness(_matrix(n, d.out_adj), niceness_set_size(n, e), e * n * n, mode, seed,
                     budget, restarts, steps)


def is_eps_nice_bipartite(bc: BipartiteCollection, color: int, eps: float | Fraction,
                          mode: str = "auto", *, seed: int = 0, budget: int = DEFAULT_NICE_BUDGET,
                          restarts: int = SAMPLED_RESTARTS, steps: int | None = None) -> NicenessVerdict:
    """Bipartite niceness of one color: ``A`` in the left part, ``B`` in the right part."""
    e = as_fraction(eps)
    if e <= 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps}")
    n = bc.n
    return _niceness(_matrix(n, bc.graphs[color]), niceness_set_size(n, e), e * n * n, mode, seed,
                     budget, restarts, steps)


def is_eps_extremal_bipartite(bc: BipartiteCollection, color: int, eps: float | Fraction,
                              exponent: int = 5, **kwargs) -> NicenessVerdict:
    """Bipartite extremality test: the graph is extremal iff it is not ``eps**exponent``-nice.

    Returns the niceness verdict at the powered parameter.
    """
    return is_eps_nice_bipartite(bc, color, as_fraction(eps) ** exponent, **kwargs)


# ---------------------------------------------------------------------------
# partitions


def zeta_feasible(eps: Fraction | float, zeta: Fraction | float) -> bool:
    """Numeric stand-in for ``eps << zeta < 1/2 - 2 eps``: ``zeta >= 2 eps`` and ``1/2 - zeta - eps >= 2 eps``."""
    e, z = as_fraction(eps), as_fraction(zeta)
    return z >= 2 * e and Fraction(1, 2) - z - e >= 2 * e


def expected_sizes(kind: ECKind | str, n: int, eps: float | Fraction,
                   zeta: float | Fraction | None = None) -> tuple[int, ...]:
    """Block sizes under the rounding rule.

    EC1/EC2: ``|A| = |B| = ceil((1/2 - eps) n)``. EC3: ``|C1| = |C3| =
    round(zeta n)`` and ``|C2| = |C4| = round((1/2 - zeta - eps) n)``, half up.
    """
    kind = ECKind(kind)
    e = as_fraction(eps)
    if kind is ECKind.EC3:
        if zeta is None:
            raise InvalidArgumentError("EC3 needs zeta")
        z = as_fraction(zeta)
        s = round_half_up(z * n)
        t = round_half_up((Fraction(1, 2) - z - e) * n)
        return (s, t, s, t)
    k = niceness_set_size(n, e)
    return (k, k)


_RULE = {
    ECKind.EC1: "|A|=|B|=ceil((1/2-eps)n)",
    ECKind.EC2: "|A|=|B|=ceil((1/2-eps)n)",
    ECKind.EC3: "|C1|=|C3|=round_half_up(zeta n), |C2|=|C4|=round_half_up((1/2-zeta-eps)n)",
}


@dataclass(frozen=True)
class CharacteristicPartition:
    """A template partition: blocks ``(A, B)`` or ``(C1, C2, C3, C4)`` plus ``L``."""

    kind: ECKind
    blocks: tuple[frozenset[int], ...]
    L: frozenset[int]
    eps: Fraction
    zeta: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ECKind(self.kind))
        object.__setattr__(self, "blocks", tuple(frozenset(b) for b in self.blocks))
        object.__setattr__(self, "L", frozenset(self.L))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.zeta is not None:
            object.__setattr__(self, "zeta", as_fraction(self.zeta))
        want = 4 if self.kind is ECKind.EC3 else 2
        if len(self.blocks) != want:
            raise InvalidArgumentError(f"{self.kind.value} needs {want} blocks, got {len(self.blocks)}")
        if self.kind is ECKind.EC3 and self.zeta is None:
            raise InvalidArgumentError("EC3 partitions carry zeta")

    @property
    def A(self) -> frozenset[int]:
        return self.blocks[0]

    @property
    def B(self) -> frozenset[int]:
        return self.blocks[1]

    def C(self, i: int) -> frozenset[int]:
        """Block ``C_i`` with cyclic indexing (``C_5 = C_1``)."""
        return self.blocks[(i - 1) % 4]

    def W(self, j: int) -> frozenset[int]:
        """``W^j = C_j | C_{j+1}``, cyclic, so ``W^4 = C_4 | C_1``."""
        return self.C(j) | self.C(j + 1)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks) + len(self.L)

    def labels(self, n: int) -> list[int]:
        """Block index per vertex, ``-1`` for ``L``."""
        lab = [-1] * n
        for i, b in enumerate(self.blocks):
            for v in b:
                lab[v] = i
        return lab

    @property
    def params(self) -> dict:
        return {"eps": str(self.eps), "zeta": None if self.zeta is None else str(self.zeta),
                "rounding": _RULE[self.kind], "sizes": [len(b) for b in self.blocks]}

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "blocks": [sorted(b) for b in self.blocks],
                "L": sorted(self.L), **self.params}

    @classmethod
    def from_dict(cls, obj: dict) -> CharacteristicPartition:
        return cls(ECKind(obj["kind"]), tuple(frozenset(b) for b in obj["blocks"]), frozenset(obj["L"]),
                   Fraction(obj["eps"]), None if obj.get("zeta") is None else Fraction(obj["zeta"]))


@dataclass(frozen=True)
class ClauseCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class PartitionReport:
    ok: bool
    kind: ECKind
    clauses: tuple[ClauseCheck, ...]

    def failed(self) -> list[str]:
        return [c.name for c in self.clauses if not c.ok]

    def __bool__(self) -> bool:
        return self.ok


def _check_partition(n: int, p: CharacteristicPartition) -> None:
    seen = 0
    for part in (*p.blocks, p.L):
        m = mask_of(part)
        if any(not 0 <= v < n for v in part):
            raise InvalidArgumentError(f"partition mentions a vertex outside 0..{n - 1}")
        if seen & m:
            raise InvalidArgumentError("partition blocks overlap")
        seen |= m
    if seen != (1 << n) - 1:
        raise InvalidArgumentError("partition blocks do not cover every vertex")


def _degree_clause(name: str, d: Digraph, members: Iterable[int], target: int, bound: Fraction,
                   out: bool = True, inn: bool = False) -> ClauseCheck:
    for v in sorted(members):
        if out and d.out_degree(v, target) < bound:
            return ClauseCheck(name, False, f"vertex {v}: out-degree {d.out_degree(v, target)} < {bound}")
        if inn and d.in_degree(v, target) < bound:
            return ClauseCheck(name, False, f"vertex {v}: in-degree {d.in_degree(v, target)} < {bound}")
    return ClauseCheck(name, True)


def _sparse_clause(name: str, options: list[tuple[str, int]], cap: Fraction) -> ClauseCheck:
    for label, value in options:
        if value <= cap:
            return ClauseCheck(name, True, f"{label} = {value} <= {cap}")
    return ClauseCheck(name, False, ", ".join(f"{label} = {value}" for label, value in options) + f" > {cap}")


def verify_partition(d: Digraph, p: CharacteristicPartition, eps: float | Fraction | None = None,
                     zeta: float | Fraction | None = None) -> PartitionReport:
    """Evaluate every inequality of the partition's template, clause by clause.

    ``eps`` and ``zeta`` default to the values stored in the partition. Sizes
    are checked against the rounding rule of :func:`expected_sizes`.
    """
    n = d.n
    _check_partition(n, p)
    e = p.eps if eps is None else as_fraction(eps)
    z = p.zeta if zeta is None else as_fraction(zeta)
    half = Fraction(1, 2)
    cap = e * n * n
    clauses: list[ClauseCheck] = []
    sizes = tuple(len(b) for b in p.blocks)
    want = expected_sizes(p.kind, n, e, z)
    clauses.append(ClauseCheck("sizes", sizes == want, f"sizes {list(sizes)}, rule gives {list(want)}"))
    m = [mask_of(b) for b in p.blocks]
    if p.kind is ECKind.EC1:
        lo = (half - 2 * e) * n
        clauses.append(_degree_clause("A-internal-degree", d, p.A, m[0], lo, True, True))
        clauses.append(_degree_clause("B-internal-degree", d, p.B, m[1], lo, True, True))
        clauses.append(_sparse_clause("one-direction-sparse",
                                      [("e(A,B)", d.edges_between(m[0], m[1])),
                                       ("e(B,A)", d.edges_between(m[1], m[0]))], cap))
    elif p.kind is ECKind.EC2:
        lo = (half - 2 * e) * n
        clauses.append(_degree_clause("A-to-B-degree", d, p.A, m[1], lo, True, True))
        clauses.append(_degree_clause("B-to-A-degree", d, p.B, m[0], lo, True, True))
        clauses.append(_sparse_clause("one-side-sparse",
                                      [("e(A)", d.edges_between(m[0], m[0])),
                                       ("e(B)", d.edges_between(m[1], m[1]))], cap))
    else:
        for i in (1, 3):
            clauses.append(_degree_clause(f"C{i}-internal-degree", d, p.C(i), m[i - 1], (z - e) * n))
        for i in (2, 4):
            j = 6 - i
            clauses.append(_degree_clause(f"C{i}-to-C{j}-degree", d, p.C(i), m[j - 1],
                                          (half - z - 2 * e) * n))
        for i in range(1, 5):
            j = i % 4 + 1
            clauses.append(_degree_clause(f"C{i}-to-C{j}-degree", d, p.C(i), m[j - 1],
                                          len(p.C(j)) - e * n))
        clauses.append(_sparse_clause("C1-C3-one-direction-sparse",
                                      [("e(C1,C3)", d.edges_between(m[0], m[2])),
                                       ("e(C3,C1)", d.edges_between(m[2], m[0]))], cap))
        clauses.append(_sparse_clause("C2-or-C4-sparse",
                                      [("e(C2)", d.edges_between(m[1], m[1])),
                                       ("e(C4)", d.edges_between(m[3], m[3]))], cap))
    return PartitionReport(all(c.ok for c in clauses), p.kind, tuple(clauses))


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class ExtremalInstance:
    digraph: Digraph
    partition: CharacteristicPartition
    toggled: tuple[tuple[int, int], ...] = field(default=())
    attempts: int = 1


def _ideal_rows(kind: ECKind, n: int, blocks: Sequence[Sequence[int]]) -> list[int]:
    rows = [0] * n
    m = [mask_of(b) for b in blocks]

    def complete(src: int, dst: int) -> None:
        for u in bits(src):
            rows[u] |= dst & ~(1 << u)

    if kind is ECKind.EC1:
        complete(m[0], m[0])
        complete(m[1], m[1])
        complete(m[0], m[1])
    elif kind is ECKind.EC2:
        complete(m[0], m[1])
        complete(m[1], m[0])
        complete(m[1], m[1])
    else:
        complete(m[0], m[0])
        complete(m[2], m[2])
        for i in range(4):
            complete(m[i], m[(i + 1) % 4])
        complete(m[1], m[3])
        complete(m[3], m[1])
    return rows


def gen_extremal(kind: ECKind | str, n: int, eps: float | Fraction, zeta: float | Fraction | None = None,
                 defect: float = 0.0, seed: int = 0, shuffle: bool = True) -> ExtremalInstance:
    """Planted template digraph together with its partition.

    Blocks get the sizes of :func:`expected_sizes`; ``L`` vertices are
    isolated. With ``shuffle`` the vertex labels are permuted by ``seed``.
    A positive ``defect`` toggles ``round(defect n^2)`` random ordered pairs;
    draws that break the template are resampled (at most 100 times).
    Raises ``InvalidArgumentError`` when the sizes do not fit or the ideal
    structure already fails its own inequalities.
    """
    kind = ECKind(kind)
    e = as_fraction(eps)
    z = None if zeta is None else as_fraction(zeta)
    if not 0 < e < Fraction(1, 2):
        raise InvalidArgumentError(f"eps must lie in (0, 1/2), got {eps}")
    if kind is ECKind.EC3:
        if z is None:
            raise InvalidArgumentError("EC3 needs zeta")
        if not zeta_feasible(e, z):
            raise InvalidArgumentError(f"zeta={z} violates zeta >= 2 eps and 1/2 - zeta - eps >= 2 eps")
    elif z is not None:
        raise InvalidArgumentError(f"{kind.value} takes no zeta")
    if defect < 0:
        raise InvalidArgumentError("defect must be non-negative")
    sizes = expected_sizes(kind, n, e, z)
    if min(sizes) < 1 or sum(sizes) > n:
        raise InvalidArgumentError(f"block sizes {list(sizes)} do not fit n={n}")
    rng = random.Random(seed)
    perm = list(range(n))
    if shuffle:
        rng.shuffle(perm)
    blocks = []
    pos = 0
    for s in sizes:
        blocks.append([perm[i] for i in range(pos, pos + s)])
        pos += s
    part = CharacteristicPartition(kind, tuple(frozenset(b) for b in blocks), frozenset(perm[pos:]), e, z)
    ideal = Digraph(n, tuple(_ideal_rows(kind, n, blocks)))
    report = verify_partition(ideal, part)
    if not report.ok:
        raise InvalidArgumentError(f"{kind.value} at n={n}, eps={e}, zeta={z} is infeasible after rounding: "
                                   f"{report.failed()}")
    flips = round_half_up(as_fraction(defect) * n * n)
    if flips == 0:
        return ExtremalInstance(ideal, part)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for attempt in range(1, 101):
        chosen = rng.sample(pairs, min(flips, len(pairs)))
        rows = list(ideal.out_adj)
        for u, v in chosen:
            rows[u] ^= 1 << v
        d = Digraph(n, tuple(rows))
        if verify_partition(d, part).ok:
            return ExtremalInstance(d, part, tuple(sorted(chosen)), attempt)
    raise InvalidArgumentError(f"defect {defect} breaks the template in 100 consecutive draws")


def gen_tight_witness(n: int) -> DigraphCollection:
    """``n`` identical colors one below the semi-degree threshold, with no transversal Hamilton cycle.

    Even ``n``: two disjoint complete digraphs on ``n/2`` vertices each.
    Odd ``n``: complete bipartite digraph (both directions) between parts of
    sizes ``(n+1)/2`` and ``(n-1)/2``.
    """
    if n < 4:
        raise InvalidArgumentError(f"tight witnesses need n >= 4, got {n}")
    half = n // 2
    rows = [0] * n
    if n % 2 == 0:
        lo = (1 << half) - 1
        hi = ((1 << n) - 1) ^ lo
        for v in range(n):
            rows[v] = (lo if v < half else hi) & ~(1 << v)
    else:
        big = (1 << (half + 1)) - 1
        small = ((1 << n) - 1) ^ big
        for v in range(n):
            rows[v] = small if v <= half else big
    return DigraphCollection.uniform(Digraph(n, tuple(rows)), n)


# ---------------------------------------------------------------------------
# partition search


@dataclass(frozen=True)
class ClassifyResult:
    partition: CharacteristicPartition | None
    verified_kinds: tuple[ECKind, ...]
    exhaustive: bool
    flags: tuple[str, ...]
    niceness: NicenessVerdict | None

    @property
    def found(self) -> bool:
        return self.partition is not None


_DONT_CARE = -1


def _patterns(kind: ECKind) -> list[np.ndarray]:
    """Block-to-block edge patterns: 1 dense, 0 sparse, -1 unconstrained."""
    if kind is ECKind.EC1:
        return [np.array([[1, -1], [0, 1]])]
    if kind is ECKind.EC2:
        return [np.array([[0, 1], [1, -1]])]
    out = []
    for empty in (1, 3):
        p = np.full((4, 4), _DONT_CARE)
        p[0, 0] = p[2, 2] = 1
        for i in range(4):
            p[i, (i + 1) % 4] = 1
        p[1, 3] = p[3, 1] = 1
        p[0, 2] = 0
        p[empty, empty] = 0
        out.append(p)
    return out


def _fit(adj: np.ndarray, pattern: np.ndarray, sizes: Sequence[int], labels: np.ndarray,
         max_iter: int = 30) -> np.ndarray:
    """Alternate block costs and a size-constrained assignment until labels stop changing."""
    n = adj.shape[0]
    nb = len(sizes)
    p1 = (pattern == 1).astype(np.int64)
    p0 = (pattern == 0).astype(np.int64)
    slot_block = np.concatenate([np.full(s, b) for b, s in enumerate(sizes)] + [np.full(n - sum(sizes), nb)])
    for _ in range(max_iter):
        z = np.zeros((n, nb), dtype=np.int64)
        inside = labels < nb
        z[np.nonzero(inside)[0], labels[inside]] = 1
        size_now = z.sum(axis=0)
        outc = adj @ z
        inc = adj.T @ z
        miss_out = size_now[None, :] - z - outc
        miss_in = size_now[None, :] - z - inc
        cost = miss_out @ p1.T + outc @ p0.T + miss_in @ p1 + inc @ p0
        cost = np.concatenate([cost, np.zeros((n, 1), dtype=np.int64)], axis=1)
        _, cols = linear_sum_assignment(cost[:, slot_block])
        new = slot_block[cols]
        if np.array_equal(new, labels):
            break
        labels = new
    return labels


def _partition_from_labels(kind: ECKind, labels: Sequence[int], nb: int, eps: Fraction,
                           zeta: Fraction | None) -> CharacteristicPartition:
    blocks = tuple(frozenset(int(v) for v in np.nonzero(np.asarray(labels) == b)[0]) for b in range(nb))
    rest = frozenset(int(v) for v in np.nonzero(np.asarray(labels) == nb)[0])
    return CharacteristicPartition(kind, blocks, rest, eps, zeta)


def _random_labels(rng: random.Random, n: int, sizes: Sequence[int]) -> np.ndarray:
    perm = list(range(n))
    rng.shuffle(perm)
    lab = np.full(n, len(sizes), dtype=np.int64)
    pos = 0
    for b, s in enumerate(sizes):
        for v in perm[pos:pos + s]:
            lab[v] = b
        pos += s
    return lab


def _witness_labels(kind: ECKind, n: int, sizes: Sequence[int], witness, rng: random.Random) -> np.ndarray | None:
    if witness is None or kind is ECKind.EC3:
        return None
    wa, wb = witness[0], witness[1]
    lab = np.full(n, 2, dtype=np.int64)
    if kind is ECKind.EC1:
        # the sparse direction runs from the witness's A side into its B side
        first, second = list(wb - wa), list(wa - wb)
    else:
        first, second = list(wa | wb), [v for v in range(n) if v not in wa | wb]
    rng.shuffle(first)
    rng.shuffle(second)
    for v in first[:sizes[0]]:
        lab[v] = 0
    for v in second[:sizes[1]]:
        lab[v] = 1
    # top up to exact sizes from whatever is left
    for b in (0, 1):
        need = sizes[b] - int((lab == b).sum())
        spare = [v for v in range(n) if lab[v] == 2]
        rng.shuffle(spare)
        for v in spare[:need]:
            lab[v] = b
    return lab


def _heuristic(d: Digraph, kind: ECKind, eps: Fraction, zeta: Fraction | None, witness,
               rng: random.Random, restarts: int) -> CharacteristicPartition | None:
    n = d.n
    sizes = expected_sizes(kind, n, eps, zeta)
    if min(sizes) < 1 or sum(sizes) > n:
        return None
    adj = _matrix(n, d.out_adj)
    seen: set[bytes] = set()
    for pattern in _patterns(kind):
        seeds = []
        w = _witness_labels(kind, n, sizes, witness, rng)
        if w is not None:
            seeds.append(w)
        seeds.extend(_random_labels(rng, n, sizes) for _ in range(restarts))
        for lab in seeds:
            lab = _fit(adj, pattern, sizes, lab)
            key = lab.tobytes()
            if key in seen:
                continue
            seen.add(key)
            p = _partition_from_labels(kind, lab, len(sizes), eps, zeta)
            if verify_partition(d, p).ok:
                return p
    return None


class _Exhausted(Exception):
    pass


def _combos(pool: Sequence[int], k: int, counter: list[int], limit: int):
    for c in itertools.combinations(pool, k):
        counter[0] += 1
        if counter[0] > limit:
            raise _Exhausted
        yield c


def _exhaustive_ec12(d: Digraph, kind: ECKind, eps: Fraction, counter, limit) -> CharacteristicPartition | None:
    n = d.n
    (k, _) = expected_sizes(kind, n, eps)
    if k < 1 or 2 * k > n:
        return None
    lo = (Fraction(1, 2) - 2 * eps) * n
    cap = eps * n * n
    if kind is ECKind.EC1:
        strong = [v for v in range(n) if d.out_degree(v) >= lo and d.in_degree(v) >= lo]
        good = []
        for a in _combos(strong, k, counter, limit):
            am = mask_of(a)
            if all(d.out_degree(v, am) >= lo and d.in_degree(v, am) >= lo for v in a):
                good.append((a, am))
        for i, (a, am) in enumerate(good):
            for b, bm in good[i + 1:]:
                if am & bm:
                    continue
                if d.edges_between(am, bm) <= cap or d.edges_between(bm, am) <= cap:
                    return CharacteristicPartition(kind, (frozenset(a), frozenset(b)),
                                                   frozenset(range(n)) - set(a) - set(b), eps)
        return None
    for a in _combos(range(n), k, counter, limit):
        am = mask_of(a)
        pool = [v for v in range(n) if not am >> v & 1 and v > a[0]
                and d.out_degree(v, am) >= lo and d.in_degree(v, am) >= lo]
        for b in _combos(pool, k, counter, limit):
            bm = mask_of(b)
            if not all(d.out_degree(v, bm) >= lo and d.in_degree(v, bm) >= lo for v in a):
                continue
            if d.edges_between(am, am) <= cap or d.edges_between(bm, bm) <= cap:
                return CharacteristicPartition(kind, (frozenset(a), frozenset(b)),
                                               frozenset(range(n)) - set(a) - set(b), eps)
    return None


def _exhaustive_ec3(d: Digraph, eps: Fraction, zeta: Fraction, counter, limit) -> CharacteristicPartition | None:
    n = d.n
    s, t, _, _ = expected_sizes(ECKind.EC3, n, eps, zeta)
    if min(s, t) < 1 or 2 * (s + t) > n:
        return None
    half = Fraction(1, 2)
    inner = (zeta - eps) * n
    cross = (half - zeta - 2 * eps) * n
    cap = eps * n * n
    full = (1 << n) - 1

    def dense(src, dst_mask, bound):
        return all(d.out_degree(v, dst_mask) >= bound for v in src)

    for c1 in _combos(range(n), s, counter, limit):
        m1 = mask_of(c1)
        if not dense(c1, m1, inner):
            continue
        rest1 = [v for v in range(n) if not m1 >> v & 1]
        for c2 in _combos(rest1, t, counter, limit):
            m2 = mask_of(c2)
            if not dense(c1, m2, t - eps * n):
                continue
            rest2 = [v for v in rest1 if not m2 >> v & 1 and v > c1[0]]
            for c3 in _combos(rest2, s, counter, limit):
                m3 = mask_of(c3)
                if not (dense(c3, m3, inner) and dense(c2, m3, s - eps * n)):
                    continue
                if d.edges_between(m1, m3) > cap and d.edges_between(m3, m1) > cap:
                    continue
                rest3 = [v for v in rest1 if not (m2 | m3) >> v & 1]
                for c4 in _combos(rest3, t, counter, limit):
                    m4 = mask_of(c4)
                    if not (dense(c3, m4, t - eps * n) and dense(c4, m1, s - eps * n)
                            and dense(c2, m4, cross) and dense(c4, m2, cross)):
                        continue
                    if d.edges_between(m2, m2) > cap and d.edges_between(m4, m4) > cap:
                        continue
                    rest = frozenset(bits(full & ~(m1 | m2 | m3 | m4)))
                    return CharacteristicPartition(ECKind.EC3, (frozenset(c1), frozenset(c2), frozenset(c3),
                                                                frozenset(c4)), rest, eps, zeta)
    return None


def classify_extremal(d: Digraph, eps: float | Fraction, zeta_grid: Iterable[float | Fraction] | None = None,
                      *, seed: int = 0, exhaustive_limit: int = 12, restarts: int = 24,
                      search_budget: int = 2_000_000, all_kinds: bool = False,
                      niceness_mode: str = "auto") -> ClassifyResult:
    """Find a verified template partition of ``d`` (EC1, then EC2, then EC3 over ``zeta_grid``).

    A certified ``eps``-nice digraph has no such partition and returns at
    once. Up to ``exhaustive_limit`` vertices every candidate partition is
    enumerated (with degree pruning) so "none found" is definitive unless
    ``search_budget`` runs out; above it a seeded template-fitting heuristic
    runs and "none found" carries the ``heuristic-incomplete`` flag. With
    ``all_kinds`` every template is tried and all verified kinds are listed.
    """
    e = as_fraction(eps)
    grid = [as_fraction(z) for z in (DEFAULT_ZETA_GRID if zeta_grid is None else zeta_grid)]
    grid = [z for z in grid if zeta_feasible(e, z)]
    n = d.n
    flags: list[str] = []
    if semi_degree(d) < (Fraction(1, 2) - e) * n:
        flags.append("low-semi-degree")
    verdict = is_eps_nice(d, e, niceness_mode, seed=seed)
    if verdict.nice and verdict.certified:
        return ClassifyResult(None, (), True, tuple(flags + ["nice"]), verdict)
    if verdict.nice:
        flags.append("niceness-uncertified")
    witness = verdict.witness
    rng = random.Random(seed)
    candidates: list[tuple[ECKind, Fraction | None]] = [(ECKind.EC1, None), (ECKind.EC2, None)]
    candidates += [(ECKind.EC3, z) for z in grid]
    exhaustive = n <= exhaustive_limit
    found: list[CharacteristicPartition] = []
    for kind, z in candidates:
        if found and not all_kinds:
            break
        if found and all_kinds and any(p.kind is kind for p in found):
            continue
        p = None
        if exhaustive:
            counter = [0]
            try:
                if kind is ECKind.EC3:
                    p = _exhaustive_ec3(d, e, z, counter, search_budget)
                else:
                    p = _exhaustive_ec12(d, kind, e, counter, search_budget)
            except _Exhausted:
                exhaustive = False
                flags.append("search-budget-exceeded")
        if p is None and not exhaustive:
            p = _heuristic(d, kind, e, z, witness, rng, restarts)
        if p is not None and verify_partition(d, p).ok:
            found.append(p)
    if not found and not exhaustive:
        flags.append("heuristic-incomplete")
    if len({p.kind for p in found}) > 1:
        flags.append("template-overlap")
    kinds = tuple(dict.fromkeys(p.kind for p in found))
    return ClassifyResult(found[0] if found else None, kinds, exhaustive, tuple(flags), verdict)


def partition_agreement(p: CharacteristicPartition, q: CharacteristicPartition, n: int) -> float:
    """Fraction of vertices placed in the same block, maximized over template symmetries.

    EC1/EC2 may swap ``A`` and ``B``; EC3 may rotate by two blocks. Different
    kinds agree on nothing.
    """
    if p.kind is not q.kind:
        return 0.0
    lp, lq = p.labels(n), q.labels(n)
    if p.kind is ECKind.EC3:
        maps = [(0, 1, 2, 3), (2, 3, 0, 1)]
    else:
        maps = [(0, 1), (1, 0)]
    best = 0
    for mp in maps:
        same = sum(1 for a, b in zip(lp, lq) if (a == -1 and b == -1) or (a >= 0 and mp[a] == b))
        best = max(best, same)
    return best / n

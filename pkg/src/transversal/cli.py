"""Command-line entry point.

Exit codes: 0 completed, 2 invalid input, 3 budget exhausted or timeout,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

from .absorption import AbsorberKind, absorb, enumerate_absorbers
from .errors import BudgetExceededError, InvalidArgumentError, InvariantViolation
from .experiments import gen_random_bipartite_collection, gen_random_collection, sweep_bradshaw, sweep_threshold
from .extremal import CharacteristicPartition, classify_extremal, gen_extremal, gen_tight_witness, is_eps_nice
from .io import (
    Instance,
    certificate_to_dict,
    dump_json,
    instance_to_dict,
    load_certificate,
    load_instance,
)
from .kernels import backend
from .model import CertKind, DigraphCollection, characteristic_bipartite
from .oracle import DEFAULT_ORACLE_BOUND, oracle_transversal_hamilton_cycle
from .regularity import CollectionSlice, check_regular_slice
from .solvers import (
    SearchConfig,
    SolveOutcome,
    Status,
    find_transversal_hamilton_cycle,
    find_transversal_hamilton_path,
    find_transversal_perfect_matching,
    max_rainbow_matching,
    rainbow_cycle_cover,
)
from .stability import classify_stability

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4


class _Budget(Exception):
    """Raised by a command whose result is inconclusive (timeout)."""


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(obj: Any, out: str | None) -> None:
    text = dump_json(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _digraphs(inst: Instance) -> DigraphCollection:
    if inst.bipartite:
        raise InvalidArgumentError("this command needs a digraph collection, got a bipartite one")
    return inst.collection


def _config(args) -> SearchConfig:
    threads = getattr(args, "threads", 1) or 1
    return SearchConfig(time_budget=args.time_budget, seed=args.seed, parallel=threads > 1, workers=threads)


def _outcome_dict(out: SolveOutcome) -> dict:
    d = out.to_dict()
    d["certificate"] = None if out.certificate is None else certificate_to_dict(out.certificate)
    return d


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    meta: dict[str, Any] = {"generator": args.family, "seed": args.seed}
    if args.family == "random":
        m = args.m if args.m is not None else args.n
        rc = gen_random_collection(args.n, m, args.p, args.min_semidegree, args.seed)
        meta |= {"p": args.p, "min_semidegree": args.min_semidegree,
                 "repairs": [[c + 1, u, v] for c, u, v in rc.repairs]}
        coll = rc.collection
    elif args.family == "bipartite":
        m = args.m if args.m is not None else args.n
        rc = gen_random_bipartite_collection(args.n, m, args.p, args.seed)
        meta |= {"p": args.p}
        coll = rc.collection
    elif args.family == "tight":
        coll = gen_tight_witness(args.n)
    else:
        m = args.m if args.m is not None else args.n
        inst = gen_extremal(args.kind, args.n, args.eps, args.zeta, args.defect, args.seed)
        coll = DigraphCollection.uniform(inst.digraph, m)
        meta |= {"kind": args.kind, "eps": str(args.eps), "zeta": None if args.zeta is None else str(args.zeta),
                 "defect": args.defect,
                 "planted": [{"color": c + 1, "partition": inst.partition.to_dict()} for c in range(m)]}
    _emit(instance_to_dict(coll, meta), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args)
    if args.problem == "tpm":
        bc = inst.collection if inst.bipartite else characteristic_bipartite(inst.collection)
        out = find_transversal_perfect_matching(bc, cfg)
    elif args.problem == "maxmatch":
        size, cert = max_rainbow_matching(inst.collection, cfg)
        _emit({"size": size, "certificate": certificate_to_dict(cert)}, args.out)
        return EXIT_OK
    else:
        dc = _digraphs(inst)
        fn = {"thc": find_transversal_hamilton_cycle, "thp": find_transversal_hamilton_path,
              "cover": rainbow_cycle_cover}[args.problem]
        out = fn(dc, cfg)
    _emit(_outcome_dict(out), args.out)
    if out.status is Status.TIMEOUT:
        raise _Budget("search timed out; the result is inconclusive")
    return EXIT_OK


def cmd_oracle(args) -> int:
    dc = _digraphs(load_instance(args.instance))
    res = oracle_transversal_hamilton_cycle(dc, args.bound)
    _emit({"exists": res.exists, "count": res.count, "hamilton_cycles": res.hamilton_cycles,
           "colorable_cycles": res.colorable_cycles,
           "certificate": None if res.certificate is None else certificate_to_dict(res.certificate)}, args.out)
    return EXIT_OK


def _colors(arg: list[int] | None, m: int) -> list[int]:
    if arg is None:
        return list(range(m))
    bad = [c for c in arg if not 1 <= c <= m]
    if bad:
        raise InvalidArgumentError(f"colors {bad} outside 1..{m}")
    return [c - 1 for c in arg]


def cmd_classify(args) -> int:
    dc = _digraphs(load_instance(args.instance))
    mode = args.mode or "auto"
    results = []
    for c in _colors(args.colors, dc.m):
        d = dc.digraphs[c]
        if args.nice_only:
            v = is_eps_nice(d, args.eps, mode, seed=args.seed)
            results.append({"color": c + 1, "niceness": v.to_dict()})
            continue
        r = classify_extremal(d, args.eps, seed=args.seed, niceness_mode=mode, all_kinds=args.all_kinds)
        results.append({
            "color": c + 1,
            "partition": None if r.partition is None else r.partition.to_dict(),
            "verified_kinds": [k.value for k in r.verified_kinds],
            "exhaustive": r.exhaustive,
            "flags": list(r.flags),
            "niceness": None if r.niceness is None else r.niceness.to_dict(),
        })
    _emit({"eps": str(args.eps), "results": results}, args.out)
    return EXIT_OK


def cmd_stability(args) -> int:
    inst = load_instance(args.instance)
    dc = _digraphs(inst)
    records = None
    if "planted" in inst.meta and not args.derive:
        records = {c: None for c in range(dc.m)}
        for rec in inst.meta["planted"]:
            records[rec["color"] - 1] = CharacteristicPartition.from_dict(rec["partition"])
    rep = classify_stability(dc, args.gamma, args.alpha, args.eps, args.delta, records,
                             niceness_mode=args.mode or "auto", seed=args.seed, workers=args.threads)
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_absorb(args) -> int:
    dc = _digraphs(load_instance(args.instance))
    cycle = load_certificate(args.cycle)
    if cycle.kind not in (CertKind.CYCLE, CertKind.HAMILTON_CYCLE):
        raise InvalidArgumentError(f"{args.cycle}: expected a cycle certificate")
    c, v = args.color - 1, args.v
    u = v if args.u is None else args.u
    scan = enumerate_absorbers(dc, cycle, c, v, u, AbsorberKind(args.kind))
    result: dict[str, Any] = {
        "absorbers": [{"position": w.position, "segment": list(w.segment),
                       "segment_colors": [x + 1 for x in w.segment_colors]} for w in scan.witnesses],
        "disjoint_count": scan.disjoint_count,
        "disjoint_positions": [w.position for w in scan.disjoint],
    }
    if args.apply:
        if not scan.witnesses:
            raise InvalidArgumentError("no absorbing segment exists for this target")
        payload = load_certificate(args.payload) if args.payload else None
        result["cycle"] = certificate_to_dict(absorb(dc, cycle, scan.witnesses[0], payload))
    _emit(result, args.out)
    return EXIT_OK


def cmd_regcheck(args) -> int:
    dc = _digraphs(load_instance(args.instance))
    s = CollectionSlice(dc, frozenset(args.V1), frozenset(args.V2), frozenset(_colors(args.colors, dc.m)))
    v = check_regular_slice(s, args.eps, args.d, args.mode or "exact", trials=args.trials, seed=args.seed)
    w = v.witness
    _emit({
        "regular": v.regular, "density_ok": v.density_ok, "density": str(v.density), "mode": v.mode,
        "checked": v.checked, "certified": v.certified,
        "witness": None if w is None else {"V1": sorted(w.V1), "V2": sorted(w.V2),
                                            "colors": sorted(c + 1 for c in w.colors),
                                            "density": str(w.density), "reason": w.reason},
    }, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.campaign == "threshold":
        rep = sweep_threshold(args.n, args.trials, args.seed, p=args.p, time_budget=args.time_budget,
                              workers=args.threads, out_dir=args.artifacts)
    else:
        rep = sweep_bradshaw(args.n, args.trials, args.seed, p=args.p, time_budget=args.time_budget,
                             workers=args.threads)
    _emit(rep.to_dict(), args.out)
    if args.campaign == "bradshaw" and rep.summary["misses"]:
        raise InvariantViolation(f"{rep.summary['misses']} trials have no transversal perfect matching")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, *, mode: bool = False, trials: int | None = None) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-budget", type=float, default=60.0, help="seconds")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write JSON here instead of stdout")
    if mode:
        p.add_argument("--mode", choices=("exact", "sampled"))
    if trials is not None:
        p.add_argument("--trials", type=int, default=trials)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transversal", description="Transversal structures in digraph collections.")
    parser.add_argument("--version", action="version", version=f"%(prog)s (kernels: {backend()})")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=("random", "bipartite", "extremal", "tight"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--min-semidegree", type=int)
    g.add_argument("--kind", choices=("EC1", "EC2", "EC3"), default="EC1")
    g.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    g.add_argument("--zeta", type=_fraction)
    g.add_argument("--defect", type=float, default=0.0)
    _common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="search for a transversal structure")
    s.add_argument("problem", choices=("thc", "thp", "tpm", "cover", "maxmatch"))
    s.add_argument("instance")
    _common(s)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force count of transversal Hamilton cycles")
    o.add_argument("problem", choices=("thc",))
    o.add_argument("instance")
    o.add_argument("--bound", type=int, default=DEFAULT_ORACLE_BOUND)
    _common(o)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("classify", help="niceness and template partitions per color")
    c.add_argument("instance")
    c.add_argument("--eps", type=_fraction, required=True)
    c.add_argument("--colors", type=_int_list, help="1-based, comma-separated (default: all)")
    c.add_argument("--nice-only", action="store_true")
    c.add_argument("--all-kinds", action="store_true")
    _common(c, mode=True)
    c.set_defaults(func=cmd_classify)

    st = sub.add_parser("stability", help="strong/weak stability verdict")
    st.add_argument("instance")
    st.add_argument("--gamma", type=_fraction, required=True)
    st.add_argument("--alpha", type=_fraction, required=True)
    st.add_argument("--eps", type=_fraction, required=True)
    st.add_argument("--delta", type=_fraction, required=True)
    st.add_argument("--derive", action="store_true", help="ignore planted partitions and search for them")
    _common(st, mode=True)
    st.set_defaults(func=cmd_stability)

    a = sub.add_parser("absorb", help="find (and apply) absorbing segments of a rainbow cycle")
    a.add_argument("instance")
    a.add_argument("cycle", help="cycle certificate JSON")
    a.add_argument("--color", type=int, required=True, help="1-based color to absorb with")
    a.add_argument("--v", type=int, required=True)
    a.add_argument("--u", type=int)
    a.add_argument("--kind", choices=[k.value for k in AbsorberKind if k is not AbsorberKind.BIP_EDGE],
                   default=AbsorberKind.TYPE_I.value)
    a.add_argument("--payload", help="path certificate JSON for pair absorption")
    a.add_argument("--apply", action="store_true")
    _common(a)
    a.set_defaults(func=cmd_absorb)

    r = sub.add_parser("regcheck", help="(eps, d)-regularity of a collection slice")
    r.add_argument("instance")
    r.add_argument("--V1", type=_int_list, required=True)
    r.add_argument("--V2", type=_int_list, required=True)
    r.add_argument("--colors", type=_int_list)
    r.add_argument("--eps", type=_fraction, required=True)
    r.add_argument("--d", type=_fraction, required=True)
    _common(r, mode=True, trials=10**4)
    r.set_defaults(func=cmd_regcheck)

    w = sub.add_parser("sweep", help="reproducible experiment campaigns")
    w.add_argument("campaign", choices=("threshold", "bradshaw"))
    w.add_argument("--n", type=int, nargs="+", required=True)
    w.add_argument("--p", type=float, default=0.5)
    w.add_argument("--artifacts", help="directory for counterexample instance files")
    _common(w, trials=100)
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"error: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (BudgetExceededError, _Budget) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidArgumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""JSON instance and certificate files.

Instance::

    {"schema": 1, "n": N, "m": M, "digraphs": [{"edges": [[u, v], ...]}, ...], "meta": {...}}

Vertices are 0-based and colors are array positions. ``"bipartite": true``
marks a bipartite collection whose edges are ``[left, right]`` pairs.
``meta.planted`` may list planted partitions ``{"color": c, "partition": {...}}``
(1-based color); they are verified on load.

Certificates use 1-based colors::

    {"kind": "hamilton-cycle", "cycle": [v0, ...], "colors": [c0, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InstanceFormatError
from .extremal import CharacteristicPartition, verify_partition
from .model import BipartiteCollection, CertKind, Digraph, DigraphCollection, RainbowCertificate

__all__ = [
    "SCHEMA_VERSION",
    "Instance",
    "certificate_from_dict",
    "certificate_to_dict",
    "dump_json",
    "instance_to_dict",
    "load_certificate",
    "load_instance",
    "parse_instance",
    "write_instance",
]

SCHEMA_VERSION = 1


@dataclass
class Instance:
    collection: DigraphCollection | BipartiteCollection
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def bipartite(self) -> bool:
        return isinstance(self.collection, BipartiteCollection)


def _fail(where: str, msg: str) -> InstanceFormatError:
    return InstanceFormatError(f"{where}: {msg}")


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise _fail(where, f"expected an integer, got {json.dumps(x)}")
    return x


def parse_instance(text: str, source: str = "<instance>") -> Instance:
    obj = _load_json(text, source)
    if not isinstance(obj, dict):
        raise _fail(f"{source}:$", "expected a JSON object")
    if obj.get("schema") != SCHEMA_VERSION:
        raise _fail(f"{source}:$.schema", f"unsupported schema {json.dumps(obj.get('schema'))}")
    for key in ("n", "m", "digraphs"):
        if key not in obj:
            raise _fail(f"{source}:$", f"missing key {key!r}")
    n = _int(obj["n"], f"{source}:$.n")
    m = _int(obj["m"], f"{source}:$.m")
    if n < 1:
        raise _fail(f"{source}:$.n", f"n must be positive, got {n}")
    graphs = obj["digraphs"]
    if not isinstance(graphs, list):
        raise _fail(f"{source}:$.digraphs", "expected a list")
    if len(graphs) != m:
        raise _fail(f"{source}:$.digraphs", f"{len(graphs)} members for m={m}")
    bipartite = bool(obj.get("bipartite", False))
    edge_lists = []
    for c, g in enumerate(graphs):
        where = f"{source}:$.digraphs[{c}]"
        if not isinstance(g, dict) or not isinstance(g.get("edges"), list):
            raise _fail(where, "expected an object with an 'edges' list")
        edges = []
        seen = set()
        for k, e in enumerate(g["edges"]):
            ew = f"{where}.edges[{k}]"
            if not isinstance(e, list) or len(e) != 2:
                raise _fail(ew, f"expected [u, v], got {json.dumps(e)}")
            u, v = _int(e[0], ew), _int(e[1], ew)
            if not (0 <= u < n and 0 <= v < n):
                raise _fail(ew, f"vertex outside 0..{n - 1}")
            if u == v and not bipartite:
                raise _fail(ew, f"loop at vertex {u}")
            if (u, v) in seen:
                raise _fail(ew, f"duplicate edge [{u}, {v}]")
            seen.add((u, v))
            edges.append((u, v))
        edge_lists.append(edges)
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise _fail(f"{source}:$.meta", "expected an object")
    if bipartite:
        coll: DigraphCollection | BipartiteCollection = BipartiteCollection.from_edge_lists(n, edge_lists)
    else:
        coll = DigraphCollection(n, tuple(Digraph.from_edges(n, es) for es in edge_lists))
    _check_planted(coll, meta, source)
    return Instance(coll, meta)


def _check_planted(coll, meta: dict, source: str) -> None:
    planted = meta.get("planted")
    if planted is None:
        return
    if isinstance(coll, BipartiteCollection) or not isinstance(planted, list):
        raise _fail(f"{source}:$.meta.planted", "expected a list of planted partitions of a digraph collection")
    for k, rec in enumerate(planted):
        where = f"{source}:$.meta.planted[{k}]"
        if not isinstance(rec, dict):
            raise _fail(where, "expected an object")
        c = _int(rec.get("color"), f"{where}.color")
        if not 1 <= c <= coll.m:
            raise _fail(f"{where}.color", f"color {c} outside 1..{coll.m}")
        try:
            part = CharacteristicPartition.from_dict(rec["partition"])
            report = verify_partition(coll.digraphs[c - 1], part)
        except (KeyError, TypeError, ValueError) as exc:
            raise _fail(f"{where}.partition", f"malformed partition ({exc})") from None
        if not report.ok:
            raise _fail(where, f"planted partition fails {report.failed()}")


def load_instance(path: str | Path) -> Instance:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceFormatError(f"{p}: cannot read ({exc.strerror})") from None
    return parse_instance(text, str(p))


def instance_to_dict(coll: DigraphCollection | BipartiteCollection, meta: dict | None = None) -> dict:
    if isinstance(coll, BipartiteCollection):
        graphs = [{"edges": [list(e) for e in coll.edges(c)]} for c in range(coll.m)]
        out = {"schema": SCHEMA_VERSION, "bipartite": True, "n": coll.n, "m": coll.m, "digraphs": graphs}
    else:
        graphs = [{"edges": [list(e) for e in d.edges()]} for d in coll.digraphs]
        out = {"schema": SCHEMA_VERSION, "n": coll.n, "m": coll.m, "digraphs": graphs}
    out["meta"] = dict(meta or {})
    return out


def dump_json(obj: Any) -> str:
    """Stable formatting: sorted keys, compact edge lists, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_instance(path: str | Path, coll: DigraphCollection | BipartiteCollection, meta: dict | None = None) -> None:
    Path(path).write_text(dump_json(instance_to_dict(coll, meta)))


_SEQUENCE_KEY = {
    CertKind.HAMILTON_CYCLE: "cycle",
    CertKind.CYCLE: "cycle",
    CertKind.HAMILTON_PATH: "path",
    CertKind.PATH: "path",
}


def certificate_to_dict(cert: RainbowCertificate) -> dict:
    colors = [c + 1 for c in cert.colors]
    key = _SEQUENCE_KEY.get(cert.kind)
    if key is None:
        return {"kind": cert.kind.value, "edges": [list(e) for e in cert.edges], "colors": colors}
    return {"kind": cert.kind.value, key: cert.vertex_order(), "colors": colors}


def certificate_from_dict(obj: Any, source: str = "<certificate>") -> RainbowCertificate:
    if not isinstance(obj, dict):
        raise _fail(f"{source}:$", "expected a JSON object")
    try:
        kind = CertKind(obj.get("kind"))
    except ValueError:
        raise _fail(f"{source}:$.kind", f"unknown kind {json.dumps(obj.get('kind'))}") from None
    colors = obj.get("colors")
    if not isinstance(colors, list):
        raise _fail(f"{source}:$.colors", "expected a list")
    cols = [_int(c, f"{source}:$.colors[{k}]") - 1 for k, c in enumerate(colors)]
    key = _SEQUENCE_KEY.get(kind)
    if key is None:
        edges = obj.get("edges")
        if not isinstance(edges, list):
            raise _fail(f"{source}:$.edges", "expected a list")
        pairs = []
        for k, e in enumerate(edges):
            if not isinstance(e, list) or len(e) != 2:
                raise _fail(f"{source}:$.edges[{k}]", "expected [u, v]")
            pairs.append((_int(e[0], f"{source}:$.edges[{k}]"), _int(e[1], f"{source}:$.edges[{k}]")))
        try:
            return RainbowCertificate(tuple(pairs), tuple(cols), kind)
        except ValueError as exc:
            raise _fail(f"{source}:$", str(exc)) from None
    seq = obj.get(key)
    if not isinstance(seq, list):
        raise _fail(f"{source}:$.{key}", "expected a list")
    verts = [_int(v, f"{source}:$.{key}[{k}]") for k, v in enumerate(seq)]
    try:
        if key == "cycle":
            return RainbowCertificate.from_cycle(verts, cols, kind)
        return RainbowCertificate.from_path(verts, cols, kind)
    except ValueError as exc:
        raise _fail(f"{source}:$", str(exc)) from None


def load_certificate(path: str | Path) -> RainbowCertificate:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceFormatError(f"{p}: cannot read ({exc.strerror})") from None
    return certificate_from_dict(_load_json(text, str(p)), str(p))

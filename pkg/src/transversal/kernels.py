"""Backend selection for the search kernels.

The compiled module is used when it imports; otherwise the pure-Python
reference runs. Both expose ``hamilton_search`` and ``pm_search`` with
identical semantics, so results (including node counts) do not depend on the
backend. The compiled kernels handle at most 64 vertices and colors; larger
instances always use the Python backend.
"""

from __future__ import annotations

import logging

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
    log.debug("compiled kernels unavailable, using pure-Python fallback")

_COMPILED_LIMIT = 64
_active = "cython" if _compiled is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])


def backend() -> str:
    return _active


def use_backend(name: str) -> None:
    """Select ``"python"`` or ``"cython"`` for subsequent searches."""
    global _active
    if name not in available_backends():
        raise ValueError(f"backend {name!r} is not available; have {available_backends()}")
    _active = name


def _module(n: int, m: int):
    if _active == "cython" and n <= _COMPILED_LIMIT and m <= _COMPILED_LIMIT:
        return _compiled
    return _pykernels


def hamilton_search(n, out_rows, cycle, starts, color_rank, node_budget, time_budget,
                    hall_depth, root_index=-1):
    mod = _module(n, len(out_rows))
    return mod.hamilton_search(n, out_rows, cycle, starts, color_rank, node_budget,
                               time_budget, hall_depth, root_index)


def pm_search(n, left_rows, color_rank, node_budget, time_budget):
    mod = _module(n, len(left_rows))
    return mod.pm_search(n, left_rows, color_rank, node_budget, time_budget)

"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ConfigError, InvalidMarkedSet
from .graphs import MarkedSet, make_graph

GRAPH_KINDS = ("lattice", "hypercube")


def check_graph_kind(kind) -> str:
    if kind not in GRAPH_KINDS:
        raise ConfigError(f"graph must be one of {GRAPH_KINDS}, got {kind!r}")
    return kind


def check_size(kind: str, size) -> int:
    if isinstance(size, bool) or not isinstance(size, numbers.Integral):
        raise ConfigError(f"size must be an integer, got {size!r}")
    size = int(size)
    if kind == "hypercube" and not 2 <= size <= 62:
        raise ConfigError(f"hypercube dimension must lie in [2, 62], got {size}")
    if kind == "lattice" and size < 2:
        raise ConfigError(f"lattice side must be >= 2, got {size}")
    return size


def check_marked(graph, marked) -> MarkedSet:
    """Return ``marked`` as a MarkedSet of labels valid on ``graph``."""
    if isinstance(marked, np.ndarray) and graph.kind == "lattice" and marked.ndim == 2:
        marked = [tuple(row) for row in marked.tolist()]
    try:
        ms = marked if isinstance(marked, MarkedSet) else MarkedSet(tuple(marked))
    except TypeError:
        raise InvalidMarkedSet(f"marked set must be a sequence of labels, got {marked!r}")
    idx = [graph.index(v) for v in ms]
    if len(set(idx)) != len(idx):
        raise InvalidMarkedSet(f"marked set {ms.vertices!r} names a vertex twice")
    return ms


def check_times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("times must be finite")
    if np.any(arr < 0):
        raise ValueError("times must be non-negative")
    return arr


def build_graph(kind, size):
    kind = check_graph_kind(kind)
    return make_graph(kind, check_size(kind, size))

"""Graph geometry for the coined walks: torus lattice and hypercube.

A graph object knows its coin dimension, its vertex count, how to turn a
vertex label into an integer index, and how the flip-flop shift moves each
coin direction.  State vectors use the coin-major layout ``a * N + v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import InvalidMarkedSet, UnsupportedDimension

LatticeLabel = tuple
VertexLabel = Union[int, tuple]


@dataclass(frozen=True)
class MarkedSet:
    """Ordered tuple of distinct vertex labels.

    The position of a label in ``vertices`` is its row/column in the
    marked-vertex matrices built by the solver.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(_freeze(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) == 0:
            raise InvalidMarkedSet("marked set must contain at least one vertex")
        if len(set(verts)) != len(verts):
            raise InvalidMarkedSet(f"duplicate marked vertices in {verts!r}")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]


def _freeze(label):
    if isinstance(label, (list, tuple, np.ndarray)):
        return tuple(int(c) for c in label)
    return int(label)


def as_marked_set(marked) -> MarkedSet:
    if isinstance(marked, MarkedSet):
        return marked
    return MarkedSet(tuple(marked))


class Lattice:
    """``side x side`` torus with the four-direction flip-flop Grover walk.

    Coin directions are ``0:+x, 1:-x, 2:+y, 3:-y``; the shift moves along the
    direction and reverses it (``a -> a ^ 1``).  Vertex ``(x, y)`` has index
    ``x * side + y``.
    """

    kind = "lattice"
    coin_dim = 4
    _steps = ((1, 0), (-1, 0), (0, 1), (0, -1))

    def __init__(self, side: int):
        side = int(side)
        if side < 2:
            raise UnsupportedDimension(f"lattice side must be >= 2, got {side}")
        self.side = side
        self.num_vertices = side * side

    @property
    def size(self) -> int:
        return self.side

    def index(self, label) -> int:
        try:
            x, y = (int(c) for c in label)
        except (TypeError, ValueError):
            raise InvalidMarkedSet(f"lattice label must be an (x, y) pair, got {label!r}")
        if not (0 <= x < self.side and 0 <= y < self.side):
            raise InvalidMarkedSet(f"lattice label {label!r} outside [0, {self.side})^2")
        return x * self.side + y

    def coords(self, labels: Iterable) -> np.ndarray:
        return np.array([[int(c) for c in lab] for lab in labels], dtype=np.int64).reshape(-1, 2)

    def shift_maps(self):
        """Yield ``(a, dest_coin, dest_index)`` with ``new[dest_coin, dest_index[v]] = old[a, v]``."""
        s = self.side
        x, y = np.divmod(np.arange(self.num_vertices), s)
        for a, (dx, dy) in enumerate(self._steps):
            yield a, a ^ 1, ((x + dx) % s) * s + (y + dy) % s

    def neighbors(self, v: int) -> list:
        s = self.side
        x, y = divmod(v, s)
        return [((x + dx) % s) * s + (y + dy) % s for dx, dy in self._steps]

    def descriptor(self) -> dict:
        return {"graph": "lattice", "sqrt_n": self.side}

    def __repr__(self):
        return f"Lattice(side={self.side})"


class Hypercube:
    """``n``-dimensional hypercube; coin ``a`` flips bit ``a`` of the vertex."""

    kind = "hypercube"

    def __init__(self, n: int):
        n = int(n)
        if n < 2:
            raise UnsupportedDimension(f"hypercube dimension must be >= 2, got {n}")
        self.n = n
        self.coin_dim = n
        self.num_vertices = 1 << n

    @property
    def size(self) -> int:
        return self.n

    def index(self, label) -> int:
        if isinstance(label, (tuple, list, np.ndarray)):
            bits = [int(b) for b in label]
            if len(bits) != self.n or any(b not in (0, 1) for b in bits):
                raise InvalidMarkedSet(f"bit-vector label {label!r} is not an {self.n}-bit vector")
            return sum(b << i for i, b in enumerate(bits))
        v = int(label)
        if not 0 <= v < self.num_vertices:
            raise InvalidMarkedSet(f"hypercube label {v} outside [0, 2^{self.n})")
        return v

    def shift_maps(self):
        idx = np.arange(self.num_vertices)
        for a in range(self.n):
            yield a, a, idx ^ (1 << a)

    def neighbors(self, v: int) -> list:
        return [v ^ (1 << a) for a in range(self.n)]

    def descriptor(self) -> dict:
        return {"graph": "hypercube", "n": self.n}

    def __repr__(self):
        return f"Hypercube(n={self.n})"


def make_graph(kind: str, size: int):
    if kind == "lattice":
        return Lattice(size)
    if kind == "hypercube":
        return Hypercube(size)
    raise ValueError(f"unknown graph kind {kind!r}")


def marked_indices(graph, marked: Sequence) -> np.ndarray:
    return np.array([graph.index(m) for m in marked], dtype=np.int64)


def uniform_state(graph) -> np.ndarray:
    """Uniform superposition over coin and position (the ``+1`` eigenvector of U)."""
    dim = graph.coin_dim * graph.num_vertices
    return np.full(dim, 1.0 / np.sqrt(dim))


def marked_states(graph, marked: Sequence) -> np.ndarray:
    """Columns ``|d_c>|m>`` for each marked vertex, shape ``(d*N, |M|)``."""
    d, n_v = graph.coin_dim, graph.num_vertices
    idx = marked_indices(graph, marked)
    out = np.zeros((d * n_v, len(idx)))
    for j, v in enumerate(idx):
        out[np.arange(d) * n_v + v, j] = 1.0 / np.sqrt(d)
    return out


def random_marked(graph, count: int, seed: int) -> MarkedSet:
    """Distinct random vertices, reproducible per ``(seed, size, count)``.

    Draws come from a Philox counter-based generator keyed on the triple, so
    the set for one size does not depend on which other sizes are swept.
    """
    count = int(count)
    if count < 1:
        raise InvalidMarkedSet("need at least one marked vertex")
    if count > graph.num_vertices:
        raise InvalidMarkedSet(f"cannot mark {count} of {graph.num_vertices} vertices")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), graph.size, count])))
    chosen: list = []
    seen = set()
    while len(chosen) < count:
        v = int(rng.integers(0, graph.num_vertices))
        if v not in seen:
            seen.add(v)
            chosen.append(v)
    if graph.kind == "lattice":
        return MarkedSet(tuple(divmod(v, graph.side) for v in chosen))
    return MarkedSet(tuple(chosen))

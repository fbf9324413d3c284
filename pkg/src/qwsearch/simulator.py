"""Brute-force evolution of the coined walk with the marking oracle.

One search step is ``U' = S (G x I) R``: the oracle reflects through each
``|d_c>|m>``, then the Grover coin, then the flip-flop shift.  Amplitudes are
stored coin-major, ``psi[a * N + v]``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exceptions import AllPhasesZero, DimensionTooLarge
from .graphs import marked_indices, uniform_state

DENSE_CAP = 12288
ZERO_PHASE_TOL = 1e-9


def grover_coin(d: int) -> np.ndarray:
    if d < 1:
        raise ValueError("coin dimension must be >= 1")
    return 2.0 * np.ones((d, d)) / d - np.eye(d)


@dataclass
class WalkState:
    amplitudes: np.ndarray
    graph: object

    @classmethod
    def initial(cls, graph) -> "WalkState":
        return cls(uniform_state(graph).astype(complex), graph)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def marked_probability(self, marked, measure: str = "dc") -> float:
        return marked_probability(self.amplitudes, self.graph, marked, measure)


@dataclass
class ProbabilityCurve:
    t: np.ndarray
    p: np.ndarray
    t_peak: int = field(init=False)
    p_peak: float = field(init=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.int64)
        self.p = np.asarray(self.p, dtype=float)
        i = int(np.argmax(self.p))
        self.t_peak = int(self.t[i])
        self.p_peak = float(self.p[i])

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.p.tolist()))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "p"])
            for t, p in self.samples:
                w.writerow([t, repr(p)])

    @classmethod
    def from_csv(cls, path) -> "ProbabilityCurve":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls([int(r["t"]) for r in rows], [float(r["p"]) for r in rows])


def _as_grid(psi, graph):
    return np.asarray(psi).reshape(graph.coin_dim, graph.num_vertices)


def _step_array(psi: np.ndarray, graph, midx: np.ndarray) -> np.ndarray:
    grid = _as_grid(psi, graph).copy()
    if midx.size:
        grid[:, midx] -= 2.0 * grid[:, midx].mean(axis=0)
    grid = 2.0 * grid.mean(axis=0) - grid
    out = np.empty_like(grid)
    for a, dest, where in graph.shift_maps():
        out[dest, where] = grid[a]
    return out.reshape(-1)


def apply_step(state: WalkState, marked: Sequence = ()) -> WalkState:
    """One step of ``U' = U R`` (oracle first), matrix-free, O(d N)."""
    midx = marked_indices(state.graph, marked)
    return WalkState(_step_array(state.amplitudes, state.graph, midx), state.graph)


def marked_probability(psi, graph, marked, measure: str = "dc") -> float:
    """``sum_m |<d_c, m|psi>|^2`` (``measure='dc'``) or the full vertex
    occupation ``sum_m sum_a |psi[a, m]|^2`` (``measure='position'``)."""
    grid = _as_grid(psi, graph)
    midx = marked_indices(graph, marked)
    cols = grid[:, midx]
    if measure == "dc":
        return float(np.sum(np.abs(cols.sum(axis=0)) ** 2) / graph.coin_dim)
    if measure == "position":
        return float(np.sum(np.abs(cols) ** 2))
    raise ValueError(f"unknown measure {measure!r}")


def default_tmax(graph) -> int:
    return int(math.ceil(3 * math.pi * math.sqrt(graph.num_vertices) / 4))


def probability_curve(graph, marked, t_max: Optional[int] = None, measure: str = "dc") -> ProbabilityCurve:
    """Evolve ``psi(0)`` for ``t = 0..t_max`` and record ``p(t)``."""
    if t_max is None:
        t_max = default_tmax(graph)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    midx = marked_indices(graph, marked)
    psi = uniform_state(graph).astype(complex)
    ps = [marked_probability(psi, graph, marked, measure)]
    for _ in range(t_max):
        psi = _step_array(psi, graph, midx)
        ps.append(marked_probability(psi, graph, marked, measure))
    return ProbabilityCurve(np.arange(t_max + 1), np.array(ps))


def sparse_operator(graph, marked: Sequence = ()) -> sp.csr_matrix:
    d, N = graph.coin_dim, graph.num_vertices
    dim = d * N
    rows, cols = [], []
    for a, dest, where in graph.shift_maps():
        rows.append(dest * N + where)
        cols.append(a * N + np.arange(N))
    S = sp.csr_matrix((np.ones(dim), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
    C = sp.kron(sp.csr_matrix(grover_coin(d)), sp.identity(N), format="csr")
    R = sp.identity(dim, format="lil")
    for v in marked_indices(graph, marked):
        sl = np.arange(d) * N + v
        R[np.ix_(sl, sl)] = np.eye(d) - 2.0 / d
    return (S @ C @ R.tocsr()).tocsr()


def dense_operator(graph, marked: Sequence = (), cap: int = DENSE_CAP) -> np.ndarray:
    """Dense real matrix of ``U'``; raises DimensionTooLarge above ``cap``."""
    dim = graph.coin_dim * graph.num_vertices
    if dim > cap:
        raise DimensionTooLarge(f"dense operator of dimension {dim} exceeds cap {cap}")
    return sparse_operator(graph, marked).toarray()


def eigenphases(graph, marked: Sequence = (), cap: int = DENSE_CAP) -> np.ndarray:
    U = dense_operator(graph, marked, cap)
    return np.angle(scipy.linalg.eigvals(U, check_finite=False, overwrite_a=True))


def smallest_nonzero_eigenphase(graph, marked: Sequence = (), cap: int = DENSE_CAP):
    """Return ``(lambda, gap)``: the smallest positive eigenphase of dense
    ``U'`` above ``1e-9`` and its distance to the next distinct phase."""
    ph = eigenphases(graph, marked, cap)
    pos = np.sort(ph[ph > ZERO_PHASE_TOL])
    if pos.size == 0:
        raise AllPhasesZero("dense operator has no positive eigenphase")
    lam = float(pos[0])
    rest = pos[pos > lam + ZERO_PHASE_TOL]
    gap = float(rest[0] - lam) if rest.size else math.inf
    return lam, gap

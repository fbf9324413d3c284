"""Spectral models of the unperturbed walk operator ``U``.

Everything the solver needs from ``U`` is the list of distinct eigenphases
together with the spectral projector compressed onto the marked states,

    G_phi[m, m'] = <d_c, m| P_phi |d_c, m'>,

plus the projections of the initial state.  Coin structure never leaves
this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .exceptions import InvalidMarkedSet, NotUnitary, UnsupportedDimension
from .graphs import Hypercube, Lattice, as_marked_set, marked_indices

#: trace below which a compressed block is treated as empty
EMPTY_BLOCK_TOL = 1e-14


@dataclass(frozen=True)
class PhaseGroup:
    phase: float
    block: np.ndarray
    degeneracy: int


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Immutable bundle of phase groups for one graph and marked set.

    Attributes
    ----------
    phases : (G,) float array in (-pi, pi]
    blocks : (G, M, M) complex array, Hermitian PSD compressed projectors
    degeneracy : (G,) int array
    initial_overlaps : (M,) complex array, ``u[m] = <psi(0)|d_c, m>``
    initial_projections : (G, M) complex array, ``<psi(0)|P_phi|d_c, m>``
    """

    phases: np.ndarray
    blocks: np.ndarray
    degeneracy: np.ndarray
    initial_overlaps: np.ndarray
    initial_projections: np.ndarray
    hilbert_dim: int
    graph: str
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("phases", "blocks", "degeneracy", "initial_overlaps", "initial_projections"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_marked(self) -> int:
        return self.blocks.shape[1]

    @property
    def n_groups(self) -> int:
        return self.phases.shape[0]

    @property
    def groups(self) -> list:
        return [PhaseGroup(float(p), b, int(d)) for p, b, d in zip(self.phases, self.blocks, self.degeneracy)]

    @property
    def zero_phase_index(self) -> Optional[int]:
        hits = np.flatnonzero(self.phases == 0.0)
        return int(hits[0]) if hits.size else None

    @property
    def zero_block(self) -> np.ndarray:
        i = self.zero_phase_index
        if i is None:
            return np.zeros((self.n_marked, self.n_marked), dtype=complex)
        return self.blocks[i]

    @property
    def phi_min(self) -> float:
        """Smallest positive phase carrying a nonzero marked block."""
        traces = np.einsum("gii->g", self.blocks).real
        pos = self.phases[(self.phases > 0) & (traces > 0)]
        return float(pos.min()) if pos.size else math.pi

    def identity_residual(self) -> float:
        """``max |sum_phi G_phi - I|`` (compressed resolution of identity)."""
        total = self.blocks.sum(axis=0)
        return float(np.abs(total - np.eye(self.n_marked)).max())

    def hermiticity_residual(self) -> float:
        return float(np.abs(self.blocks - np.conj(np.swapaxes(self.blocks, 1, 2))).max())

    def merged(self, tol: float = 1e-8) -> "SpectralModel":
        """Fold groups whose phases agree within ``tol`` into one group."""
        labels, centers = _cluster_phases(self.phases, tol)
        G = len(centers)
        blocks = np.zeros((G,) + self.blocks.shape[1:], dtype=complex)
        init = np.zeros((G, self.n_marked), dtype=complex)
        deg = np.zeros(G, dtype=np.int64)
        np.add.at(blocks, labels, self.blocks)
        np.add.at(init, labels, self.initial_projections)
        np.add.at(deg, labels, self.degeneracy)
        return SpectralModel(
            phases=centers,
            blocks=blocks,
            degeneracy=deg,
            initial_overlaps=self.initial_overlaps,
            initial_projections=init,
            hilbert_dim=self.hilbert_dim,
            graph=self.graph,
            params=dict(self.params),
            diagnostics=dict(self.diagnostics),
        )

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        groups = []
        for p, b, d, w in zip(self.phases, self.blocks, self.degeneracy, self.initial_projections):
            groups.append({
                "phase": float(p),
                "degeneracy": int(d),
                "block_re": b.real.tolist(),
                "block_im": b.imag.tolist(),
                "init_re": w.real.tolist(),
                "init_im": w.imag.tolist(),
            })
        return {
            "graph": self.graph,
            "params": _jsonable(self.params),
            "hilbert_dim": int(self.hilbert_dim),
            "groups": groups,
            "initial_overlaps": [[float(z.real), float(z.imag)] for z in self.initial_overlaps],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict())
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_dict(cls, doc: dict) -> "SpectralModel":
        groups = doc["groups"]
        M = len(doc["initial_overlaps"])
        phases = np.array([g["phase"] for g in groups], dtype=float)
        blocks = np.array([np.array(g["block_re"]) + 1j * np.array(g["block_im"]) for g in groups],
                          dtype=complex).reshape(len(groups), M, M)
        init = np.array([np.array(g.get("init_re", [0.0] * M)) + 1j * np.array(g.get("init_im", [0.0] * M))
                         for g in groups], dtype=complex).reshape(len(groups), M)
        return cls(
            phases=phases,
            blocks=blocks,
            degeneracy=np.array([g["degeneracy"] for g in groups], dtype=np.int64),
            initial_overlaps=np.array([complex(re, im) for re, im in doc["initial_overlaps"]]),
            initial_projections=init,
            hilbert_dim=int(doc["hilbert_dim"]),
            graph=doc["graph"],
            params=doc.get("params", {}),
        )

    @classmethod
    def from_json(cls, text_or_path) -> "SpectralModel":
        text = str(text_or_path)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        return cls.from_dict(json.loads(text))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _cluster_phases(phases: np.ndarray, tol: float):
    """Group phases within ``tol`` of a neighbour; ``-pi`` and ``pi`` coincide.

    Returns per-phase cluster labels and the cluster centres; a cluster
    within ``tol`` of zero is pinned to exactly 0 and one near ``pi`` to pi.
    """
    ph = np.asarray(phases, dtype=float).copy()
    ph[ph <= -math.pi + tol] = math.pi
    order = np.argsort(ph, kind="stable")
    sorted_ph = ph[order]
    breaks = np.flatnonzero(np.diff(sorted_ph) > tol) + 1
    run_ids = np.zeros(len(ph), dtype=np.int64)
    run_ids[breaks] = 1
    run_ids = np.cumsum(run_ids)
    labels = np.empty(len(ph), dtype=np.int64)
    labels[order] = run_ids
    n = int(run_ids[-1]) + 1 if len(ph) else 0
    centers = np.array([sorted_ph[run_ids == c].mean() for c in range(n)])
    centers[np.abs(centers) <= tol] = 0.0
    centers[centers >= math.pi - tol] = math.pi
    return labels, centers


# -- Krawtchouk polynomials ---------------------------------------------

def krawtchouk(k: int, u: int, n: int) -> int:
    """Binary Krawtchouk polynomial ``K_k(u; n) = sum_j (-1)^j C(u,j) C(n-u,k-j)``.

    Equals the character sum of ``(-1)^(kvec . v)`` over all weight-``k``
    vectors ``kvec`` for any fixed ``v`` of weight ``u``.  Exact integer.
    """
    if not (0 <= u <= n and 0 <= k <= n):
        return 0
    return sum((-1) ** j * math.comb(u, j) * math.comb(n - u, k - j)
               for j in range(max(0, k - (n - u)), min(k, u) + 1))


@lru_cache(maxsize=64)
def krawtchouk_table(n: int) -> tuple:
    """``table[k][u] = K_k(u; n)`` for ``0 <= k, u <= n`` as exact ints."""
    return tuple(tuple(krawtchouk(k, u, n) for u in range(n + 1)) for k in range(n + 1))


# -- analytic builders --------------------------------------------------

def _check_distinct(graph, marked):
    marked = as_marked_set(marked)
    idx = marked_indices(graph, marked)
    if len(set(idx.tolist())) != len(idx):
        raise InvalidMarkedSet(f"marked set {marked.vertices!r} names a vertex twice")
    return marked, idx


def build_lattice_model(sqrt_n: int, marked) -> SpectralModel:
    """Analytic model of the Grover flip-flop walk on the ``sqrt_n`` torus.

    Every wavevector ``(k, l) != (0, 0)`` contributes eigenphases
    ``+-theta_kl`` with ``1 - cos theta_kl = sin^2(pi k/s) + sin^2(pi l/s)``;
    each eigenvector has coin overlap ``1/sqrt 2`` with ``d_c``, giving
    blocks ``omega^{(x_m - x_m')k + (y_m - y_m')l} / (2N)``.  At
    ``theta = pi`` the two signs coincide and fold into one group.
    Accidental degeneracies between different wavevectors are kept apart.
    """
    graph = Lattice(sqrt_n)
    marked, _ = _check_distinct(graph, marked)
    s, N = graph.side, graph.num_vertices
    xy = graph.coords(marked)
    M = len(marked)
    dx = xy[:, 0][:, None] - xy[:, 0][None, :]
    dy = xy[:, 1][:, None] - xy[:, 1][None, :]

    k, l = np.divmod(np.arange(1, N), s)
    half = np.sin(np.pi * k / s) ** 2 + np.sin(np.pi * l / s) ** 2  # 1 - cos theta
    theta = 2.0 * np.arcsin(np.minimum(np.sqrt(half / 2.0), 1.0))
    at_pi = (2 * k == s) & (2 * l == s)
    theta[at_pi] = math.pi

    expo = (dx[None] * k[:, None, None] + dy[None] * l[:, None, None]) % s
    waves = np.exp(2j * np.pi * expo / s) / N

    generic = ~at_pi
    phases = np.concatenate([[0.0], theta[generic], -theta[generic], theta[at_pi]])
    blocks = np.concatenate([
        np.full((1, M, M), 1.0 / N, dtype=complex),
        waves[generic] / 2,
        waves[generic] / 2,
        waves[at_pi],
    ])
    G = len(phases)
    u = np.full(M, 1.0 / math.sqrt(N), dtype=complex)
    init = np.zeros((G, M), dtype=complex)
    init[0] = u
    return SpectralModel(
        phases=phases,
        blocks=blocks,
        degeneracy=np.ones(G, dtype=np.int64),
        initial_overlaps=u,
        initial_projections=init,
        hilbert_dim=4 * N,
        graph="lattice",
        params={"sqrt_n": s, "marked": [list(v) for v in marked]},
    )


def build_hypercube_model(n: int, marked) -> SpectralModel:
    """Analytic model of the Grover walk on the ``n``-cube.

    Groups: phase 0 (``psi(0)`` only), ``+-omega_k`` for ``1 <= k <= n-1``
    with ``cos omega_k = 1 - 2k/n``, and phase pi (``d_c`` times the
    all-ones character).  The ``+-omega_k`` block is
    ``K_k(h(m xor m'); n) / (2N)``.
    """
    if int(n) < 2:
        raise UnsupportedDimension(f"hypercube needs n >= 2, got {n}")
    graph = Hypercube(n)
    marked, idx = _check_distinct(graph, marked)
    n, N, M = graph.n, graph.num_vertices, len(idx)
    ham = np.array([[int(a ^ b).bit_count() for b in idx.tolist()] for a in idx.tolist()], dtype=np.int64)
    table = np.array(krawtchouk_table(n), dtype=float)  # (n+1, n+1)

    ks = np.arange(1, n)
    omega = 2.0 * np.arcsin(np.sqrt(ks / n))
    kblocks = table[ks][:, ham] / (2.0 * N)
    phases = np.concatenate([[0.0], omega, -omega, [math.pi]])
    blocks = np.concatenate([
        np.full((1, M, M), 1.0 / N),
        kblocks,
        kblocks,
        table[n][ham][None] / N,
    ]).astype(complex)
    comb = np.array([math.comb(n, int(k)) for k in ks], dtype=np.int64)
    degeneracy = np.concatenate([[1], comb, comb, [1]])
    G = len(phases)
    u = np.full(M, 1.0 / math.sqrt(N), dtype=complex)
    init = np.zeros((G, M), dtype=complex)
    init[0] = u
    return SpectralModel(
        phases=phases,
        blocks=blocks,
        degeneracy=degeneracy,
        initial_overlaps=u,
        initial_projections=init,
        hilbert_dim=n * N,
        graph="hypercube",
        params={"n": n, "marked": [int(v) for v in idx]},
    )


def build_model(graph_kind: str, size: int, marked) -> SpectralModel:
    if graph_kind == "lattice":
        return build_lattice_model(size, marked)
    if graph_kind == "hypercube":
        return build_hypercube_model(size, marked)
    raise ValueError(f"unknown graph kind {graph_kind!r}")


# -- generic dense builder ----------------------------------------------

def build_generic_model(unitary, marked_states, initial_state, *, tol: float = 1e-8,
                        unitarity_tol: float = 1e-10) -> SpectralModel:
    """Model of an arbitrary dense unitary via complex Schur decomposition.

    ``marked_states`` is a ``(dim, M)`` array (or a sequence of ``M`` state
    vectors) of orthonormal marked states.  Eigenphases are clustered with
    tolerance ``tol``; only projections onto marked and initial states are
    retained.
    """
    U = np.asarray(unitary, dtype=complex)
    dim = U.shape[0]
    if U.ndim != 2 or U.shape[1] != dim:
        raise NotUnitary(f"expected a square matrix, got shape {U.shape}")
    unit_res = float(np.abs(U.conj().T @ U - np.eye(dim)).max())
    if unit_res > unitarity_tol:
        raise NotUnitary(f"||U^H U - I||_max = {unit_res:.3e} exceeds {unitarity_tol:.0e}")

    B = np.asarray(marked_states, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    elif B.shape[0] != dim:
        B = B.T
    if B.shape[0] != dim:
        raise InvalidMarkedSet(f"marked states have dimension {B.shape[0]}, expected {dim}")
    M = B.shape[1]
    if np.abs(B.conj().T @ B - np.eye(M)).max() > 1e-10:
        raise InvalidMarkedSet("marked states are not orthonormal")
    psi0 = np.asarray(initial_state, dtype=complex).reshape(dim)

    T, Z = scipy.linalg.schur(U, output="complex")
    normality = float(np.abs(np.triu(T, 1)).max()) if dim > 1 else 0.0
    labels, centers = _cluster_phases(np.angle(np.diag(T)), tol)

    BZ = B.conj().T @ Z          # (M, dim): <m|z_j>
    PZ = psi0.conj() @ Z         # (dim,):   <psi0|z_j>
    G = len(centers)
    blocks = np.zeros((G, M, M), dtype=complex)
    init = np.zeros((G, M), dtype=complex)
    counts = np.bincount(labels, minlength=G)
    for g in range(G):
        cols = labels == g
        Bg = BZ[:, cols]
        blocks[g] = Bg @ Bg.conj().T
        init[g] = PZ[cols] @ Bg.conj().T
    blocks = 0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))

    traces = np.einsum("gii->g", blocks).real
    # Roundoff-level blocks are zeroed here so downstream code can treat any
    # positive trace as real overlap (analytic blocks go down to 1/N).
    noise = traces <= EMPTY_BLOCK_TOL
    blocks[noise] = 0.0
    keep = ~noise | (np.abs(init).max(axis=1) > EMPTY_BLOCK_TOL)
    diagnostics = {"normality_residual": normality, "unitarity_residual": unit_res, "warnings": []}
    zero = np.flatnonzero(centers == 0.0)
    if zero.size:
        z = int(zero[0])
        spread = np.angle(np.diag(T))[labels == z]
        evals = np.linalg.eigvalsh(blocks[z])
        rank = int((evals > 1e-10 * max(evals.max(), 1e-300)).sum())
        diagnostics["zero_rank"] = rank
        if rank > 1:
            diagnostics["warnings"].append(
                f"1-eigenspace compressed onto marked states has rank {rank} > 1")
        if spread.size and spread.min() < 0 < spread.max() and np.abs(spread).max() > tol:
            diagnostics["warnings"].append("zero-phase cluster straddles 0 wider than tolerance")

    return SpectralModel(
        phases=centers[keep],
        blocks=blocks[keep],
        degeneracy=counts[keep],
        initial_overlaps=psi0.conj() @ B,
        initial_projections=init[keep],
        hilbert_dim=dim,
        graph="generic",
        params={"tol": tol},
        diagnostics=diagnostics,
    )

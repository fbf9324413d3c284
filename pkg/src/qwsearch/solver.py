"""Two-eigenvector analysis of the searched walk ``U' = U R``.

For an eigenphase ``lam`` of ``U'`` the vector ``x[m] = <d_c, m|lam>`` lies in
the kernel of the Hermitian ``|M| x |M|`` matrix

    Lambda(lam) = sum_phi b(lam - phi) G_phi,    b(delta) = cot(delta / 2).

Since ``db/dlam < 0`` and every ``G_phi`` is positive semidefinite,
``Lambda`` is non-increasing in the Loewner order between poles, so its
eigenvalues only cross zero downward.  The smallest root in
``(0, phi_min)`` is therefore the first drop in the count of positive
eigenvalues, which is what :func:`find_lambda` brackets and bisects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    NoRootInInterval,
    NullSpaceDimensionTooHigh,
    PoleAtEigenphase,
    WrongCardinality,
)
from .spectra import SpectralModel

POLE_TOL = 1e-12
N_PROBES = 512
DENSIFY = 8
REL_TOL = 1e-12


def _wrap(delta):
    return (np.asarray(delta) + np.pi) % (2 * np.pi) - np.pi


def b_coefficient(lam, phi):
    """``sin(lam - phi) / (1 - cos(lam - phi))``, evaluated as ``cot((lam - phi)/2)``."""
    delta = _wrap(np.subtract(lam, phi))
    if np.any(np.abs(delta) <= POLE_TOL):
        raise PoleAtEigenphase(f"lambda={lam!r} coincides with an eigenphase")
    out = 1.0 / np.tan(delta / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def build_lambda_matrix(model: SpectralModel, lam: float) -> np.ndarray:
    """``Lambda(lam) = sum_phi b(lam - phi) G_phi`` (Hermitian)."""
    b = b_coefficient(lam, model.phases)
    L = np.tensordot(np.atleast_1d(b), model.blocks, axes=(0, 0))
    return 0.5 * (L + L.conj().T)


def build_lambda_prime(model: SpectralModel, lam: float) -> np.ndarray:
    """``Lambda'(lam) = sum_phi b(lam - phi)^2 G_phi``."""
    b = np.atleast_1d(b_coefficient(lam, model.phases))
    L = np.tensordot(b * b, model.blocks, axes=(0, 0))
    return 0.5 * (L + L.conj().T)


def _n_positive(model, lam):
    return int((np.linalg.eigvalsh(build_lambda_matrix(model, lam)) > 0).sum())


def _regularized_det(model, lam):
    """``|lam^M det Lambda(lam)|`` computed in log space (may underflow to 0)."""
    sign, logdet = np.linalg.slogdet(build_lambda_matrix(model, lam))
    if sign == 0:
        return 0.0
    return math.exp(min(model.n_marked * math.log(lam) + logdet, 700.0))


def _probe_grid(model, count):
    phi_min = model.phi_min
    scale = math.sqrt(max(float(np.trace(model.zero_block).real), 0.0))
    lo = phi_min * (1e-4 * min(1.0, scale) if scale > 0 else 1e-6)
    return np.geomspace(lo, 0.999 * phi_min, count)


def find_lambda(model: SpectralModel, *, n_probes: int = N_PROBES, rel_tol: float = REL_TOL,
                full_output: bool = False):
    """Smallest ``lam`` in ``(0, phi_min)`` with ``det Lambda(lam) = 0``.

    Returns ``(lam, residual)`` with ``residual = |lam^M det Lambda(lam)|``;
    with ``full_output=True`` a third item carries the number of roots seen
    on the probe grid, the root multiplicity and the bracket.
    """
    if model.zero_phase_index is None or np.trace(model.zero_block).real <= 0:
        raise NoRootInInterval("model has no zero-phase group with marked overlap")

    count = n_probes
    for _attempt in range(2):
        grid = _probe_grid(model, count)
        npos = np.array([_n_positive(model, lam) for lam in grid])
        drops = np.flatnonzero(npos < npos[0])
        if drops.size:
            break
        count *= DENSIFY
    else:
        raise NoRootInInterval(
            f"no eigenphase crossing in (0, {model.phi_min:.6g}); exceptional configuration")

    j = int(drops[0])
    base = npos[0]
    lo, hi = float(grid[j - 1]), float(grid[j])
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _n_positive(model, mid) < base:
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)
    residual = _regularized_det(model, lam)
    if not full_output:
        return lam, residual
    info = {
        "root_count": int(base - npos[-1]),
        "multiplicity": int(base - _n_positive(model, hi)),
        "bracket": (lo, hi),
        "phi_min": model.phi_min,
        "probes": count,
    }
    return lam, residual, info


@dataclass
class LambdaSolution:
    lam: float
    marked_amplitudes: np.ndarray
    alpha: float
    initial_overlap: complex
    t_opt: float
    p_succ: float
    t_run: float
    det_residual: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "t_opt": self.t_opt,
            "p_succ": self.p_succ,
            "t_run": self.t_run,
            "marked_amplitudes": [[float(z.real), float(z.imag)] for z in self.marked_amplitudes],
            "initial_overlap": [float(self.initial_overlap.real), float(self.initial_overlap.imag)],
            "det_residual": self.det_residual,
            "diagnostics": _plain(self.diagnostics),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def null_vector(L: np.ndarray, *, degeneracy_tol: float = 1e-8) -> np.ndarray:
    """Unit eigenvector of Hermitian ``L`` for its eigenvalue nearest zero."""
    w, V = np.linalg.eigh(L)
    order = np.argsort(np.abs(w))
    if len(w) > 1 and abs(w[order[1]]) <= degeneracy_tol * np.abs(w).max():
        raise NullSpaceDimensionTooHigh(
            f"Lambda has at least two near-zero eigenvalues: {w[order[:2]]!r}")
    return V[:, order[0]]


def explicit_null_vector_m2(L: np.ndarray) -> np.ndarray:
    """Unnormalized kernel vector ``(L01, -L00)`` of a singular 2x2 ``L``."""
    return np.array([L[0, 1], -L[0, 0]])


def normalization_alpha(model: SpectralModel, lam: float, v: np.ndarray) -> float:
    """Scale making ``|lam>`` a unit vector: ``alpha^-2 = v^H (I + Lambda') v``."""
    Lp = build_lambda_prime(model, lam)
    q = float(np.real(np.vdot(v, v) + np.vdot(v, Lp @ v)))
    return 1.0 / math.sqrt(q)


def normalization_sum(model: SpectralModel, lam: float, x: np.ndarray) -> float:
    """``sum_phi (1 + b_phi^2) x^H G_phi x``; equals 1 for a normalized eigenvector."""
    b = np.atleast_1d(b_coefficient(lam, model.phases))
    quad = np.einsum("i,gij,j->g", x.conj(), model.blocks, x).real
    return float(np.sum((1.0 + b * b) * quad))


def initial_overlap(model: SpectralModel, lam: float, x: np.ndarray) -> complex:
    """``<lam|psi(0)>`` from ``P_phi|lam> = (1 + i b_phi) P_phi Pi |lam>``."""
    b = np.atleast_1d(b_coefficient(lam, model.phases))
    amp = np.sum((1.0 + 1j * b) * (model.initial_projections @ x))
    return complex(np.conj(amp))


def solve(model: SpectralModel, **kwargs) -> LambdaSolution:
    """Root, eigenvector amplitudes, success probability and running time."""
    lam, residual, info = find_lambda(model, full_output=True, **kwargs)
    L = build_lambda_matrix(model, lam)
    v = null_vector(L)
    alpha = normalization_alpha(model, lam, v)
    x = alpha * v
    lead = np.flatnonzero(np.abs(x) > 1e-14 * np.abs(x).max())[0]
    x = x * np.exp(-1j * np.angle(x[lead]))

    ov = initial_overlap(model, lam, x)
    p_succ = 4.0 * float(np.vdot(x, x).real) * abs(ov) ** 2
    t_opt = math.pi / (2.0 * lam)

    scale = max(np.abs(np.linalg.eigvalsh(L)).max(), 1e-300)
    mirror = np.abs(np.linalg.eigvalsh(build_lambda_matrix(model, -lam))).min() / scale
    info.update({
        "null_residual": float(np.linalg.norm(L @ x) / np.linalg.norm(x)),
        "null_residual_relative": float(np.linalg.norm(L @ v) / scale),
        "normalization": normalization_sum(model, lam, x),
        "mirror_residual": float(mirror),
    })
    return LambdaSolution(
        lam=lam,
        marked_amplitudes=x,
        alpha=alpha,
        initial_overlap=ov,
        t_opt=t_opt,
        p_succ=p_succ,
        t_run=t_opt / math.sqrt(p_succ) if p_succ > 0 else math.inf,
        det_residual=residual,
        diagnostics=info,
    )


def model_probability(solution: LambdaSolution, t):
    """``p(t) = p_succ sin^2(lam t)``."""
    return solution.p_succ * np.sin(solution.lam * np.asarray(t, dtype=float)) ** 2


# -- small-lambda series ------------------------------------------------

@dataclass(frozen=True)
class SeriesCoefficients:
    """Laurent coefficients of ``det Lambda`` in the small-``lam`` expansion.

    ``|M| = 2``: ``A/l^2 + B/l + C + D l + E l^2``.
    ``|M| = 3``: ``A/l^3 + B/l^2 + C/l + D + E l`` and, when ``complete``,
    the same-expansion terms ``F l^2 + H l^3``.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float = 0.0
    H: float = 0.0
    order: int = 2
    scale: float = 1.0

    def polynomial(self, complete: bool = True) -> np.ndarray:
        """Coefficients in ascending powers after clearing the ``l^-order`` pole."""
        coeffs = [self.A, self.B, self.C, self.D, self.E]
        if self.order == 3 and complete:
            coeffs += [self.F, self.H]
        return np.array(coeffs, dtype=float)

    def root(self, complete: bool = True, noise: float = 1e-9) -> float:
        """Smallest positive real root; coefficients whose contribution at the
        natural scale ``l ~ scale`` is below ``noise`` of the largest are zeroed
        (they vanish structurally and only carry rounding)."""
        c = self.polynomial(complete)
        weight = np.abs(c) * self.scale ** np.arange(len(c))
        c = np.where(weight <= noise * weight.max(), 0.0, c)
        nz = np.flatnonzero(c)
        if nz.size < 2:
            return math.nan
        low = nz[0]
        roots = np.roots(c[low:][::-1])
        real = roots[(np.abs(roots.imag) <= 1e-9 * np.abs(roots).max()) & (roots.real > 0)].real
        return float(real.min()) if real.size else math.nan


def _split(model):
    if model.zero_phase_index is None:
        raise NoRootInInterval("model has no zero-phase group")
    nz = model.phases != 0.0
    phi = model.phases[nz]
    a = 1.0 / (np.cos(phi) - 1.0)
    P = np.tensordot(a, model.blocks[nz], axes=(0, 0))
    Q = np.tensordot(a * np.sin(phi), model.blocks[nz], axes=(0, 0))
    Z = model.zero_block
    scale = math.sqrt(max(float(np.trace(Z).real), 0.0)) or 1.0
    return Z, Q, P, scale


def _c2(X, Y):
    return X[0, 0] * Y[1, 1] - X[0, 1] * Y[1, 0]


def series_coefficients_m2(model: SpectralModel) -> SeriesCoefficients:
    """A..E for two marked vertices.

    With ``Z = G_0``, ``P = sum a_phi G_phi`` and ``Q = sum a_phi sin(phi) G_phi``
    over nonzero phases (``a = 1/(cos phi - 1)``), the pair sums factor into
    ``c(X, Y) = X00 Y11 - X01 Y10``.
    """
    if model.n_marked != 2:
        raise WrongCardinality(f"series for |M|=2 called with |M|={model.n_marked}")
    Z, Q, P, scale = _split(model)
    A = 4 * _c2(Z, Z)
    B = 2 * (_c2(Z, Q) + _c2(Q, Z))
    C = 2 * (_c2(Z, P) + _c2(P, Z)) + _c2(Q, Q)
    D = _c2(Q, P) + _c2(P, Q)
    E = _c2(P, P)
    return SeriesCoefficients(*(float(np.real(v)) for v in (A, B, C, D, E)), order=2, scale=scale)


_PERMS3 = ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1))


def _c3(X, Y, W):
    """Mixed determinant ``sum_sigma sgn(sigma) X[0,s0] Y[1,s1] W[2,s2]``."""
    return sum(sg * X[0, i] * Y[1, j] * W[2, k] for i, j, k, sg in _PERMS3)


def _sym3(one, two):
    """Sum of ``_c3`` over the three slot placements of ``one`` among ``two``."""
    return _c3(one, two, two) + _c3(two, one, two) + _c3(two, two, one)


def _mixed3(X, Y, W):
    """Sum of ``_c3`` over all six slot orders of three distinct matrices."""
    return (_c3(X, Y, W) + _c3(X, W, Y) + _c3(Y, X, W)
            + _c3(Y, W, X) + _c3(W, X, Y) + _c3(W, Y, X))


def series_coefficients_m3(model: SpectralModel) -> SeriesCoefficients:
    """A..E for three marked vertices, plus the ``l^2``, ``l^3`` terms F, H of
    the same trilinear expansion of ``det(2Z/l + Q + l P)``."""
    if model.n_marked != 3:
        raise WrongCardinality(f"series for |M|=3 called with |M|={model.n_marked}")
    Z, Q, P, scale = _split(model)
    A = 8 * _c3(Z, Z, Z)
    B = 4 * _sym3(Q, Z)
    C = 2 * _sym3(Z, Q) + 4 * _sym3(P, Z)
    D = 2 * _mixed3(Z, Q, P) + _c3(Q, Q, Q)
    E = 2 * _sym3(Z, P) + _sym3(P, Q)
    F = _sym3(Q, P)
    H = _c3(P, P, P)
    vals = (A, B, C, D, E, F, H)
    return SeriesCoefficients(*(float(np.real(v)) for v in vals), order=3, scale=scale)


def series_lambda(model: SpectralModel, complete: bool = True) -> float:
    """Positive root of the truncated small-``lam`` equation."""
    if model.n_marked == 2:
        return series_coefficients_m2(model).root()
    if model.n_marked == 3:
        return series_coefficients_m3(model).root(complete=complete)
    raise WrongCardinality(f"no closed-form series for |M|={model.n_marked}")

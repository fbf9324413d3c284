"""Lattice and hypercube sums, the summation identities, and closed-form
asymptotic predictions.

Sums with many terms of very different magnitude go through ``math.fsum``
(exactly rounded); identities that are rational are evaluated in
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.special

from .exceptions import OddSideForAntipodal, ZeroVector
from .spectra import krawtchouk_table

FUBINI_TRUNCATION = 8


@dataclass(frozen=True)
class LatticeSums:
    S1: float
    S2: float
    S3: float
    c_estimate: float


@dataclass(frozen=True)
class HypercubeSums:
    S_odd: float
    S_even: float
    v0: int


@dataclass(frozen=True)
class AsymptoticPrediction:
    lam: float
    t_opt: float
    p_succ: float
    regime: str

    @classmethod
    def from_lambda(cls, lam, p_succ, regime):
        return cls(lam, math.pi / (2 * lam), p_succ, regime)


# -- lattice ------------------------------------------------------------

def _grid(sqrt_n):
    k, l = np.divmod(np.arange(1, sqrt_n * sqrt_n), sqrt_n)
    return k, l


def _one_minus_cos_theta(k, l, s):
    return np.sin(np.pi * k / s) ** 2 + np.sin(np.pi * l / s) ** 2


def lattice_s1(sqrt_n: int) -> float:
    """``sum_{(k,l) != 0} 1 / (1 - cos theta_kl)``."""
    k, l = _grid(sqrt_n)
    return math.fsum((1.0 / _one_minus_cos_theta(k, l, sqrt_n)).tolist())


def lattice_s2(sqrt_n: int, x0: int, y0: int) -> float:
    """``sum sin^2(pi (k x0 + l y0)/s) / (sin^2(pi k/s) + sin^2(pi l/s))``."""
    if (x0 % sqrt_n, y0 % sqrt_n) == (0, 0):
        raise ValueError("second marked vertex must differ from the origin")
    k, l = _grid(sqrt_n)
    phase = ((k * x0 + l * y0) % sqrt_n) / sqrt_n
    terms = np.sin(np.pi * phase) ** 2 / _one_minus_cos_theta(k, l, sqrt_n)
    return math.fsum(terms.tolist())


def lattice_s3(sqrt_n: int) -> float:
    """``sum_{k,l = 0..s/2, (k,l) != 0} (1 + (-1)^(k+l)) / (k + l)^2``."""
    h = sqrt_n // 2
    k, l = np.meshgrid(np.arange(h + 1), np.arange(h + 1), indexing="ij")
    k, l = k.ravel()[1:], l.ravel()[1:]
    terms = (1 + (-1.0) ** (k + l)) / (k + l) ** 2.0
    return math.fsum(terms.tolist())


def c_estimate(sqrt_n: int) -> float:
    """Finite-size surrogate ``S1 / (N ln N)`` of the lattice constant c."""
    N = sqrt_n * sqrt_n
    return lattice_s1(sqrt_n) / (N * math.log(N))


def lattice_sums(sqrt_n: int, x0: int, y0: int) -> LatticeSums:
    return LatticeSums(
        S1=lattice_s1(sqrt_n),
        S2=lattice_s2(sqrt_n, x0, y0),
        S3=lattice_s3(sqrt_n),
        c_estimate=c_estimate(sqrt_n),
    )


def lattice_series_coefficients(sqrt_n: int, x0: int, y0: int):
    """``(C, E, lambda)`` with ``C = -8 S2/N^2``, ``E = 4 S2 (S1 - S2)/N^2``."""
    N = sqrt_n * sqrt_n
    s1, s2 = lattice_s1(sqrt_n), lattice_s2(sqrt_n, x0, y0)
    C = -8 * s2 / N ** 2
    E = 4 * s2 * (s1 - s2) / N ** 2
    return C, E, math.sqrt(2.0 / (s1 - s2))


def lattice_closed_forms(sqrt_n: int, case: str) -> AsymptoticPrediction:
    """Leading-order lambda, t_opt, p_succ for the adjacent ``(1, 0)`` and
    antipodal ``(s/2, s/2)`` marked pairs, with c taken from
    :func:`c_estimate` at the same size."""
    N = sqrt_n * sqrt_n
    c = c_estimate(sqrt_n)
    cnl = c * N * math.log(N)
    if case == "adjacent":
        return AsymptoticPrediction.from_lambda(math.sqrt(2.0 / cnl), 1.0 / (4 * c * math.log(N)),
                                                "lattice_adjacent")
    if case == "antipodal":
        if sqrt_n % 2:
            raise OddSideForAntipodal(f"antipodal pair needs an even side, got {sqrt_n}")
        return AsymptoticPrediction.from_lambda(2.0 / math.sqrt(cnl), 1.0 / (2 * c * math.log(N)),
                                                "lattice_antipodal")
    raise ValueError(f"unknown lattice case {case!r}")


# -- hypercube ----------------------------------------------------------

def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def digamma_plus_gamma(v: int) -> float:
    """``psi(v + 1) + gamma`` via scipy; equals ``H_v`` for integer v."""
    return float(scipy.special.digamma(v + 1) + np.euler_gamma)


@lru_cache(maxsize=None)
def fubini(k: int) -> int:
    """Ordered Bell number via ``a_k = sum_{j=1..k} C(k, j) a_{k-j}``."""
    if k == 0:
        return 1
    return sum(math.comb(k, j) * fubini(k - j) for j in range(1, k + 1))


def fubini_series(k: int, terms: int = 400) -> float:
    """``a_k = (1/2) sum_i i^k / 2^i`` summed directly (independent check)."""
    return 0.5 * math.fsum(i ** k / 2.0 ** i for i in range(terms))


def _inverse_weight_sum(n: int) -> Fraction:
    """``sum_{k=1..n} C(n, k) / k`` (the sum of ``1/|k|`` over nonzero n-bit k)."""
    return sum((Fraction(math.comb(n, k), k) for k in range(1, n + 1)), Fraction(0))


def lemma_b2_rhs_exact(n: int, v: int) -> Fraction:
    """``C(n,v)^-1 sum_{k=1..n-v} C(n, v+k)/k - H_v``."""
    if not 1 <= v <= n:
        raise ValueError(f"weight v={v} outside [1, {n}]")
    tail = sum((Fraction(math.comb(n, v + k), k) for k in range(1, n - v + 1)), Fraction(0))
    return tail / math.comb(n, v) - harmonic(v)


def signed_inverse_weight_sum(n: int, v: int) -> Fraction:
    """``sum_{k != 0} (-1)^(k.v) / |k|`` for any v of weight ``v``, as
    ``sum_w K_w(v; n) / w``."""
    table = krawtchouk_table(n)
    return sum((Fraction(table[w][v], w) for w in range(1, n + 1)), Fraction(0))


def signed_inverse_weight_sum_brute(n: int, v_vec: int) -> float:
    """Same sum by enumeration over all ``2^n - 1`` nonzero vectors."""
    ks = np.arange(1, 1 << n, dtype=np.int64)
    weights = np.zeros_like(ks)
    parity = np.zeros_like(ks)
    masked = ks & v_vec
    for bit in range(n):
        weights += (ks >> bit) & 1
        parity ^= (masked >> bit) & 1
    terms = np.where(parity == 1, -1.0, 1.0) / weights
    return math.fsum(terms.tolist())


def lemma_b1_check(n: int, truncation: int = FUBINI_TRUNCATION):
    """Return ``(lhs, rhs)`` of the ordered-Bell expansion of
    ``(n / 2^n) sum C(n,k)/k`` truncated after ``a_truncation / n^truncation``."""
    if not 1 <= n <= 60:
        raise ValueError("lemma B1 check supports 1 <= n <= 60")
    lhs = Fraction(n, 2 ** n) * _inverse_weight_sum(n)
    series = sum((Fraction(fubini(k), n ** k) for k in range(truncation + 1)), Fraction(0))
    rhs = 2 * series - Fraction(n, 2 ** n) * (harmonic(n) + Fraction(2, n))
    return float(lhs), float(rhs)


def lemma_b1_bound(n: int, truncation: int = FUBINI_TRUNCATION) -> float:
    """Acceptance bound ``10 a_(K+1) / n^(K+1)`` on the truncation gap."""
    return 10.0 * fubini(truncation + 1) / n ** (truncation + 1)


def lemma_b1_gap(n: int, truncation: int = FUBINI_TRUNCATION) -> float:
    lhs = Fraction(n, 2 ** n) * _inverse_weight_sum(n)
    series = sum((Fraction(fubini(k), n ** k) for k in range(truncation + 1)), Fraction(0))
    rhs = 2 * series - Fraction(n, 2 ** n) * (harmonic(n) + Fraction(2, n))
    return abs(float(lhs - rhs))


def lemma_b2_check(n: int, v: int, mode: str = "fast"):
    """Return ``(lhs, rhs)`` of the digamma identity for weight ``v``.

    ``mode='brute'`` enumerates all ``2^n`` vectors (n <= 20); ``'fast'``
    uses the Krawtchouk-weighted sum.  The rhs uses scipy's digamma.
    """
    if not 1 <= v <= n:
        raise ValueError(f"weight v={v} outside [1, {n}]")
    if mode == "brute":
        if n > 20:
            raise ValueError("brute-force lemma B2 limited to n <= 20")
        lhs = signed_inverse_weight_sum_brute(n, (1 << v) - 1)
    elif mode == "fast":
        lhs = float(signed_inverse_weight_sum(n, v))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    tail = sum((Fraction(math.comb(n, v + k), k) for k in range(1, n - v + 1)), Fraction(0))
    rhs = float(tail / math.comb(n, v)) - digamma_plus_gamma(v)
    return lhs, rhs


def _weight(v0) -> int:
    if isinstance(v0, (tuple, list, np.ndarray)):
        return int(sum(int(b) for b in v0))
    return int(v0).bit_count()


def hypercube_sums(n: int, v0) -> HypercubeSums:
    """``S_odd``, ``S_even`` from their sum (binomial) and difference
    (digamma identity), in exact arithmetic; never enumerates ``2^n``."""
    v = _weight(v0)
    if v == 0:
        raise ZeroVector("second marked vertex must be nonzero")
    N = 2 ** n
    total = Fraction(n, N) * _inverse_weight_sum(n)
    diff = Fraction(n, N) * lemma_b2_rhs_exact(n, v)
    s_even = (total + diff) / 2
    s_odd = (total - diff) / 2
    label = int(v0) if not isinstance(v0, (tuple, list, np.ndarray)) else sum(int(b) << i for i, b in enumerate(v0))
    return HypercubeSums(S_odd=float(s_odd), S_even=float(s_even), v0=label)


def hypercube_sums_brute(n: int, v0: int) -> HypercubeSums:
    ks = np.arange(1, 1 << n, dtype=np.int64)
    weights = np.zeros_like(ks)
    parity = np.zeros_like(ks)
    for bit in range(n):
        weights += (ks >> bit) & 1
        parity ^= ((ks & v0) >> bit) & 1
    inv = 1.0 / weights
    scale = n / 2.0 ** n
    return HypercubeSums(
        S_odd=scale * math.fsum(inv[parity == 1].tolist()),
        S_even=scale * math.fsum(inv[parity == 0].tolist()),
        v0=int(v0),
    )


def hypercube_series_coefficients(n: int, v0) -> tuple:
    """``(C, E, lambda)`` with ``C = -4 S_odd/N``, ``E = S_odd S_even``."""
    sums = hypercube_sums(n, v0)
    C = -4 * sums.S_odd / 2 ** n
    E = sums.S_odd * sums.S_even
    return C, E, math.sqrt(-C / E)


def hypercube_m2_prediction(n: int) -> AsymptoticPrediction:
    N = 2.0 ** n
    return AsymptoticPrediction.from_lambda(2.0 / math.sqrt(N), 0.5, "hypercube_m2")


def conjecture_prediction(n: int, m: int) -> AsymptoticPrediction:
    """``t_opt = (pi / (2 sqrt 2)) sqrt(N / m)``, success probability 1/2."""
    if m < 1:
        raise ValueError("need at least one marked vertex")
    t = math.pi / (2 * math.sqrt(2)) * math.sqrt(2.0 ** n / m)
    return AsymptoticPrediction(math.pi / (2 * t), t, 0.5, "hypercube_conjecture")


CONJECTURE_RESCALED_T = math.pi / (2 * math.sqrt(2))

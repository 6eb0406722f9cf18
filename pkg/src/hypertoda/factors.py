"""Gamma-product prefactors and the limit scaling data.

Everything is accumulated as a sum of log-Gamma terms and logs of positive
bases, then exponentiated once.  A zero coming from a denominator pole is
represented in log space as ``-inf``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleError, ZeroByPole
from .rootsystem import RootSystem, WeylElement
from .series import as_character, chamber_point, multiplicity_vector
from .specfun import log_gamma, log_gamma_ratio

LOG_ZERO = complex(-math.inf, 0.0)


def _exp(logv: complex) -> complex:
    return 0j if logv.real == -math.inf else cmath.exp(logv)


def log_c_tilde(rs: RootSystem, lam, k) -> complex:
    """log of prod_alpha Gamma((lambda, alpha^vee)) / Gamma((lambda, alpha^vee) + k_alpha)."""
    kvec = multiplicity_vector(rs, k)
    total = 0j
    zero = False
    for root, p, kr in zip(rs.positive_roots, rs.root_pairings(lam), kvec):
        try:
            total += log_gamma_ratio(p, p + kr)
        except ZeroByPole:
            zero = True
        except PoleError:
            raise PoleError(
                f"c-function pole: (lambda, alpha^vee) = {p} for alpha = {tuple(root)}",
                f"alpha={tuple(int(v) for v in root)}",
            ) from None
    return LOG_ZERO if zero else total


def c_tilde(rs: RootSystem, lam, k) -> complex:
    return _exp(log_c_tilde(rs, lam, k))


def log_c_function(rs: RootSystem, lam, k) -> complex:
    """c(lambda, k) = c~(lambda, k) / c~(rho(k), k)."""
    kvec = multiplicity_vector(rs, k)
    return log_c_tilde(rs, lam, kvec) - log_c_tilde(rs, rs.rho(kvec), kvec)


def c_function(rs: RootSystem, lam, k) -> complex:
    return _exp(log_c_function(rs, lam, k))


def log_c_bold_tilde(rs: RootSystem, lam) -> complex:
    return log_c_tilde(rs, lam, 0.5)


def c_bold_tilde(rs: RootSystem, lam) -> complex:
    """Harish-Chandra c~ of the split group: c~ with k = 1/2."""
    return c_tilde(rs, lam, 0.5)


def c_bold(rs: RootSystem, lam) -> complex:
    return _exp(log_c_bold_tilde(rs, lam) - log_c_bold_tilde(rs, rs.rho()))


def log_f_factor(rs: RootSystem, lam) -> complex:
    """log prod_alpha ((alpha,alpha)/2)^{(lambda,alpha^vee)/2} Gamma((lambda,alpha^vee) + 1/2)."""
    total = 0j
    for root, p, norm in zip(rs.positive_roots, rs.root_pairings(lam), rs.root_norms):
        try:
            total += 0.5 * p * math.log(norm / 2.0) + log_gamma(p + 0.5)
        except PoleError:
            raise PoleError(
                f"f pole: (lambda, alpha^vee) + 1/2 = {p + 0.5} for alpha = {tuple(root)}",
                f"alpha={tuple(int(v) for v in root)}",
            ) from None
    return total


def f_factor(rs: RootSystem, lam) -> complex:
    return cmath.exp(log_f_factor(rs, lam))


def log_m_simple(rs: RootSystem, i: int, lam, l2: float) -> complex:
    """log M(s_i, lambda, psi) for the simple root alpha_i of B."""
    p = complex(np.asarray(lam)[i])
    base = 2.0 * l2 / float(rs.simple_norms[i])
    try:
        return p * math.log(base) + log_gamma_ratio(0.5 - p, 0.5 + p)
    except ZeroByPole:
        return LOG_ZERO


def log_m_intertwiner(rs: RootSystem, w: WeylElement, lam, psi=None) -> complex:
    """log M(w, lambda, psi) by recursion along the reduced word of ``w``.

    With ``w = w' s_i`` the cocycle gives
    ``M(w' s_i, lambda) = M(s_i, lambda) M(w', s_i lambda)``.
    """
    chi = as_character(rs, psi)
    chi.require_nondegenerate()
    l2 = tuple(v * v for v in chi.l)
    return _log_m_word(rs, w.word, tuple(complex(v) for v in np.asarray(lam, dtype=complex)), l2)


@lru_cache(maxsize=4096)
def _log_m_word(rs: RootSystem, word: tuple[int, ...], lam: tuple, l2: tuple) -> complex:
    total = 0j
    cur = np.array(lam, dtype=complex)
    for pos in range(len(word) - 1, -1, -1):
        i = word[pos]
        try:
            term = log_m_simple(rs, i, cur, l2[i])
        except PoleError as exc:
            raise PoleError(f"{exc.detail} at word position {pos}", f"word[{pos}]") from None
        if term.real == -math.inf:
            return LOG_ZERO
        total += term
        cur = rs.weight_reflection(i) @ cur
    return total


def m_intertwiner(rs: RootSystem, w: WeylElement, lam, psi=None) -> complex:
    return _exp(log_m_intertwiner(rs, w, lam, psi))


def m_by_word(rs: RootSystem, word, lam, psi=None) -> complex:
    """M evaluated along an arbitrary (reduced) word."""
    chi = as_character(rs, psi)
    l2 = tuple(v * v for v in chi.l)
    return _exp(_log_m_word(rs, tuple(word), tuple(complex(v) for v in np.asarray(lam, dtype=complex)), l2))


@dataclass(frozen=True)
class ScalingData:
    """k_M and the map a -> a_M of the limit transition."""

    rs: RootSystem
    M: float
    k: np.ndarray

    def shift(self, x) -> np.ndarray:
        return a_shifted(self.rs, x, self.M)

    @property
    def log_gamma_k(self) -> float:
        """sum over R_+ of log Gamma(k_M(alpha))."""
        return float(sum(math.lgamma(v) for v in self.k))


def k_of_M(norm: float, M: float) -> float:
    """Positive root of k (k - 1) norm = 2 e^{2M}."""
    return 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * math.exp(2.0 * M) / norm))


def scaling_data(rs: RootSystem, M: float) -> ScalingData:
    if not M > 0:
        raise ValueError("M must be positive")
    k = np.array([k_of_M(float(n), M) for n in rs.root_norms])
    k.setflags(write=False)
    return ScalingData(rs, float(M), k)


def a_shifted(rs: RootSystem, x, M: float) -> np.ndarray:
    """Coordinates of a_M, log a_M = w0 log a + M rho^vee.

    (alpha_i, w0 H) = (w0 alpha_i, H), and (alpha_i, rho^vee) = 2 on B.
    May leave the positive chamber for small M; callers check.
    """
    x = np.asarray(x, dtype=float)
    shift = np.array([float(rs.rho_vee_pairing(e)) for e in np.eye(rs.rank, dtype=np.int64)])
    return rs.longest.matrix.T @ x + M * shift


def shift_for_general_l(rs: RootSystem, psi, x) -> np.ndarray:
    """Map a' to a with alpha(log a) = alpha(log a') - log l_alpha^2 (alpha in B).

    In the coordinates a' the potential 2 sum l_alpha^2 e^alpha(log a) becomes
    2 sum e^alpha(log a'), so phi(a) = Psi_T(lambda; a') solves the general-l
    Toda equation.
    """
    chi = as_character(rs, psi)
    chi.require_nondegenerate()
    x = np.asarray(x, dtype=float)
    return x - np.log(np.square(chi.l))


def scaled_c_limit(rs: RootSystem, lam, M: float) -> tuple[complex, complex]:
    """(lhs, rhs) of the c-function asymptotics.

    lhs = e^{(lambda, rho^vee) M} prod Gamma(k_M(alpha)) c~(lambda, k_M),
    rhs = f(lambda) c~_bold(lambda).
    """
    sd = scaling_data(rs, M)
    lhs = rs.rho_vee_inner(lam) * M + sd.log_gamma_k + log_c_tilde(rs, lam, sd.k)
    rhs = log_f_factor(rs, lam) + log_c_bold_tilde(rs, lam)
    return _exp(lhs), _exp(rhs)


__all__ = [
    "ScalingData", "a_shifted", "c_bold", "c_bold_tilde", "c_function", "c_tilde",
    "chamber_point", "f_factor", "k_of_M", "log_c_bold_tilde", "log_c_function",
    "log_c_tilde", "log_f_factor", "log_m_intertwiner", "m_by_word", "m_intertwiner",
    "scaled_c_limit", "scaling_data", "shift_for_general_l",
]

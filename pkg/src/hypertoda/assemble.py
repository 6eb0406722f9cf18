"""Weyl-sum assemblies, limit sweeps and finite-difference Hamiltonians.

Every Weyl term is carried as ``(log coefficient, SeriesValue)`` and only
exponentiated when terms are added, so factors such as ``Gamma(k_M)`` or
``delta(k_M)^{1/2}`` never appear on their own.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, NumericalError
from .factors import (
    a_shifted,
    log_c_bold_tilde,
    log_c_function,
    log_c_tilde,
    log_f_factor,
    log_m_intertwiner,
    scaling_data,
)
from .rootsystem import RootSystem, build_root_system
from .series import (
    CHAMBER_EPS,
    SeriesValue,
    as_character,
    chamber_point,
    multiplicity_vector,
    phi,
    psi_cm,
    psi_toda,
    scaled_psi_cm,
)
from .specfun import bessel_k

REL_FLOOR = 1e-300
N_MAX = 80
N_STEP = 10


@dataclass(frozen=True)
class WeylSum:
    """sum_w exp(log_coeff_w) * series_w, kept term by term."""

    terms: tuple[tuple[complex, SeriesValue], ...]

    @property
    def value(self) -> complex:
        total = 0j
        for logc, sv in self.terms:
            if logc.real == -math.inf:
                continue
            total += cmath.exp(logc + sv.log_scale) * sv.total
        return total

    @property
    def tail(self) -> float:
        t = 0.0
        for logc, sv in self.terms:
            if logc.real == -math.inf:
                continue
            t += math.exp((logc + sv.log_scale).real) * sv.tail
        return t


def _weyl_orbit(rs: RootSystem, lam) -> list[np.ndarray]:
    lam = np.asarray(lam, dtype=complex)
    return [rs.act(w, lam) for w in rs.weyl_group]


def _wrap(exc: NumericalError, where: str) -> NumericalError:
    exc.detail = f"{exc.detail} [{where}]"
    exc.args = (exc.detail,)
    return exc


# -- hypergeometric function -----------------------------------------------

def hypergeom_f_sum(rs: RootSystem, lam, k, x, N: int) -> WeylSum:
    x = chamber_point(rs, x)
    kvec = multiplicity_vector(rs, k)
    terms = []
    for w, wl in zip(rs.weyl_group, _weyl_orbit(rs, lam)):
        try:
            logc = log_c_function(rs, wl, kvec)
            if logc.real == -math.inf:
                continue
            terms.append((logc, phi(rs, wl, kvec, x, N)))
        except NumericalError as exc:
            raise _wrap(exc, f"w={w!r}") from None
    return WeylSum(tuple(terms))


def hypergeom_f(rs: RootSystem, lam, k, x, N: int) -> complex:
    """F(lambda, k; a) = sum_w c(w lambda, k) Phi(w lambda, k; a)."""
    return hypergeom_f_sum(rs, lam, k, x, N).value


def generic_direction(rank: int) -> np.ndarray:
    base = np.array([1.0, 0.6180339887498949, 0.41421356237309515, 0.7320508075688772])
    d = base[:rank]
    return d / np.linalg.norm(d)


def hypergeom_f_mean(rs: RootSystem, lam, k, x, N: int,
                     radius: float = 0.05, nodes: int = 16) -> complex:
    """F at a possibly non-generic lambda via the mean value over a small circle.

    F is entire in lambda, so the average of F(lambda + r e^{i theta} d) over
    equispaced theta reproduces F(lambda) up to Taylor terms of order
    ``nodes``.  The direction d is fixed and irrational so that the circle
    avoids resonances and c-function poles.
    """
    lam = np.asarray(lam, dtype=complex)
    d = generic_direction(rs.rank)
    vals = [
        hypergeom_f(rs, lam + radius * cmath.exp(2j * math.pi * (j + 0.5) / nodes) * d, k, x, N)
        for j in range(nodes)
    ]
    return complex(np.mean(vals))


# -- Whittaker function ----------------------------------------------------

def whittaker_sum(rs: RootSystem, lam, x, N: int, psi=None, tol: float | None = 1e-8) -> WeylSum:
    """Terms M(w0 w, lambda) c_bold(w0 w lambda) Psi_T(w lambda; a) of the Whittaker expansion
    (without the a^rho factor)."""
    chi = as_character(rs, psi)
    chi.require_nondegenerate()
    lam = np.asarray(lam, dtype=complex)
    w0 = rs.longest
    log_rho = log_c_bold_tilde(rs, rs.rho())
    index = {w.key(): w for w in rs.weyl_group}
    terms = []
    for w in rs.weyl_group:
        v = index[(w0.matrix @ w.matrix).tobytes()]
        try:
            logc = (log_m_intertwiner(rs, v, lam, chi)
                    + log_c_bold_tilde(rs, rs.act(v, lam)) - log_rho)
            if logc.real == -math.inf:
                continue
            terms.append((logc, psi_toda(rs, rs.act(w, lam), x, N, chi, tol)))
        except NumericalError as exc:
            raise _wrap(exc, f"w={w!r}") from None
    return WeylSum(tuple(terms))


def whittaker_w(rs: RootSystem, lam, x, N: int, psi=None, tol: float | None = 1e-8) -> complex:
    """W(lambda, psi; a) = a^rho sum_w M(w0 w, lambda, psi) c(w0 w lambda) Psi_T(w lambda, psi; a)."""
    x = np.asarray(x, dtype=float)
    s = whittaker_sum(rs, lam, x, N, psi, tol)
    return cmath.exp(rs.evaluate(rs.rho(), x)) * s.value


def asymptotic_sum(rs: RootSystem, lam, x, N: int, tol: float | None = 1e-8) -> WeylSum:
    """sum_w f(w lambda) c~_bold(w lambda) Psi_T(w0 w lambda; a)."""
    lam = np.asarray(lam, dtype=complex)
    terms = []
    for wl in _weyl_orbit(rs, lam):
        logc = log_f_factor(rs, wl) + log_c_bold_tilde(rs, wl)
        terms.append((logc, psi_toda(rs, rs.act(rs.longest, wl), x, N, None, tol)))
    return WeylSum(tuple(terms))


def main_rhs(rs: RootSystem, lam, x, N: int) -> complex:
    """c~_bold(rho) f(lambda) a^{-rho} W(lambda, psi_1; a)."""
    x = np.asarray(x, dtype=float)
    logp = log_c_bold_tilde(rs, rs.rho()) + log_f_factor(rs, lam) - rs.evaluate(rs.rho(), x)
    return cmath.exp(logp) * whittaker_w(rs, lam, x, N)


# -- limit sweeps ----------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    M: float
    lhs: complex
    rhs: complex
    rel_err: float
    tail_est: float
    trunc: int
    in_chamber: bool = True


@dataclass
class SweepResult:
    rows: list[SweepRow]
    meta: dict = field(default_factory=dict)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.rel_err for r in self.rows if r.in_chamber])

    @property
    def Ms(self) -> np.ndarray:
        return np.array([r.M for r in self.rows if r.in_chamber])

    def slope(self) -> float:
        """Least-squares slope of log(rel_err) against M."""
        return float(np.polyfit(self.Ms, np.log(self.errors), 1)[0])


def rel_error(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(rhs), REL_FLOOR)


def _adaptive(evaluate: Callable[[int], tuple[complex, float, complex, float]], N: int):
    """Grow N until the series tails sit well below the observed gap."""
    n = N
    while True:
        lhs, lt, rhs, rt = evaluate(n)
        gap = abs(lhs - rhs)
        tail = lt + rt
        if tail <= 0.1 * gap or tail <= 1e-15 * max(abs(lhs), abs(rhs)) or n >= N_MAX:
            return lhs, rhs, tail, n
        n = min(n + N_STEP, N_MAX)


def _cm_limit_lhs(rs, lam, M, x, xm, n, route):
    if route == "scaled":
        sv = scaled_psi_cm(rs, lam, M, x, n)
        return sv.value, math.exp(sv.log_scale.real) * sv.tail
    sd = scaling_data(rs, M)
    sv = psi_cm(rs, lam, sd.k, xm, n)
    logs = sv.log_scale - rs.rho_vee_inner(lam) * M
    return cmath.exp(logs) * sv.total, math.exp(logs.real) * sv.tail


def xm_source(rs: RootSystem, xm, M: float) -> np.ndarray:
    """Invert a -> a_M (w0 is an involution)."""
    shift = a_shifted(rs, np.zeros(rs.rank), M)
    return rs.longest.matrix.T @ (np.asarray(xm, dtype=float) - shift)


def limit_prop22(rs: RootSystem, lam, x, M_list: Iterable[float], N: int = 20,
                 route: str = "delta-phi") -> SweepResult:
    """Rows comparing exp(-(lambda, rho^vee) M) Psi_CM(lambda, k_M; a_M) with Psi_T(w0 lambda; a).

    ``route="scaled"`` evaluates the left side from the rescaled recurrence
    instead of delta^{1/2} Phi.
    """
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=float)
    target = rs.act(rs.longest, lam)
    rows = []
    for M in sorted(float(m) for m in M_list):
        xm = a_shifted(rs, x, M)
        if np.any(xm <= CHAMBER_EPS):
            rows.append(SweepRow(M, complex("nan"), complex("nan"), math.nan, math.nan, N, False))
            continue

        def evaluate(n, M=M, xm=xm):
            lhs, lt = _cm_limit_lhs(rs, lam, M, x, xm, n, route)
            sv = psi_toda(rs, target, x, n, tol=None)
            return lhs, lt, sv.value, math.exp(sv.log_scale.real) * sv.tail

        lhs, rhs, tail, n = _adaptive(evaluate, N)
        rows.append(SweepRow(M, lhs, rhs, rel_error(lhs, rhs), tail, n))
    meta = {"root_system": rs.label, "lambda": lam.tolist(), "point": x.tolist(),
            "trunc": N, "route": route}
    return SweepResult(rows, meta)


def main_lhs_sum(rs: RootSystem, lam, x, M: float, N: int) -> WeylSum:
    """Factored left side of the main limit at a given M.

    sum_w [e^{(w lambda, rho^vee) M} prod Gamma(k_M) c~(w lambda, k_M)]
          [e^{-(w lambda, rho^vee) M} Psi_CM(w lambda, k_M; a_M)]
    """
    sd = scaling_data(rs, M)
    xm = chamber_point(rs, a_shifted(rs, x, M))
    terms = []
    for w, wl in zip(rs.weyl_group, _weyl_orbit(rs, lam)):
        shift = rs.rho_vee_inner(wl) * M
        try:
            logc = shift + sd.log_gamma_k + log_c_tilde(rs, wl, sd.k)
            if logc.real == -math.inf:
                continue
            sv = psi_cm(rs, wl, sd.k, xm, N)
        except NumericalError as exc:
            raise _wrap(exc, f"w={w!r}") from None
        terms.append((logc, SeriesValue(sv.log_scale - shift, sv.total, sv.tail, N)))
    return WeylSum(tuple(terms))


# Descriptive name for the CM-to-Toda eigenfunction sweep.
limit_cm_toda = limit_prop22


def limit_main(rs: RootSystem, lam, x, M_list: Iterable[float], N: int = 20) -> SweepResult:
    """Rows comparing the factored hypergeometric side with c~_bold(rho) f(lambda) a^{-rho} W."""
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=float)
    rows = []
    for M in sorted(float(m) for m in M_list):
        xm = a_shifted(rs, x, M)
        if np.any(xm <= CHAMBER_EPS):
            rows.append(SweepRow(M, complex("nan"), complex("nan"), math.nan, math.nan, N, False))
            continue

        def evaluate(n, M=M):
            left = main_lhs_sum(rs, lam, x, M, n)
            logp = (log_c_bold_tilde(rs, rs.rho()) + log_f_factor(rs, lam))
            right = whittaker_sum(rs, lam, x, n, tol=None)
            scale = abs(cmath.exp(logp))
            return left.value, left.tail, cmath.exp(logp) * right.value, scale * right.tail

        lhs, rhs, tail, n = _adaptive(evaluate, N)
        rows.append(SweepRow(M, lhs, rhs, rel_error(lhs, rhs), tail, n))
    meta = {"root_system": rs.label, "lambda": lam.tolist(), "point": x.tolist(), "trunc": N}
    return SweepResult(rows, meta)


def rank_one_limit(lam_hat: complex, t: float, M: float, N: int = 40) -> tuple[complex, complex]:
    """A_1 form of the main limit.

    lhs = k^{-1/2} 2^{-k} sinh^k(M - t) F(lambda, k; a_{-t+M}) with k = k_M and
    alpha(log a_{-t+M}) = 2 (M - t); rhs = K_{lambda_hat}(e^t) / sqrt(pi).
    With the root normalization used here ((alpha, alpha) = 8 on R) the
    Macdonald argument is e^t.
    """
    rs = build_root_system("A", 1)
    sd = scaling_data(rs, M)
    k = float(sd.k[0])
    xm = np.array([2.0 * (M - t)])
    s = hypergeom_f_sum(rs, [lam_hat], k, xm, N)
    pref = -0.5 * math.log(k) - k * math.log(2.0) + k * math.log(math.sinh(M - t))
    lhs = sum(cmath.exp(pref + logc + sv.log_scale) * sv.total for logc, sv in s.terms)
    rhs = bessel_k(lam_hat, math.exp(t)) / math.sqrt(math.pi)
    return lhs, rhs


# -- finite-difference Hamiltonians ----------------------------------------

def cm_potential(rs: RootSystem, k, x) -> float:
    """sum_alpha k_alpha (1 - k_alpha) (alpha, alpha) / (4 sinh^2(alpha(log a) / 2))."""
    kvec = multiplicity_vector(rs, k)
    vals = rs.root_values(x)
    if np.any(vals <= CHAMBER_EPS):
        raise DomainError("Calogero-Moser potential is singular off the chamber", "point")
    return float(np.sum(kvec * (1.0 - kvec) * rs.root_norms / (4.0 * np.sinh(0.5 * vals) ** 2)))


def toda_potential(rs: RootSystem, x, psi=None) -> float:
    """-2 sum_{alpha in B} l_alpha^2 e^{alpha(log a)}."""
    chi = as_character(rs, psi)
    return float(-2.0 * np.sum(np.square(chi.l) * np.exp(np.asarray(x, dtype=float))))


def laplacian_fd(rs: RootSystem, fn: Callable[[np.ndarray], complex], x, h: float) -> complex:
    """Central-difference Laplacian along an orthonormal frame, in root coordinates."""
    x = np.asarray(x, dtype=float)
    if not h > 0:
        raise ValueError("step must be positive")
    f0 = complex(fn(x))
    total = 0j
    for v in rs.cholesky_directions().T:
        total += complex(fn(x + h * v)) - 2.0 * f0 + complex(fn(x - h * v))
    return total / (h * h)


def apply_hamiltonian_fd(rs: RootSystem, which: str, fn: Callable[[np.ndarray], complex], x,
                         h: float = 1e-3, k=None, psi=None) -> complex:
    """H applied to ``fn`` at ``x``: FD Laplacian plus the exact potential.

    ``which`` is ``"cm"`` (needs ``k``) or ``"toda"`` (optional ``psi``).
    """
    x = np.asarray(x, dtype=float)
    if which == "cm":
        if k is None:
            raise ValueError("H_CM needs a multiplicity")
        for v in rs.cholesky_directions().T:
            for y in (x + h * v, x - h * v):
                if np.any(rs.root_values(y) <= CHAMBER_EPS):
                    raise DomainError("finite-difference stencil leaves the positive chamber", "point")
        pot = cm_potential(rs, k, x)
    elif which == "toda":
        pot = toda_potential(rs, x, psi)
    else:
        raise ValueError(f"unknown Hamiltonian {which!r}")
    return laplacian_fd(rs, fn, x, h) + pot * complex(fn(x))


def eigen_residual(rs: RootSystem, which: str, fn, lam, x, h: float = 1e-3, k=None, psi=None) -> float:
    """|H fn - (lambda, lambda) fn| / |(lambda, lambda) fn| at ``x``."""
    ev = rs.inner(lam, lam)
    f0 = complex(fn(np.asarray(x, dtype=float)))
    hf = apply_hamiltonian_fd(rs, which, fn, x, h, k, psi)
    return abs(hf - ev * f0) / abs(ev * f0)


def hamiltonian_limit_check(rs: RootSystem, lam, x, M_list: Sequence[float], h: float = 1e-3) -> SweepResult:
    """H_CM(k_M) applied to phi(a_M) versus H_T phi(a) for phi(a) = e^{lambda(log a)}."""
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=float)

    def plane(y):
        return cmath.exp(rs.evaluate(lam, y))

    rhs = apply_hamiltonian_fd(rs, "toda", plane, x, h)
    rows = []
    for M in sorted(float(m) for m in M_list):
        sd = scaling_data(rs, M)
        xm = a_shifted(rs, x, M)

        def pulled(y, M=M):
            return plane(xm_source(rs, y, M))

        lhs = apply_hamiltonian_fd(rs, "cm", pulled, xm, h, k=sd.k)
        rows.append(SweepRow(M, lhs, rhs, rel_error(lhs, rhs), 0.0, 0))
    return SweepResult(rows, {"root_system": rs.label, "lambda": lam.tolist(),
                              "point": x.tolist(), "h": h})

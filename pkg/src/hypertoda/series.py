"""Series engines for the two eigenfunction families.

* Harish-Chandra series ``Phi(lambda, k; a)`` with descending exponents
  ``lambda - rho(k) - mu`` and its conjugate ``Psi_CM = delta^{1/2} Phi``.
* Toda series ``Psi_T(lambda; a)`` with ascending exponents ``lambda + mu``.

Coefficient tables are indexed by the lattice points of ``Q_+`` up to a
height ``N`` (see :func:`hypertoda.rootsystem.qplus_array`) and filled shell
by shell from their recurrences.  Each height shell is stored relative to its
own scale ``exp(shell_log[n])``, chosen while solving, so coefficients that
grow like ``k^{2n}`` or decay like ``1/n!^2`` stay representable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import AccuracyError, DegenerateCharacterError, DomainError, ResonanceError
from .rootsystem import RootSystem, qplus_array

CHAMBER_EPS = 1e-12


# -- parameter types -------------------------------------------------------

def multiplicity_vector(rs: RootSystem, k) -> np.ndarray:
    """k_alpha for every alpha in R_+.

    ``k`` is a scalar, a mapping ``{"short": ks, "long": kl}``, a mapping keyed
    by the squared length of the R-root, or a per-root sequence (checked for
    W-invariance, i.e. constant on root lengths).
    """
    norms = rs.root_norms
    if isinstance(k, Mapping):
        lengths = sorted(set(int(n) for n in norms))
        table = {}
        for key, val in k.items():
            if key == "short":
                table[lengths[0]] = float(val)
            elif key == "long":
                table[lengths[-1]] = float(val)
            else:
                table[int(key)] = float(val)
        try:
            vec = np.array([table[int(n)] for n in norms], dtype=float)
        except KeyError as exc:
            raise ValueError(f"multiplicity missing for root length {exc}") from None
    elif np.ndim(k) == 0:
        vec = np.full(len(norms), float(k))
    else:
        vec = np.asarray(k, dtype=float)
        if vec.shape != (len(norms),):
            raise ValueError(f"expected {len(norms)} multiplicities, got {vec.shape}")
        for n in set(norms):
            if np.ptp(vec[norms == n]) != 0:
                raise ValueError("multiplicity is not W-invariant")
    if np.any(vec < 0):
        raise ValueError("multiplicities must be non-negative")
    return vec


@dataclass(frozen=True)
class Character:
    """Unitary character data l_alpha per simple root of B."""

    l: tuple[float, ...]

    @classmethod
    def standard(cls, rs: RootSystem) -> "Character":
        return cls((1.0,) * rs.rank)

    @property
    def nondegenerate(self) -> bool:
        return all(v != 0 for v in self.l)

    def require_nondegenerate(self) -> None:
        if not self.nondegenerate:
            bad = [i + 1 for i, v in enumerate(self.l) if v == 0]
            raise DegenerateCharacterError(f"l_alpha = 0 for simple roots {bad}", "l")
        if any(v < 0 for v in self.l):
            raise DomainError("character parameters must be positive reals", "l")


def as_character(rs: RootSystem, psi) -> Character:
    if psi is None:
        return Character.standard(rs)
    if isinstance(psi, Character):
        c = psi
    else:
        c = Character(tuple(float(v) for v in psi))
    if len(c.l) != rs.rank:
        raise ValueError(f"need {rs.rank} character parameters")
    return c


def chamber_point(rs: RootSystem, x, require_chamber: bool = True) -> np.ndarray:
    """Validate simple-root coordinates x_alpha = alpha(log a)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (rs.rank,):
        raise ValueError(f"point needs {rs.rank} coordinates")
    if require_chamber and np.any(x <= CHAMBER_EPS):
        raise DomainError(f"point {x.tolist()} is not in the positive chamber", "point")
    return x


def resonance_tolerance(rs: RootSystem, lam) -> float:
    c = rs.coords(lam)
    norm2 = float(np.real(np.conj(c) @ rs.gram @ c))
    return 1e-8 * (1.0 + abs(norm2))


# -- coefficient tables ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class SeriesCoefficients:
    """Truncated coefficient table mu -> coefficient over Q_+.

    The true coefficient is ``values[i] * exp(shell_log[height(points[i])])``.
    """

    kind: str
    rs: RootSystem
    lam: tuple[complex, ...]
    params: tuple
    height: int
    points: np.ndarray
    values: np.ndarray
    shell_log: np.ndarray

    @property
    def heights(self) -> np.ndarray:
        return self.points.sum(axis=1)

    def index(self, mu) -> int:
        mu = np.asarray(mu)
        hits = np.nonzero(np.all(self.points == mu, axis=1))[0]
        if len(hits) == 0:
            raise KeyError(tuple(int(v) for v in mu))
        return int(hits[0])

    def coefficient(self, mu) -> complex:
        i = self.index(mu)
        return complex(self.values[i] * math.exp(self.shell_log[int(self.points[i].sum())]))

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        scale = np.exp(self.shell_log[self.heights])
        return {tuple(int(v) for v in p): complex(c) for p, c in zip(self.points, self.values * scale)}


@dataclass(frozen=True)
class Step:
    """One recurrence link mu <- mu - shift with a per-mu weight."""

    shift: np.ndarray
    weight: Callable[[np.ndarray], np.ndarray]


def _codes(points: np.ndarray, base: int) -> np.ndarray:
    radix = base ** np.arange(points.shape[1], dtype=np.int64)
    return points @ radix


def _solve(points: np.ndarray, steps: list[Step],
           denominators: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fill the table shell by shell; returns (scaled values, per-height log scale).

    ``points`` must be ordered by height with the origin first.
    """
    heights = points.sum(axis=1)
    n_max = int(heights.max()) if len(heights) else 0
    base = n_max + 1
    codes = _codes(points, base)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    values = np.zeros(len(points), dtype=complex)
    values[0] = 1.0
    shell_log = np.zeros(n_max + 1)
    shell_bounds = np.searchsorted(heights, np.arange(n_max + 2))
    parents = []
    for st in steps:
        ok = np.all(points >= st.shift, axis=1)
        pc = codes - _codes(st.shift[None, :], base)[0]
        pos = np.searchsorted(sorted_codes, np.where(ok, pc, 0))
        idx = np.where(ok, order[np.clip(pos, 0, len(order) - 1)], -1)
        parents.append((idx, st.weight(points), int(st.shift.sum())))
    for h in range(1, n_max + 1):
        lo, hi = shell_bounds[h], shell_bounds[h + 1]
        acc = np.zeros(hi - lo, dtype=complex)
        for idx, w, drop in parents:
            p = idx[lo:hi]
            m = p >= 0
            if np.any(m):
                rescale = math.exp(shell_log[h - drop] - shell_log[h - 1])
                acc[m] += w[lo:hi][m] * values[p[m]] * rescale
        acc /= denominators[lo:hi]
        peak = float(np.max(np.abs(acc))) if len(acc) else 0.0
        if peak > 0 and math.isfinite(peak):
            acc /= peak
            shell_log[h] = shell_log[h - 1] + math.log(peak)
        else:
            shell_log[h] = shell_log[h - 1]
        values[lo:hi] = acc
    if not np.all(np.isfinite(values)):
        raise AccuracyError("coefficient table overflowed", "trunc")
    values.setflags(write=False)
    shell_log.setflags(write=False)
    return values, shell_log


def _check_resonance(rs, lam, points, den, label):
    tol = resonance_tolerance(rs, lam)
    bad = np.nonzero(np.abs(den[1:]) <= tol)[0]
    if len(bad):
        mu = tuple(int(v) for v in points[bad[0] + 1])
        raise ResonanceError(
            f"{label}: |(2 lambda -/+ mu, mu)| <= {tol:.2e} at mu = {mu} (coefficients over B)",
            f"mu={mu}",
        )


def _key(lam) -> tuple[complex, ...]:
    return tuple(complex(v) for v in np.asarray(lam, dtype=complex).ravel())


@lru_cache(maxsize=512)
def _hc_table(rs: RootSystem, lam: tuple, k: tuple, height: int) -> SeriesCoefficients:
    lam_arr = np.array(lam, dtype=complex)
    kvec = np.array(k, dtype=float)
    points = qplus_array(rs.rank, height)
    gram = rs.gram
    mu_lam = rs.lattice_inner(lam_arr, points)
    mu_mu = np.einsum("ij,jk,ik->i", points, gram, points)
    den = 2.0 * mu_lam - mu_mu
    _check_resonance(rs, lam_arr, points, den, "Harish-Chandra series")
    shifted = lam_arr - rs.rho(kvec)
    steps = []
    for root, kr, norm in zip(rs.positive_roots, kvec, rs.root_norms):
        if kr == 0:
            continue
        base = complex(rs.lattice_inner(shifted, root))
        mu_root = points @ gram @ root
        for j in range(1, height // int(root.sum()) + 1):
            steps.append(Step(
                j * root,
                lambda pts, b=base, mr=mu_root, j=j, kr=kr, nr=norm: 2.0 * kr * (b - mr + j * nr),
            ))
    values, shell_log = _solve(points, steps, den)
    return SeriesCoefficients("harish-chandra", rs, lam, k, height, points, values, shell_log)


def hc_coefficients(rs: RootSystem, lam, k, N: int) -> SeriesCoefficients:
    """Coefficients Gamma_mu(lambda, k) of the Harish-Chandra series.

    Recurrence (from substituting the series into L(k)):
    ``(2 lambda - mu, mu) Gamma_mu = 2 sum_alpha k_alpha sum_j
    (lambda - rho(k) - mu + j alpha, alpha) Gamma_{mu - j alpha}``.
    """
    if N < 0:
        raise ValueError("truncation height must be non-negative")
    kvec = multiplicity_vector(rs, k)
    return _hc_table(rs, _key(lam), tuple(float(v) for v in kvec), int(N))


@lru_cache(maxsize=512)
def _toda_table(rs: RootSystem, lam: tuple, l2: tuple, height: int) -> SeriesCoefficients:
    lam_arr = np.array(lam, dtype=complex)
    points = qplus_array(rs.rank, height)
    mu_lam = rs.lattice_inner(lam_arr, points)
    mu_mu = np.einsum("ij,jk,ik->i", points, rs.gram, points)
    den = 2.0 * mu_lam + mu_mu
    _check_resonance(rs, lam_arr, points, den, "Toda series")
    eye = np.eye(rs.rank, dtype=np.int64)
    steps = [Step(eye[i], lambda pts, c=2.0 * l2[i]: np.full(len(pts), c)) for i in range(rs.rank)]
    values, shell_log = _solve(points, steps, den)
    return SeriesCoefficients("toda", rs, lam, l2, height, points, values, shell_log)


def toda_coefficients(rs: RootSystem, lam, N: int, psi=None) -> SeriesCoefficients:
    """Coefficients b_mu(lambda) of the Toda series.

    ``(2 lambda + mu, mu) b_mu = 2 sum_{alpha in B} l_alpha^2 b_{mu - alpha}``.
    """
    if N < 0:
        raise ValueError("truncation height must be non-negative")
    chi = as_character(rs, psi)
    chi.require_nondegenerate()
    return _toda_table(rs, _key(lam), tuple(v * v for v in chi.l), int(N))


@lru_cache(maxsize=256)
def _cm_table(rs: RootSystem, lam: tuple, k: tuple, height: int) -> SeriesCoefficients:
    lam_arr = np.array(lam, dtype=complex)
    kvec = np.array(k, dtype=float)
    points = qplus_array(rs.rank, height)
    mu_lam = rs.lattice_inner(lam_arr, points)
    mu_mu = np.einsum("ij,jk,ik->i", points, rs.gram, points)
    den = 2.0 * mu_lam - mu_mu
    _check_resonance(rs, lam_arr, points, den, "Calogero-Moser series")
    steps = []
    for root, kr, norm in zip(rs.positive_roots, kvec, rs.root_norms):
        coupling = kr * (1.0 - kr) * norm
        if coupling == 0:
            continue
        for j in range(1, height // int(root.sum()) + 1):
            steps.append(Step(j * root, lambda pts, c=coupling * j: np.full(len(pts), c)))
    values, shell_log = _solve(points, steps, den)
    return SeriesCoefficients("calogero-moser", rs, lam, k, height, points, values, shell_log)


def cm_coefficients(rs: RootSystem, lam, k, N: int) -> SeriesCoefficients:
    """Coefficients b_mu(lambda, k) of Psi_CM expanded directly from H_CM.

    ``(2 lambda - mu, mu) b_mu = sum_alpha k_alpha (1 - k_alpha) (alpha, alpha)
    sum_j j b_{mu - j alpha}``; an independent route to ``delta^{1/2} Phi``.
    """
    kvec = multiplicity_vector(rs, k)
    return _cm_table(rs, _key(lam), tuple(float(v) for v in kvec), int(N))


@lru_cache(maxsize=256)
def _scaled_cm_table(rs: RootSystem, lam: tuple, M: float, height: int) -> SeriesCoefficients:
    lam_t = rs.act(rs.longest, np.array(lam, dtype=complex))
    points = qplus_array(rs.rank, height)
    mu_lam = rs.lattice_inner(lam_t, points)
    mu_mu = np.einsum("ij,jk,ik->i", points, rs.gram, points)
    den = 2.0 * mu_lam + mu_mu
    _check_resonance(rs, lam_t, points, den, "scaled Calogero-Moser series")
    steps = []
    for root in rs.positive_roots:
        rv = float(rs.rho_vee_pairing(root))
        for j in range(1, height // int(root.sum()) + 1):
            c = 2.0 * j * math.exp((2.0 - j * rv) * M)
            steps.append(Step(j * root, lambda pts, c=c: np.full(len(pts), c)))
    values, shell_log = _solve(points, steps, den)
    return SeriesCoefficients("scaled-calogero-moser", rs, lam, (M,), height, points, values, shell_log)


def scaled_cm_coefficients(rs: RootSystem, lam, M: float, N: int) -> SeriesCoefficients:
    """Coefficients of the rescaled series of Psi_CM(lambda, k_M; a_M).

    ``(2 w0 lambda + mu, mu) b_mu = 2 sum_{alpha in R_+} sum_j
    exp((2 - j (alpha, rho^vee)) M) j b_{mu - j alpha}``; as ``M -> oo`` only
    simple roots with ``j = 1`` survive and the Toda recurrence for ``w0 lambda``
    is recovered.
    """
    return _scaled_cm_table(rs, _key(lam), float(M), int(N))


# -- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class SeriesValue:
    """``value = exp(log_scale) * total``; ``tail`` is in the units of ``total``."""

    log_scale: complex
    total: complex
    tail: float
    height: int

    @property
    def value(self) -> complex:
        return cmath.exp(self.log_scale) * self.total

    @property
    def rel_tail(self) -> float:
        return self.tail / abs(self.total) if self.total != 0 else math.inf

    @property
    def log_value(self) -> complex:
        return self.log_scale + cmath.log(self.total)


def shell_tail(shells: np.ndarray) -> float:
    """Tail estimate from the last height shell, extrapolated geometrically."""
    last = float(shells[-1])
    if len(shells) < 2 or last == 0.0:
        return last
    prev = float(shells[-2])
    if prev == 0.0:
        return last
    q = last / prev
    if q >= 1.0:
        return math.inf
    return last * max(1.0, q / (1.0 - q))


def sum_series(coeffs: SeriesCoefficients, x, sign: int) -> tuple[complex, float, np.ndarray]:
    """Sum ``coeffs_mu exp(sign * mu(log a))``; returns (total, tail, shells)."""
    x = np.asarray(x, dtype=float)
    heights = coeffs.heights
    expo = coeffs.shell_log[heights] + sign * (coeffs.points @ x)
    terms = coeffs.values * np.exp(expo)
    shells = np.bincount(heights, weights=np.abs(terms), minlength=coeffs.height + 1)
    return complex(np.sum(terms)), shell_tail(shells), shells


def phi(rs: RootSystem, lam, k, x, N: int) -> SeriesValue:
    """Harish-Chandra series Phi(lambda, k; a) at a point of the positive chamber."""
    x = chamber_point(rs, x)
    kvec = multiplicity_vector(rs, k)
    coeffs = hc_coefficients(rs, lam, kvec, N)
    total, tail, _ = sum_series(coeffs, x, -1)
    lead = rs.evaluate(np.asarray(lam, dtype=complex) - rs.rho(kvec), x)
    return SeriesValue(lead, total, tail, N)


def log_delta_half(rs: RootSystem, k, x) -> float:
    """log delta(k; a)^{1/2} = sum_alpha k_alpha log(2 sinh(alpha(log a) / 2))."""
    x = chamber_point(rs, x)
    kvec = multiplicity_vector(rs, k)
    vals = rs.root_values(x)
    if np.any(vals <= CHAMBER_EPS):
        raise DomainError("delta^{1/2} undefined off the positive chamber", "point")
    # log(e^{y/2} - e^{-y/2}) = y/2 + log(1 - e^{-y})
    return float(np.sum(kvec * (0.5 * vals + np.log1p(-np.exp(-vals)))))


def psi_cm(rs: RootSystem, lam, k, x, N: int) -> SeriesValue:
    """Psi_CM = delta(k)^{1/2} Phi, assembled in log space."""
    ph = phi(rs, lam, k, x, N)
    return SeriesValue(ph.log_scale + log_delta_half(rs, k, x), ph.total, ph.tail, N)


def psi_cm_direct(rs: RootSystem, lam, k, x, N: int) -> SeriesValue:
    """Psi_CM summed from its own b_mu recurrence (cross-check of :func:`psi_cm`)."""
    x = chamber_point(rs, x)
    coeffs = cm_coefficients(rs, lam, k, N)
    total, tail, _ = sum_series(coeffs, x, -1)
    return SeriesValue(rs.evaluate(lam, x), total, tail, N)


def psi_toda(rs: RootSystem, lam, x, N: int, psi=None, tol: float | None = 1e-8) -> SeriesValue:
    """Toda series Psi_T(lambda, psi; a) = a^lambda sum_mu b_mu a^mu.

    The coefficients decay factorially, so the series converges at every
    point; ``tol`` bounds the relative tail estimate (``None`` skips the check).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (rs.rank,):
        raise ValueError(f"point needs {rs.rank} coordinates")
    coeffs = toda_coefficients(rs, lam, N, psi)
    total, tail, _ = sum_series(coeffs, x, +1)
    out = SeriesValue(rs.evaluate(lam, x), total, tail, N)
    if tol is not None and not out.rel_tail <= tol:
        raise AccuracyError(
            f"Toda series tail {out.rel_tail:.2e} exceeds tolerance {tol:.1e} at height {N}",
            "trunc",
        )
    return out


def scaled_psi_cm(rs: RootSystem, lam, M: float, x, N: int) -> SeriesValue:
    """exp(-(lambda, rho^vee) M) Psi_CM(lambda, k_M; a_M) from the rescaled recurrence."""
    x = np.asarray(x, dtype=float).reshape(-1)
    coeffs = scaled_cm_coefficients(rs, lam, M, N)
    total, tail, _ = sum_series(coeffs, x, +1)
    lam_t = rs.act(rs.longest, np.asarray(lam, dtype=complex))
    return SeriesValue(rs.evaluate(lam_t, x), total, tail, N)

"""Complex special-function kernel.

log-Gamma (Lanczos, g=7), Gamma ratios in log space, the Gauss function
2F1 on the negative real axis, and the Macdonald function K_nu(x) for complex
order by quadrature of its cosh integral.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import AccuracyError, DomainError, PoleError, ZeroByPole

POLE_TOL = 1e-12

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def pole_index(z: complex) -> int | None:
    """The integer n <= 0 when z sits on a Gamma pole, else None."""
    z = complex(z)
    n = round(z.real)
    if n <= 0 and abs(z - n) <= POLE_TOL:
        return int(n)
    return None


def _lanczos_log(z: complex) -> complex:
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _log_sin_pi(z: complex) -> complex:
    """Branch of log sin(pi z) continuous in the upper (lower) half plane."""
    if z.imag < 0:
        return _log_sin_pi(z.conjugate()).conjugate()
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}), |e^{2 pi i z}| <= 1 here
    q = cmath.exp(2j * math.pi * z)
    return complex(-math.log(2.0), 0.5 * math.pi) - 1j * math.pi * z + cmath.log(1.0 - q)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z) (branch cut on the negative real axis).

    Raises :class:`PoleError` at non-positive integers.
    """
    z = complex(z)
    n = pole_index(z)
    if n is not None:
        raise PoleError(f"Gamma pole at z={n}", str(n))
    if z.real >= 0.5:
        return _lanczos_log(z)
    return _LOG_PI - _log_sin_pi(z) - _lanczos_log(1.0 - z)


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def log_gamma_ratio(num: complex, den: complex) -> complex:
    """log Gamma(num) - log Gamma(den).

    A pole in ``num`` raises :class:`PoleError`; a pole in ``den`` alone raises
    :class:`ZeroByPole` so the caller can decide whether a zero is acceptable.
    """
    if pole_index(num) is not None:
        raise PoleError(f"numerator Gamma pole at {complex(num)}", "num")
    if pole_index(den) is not None:
        raise ZeroByPole(f"denominator Gamma pole at {complex(den)}", "den")
    return log_gamma(num) - log_gamma(den)


def gamma_ratio(num: complex, den: complex) -> complex:
    """Gamma(num) / Gamma(den), formed in log space."""
    return cmath.exp(log_gamma_ratio(num, den))


def gauss_2f1(a: complex, b: complex, c: complex, z: float,
              tol: float = 1e-16, max_terms: int = 200000) -> complex:
    """2F1(a, b; c; z) for real z <= 0.

    Uses the Pfaff transformation
    ``2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`` so the series runs
    over w = z/(z-1) in [0, 1).
    """
    a, b, c = complex(a), complex(b), complex(c)
    z = float(z)
    if z > 0:
        raise DomainError("gauss_2f1 only supports z <= 0", "z")
    if pole_index(c) is not None:
        raise PoleError(f"2F1 undefined for c={c}", "c")
    if z == 0.0:
        return 1.0 + 0j
    w = z / (z - 1.0)
    bb = c - b
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(max_terms):
        term *= (a + n) * (bb + n) / ((c + n) * (n + 1)) * w
        total += term
        if n > 2 and abs(term) <= tol * abs(total) * (1.0 - w):
            ratio = abs((a + n + 1) * (bb + n + 1) / ((c + n + 1) * (n + 2))) * w
            if ratio < 1.0:
                return (1.0 - z) ** (-a) * total
    raise AccuracyError(
        f"2F1 series did not converge in {max_terms} terms (last term {abs(term):.3e})", "z"
    )


def _bessel_cutoff(order: complex, x: float) -> float:
    """t* with x cosh t - |Re nu| t exceeding the peak by ~ln(1e18)."""
    nu = abs(order.real)
    # integrand peak: maximize -x cosh t + nu t
    t0 = math.asinh(nu / x) if nu > 0 else 0.0
    peak = -x * math.cosh(t0) + nu * t0
    target = peak - 18.0 * math.log(10.0)
    t = max(t0, 1.0)
    while -x * math.cosh(t) + nu * t > target:
        t *= 1.25
    return t


def _integrand(order: complex, x: float, t: np.ndarray) -> np.ndarray:
    return np.exp(-x * np.cosh(t)) * np.cosh(order * t)


def _gauss_panels(order, x, t_max, panels, nodes=20):
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, t_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
    w = (half[:, None] * ws[None, :]).ravel()
    return complex(np.sum(w * _integrand(order, x, t)))


def _trapezoid(order, x, t_max, steps):
    t = np.linspace(0.0, t_max, steps + 1)
    f = _integrand(order, x, t)
    h = t_max / steps
    return complex(h * (np.sum(f) - 0.5 * f[0] - 0.5 * f[-1]))


def bessel_k(order: complex, x: float, method: str = "gauss",
             rtol: float = 1e-13, max_refine: int = 12) -> complex:
    """Macdonald function K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.

    ``method="gauss"`` refines a composite 20-point Gauss-Legendre rule by
    doubling its panels; ``method="trapezoid"`` halves the step of the
    trapezoidal rule, which converges geometrically for this even, analytic
    integrand.  The two serve as mutual cross-checks.
    """
    order = complex(order)
    x = float(x)
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x}", "x")
    if abs(order.real) > 10:
        raise DomainError(f"|Re nu| = {abs(order.real)} outside the supported window", "order")
    t_max = _bessel_cutoff(order, x)
    if method == "gauss":
        rule, n = _gauss_panels, 4
    elif method == "trapezoid":
        rule, n = _trapezoid, 64
    else:
        raise ValueError(f"unknown quadrature method {method!r}")
    prev = rule(order, x, t_max, n)
    for _ in range(max_refine):
        n *= 2
        cur = rule(order, x, t_max, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise AccuracyError(f"K_{order}({x}) quadrature did not settle", "order")

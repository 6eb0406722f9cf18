import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import default_lambda
from hypertoda.assemble import apply_hamiltonian_fd, eigen_residual, laplacian_fd
from hypertoda.errors import AccuracyError, DegenerateCharacterError, DomainError, ResonanceError
from hypertoda.rootsystem import build_root_system
from hypertoda.series import (
    Character,
    cm_coefficients,
    hc_coefficients,
    log_delta_half,
    multiplicity_vector,
    phi,
    psi_cm,
    psi_cm_direct,
    psi_toda,
    scaled_cm_coefficients,
    shell_tail,
    toda_coefficients,
)
from hypertoda.specfun import gauss_2f1


def _recurrence_residual(rs, table, rhs_of):
    """max |den * c_mu - rhs(mu)| / scale over the stored table."""
    coeffs = table.as_dict()
    worst = 0.0
    for mu, c in coeffs.items():
        if sum(mu) == 0:
            continue
        den, rhs = rhs_of(np.array(mu), coeffs)
        worst = max(worst, abs(den * c - rhs) / max(abs(rhs), abs(den * c), 1e-300))
    return worst


def test_hc_normalization_and_shape(a2):
    lam = default_lambda(2)
    t = hc_coefficients(a2, lam, 0.8, 6)
    assert t.coefficient((0, 0)) == 1
    assert len(t.points) == 28  # all (n1, n2) with n1 + n2 <= 6
    assert t.heights.max() == 6


def test_hc_first_coefficient_rank_one(a1):
    lam = np.array([0.37 + 0.52j])
    k = 1.3
    t = hc_coefficients(a1, lam, k, 3)
    alpha = np.array([1])
    rho = a1.rho(multiplicity_vector(a1, k))
    expected = 2 * k * a1.lattice_inner(lam - rho, alpha) / (
        2 * a1.lattice_inner(lam, alpha) - a1.inner_roots(alpha, alpha))
    assert t.coefficient((1,)) == pytest.approx(complex(expected), rel=1e-14)


@pytest.mark.parametrize("label,k", [("A2", 0.8), ("B2", {"short": 0.6, "long": 1.4}), ("G2", 1.1)])
def test_hc_resubstitution(label, k):
    rs = build_root_system(label)
    lam = default_lambda(2)
    kvec = multiplicity_vector(rs, k)
    rho = rs.rho(kvec)
    table = hc_coefficients(rs, lam, kvec, 7)

    def rhs_of(mu, coeffs):
        den = 2 * rs.lattice_inner(lam, mu) - rs.inner_roots(mu, mu)
        total = 0j
        for root, kr in zip(rs.positive_roots, kvec):
            j = 1
            while tuple(mu - j * root) in coeffs and np.all(mu - j * root >= 0):
                nu = mu - j * root
                total += 2 * kr * (rs.lattice_inner(lam - rho, root) - rs.inner_roots(mu, root)
                                   + j * rs.inner_roots(root, root)) * coeffs[tuple(nu)]
                j += 1
        return complex(den), total

    assert _recurrence_residual(rs, table, rhs_of) < 1e-12


def test_hc_free_case(a2):
    t = hc_coefficients(a2, default_lambda(2), 0.0, 5)
    vals = t.as_dict()
    assert all(v == 0 for mu, v in vals.items() if sum(mu) > 0)


def test_hc_resonance(a1):
    # (2 lambda - alpha, alpha) = 0 when (lambda, alpha^vee) = 1
    with pytest.raises(ResonanceError) as info:
        hc_coefficients(a1, [1.0], 0.7, 4)
    assert info.value.offending_parameter == "mu=(1,)"
    assert info.value.as_record()["error_kind"] == "resonance"


def test_toda_coefficients(a1, a2):
    lam1 = np.array([0.37 + 0.52j])
    t = toda_coefficients(a1, lam1, 4)
    alpha = np.array([1])
    assert t.coefficient((0,)) == 1
    den = 2 * a1.lattice_inner(lam1, alpha) + a1.inner_roots(alpha, alpha)
    assert t.coefficient((1,)) == pytest.approx(complex(2 / den), rel=1e-14)

    lam = default_lambda(2)
    t2 = toda_coefficients(a2, lam, 4)
    mu = np.array([1, 1])
    den = 2 * a2.lattice_inner(lam, mu) + a2.inner_roots(mu, mu)
    expected = 2 / den * (t2.coefficient((1, 0)) + t2.coefficient((0, 1)))
    assert t2.coefficient((1, 1)) == pytest.approx(complex(expected), rel=1e-14)


def test_toda_general_l_resubstitution(b2):
    lam = default_lambda(2)
    l = (0.7, 1.9)
    table = toda_coefficients(b2, lam, 8, l)
    eye = np.eye(2, dtype=int)

    def rhs_of(mu, coeffs):
        den = 2 * b2.lattice_inner(lam, mu) + b2.inner_roots(mu, mu)
        total = sum(2 * l[i] ** 2 * coeffs.get(tuple(mu - eye[i]), 0) for i in range(2)
                    if np.all(mu - eye[i] >= 0))
        return complex(den), total

    assert _recurrence_residual(b2, table, rhs_of) < 1e-13


def test_degenerate_character(a2):
    with pytest.raises(DegenerateCharacterError):
        toda_coefficients(a2, default_lambda(2), 3, (1.0, 0.0))
    assert not Character((1.0, 0.0)).nondegenerate


def test_phi_deep_chamber(a2):
    lam = default_lambda(2)
    x = np.array([20.0, 20.0])
    sv = phi(a2, lam, 0.9, x, 10)
    lead = np.exp(a2.evaluate(lam - a2.rho(multiplicity_vector(a2, 0.9)), x))
    assert abs(sv.value / lead - 1) < 1e-6


@pytest.mark.parametrize("k", [0.5, 1.3, 2.5])
def test_phi_rank_one_singular_branch(a1, k):
    """Phi(lambda) is the e^{(lambda-rho)x} branch of the 2F1 connection formula."""
    lh = 0.3 + 0.7j
    t = 1.2
    x = np.array([2 * t])
    # The branch (sinh^2 t)^{-a} 2F1(a, a-c+1; a-b+1; -1/sinh^2 t) of the connection
    # formula carries the exponent e^{(lh - k) t}; its leading coefficient in
    # e^{(lh - k) t} is 2^{k - lh}, since sinh t ~ e^t / 2.
    a, b, c = 0.5 * (k - lh), 0.5 * (k + lh), k + 0.5
    s2 = math.sinh(t) ** 2
    branch = s2 ** (-a) * complex(mpmath.hyp2f1(a, a - c + 1, a - b + 1, -1 / s2))
    ref = branch / 2 ** (k - lh)
    ratio = phi(a1, [lh], k, x, 60).value / ref
    assert abs(ratio - 1) < 1e-10


def _hc_operator_fd(rs, fn, x, k, h=1e-3):
    """L(k) = Laplacian + sum_alpha k_alpha coth(alpha/2) d_alpha by central differences."""
    kvec = multiplicity_vector(rs, k)
    lap = laplacian_fd(rs, fn, x, h)
    first = 0j
    vals = rs.root_values(x)
    for root, kr, v in zip(rs.positive_roots, kvec, vals):
        direction = root @ rs.gram  # d_alpha x_j = (alpha, alpha_j)
        s = h / np.linalg.norm(direction)
        d = (fn(x + s * direction) - fn(x - s * direction)) / (2 * s)
        first += kr / math.tanh(v / 2) * d
    return lap + first


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_phi_eigen_residual(label):
    rs = build_root_system(label)
    lam = default_lambda(rs.rank)
    k = 1.3
    x = np.array([1.5] * rs.rank)
    kvec = multiplicity_vector(rs, k)
    ev = rs.inner(lam, lam) - rs.inner(rs.rho(kvec), rs.rho(kvec))
    f0 = phi(rs, lam, k, x, 60).value
    lf = _hc_operator_fd(rs, lambda y: phi(rs, lam, k, y, 60).value, x, k, h=2.5e-4)
    assert abs(lf - ev * f0) / abs(ev * f0) < 1e-5


def test_log_delta_half(a1, a2):
    t = 0.8
    assert log_delta_half(a1, 1.0, [2 * t]) == pytest.approx(math.log(math.exp(t) - math.exp(-t)))
    x = np.array([0.7, 1.1])
    assert log_delta_half(a2, 1.4, x) == pytest.approx(2 * log_delta_half(a2, 0.7, x))
    with pytest.raises(DomainError):
        log_delta_half(a1, 1.0, [1e-13])


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_psi_cm_routes_agree(label):
    rs = build_root_system(label)
    lam = default_lambda(rs.rank)
    x = np.array([1.3] * rs.rank)
    a = psi_cm(rs, lam, 1.7, x, 50).value
    b = psi_cm_direct(rs, lam, 1.7, x, 50).value
    assert abs(a - b) < 1e-12 * abs(b)


def test_psi_cm_deep_chamber(b2):
    lam = default_lambda(2)
    x = np.array([25.0, 25.0])
    v = psi_cm(b2, lam, 0.6, x, 8).value
    assert abs(v / np.exp(b2.evaluate(lam, x)) - 1) < 1e-9


def test_psi_cm_rank_one_closed_form(a1):
    """delta^{1/2} c Phi Weyl-summed equals (2 sinh t)^k 2F1 (F through the delta factor)."""
    from hypertoda.assemble import hypergeom_f
    lh, k, t = 1.1 - 0.4j, 2.5, 0.9
    F = hypergeom_f(a1, [lh], k, [2 * t], 60)
    ref = gauss_2f1(0.5 * (k - lh), 0.5 * (k + lh), k + 0.5, -math.sinh(t) ** 2)
    assert abs(F - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_psi_cm_and_toda_fd_residuals(label):
    rs = build_root_system(label)
    lam = default_lambda(rs.rank)
    r_cm = eigen_residual(rs, "cm", lambda y: psi_cm(rs, lam, 1.7, y, 60).value, lam,
                          [2.0] * rs.rank, 1e-3, k=1.7)
    r_t = eigen_residual(rs, "toda", lambda y: psi_toda(rs, lam, y, 40).value, lam,
                         [-1.0] * rs.rank, 1e-3)
    assert r_cm < 1e-5 and r_t < 1e-5


def test_toda_general_l_fd(a2):
    lam = default_lambda(2)
    l = (0.6, 1.7)
    x = np.array([-0.8, -0.4])
    r = eigen_residual(a2, "toda", lambda y: psi_toda(a2, lam, y, 40, l).value, lam, x, 1e-3, psi=l)
    assert r < 1e-5


def test_toda_deep_region(a2):
    lam = default_lambda(2)
    sv = psi_toda(a2, lam, [-5.0, -5.0], 20)
    assert sv.rel_tail <= 1e-8
    deep = psi_toda(a2, lam, [-15.0, -15.0], 20)
    assert abs(deep.value / np.exp(a2.evaluate(lam, [-15.0, -15.0])) - 1) < 1e-5


def test_toda_shell_decay(b2):
    from hypertoda.series import sum_series
    coeffs = toda_coefficients(b2, default_lambda(2), 25)
    _, _, shells = sum_series(coeffs, [-1.0, -1.5], +1)
    ratios = shells[3:] / shells[2:-1]
    assert np.all(ratios < 1) and ratios[-1] < ratios[0]


def test_toda_accuracy_error(a1):
    with pytest.raises(AccuracyError):
        psi_toda(a1, [0.3 + 0.2j], [8.0], 5)


@pytest.mark.parametrize("which", ["hc", "toda"])
def test_truncation_monotonicity(a2, which):
    lam = default_lambda(2)
    for N in (10, 15, 20):
        if which == "hc":
            x = [1.2, 1.0]
            a, b = phi(a2, lam, 0.9, x, N), phi(a2, lam, 0.9, x, N + 5)
        else:
            x = [0.5, -0.2]
            a, b = psi_toda(a2, lam, x, N, tol=None), psi_toda(a2, lam, x, N + 5, tol=None)
        assert abs(a.total - b.total) <= a.tail + 4 * np.finfo(float).eps * abs(b.total)


def test_shell_tail():
    assert shell_tail(np.array([1.0, 0.5, 0.25])) == pytest.approx(0.25)
    assert shell_tail(np.array([1.0, 0.9, 0.81])) == pytest.approx(0.81 * 9)
    assert shell_tail(np.array([1.0, 2.0])) == math.inf


def test_scaled_cm_limit_recurrence(a2):
    """At large M the rescaled coefficients approach the Toda ones for w0 lambda."""
    lam = default_lambda(2)
    w0lam = a2.act(a2.longest, lam)
    toda = toda_coefficients(a2, w0lam, 6).as_dict()
    errs = []
    for M in (6.0, 8.0, 14.0):
        scaled = scaled_cm_coefficients(a2, lam, M, 6).as_dict()
        errs.append(max(abs(scaled[mu] - v) / abs(v) for mu, v in toda.items() if sum(mu) > 0))
    # the non-Toda couplings enter at relative order e^{-2M}
    assert errs[1] / errs[0] < 2 * math.exp(-4.0)
    assert errs[2] < 1e-8


def test_cm_free_coupling(a2):
    t = cm_coefficients(a2, default_lambda(2), 1.0, 5).as_dict()
    assert all(v == 0 for mu, v in t.items() if sum(mu) > 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(-1.0, 1.0), st.floats(0.4, 3.0))
def test_hc_matches_2f1_property(re, im, t):
    a1 = build_root_system("A1")
    lh = complex(re, im)
    k = 0.75
    F_ok = True
    from hypertoda.assemble import hypergeom_f
    try:
        F = hypergeom_f(a1, [lh], k, [2 * t], 80)
    except ResonanceError:
        F_ok = False
    if F_ok:
        ref = gauss_2f1(0.5 * (k - lh), 0.5 * (k + lh), k + 0.5, -math.sinh(t) ** 2)
        assert abs(F - ref) < 1e-8 * abs(ref)

"""Reduced root systems, their doubled copies and Weyl groups.

Conventions
-----------
``Sigma`` is the reduced root system with short roots of squared length 2.
``R = 2 Sigma`` is the doubled system used by the hypergeometric side; its
simple basis is ``B = 2 Pi``.  Because doubling is linear, a root has the same
integer coefficients over ``Pi`` and over ``B``; only the Gram matrix differs
(by a factor 4).  Every root is therefore stored once, as an integer tuple.

Covectors ``lambda`` are passed around as their pairings
``((lambda, alpha_i^vee))_i`` with the simple roots of ``B`` (fundamental
weight coordinates).  Points ``a`` of the torus are passed as
``x_i = alpha_i(log a)``.  Both conventions keep Weyl group actions integral.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError

SUPPORTED = {
    "A": (1, 2, 3, 4),
    "B": (2, 3),
    "C": (2, 3),
    "D": (4,),
    "G": (2,),
}

# Known |Sigma_+| and |W| per supported system.
POSITIVE_ROOT_COUNT = {
    ("A", 1): 1, ("A", 2): 3, ("A", 3): 6, ("A", 4): 10,
    ("B", 2): 4, ("B", 3): 9, ("C", 2): 4, ("C", 3): 9,
    ("D", 4): 12, ("G", 2): 6,
}
WEYL_ORDER = {
    ("A", 1): 2, ("A", 2): 6, ("A", 3): 24, ("A", 4): 120,
    ("B", 2): 8, ("B", 3): 48, ("C", 2): 8, ("C", 3): 48,
    ("D", 4): 192, ("G", 2): 12,
}


def _sigma_gram(family: str, rank: int) -> np.ndarray:
    """Gram matrix of the simple roots of Sigma (Bourbaki numbering)."""
    g = np.zeros((rank, rank), dtype=np.int64)
    if family == "A":
        for i in range(rank):
            g[i, i] = 2
            if i + 1 < rank:
                g[i, i + 1] = g[i + 1, i] = -1
    elif family == "B":
        # beta_1 .. beta_{n-1} long, beta_n short
        for i in range(rank):
            g[i, i] = 4 if i < rank - 1 else 2
            if i + 1 < rank:
                g[i, i + 1] = g[i + 1, i] = -2
    elif family == "C":
        # beta_1 .. beta_{n-1} short, beta_n long
        for i in range(rank):
            g[i, i] = 2 if i < rank - 1 else 4
            if i + 1 < rank:
                off = -2 if i + 1 == rank - 1 else -1
                g[i, i + 1] = g[i + 1, i] = off
    elif family == "D":
        for i in range(rank):
            g[i, i] = 2
        for i, j in ((0, 1), (1, 2), (1, 3)):
            g[i, j] = g[j, i] = -1
    elif family == "G":
        g[:] = [[2, -3], [-3, 6]]
    return g


def parse_label(label: str) -> tuple[str, int]:
    """Split ``"B2"`` into ``("B", 2)``; raise on anything unsupported."""
    label = label.strip()
    if len(label) < 2 or not label[1:].isdigit():
        raise ConfigurationError(f"malformed root system label {label!r}")
    family, rank = label[0].upper(), int(label[1:])
    if rank not in SUPPORTED.get(family, ()):
        raise ConfigurationError(f"unsupported root system {family}{rank}")
    return family, rank


@dataclass(frozen=True, eq=False)
class WeylElement:
    """A Weyl group element.

    ``matrix`` acts on root coordinates (coefficients over ``B``) and is
    orthogonal for the Gram matrix; ``weight_matrix`` acts on pairing
    coordinates.  ``word`` lists simple reflection indices so that
    ``w = s_word[0] s_word[1] ... s_word[-1]``.
    """

    matrix: np.ndarray
    weight_matrix: np.ndarray
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    def key(self) -> bytes:
        return self.matrix.tobytes()

    def __repr__(self) -> str:
        w = "".join(f"s{i + 1}" for i in self.word) or "e"
        return f"WeylElement({w})"


@dataclass(frozen=True)
class LatticePoint:
    """mu = sum_i n_i alpha_i with alpha_i in B."""

    coeffs: tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coeffs)


class RootSystem:
    """Immutable root data for one supported reduced system.

    Build through :func:`build_root_system`, which caches instances so that
    equal labels share one object.
    """

    def __init__(self, family: str, rank: int):
        self.family = family
        self.rank = rank
        self.label = f"{family}{rank}"
        self.sigma_gram = _sigma_gram(family, rank)
        # R = 2 Sigma: same coefficients, Gram matrix scaled by four.
        self.gram = 4 * self.sigma_gram
        diag = np.diag(self.gram)
        # cartan[i, j] = <alpha_i, alpha_j^vee>
        self.cartan = (2 * self.gram) // diag[None, :]
        if not np.array_equal(self.cartan * diag[None, :], 2 * self.gram):
            raise ConfigurationError("non-integral Cartan matrix")
        self.positive_roots = self._positive_roots()
        self.root_norms = np.array(
            [int(m @ self.gram @ m) for m in self.positive_roots], dtype=np.int64
        )
        self.simple_norms = diag.copy()
        self._gram_inv = np.linalg.inv(self.gram.astype(float))
        self._half_norms = self.simple_norms.astype(float) / 2.0
        self.weyl_group = self._weyl_group()
        self.longest = max(self.weyl_group, key=lambda w: w.length)
        for arr in (self.sigma_gram, self.gram, self.cartan, self.root_norms, self.simple_norms):
            arr.setflags(write=False)

    def __repr__(self) -> str:
        return f"RootSystem({self.label})"

    # -- construction -------------------------------------------------------
    def reflection(self, i: int) -> np.ndarray:
        """Simple reflection s_i in root coordinates."""
        s = np.eye(self.rank, dtype=np.int64)
        s[i, :] -= self.cartan[:, i]
        return s

    def weight_reflection(self, i: int) -> np.ndarray:
        """Simple reflection s_i in pairing coordinates."""
        s = np.eye(self.rank, dtype=np.int64)
        s[:, i] -= self.cartan[i, :]
        return s

    def _positive_roots(self) -> np.ndarray:
        refl = [self.reflection(i) for i in range(self.rank)]
        seen = {tuple(int(v) for v in row) for row in np.eye(self.rank, dtype=np.int64)}
        frontier = deque(seen)
        while frontier:
            r = np.array(frontier.popleft(), dtype=np.int64)
            for s in refl:
                t = tuple(int(v) for v in s @ r)
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        pos = [r for r in seen if all(v >= 0 for v in r)]
        pos.sort(key=lambda r: (sum(r), r))
        out = np.array(pos, dtype=np.int64)
        out.setflags(write=False)
        return out

    def _weyl_group(self) -> tuple[WeylElement, ...]:
        refl = [self.reflection(i) for i in range(self.rank)]
        wrefl = [self.weight_reflection(i) for i in range(self.rank)]
        ident = np.eye(self.rank, dtype=np.int64)
        first = WeylElement(ident, ident.copy(), ())
        elements = {first.key(): first}
        queue = deque([first])
        while queue:
            w = queue.popleft()
            for i in range(self.rank):
                m = w.matrix @ refl[i]
                key = m.tobytes()
                if key in elements:
                    continue
                nw = WeylElement(m, w.weight_matrix @ wrefl[i], w.word + (i,))
                elements[key] = nw
                queue.append(nw)
        group = tuple(elements.values())
        for w in group:
            w.matrix.setflags(write=False)
            w.weight_matrix.setflags(write=False)
        return group

    # -- root level quantities ----------------------------------------------
    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    def root_index(self, root) -> int:
        t = tuple(int(v) for v in root)
        for i, r in enumerate(self.positive_roots):
            if tuple(r) == t:
                return i
        raise KeyError(t)

    def inner_roots(self, m, n) -> int:
        """(mu, nu) for lattice vectors given in root coordinates (R level)."""
        return int(np.asarray(m) @ self.gram @ np.asarray(n))

    def rho_vee_pairing(self, root) -> Fraction:
        """(alpha, rho^vee) with rho^vee = sum over R_+ of coroots."""
        m = np.asarray(root)
        total = Fraction(0)
        for r, nr in zip(self.positive_roots, self.root_norms):
            total += Fraction(2 * int(m @ self.gram @ r), int(nr))
        return total

    def sigma_rho_vee_pairing(self, root) -> Fraction:
        """(beta, rho^vee) for beta in Sigma with the same coefficients as ``root``."""
        return self.rho_vee_pairing(root) / 2

    # -- covectors in pairing coordinates -----------------------------------
    def coords(self, lam) -> np.ndarray:
        """Root coordinates (over B) of the covector with pairings ``lam``."""
        lam = np.asarray(lam)
        return self._gram_inv @ (self._half_norms * lam)

    def from_coords(self, c) -> np.ndarray:
        return (self.gram @ np.asarray(c)) / self._half_norms

    def inner(self, lam, nu) -> complex:
        """Bilinear (lambda, nu) of two covectors in pairing coordinates."""
        return complex(np.asarray(lam) @ (self._half_norms * (self._gram_inv @ (self._half_norms * np.asarray(nu)))))

    def pairing(self, lam, root) -> complex:
        """(lambda, alpha^vee) for a root alpha given by its coefficients over B."""
        m = np.asarray(root, dtype=float)
        norm = float(m @ self.gram @ m)
        if norm == 0.0:
            raise DomainError("pairing with the zero root", "root")
        return complex(np.sum(m * self._half_norms * np.asarray(lam)) * 2.0 / norm)

    def root_pairings(self, lam) -> np.ndarray:
        """(lambda, alpha^vee) for every alpha in R_+, in positive-root order."""
        lam = np.asarray(lam, dtype=complex)
        return (self.positive_roots * self._half_norms) @ lam * 2.0 / self.root_norms

    def lattice_inner(self, lam, mu) -> np.ndarray:
        """(lambda, mu) for covector ``lam`` and lattice point(s) ``mu`` (rows)."""
        return np.asarray(mu) @ (self._half_norms * np.asarray(lam))

    def evaluate(self, lam, x) -> complex:
        """lambda(log a) for a point with simple-root coordinates ``x``."""
        return complex(self.coords(lam) @ np.asarray(x, dtype=float))

    def root_values(self, x) -> np.ndarray:
        """alpha(log a) for every alpha in R_+."""
        return self.positive_roots @ np.asarray(x, dtype=float)

    def rho(self, kvec=None) -> np.ndarray:
        """Pairings of rho(k) = 1/2 sum k_alpha alpha; default k = 1/2 (Sigma's rho)."""
        if kvec is None:
            kvec = np.full(self.n_positive, 0.5)
        kvec = np.asarray(kvec, dtype=float)
        # (alpha, alpha_i^vee) = 2 (alpha, alpha_i) / (alpha_i, alpha_i)
        pair = (self.positive_roots @ self.gram) * 2.0 / self.simple_norms
        return 0.5 * (kvec @ pair)

    def rho_vee_inner(self, lam) -> complex:
        """(lambda, rho^vee) = sum over R_+ of (lambda, alpha^vee)."""
        return complex(np.sum(self.root_pairings(lam)))

    def act(self, w: WeylElement, lam) -> np.ndarray:
        """Apply ``w`` to a covector in pairing coordinates."""
        return w.weight_matrix @ np.asarray(lam)

    def cholesky_directions(self) -> np.ndarray:
        """Columns v_k with sum_k v_k v_k^T = Gram; orthonormal moves in x-coordinates."""
        return np.linalg.cholesky(self.gram.astype(float))


@lru_cache(maxsize=None)
def _build(family: str, rank: int) -> RootSystem:
    return RootSystem(family, rank)


def build_root_system(family: str, rank: int | None = None) -> RootSystem:
    """``build_root_system("A", 2)`` or ``build_root_system("A2")``."""
    if rank is None:
        family, rank = parse_label(family)
    family = family.upper()
    if rank not in SUPPORTED.get(family, ()):
        raise ConfigurationError(f"unsupported root system {family}{rank}")
    return _build(family, int(rank))


def weyl_group(rs: RootSystem) -> tuple[WeylElement, ...]:
    return rs.weyl_group


def longest_element(rs: RootSystem) -> WeylElement:
    return rs.longest


def pairing(rs: RootSystem, lam, root) -> complex:
    return rs.pairing(lam, root)


def act(rs: RootSystem, w: WeylElement, lam) -> np.ndarray:
    return rs.act(w, lam)


def word_matrix(rs: RootSystem, word) -> np.ndarray:
    """Compose simple reflections s_word[0] ... s_word[-1] in root coordinates."""
    m = np.eye(rs.rank, dtype=np.int64)
    for i in word:
        m = m @ rs.reflection(i)
    return m


def inversion_count(rs: RootSystem, w: WeylElement) -> int:
    """#{alpha in R_+ : w alpha in -R_+}."""
    images = rs.positive_roots @ w.matrix.T
    return int(np.sum(np.all(images <= 0, axis=1)))


def enumerate_qplus(rs: RootSystem, max_height: int) -> list[LatticePoint]:
    """All mu in Q_+ of height at most ``max_height``, by height then lexicographically."""
    return [LatticePoint(tuple(int(v) for v in row)) for row in qplus_array(rs.rank, max_height)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=64)
def qplus_array(rank: int, max_height: int) -> np.ndarray:
    if max_height < 0:
        raise ValueError("max_height must be non-negative")
    pts = [p for h in range(max_height + 1) for p in _compositions(h, rank)]
    out = np.array(pts, dtype=np.int64).reshape(len(pts), rank)
    out.setflags(write=False)
    return out

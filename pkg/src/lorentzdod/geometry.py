"""The quadratic space R^{n,2} and its flag manifold of isotropic lines.

Coordinates are taken in the block basis ``(e, f, b_1, ..., b_n)`` where
``(e, f)`` is a hyperbolic pair with ``B(e, f) = 1`` and the ``b_i`` span
the Lorentzian complement ``V'`` with form ``diag(1, ..., 1, -1)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousClassification, GeometryError, NotIsotropic

TOL_NULL = 1e-9
TOL_INC = 1e-7
TOL_PAR = 1e-9
GUARD_FACTOR = 10.0
SIGN_EPS = 1e-12


def lorentz_gram(n: int) -> np.ndarray:
    """Gram matrix ``diag(1, ..., 1, -1)`` of size n for the form q' on V'."""
    g = np.eye(n)
    g[-1, -1] = -1.0
    return g


def signature(gram: np.ndarray, tol: float = 1e-12) -> tuple[int, int]:
    """Return ``(n_plus, n_minus)`` of a symmetric matrix."""
    ev = np.linalg.eigvalsh(gram)
    scale = max(1.0, float(np.max(np.abs(ev))))
    return int(np.sum(ev > tol * scale)), int(np.sum(ev < -tol * scale))


@dataclass(frozen=True, eq=False)
class QuadraticSpace:
    """The space ``V = R^{n,2}`` with Gram matrix of its bilinear form.

    The Gram matrix is checked for symmetry and signature ``(n, 2)``.
    """

    n: int
    gram: np.ndarray = field(repr=False)

    def __post_init__(self):
        gram = np.array(self.gram, dtype=float)
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)
        if self.n < 3:
            raise GeometryError(f"need n >= 3, got n={self.n}")
        if gram.shape != (self.dim, self.dim):
            raise GeometryError(f"gram must be {self.dim}x{self.dim}, got {gram.shape}")
        if not np.allclose(gram, gram.T, rtol=0.0, atol=1e-14):
            raise GeometryError("gram is not symmetric")
        sig = signature(gram)
        if sig != (self.n, 2):
            raise GeometryError(f"signature check failed: expected ({self.n}, 2), got {sig}")

    @classmethod
    def unchecked(cls, n: int, gram) -> "QuadraticSpace":
        """Build without validation. Only for fault-injection fixtures."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "gram", np.array(gram, dtype=float))
        return obj

    @property
    def dim(self) -> int:
        return self.n + 2

    def bilinear(self, u, v) -> float:
        return float(np.asarray(u) @ self.gram @ np.asarray(v))

    def q(self, v) -> float:
        v = np.asarray(v)
        return float(v @ self.gram @ v)


def make_space(n: int) -> QuadraticSpace:
    """Build ``R^{n,2}`` in the block basis ``(e, f, b_1, ..., b_n)``."""
    if n < 3:
        raise GeometryError(f"need n >= 3 so that O(n-1,1) is nonelementary, got n={n}")
    gram = np.zeros((n + 2, n + 2))
    gram[0, 1] = gram[1, 0] = 1.0
    gram[2:, 2:] = lorentz_gram(n)
    return QuadraticSpace(n, gram)


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its first coordinate above ``SIGN_EPS`` in size is positive."""
    idx = np.flatnonzero(np.abs(v) > SIGN_EPS)
    if idx.size and v[idx[0]] < 0:
        return -v
    return v


@dataclass(frozen=True, eq=False)
class IsotropicLine:
    """A point of F_1: an isotropic line in V.

    ``rep`` is the Euclidean-unit representative with canonical sign, so
    ``L`` and the line spanned by ``-rep`` compare equal via :meth:`same`.
    """

    rep: np.ndarray

    def __post_init__(self):
        v = np.array(self.rep, dtype=float).ravel()
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm == 0.0:
            raise GeometryError("isotropic line needs a nonzero finite representative")
        v = canonical_sign(v / norm)
        v.setflags(write=False)
        object.__setattr__(self, "rep", v)

    @classmethod
    def from_vector(cls, space: QuadraticSpace, v, tol: float = TOL_NULL) -> "IsotropicLine":
        """Span of ``v``, checking ``|q(v)| <= tol * |v|^2``."""
        line = cls(v)
        qv = space.q(line.rep)
        if abs(qv) > tol:
            raise NotIsotropic(f"|q(rep)| = {abs(qv):.3e} exceeds {tol:.1e}")
        return line

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    def same(self, other: "IsotropicLine", tol: float = TOL_PAR) -> bool:
        return chordal_distance(self, other) <= tol

    def to_json(self) -> list[float]:
        return [float(x) for x in self.rep]


class LinePosition(enum.Enum):
    EQUAL = "equal"
    INCIDENT = "incident"
    OPPOSITE = "opposite"


def _check_dims(space: QuadraticSpace, *lines: IsotropicLine) -> None:
    for line in lines:
        if line.dim != space.dim:
            raise GeometryError(f"line of dimension {line.dim} does not belong to a space of dimension {space.dim}")


def sin_from_chord(d):
    """``sin θ`` from the chord ``d = 2 sin(θ/2)``; exact near ``θ = 0``."""
    d = np.minimum(d, np.sqrt(2.0))
    return d * np.sqrt(1.0 - 0.25 * d**2)


def chordal_distance(l1: IsotropicLine, l2: IsotropicLine) -> float:
    """Sine of the Euclidean angle between two lines."""
    d = min(np.linalg.norm(l1.rep - l2.rep), np.linalg.norm(l1.rep + l2.rep))
    return float(sin_from_chord(d))


def quadric_margin(space: QuadraticSpace, m: IsotropicLine, l: IsotropicLine) -> float:
    """``|B(m, l)|`` on unit representatives; small means ``m`` lies on Q_l."""
    _check_dims(space, m, l)
    return abs(space.bilinear(m.rep, l.rep))


def classify_pair(
    space: QuadraticSpace,
    l1: IsotropicLine,
    l2: IsotropicLine,
    tol_inc: float = TOL_INC,
    tol_par: float = TOL_PAR,
) -> LinePosition:
    """Relative position of two isotropic lines.

    Raises
    ------
    AmbiguousClassification
        If ``|B(l1, l2)|`` falls in the guard band ``(tol_inc, 10 tol_inc)``.
    """
    _check_dims(space, l1, l2)
    if chordal_distance(l1, l2) <= tol_par:
        return LinePosition.EQUAL
    margin = quadric_margin(space, l1, l2)
    if margin <= tol_inc:
        return LinePosition.INCIDENT
    if margin < GUARD_FACTOR * tol_inc:
        raise AmbiguousClassification(
            f"|B| = {margin:.3e} lies in the guard band ({tol_inc:.1e}, {GUARD_FACTOR * tol_inc:.1e})"
        )
    return LinePosition.OPPOSITE


def orthogonal_complement(space: QuadraticSpace, vectors) -> np.ndarray:
    """Columns spanning the B-orthogonal complement of ``vectors``."""
    a = np.atleast_2d(np.asarray(vectors, dtype=float)) @ space.gram
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


def ellipsoid_sample(
    space: QuadraticSpace,
    l: IsotropicLine,
    l_hat: IsotropicLine,
    k: int,
    rng: np.random.Generator | None = None,
) -> list[IsotropicLine]:
    """Sample k points of ``E = Q_L ∩ Q_L̂``, the null lines of ``span(L, L̂)^⊥``.

    Points are drawn over the unit sphere of the positive part of the
    complement: equally spaced when that sphere is a circle (n = 3),
    otherwise uniformly at random from ``rng`` (seed 0 if omitted).
    """
    if classify_pair(space, l, l_hat) is not LinePosition.OPPOSITE:
        raise GeometryError("ellipsoid_sample needs opposite lines")
    if k < 1:
        raise ValueError("k must be positive")
    basis = orthogonal_complement(space, [l.rep, l_hat.rep])
    restricted = basis.T @ space.gram @ basis
    ev, vecs = np.linalg.eigh(restricted)
    # eigh sorts ascending: the single negative direction comes first
    time = basis @ vecs[:, 0] / np.sqrt(-ev[0])
    space_dirs = basis @ vecs[:, 1:] / np.sqrt(ev[1:])
    m = space_dirs.shape[1]
    if m == 2:
        theta = 2.0 * np.pi * np.arange(k) / k
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        pts = rng.standard_normal((k, m))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return [IsotropicLine(space_dirs @ p + time) for p in pts]

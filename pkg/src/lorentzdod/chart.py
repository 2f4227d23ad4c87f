"""Shears, the chart ``h: V' -> L^opp`` and the affine Lorentz group inside P_L.

Group elements are plain ``(n+2, n+2)`` arrays in the ambient coordinates of
the :class:`~lorentzdod.geometry.QuadraticSpace`. A :class:`Frame` fixes
``e``, ``f`` and a basis of ``V'``; chart vectors ``v'`` are always given in
that basis.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import GeometryError, NotInGroup, NotOpposite
from .geometry import (
    IsotropicLine,
    QuadraticSpace,
    signature,
)

TOL_ORTH = 1e-9
TOL_OPPOSITE = 1e-8


def max_abs(a) -> float:
    """Max-entry norm, the norm used for every matrix contract."""
    return float(np.max(np.abs(a)))


@dataclass(frozen=True, eq=False)
class Frame:
    """Anchor data ``(L = span e, L̂ = span f, V')`` for the Schubert chart.

    ``basis`` holds ``e, f, b_1, ..., b_n`` as columns. In these coordinates
    the Gram matrix is ``[[0, 1], [1, 0]] ⊕ gram_prime``.
    """

    space: QuadraticSpace
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.basis, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "basis", p)
        g = self.space.gram
        e, f, bs = p[:, 0], p[:, 1], p[:, 2:]
        checks = [
            abs(e @ g @ e),
            abs(f @ g @ f),
            abs(e @ g @ f - 1.0),
            max_abs(e @ g @ bs),
            max_abs(f @ g @ bs),
        ]
        if max(checks) > 1e-10:
            raise GeometryError("frame needs q(e) = q(f) = 0, B(e, f) = 1 and V' orthogonal to e, f")
        gp = bs.T @ g @ bs
        if signature(gp) != (self.space.n - 1, 1):
            raise GeometryError("restricted form on V' must have signature (n-1, 1)")
        gp.setflags(write=False)
        object.__setattr__(self, "gram_prime", gp)
        inv = np.linalg.inv(p)
        inv.setflags(write=False)
        object.__setattr__(self, "basis_inv", inv)

    @classmethod
    def standard(cls, space: QuadraticSpace) -> "Frame":
        return cls(space, np.eye(space.dim))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def e(self) -> np.ndarray:
        return self.basis[:, 0]

    @property
    def f(self) -> np.ndarray:
        return self.basis[:, 1]

    @property
    def L(self) -> IsotropicLine:
        return IsotropicLine(self.e)

    @property
    def L_hat(self) -> IsotropicLine:
        return IsotropicLine(self.f)

    @property
    def identifier(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.space.gram).tobytes())
        h.update(np.ascontiguousarray(self.basis).tobytes())
        return h.hexdigest()[:16]

    def qp(self, v) -> float:
        """The form q' on chart coordinates."""
        v = np.asarray(v, dtype=float)
        return float(v @ self.gram_prime @ v)

    def bp(self, u, v) -> float:
        return float(np.asarray(u, dtype=float) @ self.gram_prime @ np.asarray(v, dtype=float))

    def to_world(self, m: np.ndarray) -> np.ndarray:
        """Change a matrix from frame coordinates to ambient coordinates."""
        return self.basis @ m @ self.basis_inv

    def to_frame(self, g: np.ndarray) -> np.ndarray:
        return self.basis_inv @ g @ self.basis


def check_orthogonal(space: QuadraticSpace, g, tol: float = TOL_ORTH) -> float:
    """Return ``|g^T G g - G|_max``, raising :class:`NotInGroup` above ``tol * max(1, |g|_max^2)``."""
    err = max_abs(np.asarray(g).T @ space.gram @ g - space.gram)
    if err > tol * max(1.0, max_abs(g) ** 2):
        raise NotInGroup(f"matrix is not in O(q): defect {err:.3e}")
    return err


def _vec(frame: Frame, v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.shape != (frame.n,):
        raise GeometryError(f"chart vector must have {frame.n} coordinates, got {v.shape}")
    return v


def shear_frame(gram_prime: np.ndarray, v: np.ndarray) -> np.ndarray:
    """The shear ``s_v`` in frame coordinates ``(e, f, V')``."""
    n = v.shape[0]
    s = np.eye(n + 2)
    gv = gram_prime @ v
    s[0, 1] = -0.5 * (v @ gv)
    s[2:, 1] = v
    s[0, 2:] = -gv
    return s


def shear(frame: Frame, v) -> np.ndarray:
    """The unipotent ``s_v``: ``e -> e``, ``f -> -q'(v)/2 e + f + v``, ``w -> w - B(v, w) e``."""
    return frame.to_world(shear_frame(frame.gram_prime, _vec(frame, v)))


def shear_compose_check(frame: Frame, u, v) -> float:
    """``|s_{u+v} - s_u s_v|_max``; zero up to rounding since ``v -> s_v`` is a homomorphism."""
    u, v = _vec(frame, u), _vec(frame, v)
    return max_abs(shear(frame, u + v) - shear(frame, u) @ shear(frame, v))


def chart_vector(frame: Frame, v) -> np.ndarray:
    """Unnormalized representative ``-q'(v)/2 e + f + v`` of ``h(v)``."""
    v = _vec(frame, v)
    return frame.basis @ np.concatenate([[-0.5 * frame.qp(v), 1.0], v])


def chart_to_flag(frame: Frame, v) -> IsotropicLine:
    """The chart ``h(v) = s_v(L̂)``; ``h(0) = L̂``."""
    return IsotropicLine(chart_vector(frame, v))


def flag_to_chart(frame: Frame, m: IsotropicLine, consistency_tol: float = 1e-6) -> np.ndarray:
    """Inverse of the chart on ``L^opp``.

    Raises
    ------
    NotOpposite
        If ``m`` lies on Q_L, i.e. ``|B(e, m)| < 1e-8 |m|``.
    """
    c = frame.basis_inv @ m.rep
    # frame coordinate along f is B(e, m)
    if abs(c[1]) < TOL_OPPOSITE * np.linalg.norm(m.rep):
        raise NotOpposite("line is not opposite to L")
    c = c / c[1]
    v = c[2:]
    expected = -0.5 * frame.qp(v)
    if abs(c[0] - expected) > consistency_tol * max(1.0, abs(expected)):
        raise GeometryError("inconsistent chart coordinates: line is not isotropic")
    return v


def check_lorentz(gram_prime: np.ndarray, a, tol: float = TOL_ORTH) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != gram_prime.shape:
        raise GeometryError(f"linear part must be {gram_prime.shape}, got {a.shape}")
    err = max_abs(a.T @ gram_prime @ a - gram_prime)
    # long words have huge entries; rounding in a^T G a scales with |a|^2
    if err > tol * max(1.0, max_abs(a) ** 2):
        raise NotInGroup(f"linear part is not in O(q'): defect {err:.3e}")
    return a


def levi_embed(frame: Frame, a) -> np.ndarray:
    """``Â``: fixes e and f, acts by ``a`` on V'."""
    a = check_lorentz(frame.gram_prime, a)
    m = np.eye(frame.n + 2)
    m[2:, 2:] = a
    return frame.to_world(m)


def embed_affine(frame: Frame, a, b) -> np.ndarray:
    """The element ``s_b Â`` of ``G'_L = U ⋊ O(q')`` acting on V' as ``v -> a v + b``."""
    a = check_lorentz(frame.gram_prime, a)
    b = _vec(frame, b)
    m = np.eye(frame.n + 2)
    m[2:, 2:] = a
    return frame.to_world(shear_frame(frame.gram_prime, b) @ m)


def embed_affine_batch(frame: Frame, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized :func:`embed_affine` over stacks ``a (m, n, n)``, ``b (m, n)``; no checks."""
    m, n = b.shape
    gp = frame.gram_prime
    out = np.zeros((m, n + 2, n + 2))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = 1.0
    gb = b @ gp
    out[:, 0, 1] = -0.5 * np.einsum("ij,ij->i", gb, b)
    out[:, 0, 2:] = -np.einsum("ij,ijk->ik", gb, a)
    out[:, 2:, 1] = b
    out[:, 2:, 2:] = a
    return frame.basis @ out @ frame.basis_inv


def transvection(frame: Frame, t: float) -> np.ndarray:
    """``a_t``: ``e -> t e``, ``f -> f / t``, identity on V'."""
    if not t > 0:
        raise ValueError(f"transvection needs t > 0, got {t}")
    d = np.ones(frame.n + 2)
    d[0], d[1] = t, 1.0 / t
    return frame.to_world(np.diag(d))


def linear_part(frame: Frame, g, tol: float = 1e-9) -> np.ndarray:
    """The induced map of ``g ∈ P_L`` on ``L^⊥ / L ≅ V'``."""
    c = frame.to_frame(np.asarray(g, dtype=float))
    col = c[:, 0]
    if np.max(np.abs(col[1:])) > tol * max(1.0, abs(col[0])):
        raise NotInGroup("element does not fix L")
    return c[2:, 2:].copy()


def translation_part(frame: Frame, g) -> np.ndarray:
    """Chart image of the origin, ``h^{-1}(g L̂)``, for ``g ∈ P_L``."""
    c = frame.to_frame(np.asarray(g, dtype=float))
    return c[2:, 1] / c[1, 1]


def apply(g, line: IsotropicLine) -> IsotropicLine:
    return IsotropicLine(np.asarray(g) @ line.rep)


def random_lorentz(gram_prime: np.ndarray, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """``exp(X)`` for a random q'-antisymmetric X (``X^T G' + G' X = 0``)."""
    n = gram_prime.shape[0]
    k = rng.standard_normal((n, n)) * scale
    k = k - k.T
    return expm(np.linalg.solve(gram_prime, k))


def element_to_json(frame: Frame, g) -> dict:
    return {
        "frame": frame.identifier,
        "shape": list(np.shape(g)),
        "data": [float(x) for x in np.asarray(g, dtype=float).ravel()],
    }


def element_from_json(frame: Frame, payload: dict) -> np.ndarray:
    if payload["frame"] != frame.identifier:
        raise GeometryError("group element was serialized against a different frame")
    return np.array(payload["data"], dtype=float).reshape(payload["shape"])


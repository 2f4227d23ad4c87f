"""Schottky subgroups of O(n-1,1) and their affine deformations.

Everything here lives in V' with the standard form ``diag(1, ..., 1, -1)``.
The boundary sphere ``S^{n-2}`` is the projectivized future null cone: a
unit vector ``x`` stands for the null direction ``(x, 1)``. Round caps
``{x : angle(x, c) <= r}`` are exactly the sets ``{B'((x, 1), ν) >= 0}`` for
the spacelike vector ``ν = (c, cos r)``, which lets ping-pong containment be
checked by exact cap arithmetic instead of sampling.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .chart import check_lorentz, max_abs
from .errors import GeometryError, PingPongFailure
from .geometry import lorentz_gram

GAP_MIN = 1e-3

Word = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class AffineIsometry:
    """``v -> A v + b`` with ``A ∈ O(n-1,1)``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).ravel()
        if a.shape != (b.size, b.size):
            raise GeometryError(f"linear part {a.shape} does not match translation of length {b.size}")
        check_lorentz(lorentz_gram(b.size), a)
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.size

    def __matmul__(self, other: "AffineIsometry") -> "AffineIsometry":
        return AffineIsometry(self.A @ other.A, self.b + self.A @ other.b)

    def inverse(self) -> "AffineIsometry":
        ainv = np.linalg.inv(self.A)
        return AffineIsometry(ainv, -ainv @ self.b)

    def __call__(self, v):
        return self.A @ np.asarray(v, dtype=float) + self.b

    @classmethod
    def identity(cls, n: int) -> "AffineIsometry":
        return cls(np.eye(n), np.zeros(n))


def null_direction(x) -> np.ndarray:
    """Future null vector ``(x/|x|, 1)`` for a boundary point ``x``."""
    x = np.asarray(x, dtype=float)
    return np.append(x / np.linalg.norm(x), 1.0)


def boundary_point(v) -> np.ndarray:
    """Unit boundary direction of a nonzero null (or timelike) vector, up to sign."""
    v = np.asarray(v, dtype=float)
    if v[-1] < 0:
        v = -v
    s = v[:-1]
    return s / np.linalg.norm(s)


def boost(gram_prime: np.ndarray, p_plus, p_minus, rapidity: float) -> np.ndarray:
    """Loxodromic element of O(q') scaling ``p_plus`` by e^λ and ``p_minus`` by e^{-λ}.

    Acts as the identity on the q'-orthogonal complement of both null vectors.
    """
    g = np.asarray(gram_prime, dtype=float)
    u = np.asarray(p_plus, dtype=float)
    w = np.asarray(p_minus, dtype=float)
    scale = np.linalg.norm(u) * np.linalg.norm(w)
    if abs(u @ g @ u) > 1e-9 * u @ u or abs(w @ g @ w) > 1e-9 * w @ w:
        raise GeometryError("boost axis endpoints must be null vectors")
    uw = u @ g @ w
    if abs(uw) < 1e-9 * scale:
        raise GeometryError("boost axis endpoints are parallel")
    n = u.size
    a = (
        np.eye(n)
        + (np.exp(rapidity) - 1.0) * np.outer(u, g @ w) / uw
        + (np.exp(-rapidity) - 1.0) * np.outer(w, g @ u) / uw
    )
    return a


class Cap(NamedTuple):
    """Closed round ball on ``S^{n-2}``: center (unit vector), angular radius."""

    center: np.ndarray
    radius: float

    def normal(self) -> np.ndarray:
        return np.append(self.center, np.cos(self.radius))

    def complement(self) -> "Cap":
        return Cap(-self.center, np.pi - self.radius)

    def contains(self, x, slack: float = 0.0) -> bool:
        return angle(self.center, x) <= self.radius + slack


def angle(x, y) -> float:
    c = float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def cap_from_normal(nu) -> Cap:
    """The cap ``{x : B'((x,1), ν) >= 0}`` for spacelike ν."""
    nu = np.asarray(nu, dtype=float)
    s = nu[:-1]
    ns = np.linalg.norm(s)
    if ns <= abs(nu[-1]):
        raise GeometryError("cap normal must be spacelike")
    return Cap(s / ns, float(np.arccos(np.clip(nu[-1] / ns, -1.0, 1.0))))


def image_cap(a: np.ndarray, cap: Cap) -> Cap:
    """Image of a cap under an orthochronous ``a ∈ O(q')``."""
    if a[-1, -1] <= 0:
        raise GeometryError("boundary action needs a time-orientation preserving element")
    return cap_from_normal(a @ cap.normal())


@dataclass(frozen=True)
class PingPongCertificate:
    """Disjoint caps ``B+_i, B-_i`` with ``g_i(S - B-_i) ⊂ B+_i``.

    ``caps[2i]`` is the attracting cap of generator i and ``caps[2i+1]`` its
    repelling cap. ``margin`` is the smallest slack over all containments and
    pairwise separations (radians).
    """

    caps: tuple[Cap, ...]
    margin: float
    contraction_margins: tuple[float, ...]
    separation_margin: float


def loxodromic_gap(a: np.ndarray) -> float:
    """Ratio of the two largest eigenvalue moduli."""
    mods = np.sort(np.abs(np.linalg.eigvals(a)))[::-1]
    return float(mods[0] / mods[1])


def certify(gens: Sequence[AffineIsometry], caps: Sequence[Cap]) -> PingPongCertificate:
    """Verify the ping-pong configuration for the linear parts.

    Raises
    ------
    PingPongFailure
        With the first offending generator or cap pair and its margin.
    """
    k = len(gens)
    if len(caps) != 2 * k:
        raise ValueError(f"need {2 * k} caps for {k} generators, got {len(caps)}")
    for i, g in enumerate(gens):
        gap = loxodromic_gap(g.A)
        if gap <= 1.0 + GAP_MIN:
            raise PingPongFailure(
                f"generator {i} is not loxodromic (eigenvalue gap {gap:.6f})",
                generator=i,
                margin=gap - 1.0,
            )

    sep = np.inf
    worst_pair = None
    for i in range(2 * k):
        for j in range(i + 1, 2 * k):
            m = angle(caps[i].center, caps[j].center) - caps[i].radius - caps[j].radius
            if m < sep:
                sep, worst_pair = m, (i, j)
    if sep <= 0:
        raise PingPongFailure(f"caps {worst_pair} overlap (margin {sep:.4g})", ball=worst_pair, margin=sep)

    contraction = []
    for i, g in enumerate(gens):
        plus, minus = caps[2 * i], caps[2 * i + 1]
        img = image_cap(g.A, minus.complement())
        m = plus.radius - angle(img.center, plus.center) - img.radius
        if m <= 0:
            raise PingPongFailure(
                f"generator {i} maps the complement of its repelling cap outside its attracting cap "
                f"(margin {m:.4g})",
                generator=i,
                ball=(2 * i, 2 * i + 1),
                margin=m,
            )
        contraction.append(float(m))
    return PingPongCertificate(tuple(caps), float(min(sep, *contraction)), tuple(contraction), float(sep))


@dataclass(frozen=True, eq=False)
class SchottkyGroup:
    gens: tuple[AffineIsometry, ...]
    certificate: PingPongCertificate | None = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.gens)

    @property
    def n(self) -> int:
        return self.gens[0].n

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    @property
    def group_id(self) -> str:
        h = hashlib.sha256()
        for g in self.gens:
            h.update(np.ascontiguousarray(g.A).tobytes())
            h.update(np.ascontiguousarray(g.b).tobytes())
        return h.hexdigest()[:16]

    def generator(self, letter: int) -> AffineIsometry:
        g = self.gens[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def linear(self) -> "SchottkyGroup":
        """The linear part ``Γ_0`` (trivial cocycle); the ``t -> 0`` limit of ``ρ^t``."""
        gens = tuple(AffineIsometry(g.A, np.zeros(g.n)) for g in self.gens)
        return replace(self, gens=gens)


def schottky(gens: Sequence[AffineIsometry], caps: Sequence[Cap]) -> SchottkyGroup:
    """Certified Schottky group; raises :class:`PingPongFailure` if ping-pong fails."""
    gens = tuple(gens)
    if len(gens) < 2:
        raise ValueError("a Schottky group needs k >= 2 generators")
    return SchottkyGroup(gens, certify(gens, caps))


def uncertified(gens: Sequence[AffineIsometry]) -> SchottkyGroup:
    """Accept a group without a convex-cocompactness certificate, with a warning."""
    msg = "group accepted without a ping-pong certificate; convex-cocompactness is assumed, not verified"
    warnings.warn(msg, stacklevel=2)
    return SchottkyGroup(tuple(gens), None, (msg,))


def axis_generator(p_plus, p_minus, rapidity: float, translation=None) -> AffineIsometry:
    """Affine boost along the geodesic from boundary point ``p_minus`` to ``p_plus``."""
    u, w = null_direction(p_plus), null_direction(p_minus)
    n = u.size
    a = boost(lorentz_gram(n), u, w, rapidity)
    b = np.zeros(n) if translation is None else np.asarray(translation, dtype=float)
    return AffineIsometry(a, b)


def default_axes(n: int, k: int = 2) -> list[tuple[np.ndarray, np.ndarray]]:
    """Mutually transverse axes along coordinate directions of ``S^{n-2}``.

    For n = 3 and k = 2 the four endpoints sit at angles 0, π, π/2, 3π/2.
    """
    m = n - 1
    if k > m:
        raise ValueError(f"default axes support at most {m} generators for n={n}")
    eye = np.eye(m)
    return [(eye[i], -eye[i]) for i in range(k)]


def from_axes(
    axes: Sequence[tuple[np.ndarray, np.ndarray]],
    rapidities: Sequence[float],
    radii: float | Sequence[float],
    translations: Sequence | None = None,
) -> SchottkyGroup:
    """Certified Schottky group with caps centered at the axis endpoints.

    ``radii`` is one radius for all caps or a list of 2k radii ordered
    ``[B+_1, B-_1, B+_2, ...]``.
    """
    k = len(axes)
    if len(rapidities) != k:
        raise ValueError("one rapidity per axis")
    if np.isscalar(radii):
        radii = [float(radii)] * (2 * k)
    translations = [None] * k if translations is None else list(translations)
    gens, caps = [], []
    for (pp, pm), lam, b, (rp, rm) in zip(axes, rapidities, translations, zip(radii[::2], radii[1::2])):
        gens.append(axis_generator(pp, pm, lam, b))
        caps.append(Cap(np.asarray(pp, float) / np.linalg.norm(pp), float(rp)))
        caps.append(Cap(np.asarray(pm, float) / np.linalg.norm(pm), float(rm)))
    return schottky(gens, caps)


def desk_instance(
    n: int = 3,
    k: int = 2,
    rapidity: float = 3.0,
    radius: float = 0.5,
    seed: int | None = 0,
    translations=None,
) -> SchottkyGroup:
    """Default test instance: transverse boosts with a seeded random cocycle.

    ``seed=None`` with no ``translations`` gives the trivial cocycle.
    """
    if translations is None and seed is not None:
        translations = np.random.default_rng(seed).standard_normal((k, n))
    return from_axes(default_axes(n, k), [rapidity] * k, radius, translations)


def scale_group(group: SchottkyGroup, t: float) -> SchottkyGroup:
    """The conjugate deformation ``ρ^t``: same linear parts, translations times t."""
    if not t > 0:
        raise ValueError(f"scale needs t > 0, got {t}")
    gens = tuple(AffineIsometry(g.A, t * g.b) for g in group.gens)
    return replace(group, gens=gens)


def inverse_letter(letter: int) -> int:
    return -letter


def alphabet(k: int) -> list[int]:
    out = []
    for i in range(1, k + 1):
        out += [i, -i]
    return out


def count_words(k: int, N: int) -> int:
    return 1 + sum(2 * k * (2 * k - 1) ** (m - 1) for m in range(1, N + 1))


def words(group_or_k, N: int) -> list[Word]:
    """All freely reduced words of length <= N in shortlex order.

    Letters are ``±(i+1)`` for generator i, ordered ``1, -1, 2, -2, ...``.
    """
    k = group_or_k if isinstance(group_or_k, int) else group_or_k.k
    if N < 0:
        raise ValueError("N must be >= 0")
    letters = alphabet(k)
    out: list[Word] = [()]
    level: list[Word] = [()]
    for _ in range(N):
        nxt = []
        for w in level:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        out += nxt
        level = nxt
    return out


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) <= 1 or w[0] != -w[-1]


def invert_word(w: Word) -> Word:
    return tuple(-a for a in reversed(w))


def evaluate(group: SchottkyGroup, w: Word) -> AffineIsometry:
    """Left-to-right product of generators, ``(A1, b1)(A2, b2) = (A1 A2, b1 + A1 b2)``."""
    for x, y in zip(w, w[1:]):
        if x == -y:
            raise ValueError(f"word {w} is not reduced")
    n = group.n
    a, b = np.eye(n), np.zeros(n)
    for letter in w:
        g = group.generator(letter)
        a, b = a @ g.A, b + a @ g.b
    return AffineIsometry(a, b)


@dataclass(frozen=True)
class WordTable:
    """Every reduced word up to a depth with its evaluated affine map.

    Rows are in the same shortlex order as :func:`words`.
    """

    words: list[Word]
    lengths: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __len__(self) -> int:
        return len(self.words)


def word_table(group: SchottkyGroup, N: int) -> WordTable:
    """Evaluate all reduced words of length <= N level by level.

    Each word extends its prefix by one letter, so a level costs one batched
    matrix product.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    n = group.n
    letters = alphabet(group.k)
    gen_a = np.stack([group.generator(x).A for x in letters])
    gen_b = np.stack([group.generator(x).b for x in letters])
    inv_idx = np.array([letters.index(-x) for x in letters])

    all_words: list[Word] = [()]
    lengths = [np.zeros(1, dtype=int)]
    a_levels = [np.eye(n)[None]]
    b_levels = [np.zeros((1, n))]
    level_words: list[Word] = [()]
    last = np.array([-1])
    a_cur, b_cur = a_levels[0], b_levels[0]
    for m in range(1, N + 1):
        n_let = len(letters)
        parent = np.repeat(np.arange(len(level_words)), n_let)
        letter = np.tile(np.arange(n_let), len(level_words))
        keep = (last[parent] < 0) | (inv_idx[letter] != last[parent])
        parent, letter = parent[keep], letter[keep]
        a_new = a_cur[parent] @ gen_a[letter]
        b_new = b_cur[parent] + np.einsum("ijk,ik->ij", a_cur[parent], gen_b[letter])
        level_words = [level_words[p] + (letters[l],) for p, l in zip(parent.tolist(), letter.tolist())]
        all_words += level_words
        lengths.append(np.full(len(level_words), m))
        a_levels.append(a_new)
        b_levels.append(b_new)
        a_cur, b_cur, last = a_new, b_new, letter
    return WordTable(all_words, np.concatenate(lengths), np.concatenate(a_levels), np.concatenate(b_levels))


def check_cocycle(group: SchottkyGroup, max_len: int = 6) -> float:
    """Max defect of ``b_uv = b_u + A_u b_v`` over reduced concatenations."""
    ws = words(group, max_len)
    cache = {w: evaluate(group, w) for w in ws}
    worst = 0.0
    for u in ws:
        for v in ws:
            if len(u) + len(v) > max_len or (u and v and u[-1] == -v[0]):
                continue
            gu, gv, guv = cache[u], cache[v], cache[u + v]
            worst = max(worst, max_abs(guv.b - (gu.b + gu.A @ gv.b)))
    return worst

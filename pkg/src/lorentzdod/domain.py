"""Thickenings of limit sets in the chart and the complementary domain.

For a limit line ``λ = span(α e + w)`` on Q_L (``w`` null in V'), a chart
point lies on ``Q_λ`` iff ``B(h(v), α e + w) = α + B'(v, w)`` vanishes. The
thickening of a finite sample is therefore a finite union of affine null
hyperplanes ``{B'(v, w) = -α}``, and membership is linear arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .chart import Frame, embed_affine_batch
from .errors import GeometryError, SearchFailed
from .geometry import sin_from_chord
from .groups import SchottkyGroup, Word, word_table
from .limitset import LimitSample

PROXIMAL_TOL = 1e-8
INCIDENCE_TOL = 1e-7


class ProximalToL(GeometryError):
    """A sample point coincides with L, whose quadric is all of the chart's boundary."""


@dataclass(frozen=True)
class NullHyperplaneSet:
    """Chart form of ``Th(C) ∩ L^opp``: rows ``(w, α)`` with ``w`` future null, Euclidean-unit."""

    w: np.ndarray
    alpha: np.ndarray
    gram_prime: np.ndarray = field(repr=False)
    sources: np.ndarray = field(repr=False)
    rejected: int = 0

    def __len__(self) -> int:
        return self.w.shape[0]

    def values(self, v) -> np.ndarray:
        """``B'(v, w_i) + α_i`` for one point ``(m,)`` or a batch ``(p, m)``."""
        v = np.asarray(v, dtype=float)
        return v @ self.gram_prime @ self.w.T + self.alpha

    def to_json(self) -> dict:
        return {
            "items": [
                {"w": [float(x) for x in w], "alpha": float(a), "source": [float(x) for x in s]}
                for w, a, s in zip(self.w, self.alpha, self.sources)
            ],
            "rejected": self.rejected,
        }


def thickening_in_chart(frame: Frame, sample: LimitSample, strict: bool = True, tol_inc: float = INCIDENCE_TOL) -> NullHyperplaneSet:
    """Null-hyperplane model of the thickening of ``sample``.

    Raises
    ------
    ProximalToL
        If a sample point has ``|w| < 1e-8`` (it is L itself) and ``strict``;
        with ``strict=False`` such points are dropped and counted.
    GeometryError
        If a sample point is not on Q_L.
    """
    c = sample.reps @ frame.basis_inv.T
    # frame coordinate along f equals B(e, .)
    off = np.abs(c[:, 1])
    if np.any(off > tol_inc):
        raise GeometryError(f"sample leaves Q_L (max |B(e, p)| = {off.max():.2e})")
    alpha, w = c[:, 0], c[:, 2:]
    norms = np.linalg.norm(w, axis=1)
    proximal = norms < PROXIMAL_TOL
    if proximal.any() and strict:
        raise ProximalToL(f"{int(proximal.sum())} sample point(s) coincide with L")
    keep = ~proximal
    alpha, w, norms = alpha[keep], w[keep], norms[keep]
    sign = np.where(w[:, -1] < 0, -1.0, 1.0) / norms
    return NullHyperplaneSet(
        w * sign[:, None],
        alpha * sign,
        np.array(frame.gram_prime),
        sample.reps[keep],
        int(proximal.sum()),
    )


def domain_margin(hset: NullHyperplaneSet, v) -> float | np.ndarray:
    """``min_i |B'(v, w_i) + α_i| / (1 + |v|)``; ``+inf`` for an empty set.

    Accepts one point or a batch of points (rows).
    """
    v = np.asarray(v, dtype=float)
    if len(hset) == 0:
        return np.inf if v.ndim == 1 else np.full(v.shape[0], np.inf)
    vals = np.abs(hset.values(v))
    out = vals.min(axis=-1) / (1.0 + np.linalg.norm(v, axis=-1))
    return float(out) if v.ndim == 1 else out


def timelike_directions(n: int, count: int | None = None) -> np.ndarray:
    """Euclidean-unit timelike directions of V' from a Halton sequence, both orientations.

    The first pair is the pure time axis.
    """
    count = 64 * n if count is None else count
    m = n - 1
    pts = [np.zeros(m)]
    sampler = qmc.Halton(d=m, scramble=False)
    while len(pts) < count:
        s = 0.95 * (2.0 * sampler.random(count) - 1.0)
        for p in s[np.linalg.norm(s, axis=1) < 0.95]:
            pts.append(p)
            if len(pts) == count:
                break
    dirs = []
    for p in pts:
        for t in (1.0, -1.0):
            u = np.append(p, t)
            dirs.append(u / np.linalg.norm(u))
    return np.array(dirs)


@dataclass(frozen=True)
class DomainPoint:
    v: np.ndarray
    margin: float
    direction: np.ndarray
    ray_scale: float

    def to_json(self) -> dict:
        return {
            "point": [float(x) for x in self.v],
            "margin": float(self.margin),
            "direction": [float(x) for x in self.direction],
            "ray_scale": float(self.ray_scale),
        }


def _ray_search(hset: NullHyperplaneSet, u: np.ndarray, max_doublings: int = 30, rtol: float = 1e-3):
    r, prev = 1.0, domain_margin(hset, u)
    best_r, best = r, prev
    for _ in range(max_doublings):
        r *= 2.0
        cur = domain_margin(hset, r * u)
        if cur > best:
            best_r, best = r, cur
        if abs(cur - prev) <= rtol * max(prev, 1e-300):
            break
        prev = cur
    return best_r, best


def _pattern_search(hset: NullHyperplaneSet, v: np.ndarray, margin: float, max_iter: int = 200):
    n = v.size
    step = 0.1 * (1.0 + np.linalg.norm(v))
    moves = np.vstack([np.eye(n), -np.eye(n)])
    for _ in range(max_iter):
        cand = v + step * moves
        vals = domain_margin(hset, cand)
        j = int(np.argmax(vals))
        if vals[j] > margin:
            v, margin = cand[j], float(vals[j])
        else:
            step *= 0.5
            if step < 1e-6 * (1.0 + np.linalg.norm(v)):
                break
    return v, margin


def find_domain_point(frame: Frame, hset: NullHyperplaneSet, n_dirs: int | None = None, min_margin: float = 1e-12) -> DomainPoint:
    """Search for a chart point off every thickening hyperplane.

    Rays ``R·u`` over Halton timelike directions ``u`` are pushed out by
    doubling R until the margin settles; the best ray point is then polished
    by compass search on :func:`domain_margin`.

    Raises
    ------
    SearchFailed
        If no candidate clears ``min_margin``.
    """
    if len(hset) == 0:
        raise ValueError("find_domain_point needs a nonempty hyperplane set")
    dirs = timelike_directions(frame.n, n_dirs)
    best = (-np.inf, None, None)
    for u in dirs:
        r, m = _ray_search(hset, u)
        if m > best[0]:
            best = (m, r, u)
    margin, r, u = best
    v, margin = _pattern_search(hset, r * u, margin)
    if not margin > min_margin:
        vals = np.abs(hset.values(v))
        raise SearchFailed(
            f"no point with margin above {min_margin:g} (best {margin:.3e})",
            best_point=v,
            best_margin=margin,
            densest_direction=hset.w[int(np.argmin(vals))],
        )
    return DomainPoint(v, float(margin), u, float(r))


@dataclass
class AuditReport:
    """Ball-return counts of an affine action, by word length.

    A word *returns* if the conservative image of the ball may meet the
    ball. ``stabilized`` means no word of the maximal length returns, so the
    returner set at depth N equals the one at depth N-1.
    """

    center: np.ndarray
    radius: float
    depth: int
    per_length: list[int]
    returners: list[Word] = field(repr=False, default_factory=list)

    @property
    def cumulative(self) -> list[int]:
        return np.cumsum(self.per_length).tolist()

    @property
    def stabilized(self) -> bool:
        return self.depth >= 1 and self.cumulative[-1] == self.cumulative[-2]

    @property
    def total(self) -> int:
        return int(sum(self.per_length))

    def to_json(self) -> dict:
        return {
            "center": [float(x) for x in self.center],
            "radius": float(self.radius),
            "depth": self.depth,
            "per_length": list(self.per_length),
            "cumulative": self.cumulative,
            "stabilized": self.stabilized,
            "returners": ["".join(_letter(a) for a in w) or "e" for w in self.returners],
        }


def _letter(a: int) -> str:
    base = chr(ord("a") + abs(a) - 1)
    return base if a > 0 else base.upper()


def ball_returners(a: np.ndarray, b: np.ndarray, center, radius: float) -> np.ndarray:
    """Mask of affine maps whose image of ``B(center, radius)`` may meet it.

    The image lies in ``B(A c + b, |A|_2 r)``, so a miss is certain when the
    centers are farther apart than ``r (1 + |A|_2)``. False positives are
    possible, false negatives are not.
    """
    c = np.asarray(center, dtype=float)
    moved = np.einsum("ijk,k->ij", a, c) + b - c
    dist = np.linalg.norm(moved, axis=1)
    opnorm = np.linalg.norm(a, ord=2, axis=(1, 2))
    return dist <= radius * (1.0 + opnorm)


def audit_table(a, b, lengths, words, center, radius: float, depth: int) -> AuditReport:
    mask = ball_returners(np.asarray(a), np.asarray(b), center, radius)
    lengths = np.asarray(lengths)
    per_length = [int(np.sum(mask & (lengths == m))) for m in range(depth + 1)]
    return AuditReport(np.asarray(center, dtype=float), float(radius), depth, per_length, [words[i] for i in np.flatnonzero(mask)])


def properness_audit(frame: Frame, group: SchottkyGroup, center, radius: float, N: int) -> AuditReport:
    """Count words of length <= N that may bring ``B(center, radius)`` back to itself."""
    if N < 2:
        raise ValueError("audit depth must be >= 2")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    table = word_table(group, N)
    return audit_table(table.A, table.b, table.lengths, table.words, center, radius, N)


def _chart_reps(frame: Frame, v: np.ndarray) -> np.ndarray:
    qv = np.einsum("ij,jk,ik->i", v, frame.gram_prime, v)
    c = np.column_stack([-0.5 * qv, np.ones(len(v)), v])
    return c @ frame.basis.T


def _unit_chord(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    y = y / np.linalg.norm(y, axis=1, keepdims=True)
    d = np.minimum(np.linalg.norm(x - y, axis=1), np.linalg.norm(x + y, axis=1))
    return sin_from_chord(d)


def equivariance_audit(frame: Frame, group: SchottkyGroup, samples) -> float:
    """Max chordal gap between ``h(A v + b)`` and ``g·h(v)`` over generators and their inverses."""
    v = np.atleast_2d(np.asarray(samples, dtype=float))
    worst = 0.0
    for letter in [x for i in range(1, group.k + 1) for x in (i, -i)]:
        g = group.generator(letter)
        mat = embed_affine_batch(frame, g.A[None], g.b[None])[0]
        lhs = _chart_reps(frame, v @ g.A.T + g.b)
        rhs = _chart_reps(frame, v) @ mat.T
        worst = max(worst, float(np.max(_unit_chord(lhs, rhs))))
    return worst

"""Attracting lines of regular elements and finite approximations of limit sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur
from scipy.spatial import cKDTree

from .chart import Frame, embed_affine_batch, transvection
from .errors import EmptySample, NotIsotropic, NotRegular
from .geometry import (
    TOL_NULL,
    IsotropicLine,
    QuadraticSpace,
    canonical_sign,
    chordal_distance,
    quadric_margin,
    sin_from_chord,
)
from .groups import GAP_MIN, SchottkyGroup, alphabet, scale_group, word_table

DEDUP_RADIUS = 1e-8


def _gap_threshold(eigvals: np.ndarray, gap_min: float) -> float:
    mods = np.sort(np.abs(eigvals))[::-1]
    if mods[1] == 0.0:
        return 0.5 * mods[0]
    gap = mods[0] / mods[1]
    if not gap > 1.0 + gap_min:
        raise NotRegular(f"top eigenvalue gap {gap:.6g} is below 1 + {gap_min:g}")
    return float(np.sqrt(mods[0] * mods[1]))


def attracting_line(
    g, space: QuadraticSpace | None = None, gap_min: float = GAP_MIN, tol_null: float = TOL_NULL
) -> IsotropicLine:
    """Dominant eigenline of ``g``, read off a sorted real Schur form.

    Raises
    ------
    NotRegular
        If the top two eigenvalue moduli are within a factor ``1 + gap_min``.
    NotIsotropic
        If ``space`` is given and the eigenline is not null.
    """
    g = np.asarray(g, dtype=float)
    threshold = _gap_threshold(np.linalg.eigvals(g), gap_min)
    _, z, sdim = schur(g, output="real", sort=lambda re, im: np.hypot(re, im) > threshold)
    if sdim != 1:
        raise NotRegular("dominant eigenvalue is not a simple real eigenvalue")
    line = IsotropicLine(z[:, 0])
    if space is not None:
        qv = space.q(line.rep)
        if abs(qv) > tol_null:
            raise NotIsotropic(f"attracting line has |q| = {abs(qv):.3e}")
    return line


def power_iteration_line(g, iters: int = 200, seed: int = 0) -> IsotropicLine:
    """Dominant eigenline by normalized power iteration.

    Kept independent of :func:`attracting_line` so the two can check each other.
    """
    g = np.asarray(g, dtype=float)
    x = np.random.default_rng(seed).standard_normal(g.shape[0])
    for _ in range(iters):
        y = g @ x
        y /= np.linalg.norm(y)
        if min(np.linalg.norm(y - x), np.linalg.norm(y + x)) < 1e-15:
            x = y
            break
        x = y
    return IsotropicLine(x)


def attracting_lines_batch(mats: np.ndarray, gap_min: float = GAP_MIN) -> tuple[np.ndarray, np.ndarray]:
    """Dominant eigenvectors of a stack of matrices.

    Returns ``(reps, regular)``: unit canonical representatives ``(m, d)`` and
    a boolean mask of the elements passing the gap test. Rows failing the
    test hold NaN.
    """
    w, v = np.linalg.eig(mats)
    mods = np.abs(w)
    order = np.argsort(-mods, axis=1)
    rows = np.arange(mats.shape[0])
    top, second = order[:, 0], order[:, 1]
    m1, m2 = mods[rows, top], mods[rows, second]
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = (m1 > (1.0 + gap_min) * m2) & (np.abs(w[rows, top].imag) <= 1e-12 * m1)
    vec = v[rows, :, top]
    reps = np.real(vec)
    reps /= np.linalg.norm(reps, axis=1, keepdims=True)
    reps[~regular] = np.nan
    first = np.argmax(np.abs(reps) > 1e-12, axis=1)
    sign = np.sign(reps[rows, first])
    sign[sign == 0] = 1.0
    reps *= sign[:, None]
    return reps, regular


def refine_by_letters(gen_mats: np.ndarray, letter_idx: np.ndarray, lengths: np.ndarray, reps: np.ndarray, cycles: int = 2) -> np.ndarray:
    """Power-iteration sweeps applying a word one generator at a time.

    The product matrix of a long word is badly conditioned, so its computed
    eigenvectors carry errors far above machine precision. Applying the
    letters in turn keeps each rounding step relative to a generator norm,
    and one sweep already contracts the error by the full eigenvalue gap.
    ``letter_idx[i, j]`` indexes ``gen_mats`` for letter j of word i
    (padded with -1 past ``lengths[i]``).
    """
    x = reps.copy()
    for length in np.unique(lengths):
        rows = np.flatnonzero(lengths == length)
        y = x[rows]
        for _ in range(cycles):
            for pos in range(length - 1, -1, -1):
                y = np.einsum("ijk,ik->ij", gen_mats[letter_idx[rows, pos]], y)
                y /= np.linalg.norm(y, axis=1, keepdims=True)
        x[rows] = y
    first = np.argmax(np.abs(x) > 1e-12, axis=1)
    sign = np.sign(x[np.arange(len(x)), first])
    sign[sign == 0] = 1.0
    return x * sign[:, None]


def dedup_lines(reps: np.ndarray, radius: float = DEDUP_RADIUS) -> np.ndarray:
    """Indices of lines kept by a greedy first-come pass at chordal ``radius``.

    For unit vectors ``|a - b|^2 = 2 - 2 a.b``, so a Euclidean ball over
    ``±reps`` captures exactly the chordal neighbours up to O(radius^3).
    """
    if len(reps) == 0:
        return np.zeros(0, dtype=int)
    tree = cKDTree(np.vstack([reps, -reps]))
    m = len(reps)
    keep = np.zeros(m, dtype=bool)
    pairs = tree.query_ball_point(reps, r=radius)
    for i, nbrs in enumerate(pairs):
        dup = False
        for j in nbrs:
            j = j % m
            if j < i and keep[j]:
                dup = True
                break
        keep[i] = not dup
    return np.flatnonzero(keep)


@dataclass(frozen=True)
class LimitSample:
    """Finite approximation Λ_N of the limit set.

    ``reps`` holds one unit canonical representative per row; ``word_len``
    the length of the word whose attracting line produced it.
    """

    reps: np.ndarray
    word_len: np.ndarray
    group_id: str
    depth: int = 0
    skipped: int = 0

    def __len__(self) -> int:
        return self.reps.shape[0]

    @property
    def points(self) -> list[IsotropicLine]:
        return [IsotropicLine(r) for r in self.reps]

    @classmethod
    def from_lines(cls, lines, word_len=None, group_id: str = "synthetic") -> "LimitSample":
        reps = np.array([ln.rep for ln in lines], dtype=float).reshape(len(lines), -1)
        wl = np.zeros(len(lines), dtype=int) if word_len is None else np.asarray(word_len, dtype=int)
        return cls(reps, wl, group_id)


def limit_sample(
    frame: Frame,
    group: SchottkyGroup,
    N: int,
    gap_min: float = GAP_MIN,
    tol_null: float = TOL_NULL,
    require_certificate: bool = True,
    dedup: bool = True,
) -> LimitSample:
    """Attracting lines of all cyclically reduced words of length 1..N.

    Irregular words are skipped and counted; duplicates within
    ``DEDUP_RADIUS`` keep the shortlex-first word.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if require_certificate and not group.certified:
        raise ValueError("limit_sample needs a group with a ping-pong certificate")
    table = word_table(group, N)
    idx = np.array(
        [i for i, w in enumerate(table.words) if w and w[0] != -w[-1]],
        dtype=int,
    )
    mats = embed_affine_batch(frame, table.A[idx], table.b[idx])
    reps, regular = attracting_lines_batch(mats, gap_min)
    skipped = int(np.sum(~regular))
    if not regular.any():
        raise EmptySample("no word of the requested depth is regular")
    idx, reps = idx[regular], reps[regular]
    lens = table.lengths[idx]
    letters = alphabet(group.k)
    gen_mats = embed_affine_batch(
        frame,
        np.stack([group.generator(x).A for x in letters]),
        np.stack([group.generator(x).b for x in letters]),
    )
    pos = {x: i for i, x in enumerate(letters)}
    letter_idx = np.full((len(idx), N), -1, dtype=int)
    for row, i in enumerate(idx.tolist()):
        w = table.words[i]
        letter_idx[row, : len(w)] = [pos[x] for x in w]
    reps = refine_by_letters(gen_mats, letter_idx, lens, reps)
    qvals = np.einsum("ij,jk,ik->i", reps, frame.space.gram, reps)
    bad = np.abs(qvals) > tol_null
    if bad.any():
        raise NotIsotropic(f"{int(bad.sum())} attracting lines fail the null test (max |q| {np.abs(qvals).max():.2e})")
    keep = dedup_lines(reps) if dedup else np.arange(len(reps))
    return LimitSample(reps[keep], lens[keep], group.group_id, N, skipped)


@dataclass(frozen=True)
class ContainmentReport:
    max_margin: float
    min_dist_to_L: float


def containment_report(space: QuadraticSpace, sample: LimitSample, L: IsotropicLine) -> ContainmentReport:
    """How far the sample is from lying on Q_L, and how close it comes to L."""
    if len(sample) == 0:
        raise EmptySample("empty limit sample")
    margins = np.abs(sample.reps @ space.gram @ L.rep)
    chord = np.minimum(
        np.linalg.norm(sample.reps - L.rep, axis=1),
        np.linalg.norm(sample.reps + L.rep, axis=1),
    )
    dists = sin_from_chord(chord)
    return ContainmentReport(float(margins.max()), float(dists.min()))


def _directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    tree = cKDTree(np.vstack([b, -b]))
    d, _ = tree.query(a)
    return float(np.max(sin_from_chord(d)))


def hausdorff_chordal(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two finite sets of lines in the chordal metric."""
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("Hausdorff distance of an empty set")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def transform_reps(g: np.ndarray, reps: np.ndarray) -> np.ndarray:
    out = reps @ np.asarray(g).T
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return np.array([canonical_sign(r) for r in out])


def scaling_check(frame: Frame, group: SchottkyGroup, t: float, N: int) -> float:
    """Hausdorff distance between ``a_t Λ_N(ρ)`` and ``Λ_N(ρ^t)``."""
    a_t = transvection(frame, t)
    # no dedup: a_t distorts chordal distances, so dedup could keep different twins
    base = limit_sample(frame, group, N, dedup=False)
    scaled = limit_sample(frame, scale_group(group, t), N, dedup=False)
    return hausdorff_chordal(transform_reps(a_t, base.reps), scaled.reps)


def fixed_point_defect(g, line: IsotropicLine) -> float:
    """Chordal distance between ``g·L`` and ``L``."""
    return chordal_distance(IsotropicLine(np.asarray(g) @ line.rep), line)


def margins_to(space: QuadraticSpace, sample: LimitSample, line: IsotropicLine) -> np.ndarray:
    return np.array([quadric_margin(space, p, line) for p in sample.points])

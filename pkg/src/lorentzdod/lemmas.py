"""Randomized checks of the algebraic identities behind the chart."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .chart import (
    Frame,
    apply,
    chart_to_flag,
    embed_affine,
    flag_to_chart,
    levi_embed,
    max_abs,
    random_lorentz,
    shear,
    transvection,
)
from .geometry import QuadraticSpace, chordal_distance, make_space, signature


@dataclass(frozen=True)
class LemmaResult:
    name: str
    samples: int
    max_error: float
    tolerance: float
    passed: bool
    message: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _signature(space: QuadraticSpace, frame, rng, samples):
    sig = signature(space.gram)
    return 0.0 if sig == (space.n, 2) else float("inf")


def _polarization(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        u, v = rng.standard_normal((2, space.dim))
        lhs = space.bilinear(u, v)
        rhs = 0.5 * (space.q(u + v) - space.q(u) - space.q(v))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return worst


def _shear_orthogonality(space, frame, rng, samples):
    g = space.gram
    return max(max_abs(s.T @ g @ s - g) for s in (shear(frame, rng.standard_normal(space.n)) for _ in range(samples)))


def _unipotency(space, frame, rng, samples):
    eye = np.eye(space.dim)
    worst = 0.0
    for _ in range(samples):
        d = shear(frame, rng.standard_normal(space.n)) - eye
        worst = max(worst, max_abs(d @ d @ d))
    return worst


def _homomorphism(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        u, v = rng.standard_normal((2, space.n))
        worst = max(worst, max_abs(shear(frame, u + v) - shear(frame, u) @ shear(frame, v)))
    return worst


def _equivariance(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        a = random_lorentz(frame.gram_prime, rng, scale=0.3)
        v = rng.standard_normal(space.n)
        ah = levi_embed(frame, a)
        worst = max(worst, max_abs(shear(frame, a @ v) - ah @ shear(frame, v) @ np.linalg.inv(ah)))
    return worst


def _null_cone_pairing(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        v = rng.standard_normal(space.n)
        sf = shear(frame, v) @ frame.f
        worst = max(worst, abs(space.bilinear(frame.f, sf) + 0.5 * frame.qp(v)))
    return worst


def _round_trip(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        v = rng.standard_normal(space.n)
        worst = max(worst, max_abs(flag_to_chart(frame, chart_to_flag(frame, v)) - v))
    return worst


def _transvection_scaling(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        t = float(np.exp(rng.uniform(-2.0, 2.0)))
        v = rng.standard_normal(space.n)
        a = transvection(frame, t)
        worst = max(worst, max_abs(a @ shear(frame, v) @ np.linalg.inv(a) - shear(frame, t * v)))
    return worst


def _chart_conjugacy(space, frame, rng, samples):
    worst = 0.0
    for _ in range(samples):
        a = random_lorentz(frame.gram_prime, rng, scale=0.3)
        b, v = rng.standard_normal((2, space.n))
        g = embed_affine(frame, a, b)
        lhs = chart_to_flag(frame, a @ v + b)
        rhs = apply(g, chart_to_flag(frame, v))
        worst = max(worst, chordal_distance(lhs, rhs))
    return worst


LEMMAS: list[tuple[str, Callable, float]] = [
    ("signature", _signature, 0.0),
    ("polarization", _polarization, 1e-12),
    ("shear_orthogonality", _shear_orthogonality, 1e-9),
    ("shear_unipotency", _unipotency, 1e-10),
    ("shear_homomorphism", _homomorphism, 1e-10),
    ("shear_equivariance", _equivariance, 1e-9),
    ("null_cone_pairing", _null_cone_pairing, 1e-12),
    ("chart_round_trip", _round_trip, 1e-10),
    ("transvection_scaling", _transvection_scaling, 1e-10),
    ("chart_conjugacy", _chart_conjugacy, 1e-9),
]


def run_lemma_suite(n: int = 3, seed: int = 0, samples: int = 1000, space: QuadraticSpace | None = None) -> list[LemmaResult]:
    """Run every identity check at dimension n with a seeded generator.

    A lemma that raises is reported as failed with the error message.
    """
    space = make_space(n) if space is None else space
    results = []
    frame = None
    try:
        frame = Frame.standard(space)
    except Exception as exc:  # reported through the lemma results below
        frame_error = str(exc)
    for name, fn, tol in LEMMAS:
        rng = np.random.default_rng([seed, len(results)])
        count = 1 if name == "signature" else samples
        if frame is None and name != "signature":
            results.append(LemmaResult(name, 0, float("inf"), tol, False, f"no frame: {frame_error}"))
            continue
        try:
            err = float(fn(space, frame, rng, count))
            results.append(LemmaResult(name, count, err, tol, err <= tol))
        except Exception as exc:
            results.append(LemmaResult(name, count, float("inf"), tol, False, f"{type(exc).__name__}: {exc}"))
    return results


def first_failure(results: list[LemmaResult]) -> LemmaResult | None:
    return next((r for r in results if not r.passed), None)

"""Command line front end.

Exit codes: 0 success, 1 lemma failure or bad input, 2 ping-pong failure,
3 domain search failure, 4 audit did not stabilize.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import artifacts
from .chart import Frame
from .config import RunConfig
from .domain import domain_margin, find_domain_point, properness_audit, thickening_in_chart, equivariance_audit
from .errors import PingPongFailure, SearchFailed
from .geometry import make_space
from .lemmas import first_failure, run_lemma_suite
from .limitset import containment_report, limit_sample

log = logging.getLogger("lorentzdod")

EXIT_OK = 0
EXIT_LEMMA = 1
EXIT_PINGPONG = 2
EXIT_SEARCH = 3
EXIT_AUDIT = 4

STAGES = ("limit-set", "find-domain", "audit", "pipeline")


@dataclass
class RunResult:
    exit_code: int
    summary: dict = field(default_factory=dict)


def cmd_check_lemmas(cfg: RunConfig, out: Path | None = None) -> RunResult:
    results = run_lemma_suite(cfg.n, cfg.seed, cfg.lemma_samples)
    failed = first_failure(results)
    report = {
        "n": cfg.n,
        "seed": cfg.seed,
        "lemmas": [r.to_json() for r in results],
        "passed": failed is None,
        "first_failure": failed.name if failed else None,
    }
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        artifacts.write_json(out / "lemmas.json", report, "lemmas")
    return RunResult(EXIT_OK if failed is None else EXIT_LEMMA, report)


def run_stages(cfg: RunConfig, out: Path, stage: str = "pipeline") -> RunResult:
    """Run the pipeline up to ``stage`` and write its artifacts into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    tol = cfg.tolerances
    summary: dict = {"config_hash": cfg.config_hash(), "tolerances": dict(tol)}
    space = make_space(cfg.n)
    frame = Frame.standard(space)
    try:
        group = cfg.build_group()
    except PingPongFailure as exc:
        summary["error"] = {"kind": "ping-pong", "message": str(exc), "generator": exc.generator, "margin": exc.margin}
        artifacts.write_json(out / "failure.json", summary, "failure")
        return RunResult(EXIT_PINGPONG, summary)
    summary["certificate_margin"] = group.certificate.margin

    sample = limit_sample(frame, group, cfg.depth)
    report = containment_report(space, sample, frame.L)
    summary["limit_set"] = {
        "points": len(sample),
        "skipped": sample.skipped,
        "max_margin": report.max_margin,
        "min_dist_to_L": report.min_dist_to_L,
    }
    (out / "limit_set.csv").write_text(artifacts.limit_set_csv(sample), encoding="utf-8")
    if cfg.n == 3:
        (out / "limit_set_2d.csv").write_text(artifacts.limit_set_2d_csv(frame, sample), encoding="utf-8")
        xy = artifacts.project_2d(frame, sample.reps)
        (out / "limit_set.svg").write_text(artifacts.scatter_svg(xy, title="limit set"), encoding="utf-8")
    if stage == "limit-set":
        return RunResult(EXIT_OK, summary)

    hset = thickening_in_chart(frame, sample)
    artifacts.write_json(out / "thickening.json", hset.to_json(), "thickening")
    try:
        point = find_domain_point(frame, hset, min_margin=tol["min_margin"])
    except SearchFailed as exc:
        summary["error"] = {"kind": "search", "message": str(exc), "best_margin": exc.best_margin}
        artifacts.write_json(out / "failure.json", summary, "failure")
        return RunResult(EXIT_SEARCH, summary)
    refined = limit_sample(frame, group, cfg.depth + 2)
    refined_margin = domain_margin(thickening_in_chart(frame, refined), point.v)
    dp = point.to_json()
    dp["refined_depth"] = cfg.depth + 2
    dp["refined_margin"] = refined_margin
    dp["degradation"] = 1.0 - refined_margin / point.margin
    artifacts.write_json(out / "domain_point.json", dp, "domain_point")
    summary["domain_point"] = dp
    if stage == "find-domain":
        return RunResult(EXIT_OK, summary)

    radius = point.margin * tol["radius_fraction"]
    audit = properness_audit(frame, group, point.v, radius, cfg.depth)
    rng = np.random.default_rng(cfg.seed)
    eq_err = equivariance_audit(frame, group, rng.standard_normal((1000, cfg.n)))
    payload = audit.to_json()
    payload.update(
        {
            "domain_point": dp,
            "equivariance_error": eq_err,
            "tolerances": dict(tol),
            "config_hash": cfg.config_hash(),
        }
    )
    artifacts.write_json(out / "audit.json", payload, "audit")
    summary["audit"] = {"per_length": audit.per_length, "stabilized": audit.stabilized, "equivariance_error": eq_err}
    if not audit.stabilized:
        return RunResult(EXIT_AUDIT, summary)
    return RunResult(EXIT_OK, summary)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentzdod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check-lemmas", *STAGES):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="TOML or JSON run config")
        p.add_argument("--seed", type=int)
        p.add_argument("--depth", type=int, help="word length N")
        p.add_argument("--scale", type=float, help="cocycle scale t")
        p.add_argument("--n", type=int, help="Lorentz dimension (defaults only)")
        p.add_argument("--out", type=Path)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args) -> RunConfig:
    if args.config is not None:
        cfg = RunConfig.load(args.config)
    else:
        cfg = RunConfig.desk(args.n or 3)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.depth is not None:
        cfg.depth = args.depth
    if args.scale is not None:
        cfg.scale = args.scale
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEMMA
    if args.command == "check-lemmas":
        result = cmd_check_lemmas(cfg, Path(cfg.out) if args.out is not None else None)
        sys.stdout.write(artifacts.dumps_json(result.summary))
        if result.exit_code:
            print(f"lemma failed: {result.summary['first_failure']}", file=sys.stderr)
        return result.exit_code
    result = run_stages(cfg, Path(cfg.out), args.command)
    sys.stdout.write(artifacts.dumps_json(result.summary))
    log.info("exit %d", result.exit_code)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

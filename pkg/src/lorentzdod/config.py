"""Run configuration: a TOML (or JSON) file with exact float round trips."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .groups import SchottkyGroup, default_axes, from_axes, scale_group

DEFAULT_TOLERANCES = {
    "containment": 1e-6,
    "equivariance": 1e-9,
    "radius_fraction": 0.25,
    "margin_degradation": 0.5,
    "min_margin": 1e-12,
}


@dataclass
class GeneratorSpec:
    plus: list[float]
    minus: list[float]
    rapidity: float
    translation: list[float] | None = None

    def to_dict(self) -> dict:
        d = {"plus": list(self.plus), "minus": list(self.minus), "rapidity": self.rapidity}
        if self.translation is not None:
            d["translation"] = list(self.translation)
        return d


@dataclass
class RunConfig:
    n: int = 3
    seed: int = 0
    depth: int = 8
    scale: float = 1.0
    out: str = "out"
    radius: float = 0.5
    random_translations: bool = True
    lemma_samples: int = 1000
    generators: list[GeneratorSpec] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @classmethod
    def desk(cls, n: int = 3, rapidity: float = 3.0, **kw) -> "RunConfig":
        gens = [GeneratorSpec(list(map(float, p)), list(map(float, m)), rapidity) for p, m in default_axes(n, 2)]
        return cls(n=n, generators=gens, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["generators"] = [g.to_dict() for g in self.generators]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        gens = [GeneratorSpec(**g) for g in d.pop("generators", [])]
        tols = dict(DEFAULT_TOLERANCES)
        tols.update(d.pop("tolerances", {}))
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(generators=gens, tolerances=tols, **d)
        if not cfg.generators:
            cfg.generators = cls.desk(cfg.n).generators
        return cfg

    def dumps(self, fmt: str = "toml") -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2, sort_keys=True)
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str, fmt: str = "toml") -> "RunConfig":
        data = json.loads(text) if fmt == "json" else tomli.loads(text)
        return cls.from_dict(data)

    def save(self, path) -> None:
        path = Path(path)
        path.write_text(self.dumps(_fmt(path)), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        return cls.loads(path.read_text(encoding="utf-8"), _fmt(path))

    def config_hash(self) -> str:
        """SHA-256 of the canonical config, ignoring the output directory."""
        d = self.to_dict()
        d.pop("out")
        canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def translations(self) -> np.ndarray:
        """Per-generator translations at scale 1: explicit, else drawn from ``seed``."""
        k = len(self.generators)
        drawn = np.random.default_rng(self.seed).standard_normal((k, self.n))
        out = np.zeros((k, self.n))
        for i, g in enumerate(self.generators):
            if g.translation is not None:
                out[i] = g.translation
            elif self.random_translations:
                out[i] = drawn[i]
        return out

    def build_group(self, scale: float | None = None) -> SchottkyGroup:
        """The certified group at scale ``self.scale`` (or ``scale``)."""
        axes = [(np.array(g.plus), np.array(g.minus)) for g in self.generators]
        base = from_axes(axes, [g.rapidity for g in self.generators], self.radius, self.translations())
        t = self.scale if scale is None else scale
        return base if t == 1.0 else scale_group(base, t)


def _fmt(path: Path) -> str:
    return "json" if path.suffix.lower() == ".json" else "toml"

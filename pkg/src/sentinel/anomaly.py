"""Isolation-forest anomaly scoring over per-actor behavior vectors.

Forests are built from scratch (seeded, deterministic) so scores are
reproducible across runs and platforms. The enhanced role model adds
temporal features and splits each role into regular/irregular behavior
groups; it is opt-in and not part of the standard variant pipeline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .events import ActionKind, Event
from .rng import substream

BASE_DIMENSIONS = (
    "logins", "after_hours_logins", "db_queries", "sensitive_accesses",
    "exports", "export_volume", "external_emails",
)
ENHANCED_DIMENSIONS = BASE_DIMENSIONS + ("burstiness", "after_hours_ratio", "velocity")


def behavior_vector(window: Sequence[Event], enhanced: bool = False) -> tuple[float, ...]:
    """Aggregate one actor's window into a fixed-order count/sum vector."""
    logins = after_hours = queries = sensitive = exports = volume = ext_mail = 0
    per_step: dict[int, int] = {}
    for e in window:
        per_step[e.step] = per_step.get(e.step, 0) + 1
        if e.kind is ActionKind.LOGIN:
            logins += 1
            if e.payload["context"] in ("after_hours", "new_location"):
                after_hours += 1
        elif e.kind in (ActionKind.DB_QUERY, ActionKind.FILE_ACCESS):
            queries += 1
            if e.payload["sensitivity"] == "sensitive":
                sensitive += 1
        elif e.kind is ActionKind.FILE_EXPORT:
            exports += 1
            volume += e.payload["volume"]
        elif e.kind is ActionKind.EMAIL_SEND:
            if e.payload["recipient_domain"] == "external":
                ext_mail += 1
    base = (float(logins), float(after_hours), float(queries), float(sensitive),
            float(exports), float(volume), float(ext_mail))
    if not enhanced:
        return base
    n = len(window)
    span = (max(per_step) - min(per_step) + 1) if per_step else 1
    mean_rate = n / span if span else 0.0
    burstiness = (max(per_step.values()) / mean_rate) if per_step and mean_rate else 0.0
    ah_ratio = after_hours / logins if logins else 0.0
    return base + (burstiness, ah_ratio, float(n) / span)


def harmonic(n: int) -> float:
    return sum(1.0 / k for k in range(1, n + 1))


@lru_cache(maxsize=None)
def average_path_length(n: int) -> float:
    """c(n): expected unsuccessful-search path length in a BST of n points."""
    if n <= 1:
        return 0.0
    return 2.0 * harmonic(n - 1) - 2.0 * (n - 1) / n


class IsoForest:
    """Ensemble of seeded random partition trees; score in (0, 1)."""

    def __init__(self, trees: list[dict], psi: int, dimension: int,
                 training_vectors: tuple[tuple[float, ...], ...]):
        self.trees = trees
        self.psi = psi
        self.dimension = dimension
        self.training_vectors = training_vectors

    @classmethod
    def fit(cls, vectors: Sequence[Sequence[float]], seed: int,
            psi: int = 64, t: int = 50) -> "IsoForest":
        vectors = [tuple(float(x) for x in v) for v in vectors]
        if len(vectors) < 2:
            raise ValueError("need at least 2 vectors to fit a forest")
        dims = {len(v) for v in vectors}
        if len(dims) != 1:
            raise ValueError("inconsistent vector dimensions")
        dimension = dims.pop()
        psi_eff = min(psi, len(vectors))
        depth_limit = max(1, math.ceil(math.log2(psi_eff)))
        rng = substream(seed, "isoforest")
        trees = []
        for _ in range(t):
            idx = list(range(len(vectors)))
            rng.shuffle(idx)
            sample = [vectors[i] for i in idx[:psi_eff]]
            trees.append(_build_tree(sample, rng, 0, depth_limit))
        return cls(trees, psi_eff, dimension, tuple(vectors))

    def path_length(self, v: Sequence[float], tree: dict) -> float:
        depth = 0
        node = tree
        while "leaf" not in node:
            node = node["left"] if v[node["dim"]] < node["split"] else node["right"]
            depth += 1
        # A query that differs from a pure point-mass leaf is separable from
        # the whole mass, i.e. effectively isolated at this depth.
        if "value" in node and list(v) != node["value"]:
            return float(depth)
        return depth + average_path_length(node["leaf"])

    def score(self, v: Sequence[float]) -> float:
        if len(v) != self.dimension:
            raise ValueError(
                f"vector dimension {len(v)} != forest dimension {self.dimension}"
            )
        mean_path = sum(self.path_length(v, t) for t in self.trees) / len(self.trees)
        return 2.0 ** (-mean_path / average_path_length(self.psi))

    def to_json(self) -> str:
        return json.dumps({
            "format_version": 1, "psi": self.psi, "dimension": self.dimension,
            "trees": self.trees,
            "training_vectors": [list(v) for v in self.training_vectors],
        }, sort_keys=True)

    @classmethod
    def from_json(cls, payload: str) -> "IsoForest":
        doc = json.loads(payload)
        if doc.get("format_version") != 1:
            raise ValueError(f"unsupported forest version {doc.get('format_version')!r}")
        return cls(doc["trees"], doc["psi"], doc["dimension"],
                   tuple(tuple(v) for v in doc["training_vectors"]))


def _leaf(sample: list[tuple[float, ...]]) -> dict:
    node = {"leaf": len(sample)}
    if len(sample) > 1 and all(s == sample[0] for s in sample):
        node["value"] = list(sample[0])
    return node


def _build_tree(sample: list[tuple[float, ...]], rng, depth: int, limit: int) -> dict:
    if len(sample) <= 1 or depth >= limit:
        return _leaf(sample)
    splittable = [d for d in range(len(sample[0]))
                  if min(s[d] for s in sample) < max(s[d] for s in sample)]
    if not splittable:
        return _leaf(sample)
    dim = splittable[rng.randint(0, len(splittable) - 1)]
    lo = min(s[dim] for s in sample)
    hi = max(s[dim] for s in sample)
    split = lo + (hi - lo) * rng.random()
    left = [s for s in sample if s[dim] < split]
    right = [s for s in sample if s[dim] >= split]
    if not left or not right:  # degenerate cut at the boundary
        return _leaf(sample)
    return {"dim": dim, "split": split,
            "left": _build_tree(left, rng, depth + 1, limit),
            "right": _build_tree(right, rng, depth + 1, limit)}


def fit_excluding(
    vectors_by_actor: Mapping[str, Sequence[Sequence[float]]],
    excluded_actors: Iterable[str], seed: int,
    psi: int = 64, t: int = 50,
) -> Optional[IsoForest]:
    """Fit a forest on all actors' vectors minus the excluded (adversary) set.

    Returns None when fewer than 2 vectors remain.
    """
    excluded = set(excluded_actors)
    vectors = [v for actor, vs in sorted(vectors_by_actor.items())
               if actor not in excluded for v in vs]
    if len(vectors) < 2:
        return None
    return IsoForest.fit(vectors, seed=seed, psi=psi, t=t)


@dataclass(frozen=True)
class MlAdviceConfig:
    weight: float = 0.5
    score_floor: float = 0.5   # forest scores below this are ignored
    band: float = 0.8          # advice applies only when risk >= band * threshold


def ml_advice(score: float, risk: float, theta_confirm: float,
              config: MlAdviceConfig = MlAdviceConfig()) -> float:
    """Nudge a near-threshold risk upward using the anomaly score.

    Never lowers risk; never fires below the near-threshold band; the nudge
    is capped so ML advice alone cannot bridge more than
    (1 - band) * theta_confirm.
    """
    if risk < config.band * theta_confirm:
        return risk
    bump = config.weight * max(0.0, score - config.score_floor)
    return risk + min(bump, (1.0 - config.band) * theta_confirm)


class EnhancedRoleAnomalyModel:
    """Per-(role, regularity-group) forests over enhanced behavior vectors.

    Training excludes adversary-controlled actors. Scoring falls back to the
    role-wide forest when a group has too little data.
    """

    def __init__(self, seed: int, psi: int = 64, t: int = 50):
        self.seed = seed
        self.psi = psi
        self.t = t
        self.forests: dict[tuple[str, str], IsoForest] = {}
        self.role_forests: dict[str, IsoForest] = {}

    def fit(
        self,
        vectors: Mapping[tuple[str, str], Mapping[str, Sequence[Sequence[float]]]],
        excluded_actors: Iterable[str],
    ) -> None:
        excluded = set(excluded_actors)
        by_role: dict[str, dict[str, list]] = {}
        for (role, group), actor_map in sorted(vectors.items()):
            forest = fit_excluding(actor_map, excluded, seed=self.seed,
                                   psi=self.psi, t=self.t)
            if forest is not None:
                self.forests[(role, group)] = forest
            merged = by_role.setdefault(role, {})
            for actor, vs in actor_map.items():
                merged.setdefault(actor, []).extend(vs)
        for role, actor_map in sorted(by_role.items()):
            forest = fit_excluding(actor_map, excluded, seed=self.seed,
                                   psi=self.psi, t=self.t)
            if forest is not None:
                self.role_forests[role] = forest

    def score(self, role: str, group: str, v: Sequence[float]) -> float:
        forest = self.forests.get((role, group)) or self.role_forests.get(role)
        if forest is None:
            return 0.0
        return forest.score(v)

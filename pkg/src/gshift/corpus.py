"""
Seeded random corpus of eventually-affine maps and the cross-map invariants every
member must satisfy.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .classifier import ChaosProfile, classify
from .config import Budget
from .configuration import Alphabet
from .documents import MapDocument
from .dynamics_lab import ClaimStatus, VerificationReport, verify_profile
from .errors import InvariantViolation
from .index_map import (
    MapSpec,
    classify_point,
    core_bound,
    orbit_intersection_times,
    per_empty,
    w_nonempty,
)

logger = logging.getLogger(__name__)

REGIMES = ("expanding", "translation", "bounded")
MAX_THRESHOLD = 6
# Intersection-count check: index sets of up to four points, times up to 50
CHECK_SET_SIZE = 4
CHECK_STEPS = 50


def regime(spec: MapSpec) -> str:
    if spec.tail.a >= 2:
        return "expanding"
    if spec.tail.a == 1 and spec.tail.b >= 1:
        return "translation"
    return "bounded"


def _draw_tail(rng: np.random.Generator, kind: str) -> tuple[int, int]:
    if kind == "expanding":
        return int(rng.integers(2, 4)), int(rng.integers(-2, 4))
    if kind == "translation":
        return 1, int(rng.integers(1, 4))
    if rng.random() < 0.5:
        return 0, int(rng.integers(1, 7))
    return 1, int(rng.integers(-3, 1))


def random_map(rng: np.random.Generator, name: str) -> MapDocument:
    """One map: tail regime uniform, overrides uniform over a bounded image range."""
    kind = REGIMES[int(rng.integers(0, len(REGIMES)))]
    a, b = _draw_tail(rng, kind)
    threshold = int(rng.integers(0, MAX_THRESHOLD + 1))
    while a * (threshold + 1) + b < 1:
        threshold += 1
    image_range = 2 * threshold + 4
    overrides = {}
    for key in range(1, threshold + 1):
        tail_value = a * key + b
        if tail_value >= 1 and rng.random() < 0.5:
            continue
        image = int(rng.integers(1, image_range + 1))
        if image == tail_value:
            image = image % image_range + 1
        overrides[key] = image
    spec = MapSpec.build(a, b, overrides, threshold=threshold)
    alphabet_size = int(rng.integers(2, 4))
    return MapDocument(name=name, spec=spec, alphabet_size=alphabet_size)


def generate(count: int, seed: int) -> list[MapDocument]:
    if count < 1:
        raise InvariantViolation(f"Corpus size must be positive, got {count}.")
    rng = np.random.default_rng(seed)
    return [random_map(rng, f"corpus-{seed}-{i}") for i in range(count)]


def _check_sets(spec: MapSpec) -> tuple[list[int], list[int]]:
    base = list(range(1, core_bound(spec) + 2 * CHECK_SET_SIZE + 1))
    return base[:CHECK_SET_SIZE], base[-CHECK_SET_SIZE:]


def invariant_violations(spec: MapSpec, profile: ChaosProfile) -> list[str]:
    """Cross-checks of a profile against the orbit structure it was read from."""
    violations = list(profile.coherence_errors())
    no_periodic = per_empty(spec)
    core_escapes = spec.tail.is_escaping and all(
        classify_point(spec, n).is_escaping for n in range(1, core_bound(spec) + 1)
    )
    if no_periodic != core_escapes:
        violations.append("per_empty disagrees with the core scan")
    if profile.li_yorke_sensitive != no_periodic:
        violations.append("li_yorke_sensitive differs from per_empty")
    if profile.sensitive != w_nonempty(spec):
        violations.append("sensitive differs from w_nonempty")
    if profile.sensitive != (profile.entropy > 0):
        violations.append("sensitive disagrees with positive entropy")
    if no_periodic:
        a_set, b_set = _check_sets(spec)
        try:
            orbit_intersection_times(spec, a_set, b_set, CHECK_STEPS)
        except InvariantViolation as e:
            violations.append(str(e))
    return violations


@dataclass(frozen=True)
class CorpusEntry:
    document: MapDocument
    profile: ChaosProfile
    verification: VerificationReport
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations and self.verification.status is not ClaimStatus.FAIL

    def to_json(self) -> dict:
        return {
            "map": self.document.to_json(),
            "regime": regime(self.document.spec),
            "profile": self.profile.to_json(),
            "verification": self.verification.status.value,
            "violations": list(self.violations),
        }


@dataclass(frozen=True)
class CorpusReport:
    seed: int
    entries: tuple[CorpusEntry, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(entry.ok for entry in self.entries)

    @property
    def first_offender(self) -> CorpusEntry | None:
        return next((entry for entry in self.entries if not entry.ok), None)

    def summary_frame(self) -> pd.DataFrame:
        rows = [
            {
                "name": entry.document.name,
                "regime": regime(entry.document.spec),
                "li_yorke_sensitive": entry.profile.li_yorke_sensitive,
                "sensitive": entry.profile.sensitive,
                "devaney_chaotic": entry.profile.devaney_chaotic,
                "ok": entry.ok,
            }
            for entry in self.entries
        ]
        return pd.DataFrame(rows)

    def summary(self) -> dict[str, dict[str, int]]:
        """Per-regime counts of maps and of each leading flag."""
        frame = self.summary_frame()
        counts = frame.groupby("regime")[
            ["li_yorke_sensitive", "sensitive", "devaney_chaotic"]
        ].sum()
        counts["maps"] = frame.groupby("regime").size()
        return {
            str(name): {column: int(value) for column, value in row.items()}
            for name, row in counts.sort_index().iterrows()
        }

    def to_json(self) -> dict:
        offender = self.first_offender
        return {
            "seed": self.seed,
            "count": len(self.entries),
            "ok": self.ok,
            "summary": self.summary(),
            "maps": [entry.to_json() for entry in self.entries],
            "offender": None if offender is None else offender.to_json(),
        }


def run_corpus(
    count: int,
    seed: int,
    budget: Budget | None = None,
    corrupt: Callable[[ChaosProfile], ChaosProfile] | None = None,
) -> CorpusReport:
    """
    Generate, classify and verify a corpus. corrupt, when given, rewrites every
    profile before it is checked; tests use it to prove the checks can fail.
    """
    budget = budget or Budget()
    entries = []
    for document in generate(count, seed):
        profile = classify(document.spec, document.alphabet_size)
        if corrupt is not None:
            profile = corrupt(profile)
        verification = verify_profile(
            document.spec, Alphabet(document.alphabet_size), budget, profile
        )
        violations = tuple(invariant_violations(document.spec, profile))
        entry = CorpusEntry(document, profile, verification, violations)
        if not entry.ok:
            logger.warning(f"Corpus map {document.name} ({document.spec.describe()}) fails checks")
        entries.append(entry)
    return CorpusReport(seed=seed, entries=tuple(entries))

"""
Empirical verification harness.

Orbit distance series with certified intervals, one-sided liminf/limsup window
estimates, witness-sampled occurrence sets N(V, eps), and the oracle cross-check that
replays every witness against the flag of the classifier that predicts it.
"""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
import pandas as pd

from .classifier import ChaosProfile, classify, entropy_from_count
from .config import Budget, Config
from .configuration import (
    IDENTITY,
    Alphabet,
    Configuration,
    Constant,
    DistanceInterval,
    Enumeration,
    iter_orbit_distances,
)
from .dyadic import ONE, Dyadic
from .errors import EmptyWindow, GShiftError, InvariantViolation
from .index_map import Exactness, MapSpec, core_bound, orbit_count, w_nonempty
from .witnesses import (
    dense_chaos_refutation,
    li_yorke_witness,
    non_sensitivity_certificate,
    sensitivity_witness,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistanceSeries:
    entries: tuple[tuple[int, DistanceInterval], ...]
    depth: int
    horizon: int

    def __post_init__(self):
        if [t for t, _ in self.entries] != list(range(self.horizon + 1)):
            raise InvariantViolation("Distance series must cover t = 0..horizon in order.")
        if any(iv.truncation_depth != self.depth for _, iv in self.entries):
            raise InvariantViolation("Distance series intervals must share one depth.")

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, t: int) -> DistanceInterval:
        return self.entries[t][1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "t": t,
                    "lower": float(iv.lower),
                    "upper": float(iv.upper),
                    "exact": iv.is_exact,
                }
                for t, iv in self.entries
            ],
            columns=["t", "lower", "upper", "exact"],
        )

    def to_json(self) -> list[dict]:
        return [{"t": t, **iv.to_json()} for t, iv in self.entries]


class Verdict(str, Enum):
    LIKELY_SCRAMBLED = "LikelyScrambled"
    LIKELY_NOT_SCRAMBLED = "LikelyNotScrambled"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ScrambledVerdict:
    liminf_upper_estimate: Dyadic
    limsup_lower_estimate: Dyadic
    window: int
    verdict: Verdict
    tol: Dyadic
    sep: Dyadic

    def to_json(self) -> dict:
        return {
            "liminf_upper_estimate": self.liminf_upper_estimate.to_json(),
            "limsup_lower_estimate": self.limsup_lower_estimate.to_json(),
            "window": self.window,
            "verdict": self.verdict.value,
            "tol": self.tol.to_json(),
            "sep": self.sep.to_json(),
        }


@dataclass(frozen=True)
class OccurrenceSet:
    """
    Times t <= horizon at which the witness pair is more than epsilon apart.

    gap_max is the largest gap between consecutive times (horizon + 1 with fewer
    than two times). first_wait is the least time, the wait from t = 0 that gap_max
    leaves out (horizon + 1 when there are none).
    cofinite_from is the least s with [s, horizon] inside times, or None when
    horizon itself is missing.
    """

    epsilon: Dyadic
    horizon: int
    times: frozenset[int]
    gap_max: int = field(init=False)
    first_wait: int = field(init=False)
    density: Fraction = field(init=False)
    cofinite_from: int | None = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "times", frozenset(self.times))
        if any(not 0 <= t <= self.horizon for t in self.times):
            raise InvariantViolation(f"Occurrence times must lie in [0, {self.horizon}].")
        ordered = sorted(self.times)
        gaps = [b - a for a, b in zip(ordered, ordered[1:])]
        gap_max = max(gaps, default=self.horizon + 1)
        first_wait = ordered[0] if ordered else self.horizon + 1
        cofinite_from = None
        if self.horizon in self.times:
            cofinite_from = self.horizon
            while cofinite_from - 1 in self.times:
                cofinite_from -= 1
        object.__setattr__(self, "gap_max", gap_max)
        object.__setattr__(self, "first_wait", first_wait)
        object.__setattr__(self, "density", Fraction(len(ordered), self.horizon + 1))
        object.__setattr__(self, "cofinite_from", cofinite_from)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon.to_json(),
            "horizon": self.horizon,
            "times": sorted(self.times),
            "gap_max": self.gap_max,
            "first_wait": self.first_wait,
            "density": {
                "numerator": self.density.numerator,
                "denominator": self.density.denominator,
            },
            "cofinite_from": self.cofinite_from,
        }


def distance_series(
    spec: MapSpec,
    x: Configuration,
    y: Configuration,
    horizon: int,
    depth: int,
    enumeration: Enumeration = IDENTITY,
) -> DistanceSeries:
    if horizon < 1 or depth < 1:
        raise InvariantViolation(f"Horizon and depth must be positive, got {horizon}, {depth}.")
    entries = tuple(iter_orbit_distances(spec, x, y, horizon, depth, enumeration))
    return DistanceSeries(entries=entries, depth=depth, horizon=horizon)


def estimate_liminf_limsup(series: DistanceSeries, window_start: int) -> tuple[Dyadic, Dyadic]:
    """
    One-sided window certificates: the true liminf is at most the returned
    liminf_upper and the true limsup at least the returned limsup_lower.
    """
    if not 0 <= window_start < series.horizon:
        raise EmptyWindow(f"Window start {window_start} outside [0, {series.horizon}).")
    window = [iv for t, iv in series if t >= window_start]
    return min(iv.upper for iv in window), max(iv.lower for iv in window)


def scrambled_verdict(
    spec: MapSpec,
    x: Configuration,
    y: Configuration,
    horizon: int,
    depth: int,
    window_start: int,
    tol: Dyadic,
    sep: Dyadic,
    enumeration: Enumeration = IDENTITY,
) -> ScrambledVerdict:
    """
    LikelyScrambled when the window both comes within tol and moves sep apart;
    LikelyNotScrambled when its lower bounds never come within tol or its upper
    bounds never reach sep; Inconclusive otherwise.
    """
    if tol <= 0 or sep <= 0:
        raise InvariantViolation("Verdict thresholds tol and sep must be positive.")
    series = distance_series(spec, x, y, horizon, depth, enumeration)
    liminf_upper, limsup_lower = estimate_liminf_limsup(series, window_start)
    window = [iv for t, iv in series if t >= window_start]
    if liminf_upper <= tol and limsup_lower >= sep:
        verdict = Verdict.LIKELY_SCRAMBLED
    elif min(iv.lower for iv in window) > tol or max(iv.upper for iv in window) < sep:
        verdict = Verdict.LIKELY_NOT_SCRAMBLED
    else:
        verdict = Verdict.INCONCLUSIVE
    return ScrambledVerdict(
        liminf_upper_estimate=liminf_upper,
        limsup_lower_estimate=limsup_lower,
        window=window_start,
        verdict=verdict,
        tol=tol,
        sep=sep,
    )


def occurrence_set(
    spec: MapSpec,
    alphabet: Alphabet,
    x: Configuration,
    neighborhood_coords: Iterable[int],
    epsilon: Dyadic,
    horizon: int,
    depth: int = Budget.depth,
) -> OccurrenceSet:
    """
    Underapproximation of N(V, epsilon) sampled with the sensitivity witness built for
    the box V around x; empty when no point escapes or epsilon >= 1.
    """
    if epsilon <= 0:
        raise InvariantViolation(f"Epsilon must be positive, got {epsilon}.")
    if epsilon >= ONE or not w_nonempty(spec):
        logger.debug(f"No separated pairs to sample for {spec.describe()} at eps={epsilon}")
        return OccurrenceSet(epsilon=epsilon, horizon=horizon, times=frozenset())
    witness = sensitivity_witness(spec, alphabet, x, neighborhood_coords)
    witness_depth = max(depth, witness.theta_index)
    times = frozenset(
        t
        for t, iv in iter_orbit_distances(spec, x, witness.z, horizon, witness_depth)
        if iv.lower > epsilon
    )
    return OccurrenceSet(epsilon=epsilon, horizon=horizon, times=times)


def _sampling_range(spec: MapSpec) -> range:
    return range(1, core_bound(spec) + Config.SAMPLER_SPREAD + 1)


def sample_box_configuration(
    rng: np.random.Generator,
    alphabet: Alphabet,
    box: Iterable[tuple[int, int]],
    indices: Iterable[int],
) -> Configuration:
    """Random symbols on the given indices and a random constant fill, then the box pinned."""
    indices = list(indices)
    symbols = rng.integers(0, alphabet.size, size=len(indices))
    overrides = {n: int(s) for n, s in zip(indices, symbols)}
    overrides.update(dict(box))
    fill = Constant(int(rng.integers(0, alphabet.size)))
    return Configuration(alphabet, tuple(overrides.items()), fill)


def sample_agreeing_configuration(
    rng: np.random.Generator,
    x: Configuration,
    pinned: Iterable[int],
    indices: Iterable[int],
) -> Configuration:
    """A random configuration that copies x on the pinned coordinates."""
    box = [(n, x[n]) for n in pinned]
    return sample_box_configuration(rng, x.alphabet, box, indices)


class ClaimStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class ClaimOutcome:
    name: str
    status: ClaimStatus
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status.value, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    claims: tuple[ClaimOutcome, ...]

    @property
    def status(self) -> ClaimStatus:
        statuses = {claim.status for claim in self.claims}
        if ClaimStatus.FAIL in statuses:
            return ClaimStatus.FAIL
        if ClaimStatus.INCONCLUSIVE in statuses:
            return ClaimStatus.INCONCLUSIVE
        return ClaimStatus.PASS

    def __getitem__(self, name: str) -> ClaimOutcome:
        return next(claim for claim in self.claims if claim.name == name)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "claims": {claim.name: claim.to_json() for claim in self.claims},
        }


def _center(spec: MapSpec, alphabet: Alphabet, rng: np.random.Generator) -> Configuration:
    return sample_box_configuration(rng, alphabet, (), _sampling_range(spec))


def _neighbourhood() -> frozenset[int]:
    return frozenset(range(1, Config.NEIGHBOURHOOD_SIZE + 1))


def _claim_sensitivity_witness(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "sensitivity_witness"
    if not profile.sensitive:
        return ClaimOutcome(name, ClaimStatus.SKIPPED, {"reason": "profile not sensitive"})
    x = _center(spec, alphabet, np.random.default_rng(budget.seed))
    witness = sensitivity_witness(spec, alphabet, x, _neighbourhood())
    detail = {"witness": witness.to_json()}
    if witness.from_step > budget.horizon:
        return ClaimOutcome(name, ClaimStatus.INCONCLUSIVE, detail)
    in_box = all(witness.z[n] == x[n] for n in witness.neighbourhood)
    depth = max(budget.depth, witness.theta_index)
    violations = [
        t
        for t, iv in iter_orbit_distances(spec, x, witness.z, budget.horizon, depth)
        if t >= witness.from_step and not witness.separates(iv)
    ]
    detail["violations"] = violations
    detail["in_box"] = in_box
    ok = in_box and not violations
    return ClaimOutcome(name, ClaimStatus.PASS if ok else ClaimStatus.FAIL, detail)


def _claim_non_sensitivity(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "non_sensitivity_certificate"
    if profile.sensitive:
        return ClaimOutcome(name, ClaimStatus.SKIPPED, {"reason": "profile sensitive"})
    rng = np.random.default_rng(budget.seed)
    certificate = non_sensitivity_certificate(spec, budget.epsilon)
    x = _center(spec, alphabet, rng)
    failures = 0
    for _ in range(budget.samples):
        y = sample_agreeing_configuration(rng, x, certificate.lambda_set, _sampling_range(spec))
        if not certificate.admits(x, y) or not all(
            certificate.holds(iv)
            for _, iv in iter_orbit_distances(spec, x, y, budget.horizon, certificate.depth)
        ):
            failures += 1
    detail = {"certificate": certificate.to_json(), "samples": budget.samples, "failures": failures}
    return ClaimOutcome(name, ClaimStatus.FAIL if failures else ClaimStatus.PASS, detail)


def _claim_li_yorke(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "li_yorke_scrambled"
    if not profile.li_yorke_sensitive:
        return ClaimOutcome(name, ClaimStatus.SKIPPED, {"reason": "profile not li_yorke_sensitive"})
    x = Configuration.constant(alphabet, 0)
    witness = li_yorke_witness(spec, alphabet, x, budget.prefix, budget)
    verdict = scrambled_verdict(
        spec,
        x,
        witness.y,
        budget.horizon,
        budget.depth,
        budget.window,
        budget.tolerance,
        budget.separation,
    )
    status = {
        Verdict.LIKELY_SCRAMBLED: ClaimStatus.PASS,
        Verdict.LIKELY_NOT_SCRAMBLED: ClaimStatus.FAIL,
        Verdict.INCONCLUSIVE: ClaimStatus.INCONCLUSIVE,
    }[verdict.verdict]
    detail = {"witness": witness.to_json(), "verdict": verdict.to_json()}
    return ClaimOutcome(name, status, detail)


def _claim_dense_refutation(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "dense_chaos_refutation"
    if profile.densely_chaotic:
        return ClaimOutcome(name, ClaimStatus.SKIPPED, {"reason": "profile densely_chaotic"})
    rng = np.random.default_rng(budget.seed)
    refutation = dense_chaos_refutation(spec, alphabet)
    depth = max(budget.depth, refutation.position)
    indices = _sampling_range(spec)
    failures = 0
    for _ in range(budget.samples):
        x = sample_box_configuration(rng, alphabet, refutation.box_u, indices)
        y = sample_box_configuration(rng, alphabet, refutation.box_v, indices)
        if not all(
            refutation.holds(iv)
            for _, iv in iter_orbit_distances(spec, x, y, budget.horizon, depth)
        ):
            failures += 1
    detail = {"refutation": refutation.to_json(), "samples": budget.samples, "failures": failures}
    return ClaimOutcome(name, ClaimStatus.FAIL if failures else ClaimStatus.PASS, detail)


def _claim_entropy(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "entropy_certificate"
    count = orbit_count(spec)
    value = entropy_from_count(count, alphabet.size)
    detail = {
        "orbit_count": "infinity" if count.is_infinite else count.value,
        "exactness": count.exactness.value,
    }
    if count.exactness is Exactness.LOWER_BOUND:
        return ClaimOutcome(name, ClaimStatus.INCONCLUSIVE, detail)
    ok = value == profile.entropy and (value > 0) == profile.topologically_chaotic
    return ClaimOutcome(name, ClaimStatus.PASS if ok else ClaimStatus.FAIL, detail)


def _claim_occurrence_cofinite(spec, alphabet, profile, budget) -> ClaimOutcome:
    name = "occurrence_cofinite"
    if not profile.cofinitely_sensitive:
        return ClaimOutcome(name, ClaimStatus.SKIPPED, {"reason": "profile not cofinitely_sensitive"})
    x = _center(spec, alphabet, np.random.default_rng(budget.seed))
    witness = sensitivity_witness(spec, alphabet, x, _neighbourhood())
    if witness.from_step > budget.horizon:
        return ClaimOutcome(name, ClaimStatus.INCONCLUSIVE, {"from_step": witness.from_step})
    epsilon = Dyadic.pow2(-(witness.theta_index + 1))
    occurrences = occurrence_set(
        spec, alphabet, x, witness.neighbourhood, epsilon, budget.horizon, budget.depth
    )
    ok = occurrences.cofinite_from is not None and occurrences.cofinite_from <= witness.from_step
    detail = {"occurrences": occurrences.to_json(), "from_step": witness.from_step}
    return ClaimOutcome(name, ClaimStatus.PASS if ok else ClaimStatus.FAIL, detail)


CLAIMS: dict[str, Callable[..., ClaimOutcome]] = {
    "dense_chaos_refutation": _claim_dense_refutation,
    "entropy_certificate": _claim_entropy,
    "li_yorke_scrambled": _claim_li_yorke,
    "non_sensitivity_certificate": _claim_non_sensitivity,
    "occurrence_cofinite": _claim_occurrence_cofinite,
    "sensitivity_witness": _claim_sensitivity_witness,
}


def verify_profile(
    spec: MapSpec,
    alphabet: Alphabet,
    budget: Budget | None = None,
    profile: ChaosProfile | None = None,
) -> VerificationReport:
    """
    Replay every witness or refutation the profile calls for and check it.

    A witness that cannot even be built for the map counts as a failed claim, so a
    profile that disagrees with the map shows up as failures rather than errors.
    """
    budget = budget or Budget()
    profile = profile or classify(spec, alphabet.size)
    outcomes = []
    for name, claim in sorted(CLAIMS.items()):
        try:
            outcome = claim(spec, alphabet, profile, budget)
        except GShiftError as e:
            outcome = ClaimOutcome(name, ClaimStatus.FAIL, {"error": str(e)})
        logger.debug(f"Claim {name} on {spec.describe()}: {outcome.status.value}")
        outcomes.append(outcome)
    return VerificationReport(claims=tuple(outcomes))

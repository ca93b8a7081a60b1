"""
Constructive witnesses for each verdict of the classifier, and refutations for the
negative ones.

Every construction is deterministic: the base point is always the least escaping
(or least-positioned periodic) index and every symbol choice is the least symbol
that qualifies.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass

from .config import Budget
from .configuration import (
    IDENTITY,
    Alphabet,
    BlockSchedule,
    Configuration,
    Constant,
    DistanceInterval,
    Enumeration,
    OrbitMarked,
    TailSchedule,
    coordinate,
    iter_orbit_distances,
)
from .documents import configuration_to_json
from .dyadic import ZERO, Dyadic
from .errors import (
    AlphabetMismatch,
    EscapingPointPresent,
    InvariantViolation,
    NoEscapingPoint,
    NoPeriodicPoint,
    PeriodicPointPresent,
)
from .index_map import (
    MapSpec,
    QuasiPeriodic,
    apply,
    classify_point,
    core_bound,
    forward_closure,
    least_escaping_point,
    per_empty,
    periodic_points,
    w_nonempty,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScrambledPairCandidate:
    x: Configuration
    y: Configuration
    theta: int
    block_schedule: BlockSchedule

    def to_json(self) -> dict:
        return {
            "kind": "scrambled",
            "theta": self.theta,
            "block_schedule": self.block_schedule.to_json(),
            "x": configuration_to_json(self.x),
            "y": configuration_to_json(self.y),
        }


@dataclass(frozen=True)
class LiYorkeWitness:
    y: Configuration
    mu_estimate: DistanceInterval
    prefix: int
    theta: int
    window: int
    horizon: int

    def to_json(self) -> dict:
        return {
            "kind": "li-yorke",
            "theta": self.theta,
            "prefix": self.prefix,
            "y": configuration_to_json(self.y),
            "mu_estimate": self.mu_estimate.to_json(),
            "window": self.window,
            "horizon": self.horizon,
        }


@dataclass(frozen=True)
class SensitivityWitness:
    z: Configuration
    from_step: int
    separation: Dyadic
    theta_index: int
    theta: int
    neighbourhood: frozenset[int]

    def separates(self, interval: DistanceInterval) -> bool:
        """The exact guarantee at one step m >= from_step."""
        return interval.lower >= self.separation

    def to_json(self) -> dict:
        return {
            "kind": "sensitivity",
            "theta": self.theta,
            "theta_index": self.theta_index,
            "from_step": self.from_step,
            "separation": self.separation.to_json(),
            "neighbourhood": sorted(self.neighbourhood),
            "z": configuration_to_json(self.z),
        }


@dataclass(frozen=True)
class NonSensitivityCertificate:
    lambda_set: frozenset[int]
    epsilon: Dyadic
    depth: int

    def admits(self, x: Configuration, y: Configuration) -> bool:
        """True when y agrees with x on the whole of lambda_set."""
        return all(coordinate(x, n) == coordinate(y, n) for n in self.lambda_set)

    def holds(self, interval: DistanceInterval) -> bool:
        return interval.upper < self.epsilon

    def to_json(self) -> dict:
        return {
            "kind": "non-sensitivity",
            "lambda_set": sorted(self.lambda_set),
            "epsilon": self.epsilon.to_json(),
            "depth": self.depth,
        }


@dataclass(frozen=True)
class DenseChaosRefutation:
    beta: int
    period: int
    cycle: tuple[int, ...]
    position: int
    box_u: tuple[tuple[int, int], ...]
    box_v: tuple[tuple[int, int], ...]
    liminf_bound: Dyadic

    @staticmethod
    def _in_box(box: Iterable[tuple[int, int]], x: Configuration) -> bool:
        return all(coordinate(x, n) == symbol for n, symbol in box)

    def in_box_u(self, x: Configuration) -> bool:
        return self._in_box(self.box_u, x)

    def in_box_v(self, y: Configuration) -> bool:
        return self._in_box(self.box_v, y)

    def holds(self, interval: DistanceInterval) -> bool:
        return interval.lower >= self.liminf_bound

    def to_json(self) -> dict:
        return {
            "kind": "dense-refute",
            "beta": self.beta,
            "period": self.period,
            "cycle": list(self.cycle),
            "position": self.position,
            "box_u": [list(pair) for pair in self.box_u],
            "box_v": [list(pair) for pair in self.box_v],
            "liminf_bound": self.liminf_bound.to_json(),
        }


def _least_escaping_point(spec: MapSpec) -> int:
    theta = least_escaping_point(spec)
    if theta is None:
        raise NoEscapingPoint(f"{spec.describe()} has no escaping point.")
    return theta


def _check_alphabet(alphabet: Alphabet, x: Configuration) -> None:
    if x.alphabet != alphabet:
        raise AlphabetMismatch(
            f"Configuration over {x.alphabet.size} symbols, expected {alphabet.size}."
        )


def _marked_over(x: Configuration, fill: OrbitMarked) -> Configuration:
    """x with fill swapped in; explicit overrides on marked indices are flipped too."""
    overrides = {
        n: Alphabet.least_other(symbol) if fill.is_marked(n) else symbol
        for n, symbol in x.overrides
    }
    return Configuration(x.alphabet, tuple(overrides.items()), fill)


def scrambled_pair(spec: MapSpec, alphabet: Alphabet) -> ScrambledPairCandidate:
    """
    The all-0 configuration paired with its flip along the doubling blocks of the
    least escaping orbit.

    Orbit positions in [2*4^j, 4^(j+1)) differ, those in [4^j, 2*4^j) agree; the
    agreement gaps push the liminf of orbit distances to 0 while the blocks keep the
    limsup positive. Checked empirically by dynamics_lab.
    """
    theta = _least_escaping_point(spec)
    schedule = BlockSchedule()
    x = Configuration.constant(alphabet, 0)
    y = Configuration(alphabet, fill=OrbitMarked(spec, theta, schedule, Constant(0)))
    logger.debug(f"Scrambled candidate for {spec.describe()} on theta={theta}")
    return ScrambledPairCandidate(x=x, y=y, theta=theta, block_schedule=schedule)


def li_yorke_witness(
    spec: MapSpec,
    alphabet: Alphabet,
    x: Configuration,
    agree_prefix: int,
    budget: Budget | None = None,
) -> LiYorkeWitness:
    """
    A partner y_n of x agreeing with it on 1..n and forming a scrambled pair with it.

    Where the scrambled candidate (p, q) differs, y takes the least symbol of {p, q}
    differing from x; elsewhere it copies x. Since p is all-0 and q flips p to 1,
    that symbol is always the least symbol other than x's.
    """
    if not per_empty(spec):
        raise PeriodicPointPresent(f"{spec.describe()} has a periodic point.")
    _check_alphabet(alphabet, x)
    if not isinstance(x.fill, Constant):
        raise InvariantViolation("Li-Yorke witnesses need a constant-fill configuration.")
    if agree_prefix < 0:
        raise InvariantViolation(f"Agreement prefix must be nonnegative, got {agree_prefix}.")
    budget = budget or Budget()

    candidate = scrambled_pair(spec, alphabet)
    fill = OrbitMarked(spec, candidate.theta, candidate.block_schedule, x.fill)
    y = _marked_over(x, fill)
    y = y.with_overrides({n: coordinate(x, n) for n in range(1, agree_prefix + 1)})

    lower, upper = ZERO, ZERO
    for t, interval in iter_orbit_distances(spec, x, y, budget.horizon, budget.depth):
        if t >= budget.window:
            lower = max(lower, interval.lower)
            upper = max(upper, interval.upper)
    mu_estimate = DistanceInterval(lower, upper, budget.depth)
    logger.debug(
        f"Li-Yorke witness for {spec.describe()}: prefix {agree_prefix}, "
        f"mu in [{lower}, {upper}]"
    )
    return LiYorkeWitness(
        y=y,
        mu_estimate=mu_estimate,
        prefix=agree_prefix,
        theta=candidate.theta,
        window=budget.window,
        horizon=budget.horizon,
    )


def _last_visit(spec: MapSpec, theta: int, coords: frozenset[int]) -> int | None:
    """Last orbit position m with phi^m(theta) in coords, for escaping theta."""
    if not coords:
        return None
    ceiling = max(max(coords), core_bound(spec))
    last = None
    m, value = 0, theta
    # past the core the orbit increases strictly and never returns
    while True:
        if value in coords:
            last = m
        if value > ceiling:
            return last
        value = apply(spec, value)
        m += 1


def sensitivity_witness(
    spec: MapSpec,
    alphabet: Alphabet,
    x: Configuration,
    neighborhood_coords: Iterable[int],
    enumeration: Enumeration = IDENTITY,
) -> SensitivityWitness:
    """
    A point z agreeing with x on the given coordinates whose orbit separates from
    x's by at least 2^-k at every step m >= N, k being the enumeration position of
    the least escaping point theta.
    """
    _check_alphabet(alphabet, x)
    coords = frozenset(neighborhood_coords)
    if any(n < 1 for n in coords):
        raise InvariantViolation("Neighbourhood coordinates must be positive.")
    theta = _least_escaping_point(spec)
    k = enumeration.position_of(theta)
    last = _last_visit(spec, theta, coords)
    from_step = 0 if last is None else last + 1

    fill = OrbitMarked(spec, theta, TailSchedule(from_step), x.fill)
    z = _marked_over(x, fill)
    logger.debug(
        f"Sensitivity witness for {spec.describe()}: theta={theta} at position {k}, "
        f"from step {from_step}"
    )
    return SensitivityWitness(
        z=z,
        from_step=from_step,
        separation=Dyadic.pow2(-k),
        theta_index=k,
        theta=theta,
        neighbourhood=coords,
    )


def certificate_depth(epsilon: Dyadic) -> int:
    """Least N >= 1 with 2^-N < epsilon."""
    if epsilon <= ZERO:
        raise InvariantViolation(f"Epsilon must be positive, got {epsilon}.")
    depth = 1
    while Dyadic.pow2(-depth) >= epsilon:
        depth += 1
    return depth


def non_sensitivity_certificate(spec: MapSpec, epsilon: Dyadic) -> NonSensitivityCertificate:
    """
    The finite forward-invariant set of coordinates that pins every orbit within
    epsilon: the closure of 1..N under phi, where 2^-N < epsilon.
    """
    depth = certificate_depth(epsilon)
    if w_nonempty(spec):
        raise EscapingPointPresent(f"{spec.describe()} has an escaping point.")
    lambda_set = forward_closure(spec, range(1, depth + 1))
    logger.debug(f"Non-sensitivity certificate for {spec.describe()}: |Lambda|={len(lambda_set)}")
    return NonSensitivityCertificate(lambda_set=lambda_set, epsilon=epsilon, depth=depth)


def dense_chaos_refutation(
    spec: MapSpec, alphabet: Alphabet, enumeration: Enumeration = IDENTITY
) -> DenseChaosRefutation:
    """
    Boxes U (0 on a periodic cycle) and V (1 on it) whose pairs never come closer
    than 2^-j, j being the enumeration position of the cycle's base point beta.

    beta keeps its own position instead of being re-enumerated to the front, so the
    bound is 1/2 exactly when beta is enumerated first.
    """
    periodic = periodic_points(spec)
    if not periodic:
        raise NoPeriodicPoint(f"{spec.describe()} has no periodic point.")
    beta = min(periodic, key=lambda n: (enumeration.position_of(n), n))
    verdict = classify_point(spec, beta).kind
    if not isinstance(verdict, QuasiPeriodic) or verdict.preperiod != 0:
        raise InvariantViolation(f"Point {beta} of {spec.describe()} is not periodic.")
    position = enumeration.position_of(beta)
    cycle = tuple(sorted(verdict.cycle))
    p, q = 0, Alphabet.least_other(0)
    logger.debug(f"Dense-chaos refutation for {spec.describe()}: cycle {cycle}")
    return DenseChaosRefutation(
        beta=beta,
        period=verdict.period,
        cycle=cycle,
        position=position,
        box_u=tuple((n, alphabet.check(p)) for n in cycle),
        box_v=tuple((n, alphabet.check(q)) for n in cycle),
        liminf_bound=Dyadic.pow2(-position),
    )

"""
Finitely presented self-maps of the positive integers and their orbit structure.

A MapSpec is an override table on {1..T} over an affine tail n -> a*n + b. For this
class every question the classification needs is decidable on a finite core:

* escaping tails (a >= 2, or a == 1 and b >= 1) have an escape bound M* beyond which
  orbits grow strictly and never come back, so every point <= M* either repeats
  inside {1..M*} or leaves it for good;
* bounded tails (a == 0, or a == 1 and b <= 0) leave a forward invariant core
  {1..C} that every orbit reaches.
"""

from __future__ import annotations

import bisect
import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import networkx as nx

from .config import Config
from .errors import InvariantViolation

logger = logging.getLogger(__name__)

INFINITE = math.inf


@dataclass(frozen=True)
class AffineTail:
    a: int
    b: int

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    @property
    def is_escaping(self) -> bool:
        return self.a >= 2 or (self.a == 1 and self.b >= 1)


@dataclass(frozen=True)
class MapSpec:
    threshold: int
    overrides: tuple[tuple[int, int], ...]
    tail: AffineTail

    def __post_init__(self):
        object.__setattr__(
            self, "overrides", tuple(sorted((int(k), int(v)) for k, v in self.overrides))
        )
        if self.threshold < 0:
            raise InvariantViolation(f"Threshold must be nonnegative, got {self.threshold}.")
        if self.tail.a < 0:
            raise InvariantViolation(f"Tail slope a must be nonnegative, got {self.tail.a}.")
        if self.tail(self.threshold + 1) < 1:
            raise InvariantViolation(
                f"Tail {self.tail.a}*n + {self.tail.b} is not positive at n = {self.threshold + 1}."
            )
        keys = [key for key, _ in self.overrides]
        if len(set(keys)) != len(keys):
            raise InvariantViolation("Override keys must be unique.")
        for key, image in self.overrides:
            if not 1 <= key <= self.threshold:
                raise InvariantViolation(
                    f"Override key {key} lies outside 1..{self.threshold}."
                )
            if image < 1:
                raise InvariantViolation(f"Override image {key} -> {image} is not positive.")
            if image == self.tail(key):
                raise InvariantViolation(
                    f"Override {key} -> {image} repeats the tail rule; remove it."
                )
        overridden = set(keys)
        for n in range(1, self.threshold + 1):
            if n not in overridden and self.tail(n) < 1:
                raise InvariantViolation(
                    f"Index {n} needs an override: the tail gives {self.tail(n)}."
                )

    @classmethod
    def build(
        cls,
        a: int,
        b: int = 0,
        overrides: Mapping[int, int] | Iterable[tuple[int, int]] = (),
        threshold: int | None = None,
    ) -> MapSpec:
        """Build a map; the threshold defaults to the largest override key."""
        pairs = tuple(overrides.items() if isinstance(overrides, Mapping) else overrides)
        if threshold is None:
            threshold = max((key for key, _ in pairs), default=0)
        return cls(threshold=threshold, overrides=pairs, tail=AffineTail(a, b))

    @cached_property
    def table(self) -> dict[int, int]:
        return dict(self.overrides)

    def __call__(self, n: int) -> int:
        return apply(self, n)

    def describe(self) -> str:
        table = ", ".join(f"{k}->{v}" for k, v in self.overrides)
        return f"T={self.threshold} {{{table}}} tail {self.tail.a}n{self.tail.b:+d}"


@dataclass(frozen=True)
class QuasiPeriodic:
    preperiod: int
    period: int
    cycle: tuple[int, ...]


@dataclass(frozen=True)
class Escaping:
    escape_step: int


@dataclass(frozen=True)
class OrbitVerdict:
    point: int
    kind: QuasiPeriodic | Escaping

    @property
    def is_escaping(self) -> bool:
        return isinstance(self.kind, Escaping)

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.kind, QuasiPeriodic) and self.kind.preperiod == 0


class Exactness(str, Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class OrbitCount:
    value: int | float
    exactness: Exactness

    @property
    def is_infinite(self) -> bool:
        return self.value == INFINITE


class TailKind(str, Enum):
    ESCAPING = "escaping"
    BOUNDED = "bounded"


def tail_kind(spec: MapSpec) -> TailKind:
    return TailKind.ESCAPING if spec.tail.is_escaping else TailKind.BOUNDED


def apply(spec: MapSpec, n: int) -> int:
    if n <= spec.threshold and n in spec.table:
        return spec.table[n]
    return spec.tail(n)


def escape_bound(spec: MapSpec) -> int | None:
    """Least M >= T with a*n + b > n and a*n + b > T for every n > M (None if none)."""
    a, b = spec.tail.a, spec.tail.b
    if not spec.tail.is_escaping:
        return None
    if a == 1:
        return spec.threshold
    return max(spec.threshold, (-b) // (a - 1), (spec.threshold - b) // a)


@lru_cache(maxsize=1024)
def core_bound(spec: MapSpec) -> int:
    """
    Size of the finite core.

    For escaping tails this is M*. For bounded tails it is the least C >= T holding
    every override image (and the constant tail value), which makes {1..C} forward
    invariant and reached by every orbit.
    """
    bound = escape_bound(spec)
    if bound is not None:
        return bound
    images = [image for _, image in spec.overrides]
    if spec.tail.a == 0:
        images.append(spec.tail.b)
    return max([spec.threshold, 1, *images])


def forward_orbit(spec: MapSpec, n: int, steps: int) -> list[int]:
    """The values n, phi(n), ..., phi^steps(n)."""
    values = [n]
    for _ in range(steps):
        values.append(apply(spec, values[-1]))
    return values


def iterate(spec: MapSpec, n: int, t: int) -> int:
    if t < 0:
        raise InvariantViolation(f"Iteration count must be nonnegative, got {t}.")
    if t > Config.ITERATE_REDUCTION_LIMIT:
        verdict = classify_point(spec, n).kind
        if isinstance(verdict, QuasiPeriodic) and t >= verdict.preperiod:
            return verdict.cycle[(t - verdict.preperiod) % verdict.period]
    x = n
    for _ in range(t):
        y = apply(spec, x)
        if y == x:
            return x
        x = y
    return x


def _quasi_periodic_from(orbit: list[int], repeat_at: int, offset: int) -> QuasiPeriodic:
    return QuasiPeriodic(
        preperiod=offset + repeat_at,
        period=len(orbit) - repeat_at,
        cycle=tuple(orbit[repeat_at:]),
    )


@lru_cache(maxsize=8192)
def classify_point(spec: MapSpec, n: int) -> OrbitVerdict:
    if n < 1:
        raise InvariantViolation(f"Points are positive integers, got {n}.")
    bound = core_bound(spec)
    escaping_tail = spec.tail.is_escaping
    x, offset = n, 0

    if not escaping_tail and n > bound:
        a, b = spec.tail.a, spec.tail.b
        if a == 0:
            x, offset = b, 1
        elif b == 0:
            return OrbitVerdict(n, QuasiPeriodic(0, 1, (n,)))
        else:
            # descend arithmetically; values above the core are never revisited
            offset = -((n - bound) // b)
            x = n + offset * b

    orbit: list[int] = []
    seen: dict[int, int] = {}
    while True:
        if escaping_tail and x > bound:
            return OrbitVerdict(n, Escaping(escape_step=len(orbit)))
        if x in seen:
            return OrbitVerdict(n, _quasi_periodic_from(orbit, seen[x], offset))
        seen[x] = len(orbit)
        orbit.append(x)
        x = apply(spec, x)


@lru_cache(maxsize=1024)
def core_graph(spec: MapSpec) -> nx.DiGraph:
    """
    Frozen functional graph n -> phi(n) on the core {1..core_bound}.

    Escaping tails may point out of the core; those targets appear as sink nodes.
    Bounded tails must keep every edge inside the core.
    """
    bound = core_bound(spec)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(1, bound + 1))
    graph.add_edges_from((n, apply(spec, n)) for n in range(1, bound + 1))
    if not spec.tail.is_escaping and graph.number_of_nodes() > bound:
        raise InvariantViolation(f"Core {bound} of {spec.describe()} is not invariant.")
    return nx.freeze(graph)


@lru_cache(maxsize=1024)
def periodic_points(spec: MapSpec) -> tuple[int, ...]:
    """Sorted periodic points: nodes on the cycles of the core graph."""
    graph = core_graph(spec)
    periodic = set(nx.nodes_with_selfloops(graph))
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            periodic.update(component)
    logger.debug(
        f"Core scan of {spec.describe()} up to {core_bound(spec)}: {len(periodic)} periodic"
    )
    return tuple(sorted(periodic))


def per_empty(spec: MapSpec) -> bool:
    """True iff phi has no periodic point."""
    if not spec.tail.is_escaping:
        return False
    return not periodic_points(spec)


def w_nonempty(spec: MapSpec) -> bool:
    """True iff some point has an infinite forward orbit."""
    return spec.tail.is_escaping


def least_escaping_point(spec: MapSpec) -> int | None:
    if not spec.tail.is_escaping:
        return None
    return next(
        n for n in range(1, core_bound(spec) + 2) if classify_point(spec, n).is_escaping
    )


def tail_preimage(spec: MapSpec, v: int) -> int | None:
    """The n > T with a*n + b == v, if any (a >= 1)."""
    a, b = spec.tail.a, spec.tail.b
    if a == 0 or (v - b) % a:
        return None
    n = (v - b) // a
    return n if n > spec.threshold else None


def preimages(spec: MapSpec, v: int) -> frozenset[int] | None:
    """All n with phi(n) == v; None when the set is infinite (constant tail value)."""
    if spec.tail.a == 0 and v == spec.tail.b:
        return None
    graph = core_graph(spec)
    found = set()
    if v in graph:
        found.update(n for n in graph.predecessors(v) if n <= spec.threshold)
    n = tail_preimage(spec, v)
    if n is not None:
        found.add(n)
    return frozenset(found)


def is_injective(spec: MapSpec) -> bool:
    if spec.tail.a == 0:
        return False
    images = [apply(spec, n) for n in range(1, spec.threshold + 1)]
    if len(set(images)) != len(images):
        return False
    return all(tail_preimage(spec, v) is None for v in images)


@lru_cache(maxsize=256)
def _orbit_values(spec: MapSpec, theta: int, steps: int) -> tuple[int, ...]:
    return tuple(forward_orbit(spec, theta, steps))


def orbit_index(spec: MapSpec, theta: int, n: int) -> int | None:
    """The m with phi^m(theta) == n (first occurrence), or None."""
    verdict = classify_point(spec, theta).kind
    if isinstance(verdict, QuasiPeriodic):
        values = _orbit_values(spec, theta, verdict.preperiod + verdict.period - 1)
        return values.index(n) if n in values else None

    start = verdict.escape_step
    if spec.tail.a == 1:
        values = _orbit_values(spec, theta, start)
        if n in values:
            return values.index(n)
        offset = n - values[-1]
        if offset > 0 and offset % spec.tail.b == 0:
            return start + offset // spec.tail.b
        return None

    steps = max(64, 2 * start)
    values = _orbit_values(spec, theta, steps)
    while values[-1] < n:
        steps *= 2
        values = _orbit_values(spec, theta, steps)
    if n in values[:start]:
        return values.index(n)
    # strictly increasing from the escape step on
    pos = bisect.bisect_left(values, n, lo=start)
    return pos if pos < len(values) and values[pos] == n else None


def forward_closure(spec: MapSpec, indices: Iterable[int]) -> frozenset[int]:
    """Union of the forward orbits of finitely many quasi-periodic points."""
    graph = core_graph(spec)
    closure: set[int] = set()
    for n in indices:
        verdict = classify_point(spec, n).kind
        if isinstance(verdict, Escaping):
            raise InvariantViolation(f"Point {n} escapes; its forward orbit is infinite.")
        # bounded tails walk down into the core first
        x = n
        while x not in graph and x not in closure:
            closure.add(x)
            x = apply(spec, x)
        if x in graph:
            closure.add(x)
            closure.update(nx.descendants(graph, x))
    return frozenset(closure)


def _orbits_intersect(orbit_x: list[int], orbit_y: list[int]) -> bool:
    # growth cutoff: past the escape bound both orbits increase, so only values
    # below the smaller maximum can still be matched by later steps
    cutoff = min(max(orbit_x), max(orbit_y))
    return bool({v for v in orbit_x if v <= cutoff} & {v for v in orbit_y if v <= cutoff})


def orbits_meet(spec: MapSpec, x: int, y: int, steps: int) -> bool:
    """Bounded check whether the forward orbits of x and y intersect."""
    return _orbits_intersect(forward_orbit(spec, x, steps), forward_orbit(spec, y, steps))


def disjoint_orbit_witnesses(
    spec: MapSpec, k: int, steps: int = Config.ORBIT_CERTIFICATION_STEPS
) -> list[int]:
    """Greedy bounded search for up to k escaping points with pairwise disjoint orbits."""
    if not spec.tail.is_escaping:
        return []
    bound = core_bound(spec)
    limit = bound + (k + 1) * (spec.tail.a + abs(spec.tail.b)) + 16
    if spec.tail.a == 1:
        # same-residue points must be seen to merge inside the searched range
        steps = max(steps, limit)
    chosen: list[list[int]] = []
    for n in range(1, limit + 1):
        if len(chosen) == k:
            break
        if not classify_point(spec, n).is_escaping:
            continue
        orbit = forward_orbit(spec, n, steps)
        if not any(_orbits_intersect(orbit, other) for other in chosen):
            chosen.append(orbit)
    return [orbit[0] for orbit in chosen]


def orbit_count(spec: MapSpec) -> OrbitCount:
    """
    The largest number of escaping points with pairwise disjoint orbits.

    Closed forms by tail type: 0 for bounded tails, b for n -> n + b (one orbit per
    residue class mod b), infinite for a >= 2. Nonzero closed forms are only trusted
    after a bounded disjoint-orbit search reproduces them.
    """
    if not spec.tail.is_escaping:
        return OrbitCount(0, Exactness.EXACT)

    if spec.tail.a == 1:
        claimed = spec.tail.b
        found = disjoint_orbit_witnesses(spec, claimed + 1)
        if len(found) == claimed:
            return OrbitCount(claimed, Exactness.EXACT)
    else:
        k = Config.ORBIT_CERTIFICATION_WITNESSES
        found = disjoint_orbit_witnesses(spec, k)
        if len(found) == k:
            return OrbitCount(INFINITE, Exactness.EXACT)

    logger.warning(
        f"Closed-form orbit count of {spec.describe()} not reproduced; "
        f"bounded search found {len(found)} disjoint orbits"
    )
    return OrbitCount(len(found), Exactness.LOWER_BOUND)


def orbit_intersection_times(
    spec: MapSpec, a_set: Iterable[int], b_set: Iterable[int], n_max: int
) -> set[int]:
    """
    Times n in [-n_max, n_max] with phi^n(A) meeting B.

    Negative times read as preimages: -n is reported when phi^n(beta) lands in A
    for some beta in B.
    """
    a_set, b_set = frozenset(a_set), frozenset(b_set)
    if not a_set or not b_set or n_max < 1:
        raise InvariantViolation("Index sets must be nonempty and n_max positive.")
    times: set[int] = set()
    for alpha in a_set:
        times.update(t for t, v in enumerate(forward_orbit(spec, alpha, n_max)) if v in b_set)
    for beta in b_set:
        orbit = forward_orbit(spec, beta, n_max)
        times.update(-t for t in range(1, n_max + 1) if orbit[t] in a_set)
    if per_empty(spec) and len(times) > len(a_set) * len(b_set):
        raise InvariantViolation(
            f"{len(times)} intersection times exceed |A||B| = {len(a_set) * len(b_set)} "
            f"for the periodic-point-free map {spec.describe()}."
        )
    return times

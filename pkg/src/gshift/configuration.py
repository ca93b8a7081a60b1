"""
Points of X^N, shifted coordinates and the truncated product metric.

A configuration is a finite override table over a fill rule. Besides constant and
periodic fills, an orbit-marked fill flips the base symbol along a scheduled part
of one escaping orbit; this is how the infinitely supported witnesses are held
exactly. Distances are truncated dyadic sums with a certified remainder.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .dyadic import Dyadic
from .errors import AlphabetMismatch, AlphabetTooSmall, InvariantViolation, NotMaterializable
from .index_map import MapSpec, apply, iterate, orbit_index, preimages


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if self.size < 2:
            raise AlphabetTooSmall(f"Alphabet needs at least two symbols, got {self.size}.")

    def check(self, symbol: int) -> int:
        if not 0 <= symbol < self.size:
            raise InvariantViolation(f"Symbol {symbol} outside alphabet of size {self.size}.")
        return symbol

    @staticmethod
    def least_other(symbol: int) -> int:
        """The least symbol differing from the given one."""
        return 0 if symbol != 0 else 1


@dataclass(frozen=True)
class BlockSchedule:
    """Orbit positions m in [2*4^j, 4^(j+1)) for some j >= 0."""

    def contains(self, m: int) -> bool:
        # 2*4^j <= m < 4^(j+1) exactly when floor(log2 m) is odd
        return m >= 2 and m.bit_length() % 2 == 0

    def to_json(self) -> dict:
        return {"blocks": "doubling"}


@dataclass(frozen=True)
class TailSchedule:
    """Orbit positions m >= start."""

    start: int

    def contains(self, m: int) -> bool:
        return m >= self.start

    def to_json(self) -> dict:
        return {"from_step": self.start}


Schedule = BlockSchedule | TailSchedule


@dataclass(frozen=True)
class Constant:
    symbol: int

    def symbol_at(self, n: int) -> int:
        return self.symbol


@dataclass(frozen=True)
class Periodic:
    pattern: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(self.pattern))
        if not self.pattern:
            raise InvariantViolation("Periodic fill needs a nonempty pattern.")

    def symbol_at(self, n: int) -> int:
        return self.pattern[(n - 1) % len(self.pattern)]


@dataclass(frozen=True)
class OrbitMarked:
    """The base fill, flipped to the least other symbol at scheduled orbit positions of theta."""

    spec: MapSpec
    theta: int
    schedule: Schedule
    base: Fill

    def is_marked(self, n: int) -> bool:
        m = orbit_index(self.spec, self.theta, n)
        return m is not None and self.schedule.contains(m)

    def symbol_at(self, n: int) -> int:
        symbol = self.base.symbol_at(n)
        return Alphabet.least_other(symbol) if self.is_marked(n) else symbol


Fill = Constant | Periodic | OrbitMarked


def _fill_symbols(fill: Fill) -> Iterable[int]:
    if isinstance(fill, Constant):
        return (fill.symbol,)
    if isinstance(fill, Periodic):
        return fill.pattern
    return (*_fill_symbols(fill.base), 0, 1)


@dataclass(frozen=True)
class Configuration:
    alphabet: Alphabet
    overrides: tuple[tuple[int, int], ...] = ()
    fill: Fill = Constant(0)

    def __post_init__(self):
        object.__setattr__(
            self, "overrides", tuple(sorted((int(k), int(v)) for k, v in self.overrides))
        )
        keys = [key for key, _ in self.overrides]
        if len(set(keys)) != len(keys):
            raise InvariantViolation("Configuration override indices must be unique.")
        for key, symbol in self.overrides:
            if key < 1:
                raise InvariantViolation(f"Configuration index {key} is not positive.")
            self.alphabet.check(symbol)
        for symbol in _fill_symbols(self.fill):
            self.alphabet.check(symbol)

    @classmethod
    def constant(cls, alphabet: Alphabet, symbol: int = 0) -> Configuration:
        return cls(alphabet=alphabet, fill=Constant(symbol))

    @cached_property
    def table(self) -> dict[int, int]:
        return dict(self.overrides)

    def with_overrides(self, updates: Mapping[int, int]) -> Configuration:
        table = {**self.table, **updates}
        return Configuration(self.alphabet, tuple(table.items()), self.fill)

    def __getitem__(self, n: int) -> int:
        return coordinate(self, n)


@dataclass(frozen=True)
class Enumeration:
    """A finite permutation of N listing the indices as beta_1, beta_2, ..."""

    swaps: tuple[tuple[int, int], ...] = ()
    _forward: dict[int, int] = field(init=False, repr=False, compare=False, hash=False)
    _inverse: dict[int, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "swaps", tuple(sorted(self.swaps)))
        positions = [p for p, _ in self.swaps]
        indices = [n for _, n in self.swaps]
        if len(set(positions)) != len(positions) or set(positions) != set(indices):
            raise InvariantViolation("Enumeration must permute a finite set of indices.")
        if any(p < 1 for p in positions):
            raise InvariantViolation("Enumeration positions must be positive.")
        object.__setattr__(self, "_forward", dict(self.swaps))
        object.__setattr__(self, "_inverse", {n: p for p, n in self.swaps})

    @classmethod
    def from_order(cls, order: Iterable[int]) -> Enumeration:
        """beta_1..beta_k given explicitly; must be a permutation of {1..k}."""
        order = list(order)
        return cls(tuple((p, n) for p, n in enumerate(order, start=1) if p != n))

    def index_at(self, position: int) -> int:
        return self._forward.get(position, position)

    def position_of(self, n: int) -> int:
        return self._inverse.get(n, n)

    @property
    def is_identity(self) -> bool:
        return not self.swaps


IDENTITY = Enumeration()


@dataclass(frozen=True)
class DistanceInterval:
    lower: Dyadic
    upper: Dyadic
    truncation_depth: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise InvariantViolation(f"Interval [{self.lower}, {self.upper}] is inverted.")
        if self.upper - self.lower > Dyadic.pow2(-self.truncation_depth):
            raise InvariantViolation("Interval wider than the truncation remainder.")

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    def contains(self, value: Dyadic) -> bool:
        return self.lower <= value <= self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "truncation_depth": self.truncation_depth,
        }


def coordinate(x: Configuration, n: int) -> int:
    if n < 1:
        raise InvariantViolation(f"Coordinates are indexed from 1, got {n}.")
    symbol = x.table.get(n)
    return x.fill.symbol_at(n) if symbol is None else symbol


def shifted_coordinate(spec: MapSpec, x: Configuration, n: int, t: int) -> int:
    """The n-th coordinate of sigma_phi^t(x), evaluated without materializing it."""
    return coordinate(x, iterate(spec, n, t))


def difference_support(x: Configuration, y: Configuration) -> frozenset[int] | None:
    """Indices where x and y differ when that set is known to be finite, else None."""
    if x.fill != y.fill:
        return None
    keys = set(x.table) | set(y.table)
    return frozenset(n for n in keys if coordinate(x, n) != coordinate(y, n))


def _check_alphabets(x: Configuration, y: Configuration) -> None:
    if x.alphabet != y.alphabet:
        raise AlphabetMismatch(
            f"Alphabets differ: {x.alphabet.size} vs {y.alphabet.size} symbols."
        )


def interval_from_images(
    x: Configuration,
    y: Configuration,
    images: list[int],
    exact: bool = False,
) -> DistanceInterval:
    """
    Truncated metric over the coordinates images[i - 1] (i = 1..N).

    Position i contributes 2^-i when the two configurations differ at images[i - 1].
    """
    depth = len(images)
    scaled = 0
    for i, n in enumerate(images, start=1):
        if coordinate(x, n) != coordinate(y, n):
            scaled += 1 << (depth - i)
    lower = Dyadic(scaled, depth)
    upper = lower if exact else lower + Dyadic.pow2(-depth)
    return DistanceInterval(lower, upper, depth)


def distance(
    x: Configuration,
    y: Configuration,
    depth: int,
    enumeration: Enumeration = IDENTITY,
) -> DistanceInterval:
    _check_alphabets(x, y)
    if depth < 1:
        raise InvariantViolation(f"Truncation depth must be at least 1, got {depth}.")
    diff = difference_support(x, y)
    exact = diff is not None and all(enumeration.position_of(n) <= depth for n in diff)
    images = [enumeration.index_at(i) for i in range(1, depth + 1)]
    return interval_from_images(x, y, images, exact)


def pulled_back_support(
    spec: MapSpec, support: frozenset[int], t: int, limit: int, enumeration: Enumeration
) -> frozenset[int] | None:
    """
    The indices n with phi^t(n) in support, or None once that set is infinite or
    reaches a position beyond limit.
    """
    current = support
    for _ in range(t):
        if not current:
            return current
        pulled: set[int] = set()
        for v in current:
            pre = preimages(spec, v)
            if pre is None:
                return None
            pulled.update(pre)
        if any(enumeration.position_of(n) > limit for n in pulled):
            return None
        current = frozenset(pulled)
    return current


def orbit_distance(
    spec: MapSpec,
    x: Configuration,
    y: Configuration,
    t: int,
    depth: int,
    enumeration: Enumeration = IDENTITY,
) -> DistanceInterval:
    """Interval for D(sigma^t x, sigma^t y)."""
    _check_alphabets(x, y)
    if depth < 1:
        raise InvariantViolation(f"Truncation depth must be at least 1, got {depth}.")
    diff = difference_support(x, y)
    exact = False
    if diff is not None:
        pulled = pulled_back_support(spec, diff, t, depth, enumeration)
        exact = pulled is not None and all(enumeration.position_of(n) <= depth for n in pulled)
    images = [iterate(spec, enumeration.index_at(i), t) for i in range(1, depth + 1)]
    return interval_from_images(x, y, images, exact)


def shift_configuration(spec: MapSpec, x: Configuration) -> Configuration:
    """Materialize sigma_phi(x) for a constant-fill configuration."""
    if not isinstance(x.fill, Constant):
        raise NotMaterializable("Only constant-fill configurations are closed under the shift.")
    a = spec.tail.a
    if a == 0:
        fill_symbol = coordinate(x, spec.tail.b)
        candidates = set(range(1, spec.threshold + 1))
    else:
        fill_symbol = x.fill.symbol
        candidates = set(range(1, spec.threshold + 1))
        for key in x.table:
            pre = preimages(spec, key)
            candidates.update(pre or ())
    overrides = {}
    for n in candidates:
        symbol = coordinate(x, apply(spec, n))
        if symbol != fill_symbol:
            overrides[n] = symbol
    return Configuration(x.alphabet, tuple(overrides.items()), Constant(fill_symbol))


def iter_orbit_distances(
    spec: MapSpec,
    x: Configuration,
    y: Configuration,
    horizon: int,
    depth: int,
    enumeration: Enumeration = IDENTITY,
) -> Iterator[tuple[int, DistanceInterval]]:
    """orbit_distance for t = 0..horizon, advancing the coordinate images one step at a time."""
    _check_alphabets(x, y)
    if depth < 1:
        raise InvariantViolation(f"Truncation depth must be at least 1, got {depth}.")
    images = [enumeration.index_at(i) for i in range(1, depth + 1)]
    pulled = difference_support(x, y)
    for t in range(horizon + 1):
        exact = pulled is not None and all(enumeration.position_of(n) <= depth for n in pulled)
        yield t, interval_from_images(x, y, images, exact)
        images = [apply(spec, n) for n in images]
        if pulled is not None:
            pulled = pulled_back_support(spec, pulled, 1, depth, enumeration)

"""
Chaos taxonomy of (X^N, sigma_phi) read off the orbit structure of phi.

The Li-Yorke sensitivity group is decided by the absence of periodic points, the
sensitivity group by the presence of an escaping point, Devaney chaos (and
topological transitivity) by injectivity plus the absence of periodic points, and
the density of periodic points of sigma_phi by injectivity alone.
"""

import math
from dataclasses import asdict, dataclass

from .errors import AlphabetTooSmall
from .index_map import (
    MapSpec,
    OrbitCount,
    is_injective,
    orbit_count,
    per_empty,
    w_nonempty,
)

LI_YORKE_GROUP = (
    "li_yorke_sensitive",
    "densely_eps_chaotic",
    "spatiotemporally_chaotic",
    "densely_chaotic",
)

SENSITIVITY_GROUP = (
    "sensitive",
    "strongly_sensitive",
    "asymptotic_sensitive",
    "syndetically_sensitive",
    "cofinitely_sensitive",
    "multi_sensitive",
    "ergodically_sensitive",
    "li_yorke_chaotic",
    "topologically_chaotic",
)


@dataclass(frozen=True)
class ChaosProfile:
    devaney_chaotic: bool
    topologically_transitive: bool
    li_yorke_sensitive: bool
    densely_eps_chaotic: bool
    spatiotemporally_chaotic: bool
    densely_chaotic: bool
    sensitive: bool
    strongly_sensitive: bool
    asymptotic_sensitive: bool
    syndetically_sensitive: bool
    cofinitely_sensitive: bool
    multi_sensitive: bool
    ergodically_sensitive: bool
    li_yorke_chaotic: bool
    topologically_chaotic: bool
    dense_periodic_points: bool
    entropy: float
    alphabet_size: int
    orbit_count: OrbitCount

    def flags(self) -> dict[str, bool]:
        return {
            name: value
            for name, value in asdict(self).items()
            if isinstance(value, bool)
        }

    @staticmethod
    def flag_groups() -> dict[str, tuple[str, ...]]:
        """Flags that must agree, keyed by the flag that leads each group."""
        return {group[0]: group for group in (LI_YORKE_GROUP, SENSITIVITY_GROUP)}

    def coherence_errors(self) -> list[str]:
        """Violated profile invariants; empty for every profile classify() returns."""
        errors = []
        if self.devaney_chaotic and not self.li_yorke_sensitive:
            errors.append("devaney_chaotic does not imply li_yorke_sensitive")
        if self.li_yorke_sensitive and not self.sensitive:
            errors.append("li_yorke_sensitive does not imply sensitive")
        if self.devaney_chaotic != self.topologically_transitive:
            errors.append("devaney_chaotic differs from topologically_transitive")
        for leader, group in self.flag_groups().items():
            values = {getattr(self, name) for name in group}
            if len(values) > 1:
                errors.append(f"equivalence group led by {leader} does not collapse")
        if self.topologically_chaotic != (self.entropy > 0):
            errors.append("topologically_chaotic disagrees with positive entropy")
        return errors

    def to_json(self) -> dict:
        data = self.flags()
        data["alphabet_size"] = self.alphabet_size
        data["entropy"] = entropy_to_json(self.orbit_count, self.alphabet_size)
        return data


def _check_alphabet(alphabet_size: int) -> None:
    if alphabet_size < 2:
        raise AlphabetTooSmall(f"Alphabet needs at least two symbols, got {alphabet_size}.")


def entropy_from_count(count: OrbitCount, alphabet_size: int) -> float:
    if count.is_infinite:
        return math.inf
    if count.value == 0:
        return 0.0
    return count.value * math.log(alphabet_size)


def entropy(spec: MapSpec, alphabet_size: int) -> float:
    """Topological entropy o(phi) * log|X| (natural log; inf when o(phi) is)."""
    _check_alphabet(alphabet_size)
    return entropy_from_count(orbit_count(spec), alphabet_size)


def entropy_to_json(count: OrbitCount, alphabet_size: int) -> dict:
    value = entropy_from_count(count, alphabet_size)
    return {
        "orbit_count": "infinity" if count.is_infinite else count.value,
        "exactness": count.exactness.value,
        "alphabet_size": alphabet_size,
        "log_base": "e",
        "value": "infinity" if math.isinf(value) else value,
    }


def classify(spec: MapSpec, alphabet_size: int) -> ChaosProfile:
    _check_alphabet(alphabet_size)
    no_periodic = per_empty(spec)
    escaping = w_nonempty(spec)
    injective = is_injective(spec)
    devaney = injective and no_periodic
    count = orbit_count(spec)

    li_yorke = dict.fromkeys(LI_YORKE_GROUP, no_periodic)
    sensitivity = dict.fromkeys(SENSITIVITY_GROUP, escaping)
    return ChaosProfile(
        devaney_chaotic=devaney,
        topologically_transitive=devaney,
        dense_periodic_points=injective,
        entropy=entropy_from_count(count, alphabet_size),
        alphabet_size=alphabet_size,
        orbit_count=count,
        **li_yorke,
        **sensitivity,
    )

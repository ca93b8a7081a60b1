"""Chaos classification, witnesses and empirical checks for generalized shifts."""

from .classifier import ChaosProfile, classify, entropy
from .configuration import Alphabet, Configuration, distance, orbit_distance
from .dyadic import Dyadic
from .index_map import MapSpec, classify_point, orbit_count, per_empty, w_nonempty

__all__ = [
    "Alphabet",
    "ChaosProfile",
    "Configuration",
    "Dyadic",
    "MapSpec",
    "classify",
    "classify_point",
    "distance",
    "entropy",
    "orbit_count",
    "orbit_distance",
    "per_empty",
    "w_nonempty",
]

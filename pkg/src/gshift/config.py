import logging
import os
from dataclasses import dataclass, fields

from .dyadic import Dyadic
from .errors import InvariantViolation

BUDGET_ENV_VAR = "GSHIFT_BUDGET"


class Config:
    """Configuration constants."""

    SCHEMA_VERSION = "1.0"
    TOOL_VERSION = "0.1.0"
    # Steps used when certifying orbit-count closed forms by disjoint-orbit search
    ORBIT_CERTIFICATION_STEPS = 200
    ORBIT_CERTIFICATION_WITNESSES = 8
    # Beyond this many steps, iterate() reduces through the orbit verdict
    ITERATE_REDUCTION_LIMIT = 4_096
    # Coordinates pinned by the neighbourhood used in verification claims
    NEIGHBOURHOOD_SIZE = 3
    # Indices above the core bound touched by random samplers
    SAMPLER_SPREAD = 24


def configure_logging(verbose: bool) -> None:
    """Configure logging based on the verbosity preference."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")


@dataclass(frozen=True)
class Budget:
    """Horizon, depth and sampling budget of an empirical verification run."""

    horizon: int = 256
    depth: int = 16
    window: int = 64
    samples: int = 50
    seed: int = 0
    epsilon: Dyadic = Dyadic.pow2(-3)
    prefix: int = 4
    tol: Dyadic | None = None
    sep: Dyadic | None = None

    def __post_init__(self):
        if self.horizon < 1 or self.depth < 1:
            raise InvariantViolation("Budget horizon and depth must be at least 1.")
        if not 0 <= self.window < self.horizon:
            raise InvariantViolation(
                f"Budget window {self.window} must lie in [0, horizon={self.horizon})."
            )
        if self.samples < 0 or self.prefix < 0:
            raise InvariantViolation("Budget samples and prefix must be nonnegative.")
        if self.epsilon <= 0:
            raise InvariantViolation("Budget epsilon must be positive.")

    @property
    def tolerance(self) -> Dyadic:
        return self.tol if self.tol is not None else Dyadic.pow2(-(self.depth // 2))

    @property
    def separation(self) -> Dyadic:
        return self.sep if self.sep is not None else Dyadic.pow2(-(self.depth // 2))

    @classmethod
    def resolve(cls, **settings) -> "Budget":
        """
        Budget from the non-None settings.

        An unset window follows the horizon: min(64, horizon // 4).
        """
        settings = {k: v for k, v in settings.items() if v is not None}
        if "window" not in settings and "horizon" in settings:
            settings["window"] = min(cls.window, settings["horizon"] // 4)
        return cls(**settings)

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "depth": self.depth,
            "window": self.window,
            "samples": self.samples,
            "seed": self.seed,
            "epsilon": self.epsilon.to_json(),
            "prefix": self.prefix,
            "tol": self.tolerance.to_json(),
            "sep": self.separation.to_json(),
        }


DYADIC_FIELDS = {"epsilon", "tol", "sep"}


def parse_budget_string(text: str) -> dict:
    """Parse 'horizon=128,depth=12' into Budget keyword arguments."""
    known = {f.name for f in fields(Budget)}
    parsed = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise InvariantViolation(
                f"Invalid {BUDGET_ENV_VAR} entry '{item}'; expected key=value with key in {sorted(known)}."
            )
        try:
            parsed[key] = Dyadic.parse(value) if key in DYADIC_FIELDS else int(value)
        except ValueError as e:
            raise InvariantViolation(f"Invalid value for budget key '{key}': {value}") from e
    return parsed


def budget_from_env(environ: dict | None = None, **overrides) -> Budget:
    """GSHIFT_BUDGET settings if set, with the non-None overrides on top."""
    environ = os.environ if environ is None else environ
    text = environ.get(BUDGET_ENV_VAR, "")
    settings = {}
    if text:
        logging.debug(f"Reading budget defaults from {BUDGET_ENV_VAR}={text}")
        settings = parse_budget_string(text)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return Budget.resolve(**settings)

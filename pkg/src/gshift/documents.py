"""
JSON documents: map documents in, configurations and reports out.

Map document:
    {"name": "phi2", "threshold": 2, "overrides": [[1, 3], [2, 3]],
     "tail": {"a": 2, "b": 0}, "alphabet_size": 2}

Configuration document:
    {"alphabet_size": 2, "fill": {"constant": 0} | {"periodic": [0, 1]},
     "overrides": [[3, 1]]}
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .configuration import (
    Alphabet,
    BlockSchedule,
    Configuration,
    Constant,
    Fill,
    OrbitMarked,
    Periodic,
    TailSchedule,
)
from .errors import DocumentError
from .index_map import MapSpec

MAP_FIELDS = {"name", "threshold", "overrides", "tail", "alphabet_size"}


@dataclass(frozen=True)
class MapDocument:
    name: str
    spec: MapSpec
    alphabet_size: int

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "threshold": self.spec.threshold,
            "overrides": [list(pair) for pair in self.spec.overrides],
            "tail": {"a": self.spec.tail.a, "b": self.spec.tail.b},
            "alphabet_size": self.alphabet_size,
        }


def _require_int(value, field: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"expected an integer, got {value!r}", field=field)
    if minimum is not None and value < minimum:
        raise DocumentError(f"must be at least {minimum}, got {value}", field=field)
    return value


def _read_json(path: Path) -> dict:
    if not path.exists():
        raise DocumentError(f"File {path} does not exist.")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise DocumentError("top level must be a JSON object")
    return data


def _read_pairs(value, field: str) -> list[tuple[int, int]]:
    if not isinstance(value, list):
        raise DocumentError("expected an array of [index, value] pairs", field=field)
    pairs = []
    seen = set()
    for i, pair in enumerate(value):
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError("expected an [index, value] pair", field=f"{field}[{i}]")
        key = _require_int(pair[0], f"{field}[{i}][0]", minimum=1)
        item = _require_int(pair[1], f"{field}[{i}][1]")
        if key in seen:
            raise DocumentError(f"duplicate index {key}", field=f"{field}[{i}]")
        seen.add(key)
        pairs.append((key, item))
    return pairs


def parse_map_document(data: dict) -> MapDocument:
    """Validate a decoded map document; MapSpec invariants surface as InvariantViolation."""
    missing = MAP_FIELDS - data.keys()
    if missing:
        raise DocumentError(f"missing fields {sorted(missing)}")
    unknown = data.keys() - MAP_FIELDS
    if unknown:
        raise DocumentError(f"unknown fields {sorted(unknown)}")

    name = data["name"]
    if not isinstance(name, str) or not name:
        raise DocumentError("expected a nonempty string", field="name")
    threshold = _require_int(data["threshold"], "threshold", minimum=0)
    overrides = _read_pairs(data["overrides"], "overrides")
    tail = data["tail"]
    if not isinstance(tail, dict) or set(tail) != {"a", "b"}:
        raise DocumentError("expected an object with keys 'a' and 'b'", field="tail")
    a = _require_int(tail["a"], "tail.a", minimum=0)
    b = _require_int(tail["b"], "tail.b")
    alphabet_size = _require_int(data["alphabet_size"], "alphabet_size")

    Alphabet(alphabet_size)
    spec = MapSpec.build(a, b, overrides, threshold=threshold)
    return MapDocument(name=name, spec=spec, alphabet_size=alphabet_size)


def load_map_document(path: Path) -> MapDocument:
    logging.debug(f"Reading map document {path}")
    return parse_map_document(_read_json(path))


def fill_to_json(fill: Fill) -> dict:
    if isinstance(fill, Constant):
        return {"constant": fill.symbol}
    if isinstance(fill, Periodic):
        return {"periodic": list(fill.pattern)}
    return {
        "orbit_marked": {
            "theta": fill.theta,
            "schedule": fill.schedule.to_json(),
            "base": fill_to_json(fill.base),
        }
    }


def configuration_to_json(x: Configuration) -> dict:
    return {
        "alphabet_size": x.alphabet.size,
        "fill": fill_to_json(x.fill),
        "overrides": [list(pair) for pair in x.overrides],
    }


def _parse_fill(value, field: str, spec: MapSpec | None) -> Fill:
    if not isinstance(value, dict) or len(value) != 1:
        raise DocumentError("expected exactly one fill kind", field=field)
    kind, body = next(iter(value.items()))
    if kind == "constant":
        return Constant(_require_int(body, f"{field}.constant", minimum=0))
    if kind == "periodic":
        if not isinstance(body, list) or not body:
            raise DocumentError("expected a nonempty symbol array", field=f"{field}.periodic")
        return Periodic(
            tuple(_require_int(s, f"{field}.periodic", minimum=0) for s in body)
        )
    if kind == "orbit_marked" and spec is not None:
        if not isinstance(body, dict):
            raise DocumentError("expected an object", field=f"{field}.orbit_marked")
        schedule = body.get("schedule") or {}
        if "from_step" in schedule:
            start = _require_int(schedule["from_step"], f"{field}.schedule.from_step", 0)
            parsed_schedule = TailSchedule(start)
        else:
            parsed_schedule = BlockSchedule()
        return OrbitMarked(
            spec=spec,
            theta=_require_int(body.get("theta"), f"{field}.theta", minimum=1),
            schedule=parsed_schedule,
            base=_parse_fill(body.get("base"), f"{field}.base", spec),
        )
    raise DocumentError(f"unknown fill kind '{kind}'", field=field)


def parse_configuration(data: dict, spec: MapSpec | None = None) -> Configuration:
    alphabet_size = _require_int(data.get("alphabet_size"), "alphabet_size")
    fill = _parse_fill(data.get("fill", {"constant": 0}), "fill", spec)
    overrides = _read_pairs(data.get("overrides", []), "overrides")
    return Configuration(Alphabet(alphabet_size), tuple(overrides), fill)


def load_configuration(path: Path, spec: MapSpec | None = None) -> Configuration:
    return parse_configuration(_read_json(path), spec)


def dumps_report(report: dict) -> str:
    """Canonical report text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


REPORT_SCHEMA_PATH = Path(__file__).parent / "schemas" / "report.schema.json"


def load_report_schema() -> dict:
    """The published JSON schema every report validates against."""
    return json.loads(REPORT_SCHEMA_PATH.read_text())

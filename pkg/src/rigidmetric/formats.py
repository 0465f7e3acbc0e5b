"""JSON documents for spaces, families, amalgams, catalogs, registries and configs.

Rationals are always written as lowest-terms ``"p/q"`` (or ``"n"``) and
unknown fields are rejected by name.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .amalgam import AmalgamResult
from .construct import ConstructionConfig, RigidityReport, StageTrace
from .discrete import Registry
from .extension import ExtensionCatalog, ExtensionVector
from .family import SpaceFamily
from .rational import parse_grid, parse_rat, render_rat
from .space import KINDS, METRIC, MetricError, MetricSpace, make_space, pair_key


class FormatError(MetricError):
    pass


def _fields(doc: Any, what: str, required: Iterable[str], optional: Iterable[str] = ()) -> dict:
    if not isinstance(doc, dict):
        raise FormatError(f"{what}: expected a JSON object")
    req, opt = set(required), set(optional)
    extra = sorted(set(doc) - req - opt)
    if extra:
        raise FormatError(f"{what}: unknown field {extra[0]!r}")
    missing = sorted(req - set(doc))
    if missing:
        raise FormatError(f"{what}: missing field {missing[0]!r}")
    return doc


def _rat(value: Any, where: str) -> Fraction:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise FormatError(f"{where}: expected a rational string, got {value!r}")
    try:
        return parse_rat(value)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _labels(value: Any, where: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(p, str) for p in value):
        raise FormatError(f"{where}: expected a list of labels")
    return value


# {{{ spaces


def space_to_json(space: MetricSpace) -> dict:
    return {
        "kind": space.kind,
        "points": list(space.points),
        "dist": {pair_key(a, b): render_rat(v) for (a, b), v in sorted(space.distance_table().items())},
    }


def raw_space_from_json(doc: Any, where: str = "space") -> tuple[list[str], dict[str, Fraction], str]:
    """Points, distance table and kind, without checking the metric axioms."""
    _fields(doc, where, ("points", "dist"), ("kind",))
    kind = doc.get("kind", METRIC)
    if kind not in KINDS:
        raise FormatError(f"{where}.kind: unknown kind {kind!r}")
    points = _labels(doc["points"], f"{where}.points")
    dist = doc["dist"]
    if not isinstance(dist, dict):
        raise FormatError(f"{where}.dist: expected an object")
    table = {}
    for key, v in dist.items():
        parts = key.split("|")
        if len(parts) != 2:
            raise FormatError(f"{where}.dist: malformed pair key {key!r}")
        if parts[0] > parts[1]:
            raise FormatError(f"{where}.dist: pair key {key!r} is not in lexicographic order")
        table[key] = _rat(v, f"{where}.dist[{key!r}]")
    return points, table, kind


def space_from_json(doc: Any, where: str = "space") -> MetricSpace:
    points, table, kind = raw_space_from_json(doc, where)
    return make_space(points, table, kind)


# }}}

# {{{ families and amalgams


def family_to_json(family: SpaceFamily) -> dict:
    return {"hub": family.hub, "members": [space_to_json(m) for m in family.members]}


def family_from_json(doc: Any) -> SpaceFamily:
    _fields(doc, "family", ("members",), ("hub",))
    hub = doc.get("hub")
    if hub is not None and (not isinstance(hub, int) or isinstance(hub, bool)):
        raise FormatError("family.hub: expected an integer or null")
    members = doc["members"]
    if not isinstance(members, list):
        raise FormatError("family.members: expected a list")
    spaces = [space_from_json(m, f"family.members[{i}]") for i, m in enumerate(members)]
    return SpaceFamily(tuple(spaces), hub)


def amalgam_to_json(result: AmalgamResult) -> dict:
    out = space_to_json(result.space)
    out["embeddings"] = {str(s): dict(e) for s, e in sorted(result.embeddings.items())}
    out["merged"] = {r: list(c) for r, c in sorted(result.merged.items())}
    return out


# }}}

# {{{ catalogs and registries


def catalog_to_json(catalog: ExtensionCatalog) -> dict:
    return {
        "grid": [render_rat(v) for v in catalog.grid],
        "entries": [
            {
                "base": list(e.base),
                "values": {p: render_rat(e.values[p]) for p in e.base},
                "label": e.label,
            }
            for e in catalog.entries
        ],
    }


def catalog_from_json(doc: Any) -> ExtensionCatalog:
    _fields(doc, "catalog", ("grid", "entries"))
    try:
        grid = parse_grid(doc["grid"])
    except ValueError as exc:
        raise FormatError(f"catalog.grid: {exc}") from None
    entries = []
    labels = set()
    for i, e in enumerate(doc["entries"]):
        where = f"catalog.entries[{i}]"
        _fields(e, where, ("base", "values", "label"))
        base = tuple(_labels(e["base"], f"{where}.base"))
        if not isinstance(e["values"], dict) or set(e["values"]) != set(base):
            raise FormatError(f"{where}.values: must have exactly one value per base point")
        values = {p: _rat(e["values"][p], f"{where}.values[{p!r}]") for p in base}
        if e["label"] in labels:
            raise FormatError(f"{where}.label: duplicate label {e['label']!r}")
        labels.add(e["label"])
        entries.append(ExtensionVector(base, values, e["label"]))
    return ExtensionCatalog(grid, tuple(entries))


def registry_to_json(registry: Registry) -> dict:
    return {
        "attachments": {x: list(D) for x, D in registry.attachments.items()},
        "middles": {z: list(Y) for z, Y in registry.middles.items()},
    }


def registry_from_json(doc: Any) -> Registry:
    _fields(doc, "registry", (), ("attachments", "middles"))
    att = {x: tuple(_labels(D, f"registry.attachments[{x!r}]")) for x, D in doc.get("attachments", {}).items()}
    mid = {z: tuple(_labels(Y, f"registry.middles[{z!r}]")) for z, Y in doc.get("middles", {}).items()}
    return Registry(att, mid)


# }}}

# {{{ construction


_CONFIG_FIELDS = ("stages", "threshold", "grid", "cap")
_CONFIG_OPTIONAL = ("schedule", "seed", "distinct_sizes", "budget", "name")


def _positive_int(value: Any, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise FormatError(f"{where}: expected a positive integer, got {value!r}")
    return value


def schedule_from_json(doc: Any) -> dict[int, dict[str, int]]:
    if not isinstance(doc, dict):
        raise FormatError("schedule: expected an object keyed by stage")
    out = {}
    for k, sizes in doc.items():
        if not k.isdigit():
            raise FormatError(f"schedule: stage key {k!r} is not an integer")
        if not isinstance(sizes, dict):
            raise FormatError(f"schedule[{k!r}]: expected an object of sizes")
        out[int(k)] = {p: _positive_int(s, f"schedule[{k!r}][{p!r}]") for p, s in sizes.items()}
    return out


def config_from_json(doc: Any) -> ConstructionConfig:
    _fields(doc, "config", _CONFIG_FIELDS, _CONFIG_OPTIONAL)
    try:
        grid = parse_grid(doc["grid"])
    except ValueError as exc:
        raise FormatError(f"config.grid: {exc}") from None
    schedule = doc.get("schedule")
    seed = doc.get("seed")
    distinct = doc.get("distinct_sizes", True)
    if not isinstance(distinct, bool):
        raise FormatError("config.distinct_sizes: expected a boolean")
    return ConstructionConfig(
        stages=_positive_int(doc["stages"], "config.stages"),
        threshold=_positive_int(doc["threshold"], "config.threshold"),
        grid=grid,
        cap=_positive_int(doc["cap"], "config.cap"),
        schedule=None if schedule is None else schedule_from_json(schedule),
        seed=None if seed is None else space_from_json(seed, "config.seed"),
        distinct_sizes=distinct,
        budget=_positive_int(doc.get("budget", 2000), "config.budget"),
        name=str(doc.get("name", "")),
    )


def config_to_json(config: ConstructionConfig) -> dict:
    out: dict[str, Any] = {
        "name": config.name,
        "stages": config.stages,
        "threshold": config.threshold,
        "grid": [render_rat(v) for v in config.grid],
        "cap": config.cap,
        "distinct_sizes": config.distinct_sizes,
        "budget": config.budget,
    }
    if config.schedule is not None:
        out["schedule"] = {str(k): dict(v) for k, v in sorted(config.schedule.items())}
    if config.seed is not None:
        out["seed"] = space_to_json(config.seed)
    return out


def report_to_json(report: RigidityReport) -> dict:
    return {
        "points": report.size,
        "group_size": report.group_size,
        "group_truncated": report.group_truncated,
        "generators": report.generators,
        "rigid": report.rigid,
        "tau": report.tau,
        "attachment_sizes": report.attachment_sizes,
        "tau_matches_size": report.tau_matches_size,
        "tau_distinct": report.tau_distinct,
        "unattached": report.unattached,
        "failures": report.failures,
    }


def write_trace(trace: StageTrace, report: RigidityReport | None, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for k, X in enumerate(trace.spaces):
        p = out_dir / f"stage_{k}.space.json"
        dump(space_to_json(X), p)
        written.append(p)
    p = out_dir / "registry.json"
    dump(registry_to_json(trace.registry), p)
    written.append(p)
    ranks = trace.ranks()
    doc = {
        "config": config_to_json(trace.config),
        "stage_sizes": trace.stage_sizes(),
        "provenance": {x: {"operator": op, "stage": st, "rank": ranks[x]} for x, (op, st) in trace.provenance.items()},
    }
    if report is not None:
        doc["rigidity"] = report_to_json(report)
    p = out_dir / "report.json"
    dump(doc, p)
    written.append(p)
    return written


# }}}


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def dump(doc: Any, path: Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def load(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def shipped_config_names() -> list[str]:
    from importlib import resources

    return sorted(
        p.name[: -len(".json")]
        for p in resources.files("rigidmetric").joinpath("configs").iterdir()
        if p.name.endswith(".json")
    )


def shipped_config(name: str) -> ConstructionConfig:
    from importlib import resources

    path = resources.files("rigidmetric").joinpath("configs", f"{name}.json")
    if not path.is_file():
        raise FormatError(f"no shipped config named {name!r}")
    return config_from_json(json.loads(path.read_text(encoding="utf-8")))

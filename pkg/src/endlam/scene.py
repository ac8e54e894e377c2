"""Scene files: JSON in, validated objects out, and back again.

The format is hand-writable and diff-friendly:

    {
      "metadata": {"name": "...", "description": "..."},
      "group": {"a": [[4, 0], [0, 0.25]], "b": [[2, 1], [1, 1]]},
      "automorphism": {"forward": {"a": "a b", "b": "b"},
                       "inverse": {"a": "a b^-1", "b": "b"}},
      "junctures": [{"end": "e-", "sign": "-", "word": "a", "period": 1}],
      "markov": {"rects": ["R1", "R2"], "crossings": [[1, 1, 1], ...]}
    }

Words are whitespace-separated generator names, each optionally carrying
the suffix ``^-1``.  Crossing rows are 1-based (i, j, count) with an
optional orientation tag as a fourth element.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import NotHyperbolicError, SceneError, ValidationError
from .group import FreeAutomorphism, FuchsianGroup, Word, verify_automorphism
from .hyperbolic import Isometry
from .lamination import JunctureSpec
from .markov import CrossingTable, Rect4Gon


@dataclass
class MarkovBlock:
    rects: list[Rect4Gon]
    table: CrossingTable


@dataclass
class Scene:
    name: str
    description: str
    group: FuchsianGroup
    automorphism: FreeAutomorphism
    junctures: list[JunctureSpec]
    markov: MarkovBlock | None = None


def _reject_duplicates(pairs):
    seen = set()
    out = {}
    for key, value in pairs:
        if key in seen:
            raise SceneError(f"duplicate name {key!r}")
        seen.add(key)
        out[key] = value
    return out


def _reject_nonfinite(token):
    raise SceneError(f"non-finite number {token!r} in scene")


def _expect(mapping, key, path, kind=None):
    if key not in mapping:
        raise SceneError(f"missing field {path}")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise SceneError(f"field {path} has the wrong type")
    return value


def _parse_matrix(value, path):
    if (not isinstance(value, list) or len(value) != 2
            or any(not isinstance(row, list) or len(row) != 2
                   for row in value)):
        raise SceneError(f"field {path} must be a 2x2 matrix")
    for row in value:
        for entry in row:
            if not isinstance(entry, (int, float)) or isinstance(entry, bool):
                raise SceneError(f"field {path} has a non-numeric entry")
    return value


def _parse_word(text, names, path) -> Word:
    if not isinstance(text, str):
        raise SceneError(f"field {path} must be a word string")
    try:
        return Word.parse(text, names)
    except ValidationError as exc:
        raise SceneError(f"field {path}: {exc}") from exc


def parse_scene(text: str) -> Scene:
    """Validate UTF-8 JSON scene text into a Scene."""
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates,
                         parse_constant=_reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise SceneError(f"invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise SceneError("scene must be a JSON object")

    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SceneError("field metadata must be an object")
    name = metadata.get("name", "")
    description = metadata.get("description", "")

    group_block = _expect(raw, "group", "group", dict)
    if not group_block:
        raise SceneError("field group must name at least one generator")
    names = tuple(group_block.keys())
    generators = []
    for gen_name in names:
        rows = _parse_matrix(group_block[gen_name], f"group.{gen_name}")
        try:
            generators.append(Isometry.from_matrix(rows))
        except ValidationError as exc:
            raise SceneError(f"group.{gen_name}: {exc}") from exc
    try:
        group = FuchsianGroup(names, generators)
    except NotHyperbolicError as exc:
        raise SceneError(str(exc)) from exc

    auto_block = _expect(raw, "automorphism", "automorphism", dict)
    forward_block = _expect(auto_block, "forward", "automorphism.forward",
                            dict)
    inverse_block = _expect(auto_block, "inverse", "automorphism.inverse",
                            dict)
    forward = []
    inverse = []
    for gen_name in names:
        forward.append(_parse_word(
            _expect(forward_block, gen_name,
                    f"automorphism.forward.{gen_name}"),
            names, f"automorphism.forward.{gen_name}"))
        inverse.append(_parse_word(
            _expect(inverse_block, gen_name,
                    f"automorphism.inverse.{gen_name}"),
            names, f"automorphism.inverse.{gen_name}"))
    automorphism = FreeAutomorphism(tuple(forward), tuple(inverse))
    report = verify_automorphism(automorphism)
    if not report.ok:
        failing = sorted({names[gen - 1] for _, gen, _ in report.failures})
        raise SceneError(
            f"automorphism round-trip fails at generator"
            f"{'s' if len(failing) > 1 else ''} {', '.join(failing)}"
        )

    junctures = []
    junc_block = _expect(raw, "junctures", "junctures", list)
    for idx, item in enumerate(junc_block):
        path = f"junctures[{idx}]"
        if not isinstance(item, dict):
            raise SceneError(f"field {path} must be an object")
        word = _parse_word(_expect(item, "word", f"{path}.word"),
                           names, f"{path}.word")
        try:
            junctures.append(JunctureSpec(
                end=_expect(item, "end", f"{path}.end", str),
                sign=_expect(item, "sign", f"{path}.sign", str),
                word=word,
                period=item.get("period", 1),
            ))
        except ValidationError as exc:
            raise SceneError(f"{path}: {exc}") from exc

    markov = None
    if "markov" in raw:
        markov_block = raw["markov"]
        if not isinstance(markov_block, dict):
            raise SceneError("field markov must be an object")
        rect_items = _expect(markov_block, "rects", "markov.rects", list)
        rects = []
        for idx, item in enumerate(rect_items):
            path = f"markov.rects[{idx}]"
            try:
                if isinstance(item, str):
                    rects.append(Rect4Gon(id=item))
                elif isinstance(item, dict):
                    rects.append(Rect4Gon(
                        id=_expect(item, "id", f"{path}.id", str),
                        degeneracy=item.get("degeneracy", "full"),
                        corners=tuple(tuple(c) for c in item["corners"])
                        if "corners" in item else None,
                    ))
                else:
                    raise SceneError(f"field {path} must be an id or object")
            except ValidationError as exc:
                raise SceneError(f"{path}: {exc}") from exc
        ids = [r.id for r in rects]
        if len(set(ids)) != len(ids):
            raise SceneError("markov.rects: duplicate rectangle id")
        crossings = _expect(markov_block, "crossings", "markov.crossings",
                            list)
        for idx, row in enumerate(crossings):
            if not isinstance(row, list) or len(row) not in (3, 4):
                raise SceneError(
                    f"markov.crossings[{idx}] must be [i, j, count] with an "
                    f"optional orientation tag"
                )
        try:
            table = CrossingTable.from_triples(ids, crossings)
        except ValidationError as exc:
            raise SceneError(f"markov.crossings: {exc}") from exc
        markov = MarkovBlock(rects=rects, table=table)

    return Scene(name=name, description=description, group=group,
                 automorphism=automorphism, junctures=junctures,
                 markov=markov)


def load_scene(path) -> Scene:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise SceneError(f"scene file not found: {path}") from None
    except OSError as exc:
        raise SceneError(f"cannot read scene file {path}: {exc}") from exc
    try:
        return parse_scene(text)
    except SceneError as exc:
        raise SceneError(f"{path}: {exc}") from exc


def serialize_scene(scene: Scene) -> str:
    """Canonical JSON for a validated scene; inverse of parse_scene on the
    validated fields."""
    names = scene.group.names
    doc = {
        "metadata": {"name": scene.name, "description": scene.description},
        "group": {
            name: [list(row) for row in m.matrix]
            for name, m in zip(names, scene.group.generators)
        },
        "automorphism": {
            "forward": {name: rule.format(names)
                        for name, rule in zip(names,
                                              scene.automorphism.forward)},
            "inverse": {name: rule.format(names)
                        for name, rule in zip(names,
                                              scene.automorphism.inverse)},
        },
        "junctures": [
            {"end": j.end, "sign": j.sign, "word": j.word.format(names),
             "period": j.period}
            for j in scene.junctures
        ],
    }
    if scene.markov is not None:
        rects = []
        for r in scene.markov.rects:
            if r.degeneracy == "full" and r.corners is None:
                rects.append(r.id)
            else:
                entry = {"id": r.id, "degeneracy": r.degeneracy}
                if r.corners is not None:
                    entry["corners"] = [list(c) for c in r.corners]
                rects.append(entry)
        crossings = []
        table = scene.markov.table
        for i in range(table.size):
            for j in range(table.size):
                count = int(table.counts[i, j])
                tag = table.orientations.get((i + 1, j + 1))
                if count or tag is not None:
                    row = [i + 1, j + 1, count]
                    if tag is not None:
                        row.append(tag)
                    crossings.append(row)
        doc["markov"] = {"rects": rects, "crossings": crossings}
    return json.dumps(doc, indent=2) + "\n"


def scene_path(name: str) -> Path:
    """Path of a scene shipped with the package."""
    return Path(__file__).resolve().parent / "scenes" / name

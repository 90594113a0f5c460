"""Definition files: JSON documents describing a relational groupoid, a Haar system and functions.

Sections:

* ``carrier``: element labels, in index order.
* exactly one structure section:
  ``L`` (label triples, together with ``I`` as label pairs),
  ``group`` (``table`` rows over the carrier and ``normal_subgroup``), or
  ``groupoid`` (``objects``, ``source`` and ``target`` maps, ``products`` triples a, b, a∘b).
* ``haar``: element label -> list of [h, k, "p/q"].
* ``functions``: name -> {label: [re, im]} or an expression string.

Fractions are strings "p" or "p/q". Unknown keys are rejected.
"""

import json
import logging
import re
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from relconv.core.convolution import AlgebraElement
from relconv.core.exceptions import (
    DefinitionError,
    DefinitionSyntaxError,
    FractionFormatError,
    InvalidGroupoidTableError,
    RelConvError,
    UnknownFunctionError,
    UnknownKeyError,
)
from relconv.core.groupoid_table import GroupoidTable
from relconv.core.haar import RelationalHaarSystem
from relconv.core.measure import Measure
from relconv.core.relation import FiniteSet, Relation
from relconv.core.relational_groupoid import RelationalGroupoid, from_group_and_normal_subgroup, from_groupoid
from relconv.core.scalars import format_fraction, parts, scalar
from relconv.parser.function_parser import parse_fraction, parse_function

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = frozenset({"name", "description", "carrier", "L", "I", "group", "groupoid", "haar", "functions"})
GROUP_KEYS = frozenset({"table", "normal_subgroup"})
GROUPOID_KEYS = frozenset({"objects", "source", "target", "products"})
STRUCTURE_KEYS = ("L", "group", "groupoid")


@dataclass(frozen=True)
class Definition:
    """A loaded definition file."""

    name: str
    groupoid: RelationalGroupoid
    haar: Optional[RelationalHaarSystem]
    functions: Mapping[str, AlgebraElement]
    document: Mapping[str, Any]
    table: Optional[GroupoidTable] = None
    path: Optional[str] = None
    expressions: Mapping[str, str] = field(default_factory=dict)

    def function(self, name: str) -> AlgebraElement:
        try:
            return self.functions[name]
        except KeyError:
            known = ", ".join(sorted(self.functions)) or "none"
            raise UnknownFunctionError(f"unknown function {name!r} (known: {known})") from None


class _Locator:
    """Map offending values back to a line and column of the source text."""

    def __init__(self, text: str, path: Optional[str]) -> None:
        self.text = text
        self.path = path

    def position(self, value: Any) -> tuple[Optional[int], Optional[int]]:
        needle = json.dumps(value, ensure_ascii=False) if isinstance(value, str) else str(value)
        offset = self.text.find(needle)
        if offset < 0:
            return None, None
        return self._line_column(offset)

    def _line_column(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column

    def entry_position(
        self, section: str, first: Any, second: Any, occurrence: int
    ) -> tuple[Optional[int], Optional[int]]:
        """Position of the occurrence-th entry starting with [first, second, after the section key."""
        start = max(self.text.find(json.dumps(section)), 0)
        first_text, second_text = (re.escape(json.dumps(v, ensure_ascii=False)) for v in (first, second))
        pattern = rf"\[\s*{first_text}\s*,\s*{second_text}\s*,"
        for i, match in enumerate(re.finditer(pattern, self.text[start:]), 1):
            if i == occurrence:
                return self._line_column(start + match.start())
        return None, None

    def error(self, cls: type[DefinitionError], message: str, value: Any = None) -> DefinitionError:
        line, column = self.position(value) if value is not None else (None, None)
        return cls(message, file_path=self.path, line_no=line, column_no=column)

    def fraction(self, value: Any) -> Fraction:
        if isinstance(value, int) and not isinstance(value, bool):
            return Fraction(value)
        if not isinstance(value, str):
            raise self.error(FractionFormatError, f"expected a fraction string, got {value!r}", value)
        try:
            return parse_fraction(value)
        except FractionFormatError as e:
            raise self.error(FractionFormatError, e.message, value) from None

    def label(self, carrier: FiniteSet, value: Any) -> int:
        if str(value) not in carrier:
            raise self.error(DefinitionError, f"unknown element label {value!r}", value)
        return carrier.index(str(value))


def _check_keys(loc: _Locator, section: str, data: Mapping[str, Any], allowed: frozenset[str]) -> None:
    for key in data:
        if key not in allowed:
            raise loc.error(UnknownKeyError, f"unknown key {key!r} in {section}", key)


def _expect(loc: _Locator, value: Any, kind: type, what: str) -> Any:
    if not isinstance(value, kind):
        raise loc.error(DefinitionError, f"{what} must be a {kind.__name__}")
    return value


# ============================================================================
# Structure sections
# ============================================================================


def _from_l(loc: _Locator, doc: Mapping[str, Any], carrier: FiniteSet, name: str) -> RelationalGroupoid:
    if "I" not in doc:
        raise loc.error(DefinitionError, "section L needs an I section")
    triples = frozenset(
        tuple(loc.label(carrier, x) for x in _triple(loc, t, 3, "L")) for t in _expect(loc, doc["L"], list, "L")
    )
    pairs = frozenset(
        tuple(loc.label(carrier, x) for x in _triple(loc, p, 2, "I")) for p in _expect(loc, doc["I"], list, "I")
    )
    return RelationalGroupoid(
        carrier=carrier,
        triples=Relation((carrier, carrier), (carrier,), triples),  # type: ignore[arg-type]
        involution=Relation((carrier,), (carrier,), pairs),  # type: ignore[arg-type]
        name=name,
    )


def _triple(loc: _Locator, value: Any, size: int, section: str) -> list[Any]:
    if not isinstance(value, list) or len(value) != size:
        raise loc.error(DefinitionError, f"entries of {section} must be lists of {size} labels", value)
    return value


def _from_group(
    loc: _Locator, doc: Mapping[str, Any], carrier: FiniteSet, name: str
) -> tuple[RelationalGroupoid, GroupoidTable]:
    section = _expect(loc, doc["group"], dict, "group")
    _check_keys(loc, "group", section, GROUP_KEYS)
    rows = _expect(loc, section.get("table"), list, "group.table")
    for row in rows:
        for entry in _expect(loc, row, list, "group.table row"):
            loc.label(carrier, entry)
    table = GroupoidTable.from_group(carrier.labels, [[str(x) for x in row] for row in rows], name=name)
    members = [loc.label(carrier, m) for m in _expect(loc, section.get("normal_subgroup", []), list, "normal_subgroup")]
    return from_group_and_normal_subgroup(table, members, name=name, check=False), table


def _from_groupoid(
    loc: _Locator, doc: Mapping[str, Any], carrier: FiniteSet, name: str
) -> tuple[RelationalGroupoid, GroupoidTable]:
    section = _expect(loc, doc["groupoid"], dict, "groupoid")
    _check_keys(loc, "groupoid", section, GROUPOID_KEYS)
    objects = FiniteSet([str(x) for x in _expect(loc, section.get("objects"), list, "groupoid.objects")], "objects")
    source_map = _expect(loc, section.get("source"), dict, "groupoid.source")
    target_map = _expect(loc, section.get("target"), dict, "groupoid.target")

    def obj(value: Any) -> int:
        if str(value) not in objects:
            raise loc.error(DefinitionError, f"unknown object {value!r}", value)
        return objects.index(str(value))

    try:
        source = tuple(obj(source_map[m]) for m in carrier.labels)
        target = tuple(obj(target_map[m]) for m in carrier.labels)
    except KeyError as e:
        raise loc.error(DefinitionError, f"morphism {e.args[0]!r} has no source or target") from None
    products = tuple(
        sorted(
            tuple(loc.label(carrier, x) for x in _triple(loc, t, 3, "groupoid.products"))  # type: ignore[misc]
            for t in _expect(loc, section.get("products"), list, "groupoid.products")
        )
    )
    mult = {(a, b): c for a, b, c in products}
    units = []
    for x in range(len(objects)):
        unit = next(
            (m for m in carrier if source[m] == x and target[m] == x and mult.get((m, m)) == m), None
        )
        if unit is None:
            raise InvalidGroupoidTableError(f"object {objects.label(x)} has no unit", law="unit")
        units.append(unit)
    inverse = []
    for a in carrier:
        inv = next((b for b in carrier if mult.get((a, b)) == units[target[a]]), None)
        if inv is None:
            raise InvalidGroupoidTableError("morphism has no inverse", law="inverse", witness=(carrier.label(a),))
        inverse.append(inv)
    table = GroupoidTable(
        morphisms=carrier,
        objects=objects,
        source=source,
        target=target,
        products=products,  # type: ignore[arg-type]
        inverse=tuple(inverse),
        unit=tuple(units),
    )
    return from_groupoid(table, name=name, check=False), table


# ============================================================================
# Haar systems and functions
# ============================================================================


def _haar(loc: _Locator, section: Any, g: RelationalGroupoid) -> RelationalHaarSystem:
    carrier = g.carrier
    measures: dict[int, Measure[tuple[int, int]]] = {}
    seen: Counter[tuple[str, str]] = Counter()
    for label, entries in _expect(loc, section, dict, "haar").items():
        x = loc.label(carrier, label)
        weights: dict[tuple[int, int], Fraction] = {}
        for entry in _expect(loc, entries, list, f"haar[{label}]"):
            h, k, w = _triple(loc, entry, 3, f"haar[{label}]")
            weight = loc.fraction(w)
            if weight < 0:
                raise loc.error(FractionFormatError, f"negative weight {w!r}", w)
            pair = (loc.label(carrier, h), loc.label(carrier, k))
            key = (json.dumps(h), json.dumps(k))
            seen[key] += 1
            if pair in weights:
                line, column = loc.entry_position("haar", h, k, seen[key])
                raise DefinitionError(
                    f"duplicate haar entry [{h}, {k}] for {label}", file_path=loc.path, line_no=line, column_no=column
                )
            weights[pair] = weight
        measures[x] = Measure(weights)
    return RelationalHaarSystem(g, measures)


def _function(loc: _Locator, name: str, value: Any, carrier: FiniteSet) -> AlgebraElement:
    if isinstance(value, str):
        try:
            return parse_function(value, carrier, name)
        except DefinitionSyntaxError as e:
            line, column = loc.position(value)
            raise DefinitionSyntaxError(
                f"{e.message} at expression column {e.column_no}",
                file_path=loc.path,
                line_no=line,
                column_no=None if column is None or e.column_no is None else column + e.column_no,
            ) from None
    values = {}
    for label, entry in _expect(loc, value, dict, f"functions[{name}]").items():
        if isinstance(entry, list):
            if len(entry) != 2:
                raise loc.error(DefinitionError, f"function value for {label!r} must be [re, im]", label)
            real, imag = loc.fraction(entry[0]), loc.fraction(entry[1])
        else:
            real, imag = loc.fraction(entry), Fraction(0)
        values[loc.label(carrier, label)] = scalar(real, imag)
    return AlgebraElement(carrier, values)


# ============================================================================
# Canonical form
# ============================================================================


def _canonical_function(f: AlgebraElement) -> dict[str, list[str]]:
    out = {}
    for p, z in f.items():
        re, im = parts(z)
        out[f.carrier.label(p)] = [format_fraction(re), format_fraction(im)]
    return out


def _canonical(doc: Mapping[str, Any], definition_parts: dict[str, Any]) -> dict[str, Any]:
    g: RelationalGroupoid = definition_parts["groupoid"]
    carrier = g.carrier
    lbl = carrier.label
    out: dict[str, Any] = {"carrier": list(carrier.labels)}
    for key in ("name", "description"):
        if key in doc:
            out[key] = doc[key]
    if "L" in doc:
        out["L"] = [[lbl(a), lbl(b), lbl(c)] for a, b, c in g.triples.ordered]
        out["I"] = [[lbl(a), lbl(b)] for a, b in g.involution.ordered]
    elif "group" in doc:
        section = doc["group"]
        members = sorted({carrier.index(str(m)) for m in section.get("normal_subgroup", [])})
        out["group"] = {
            "table": [[str(x) for x in row] for row in section["table"]],
            "normal_subgroup": [lbl(m) for m in members],
        }
    else:
        table: GroupoidTable = definition_parts["table"]
        out["groupoid"] = {
            "objects": list(table.objects.labels),
            "source": {lbl(m): table.objects.label(table.source[m]) for m in carrier},
            "target": {lbl(m): table.objects.label(table.target[m]) for m in carrier},
            "products": [[lbl(a), lbl(b), lbl(c)] for a, b, c in sorted(table.products)],
        }
    haar: Optional[RelationalHaarSystem] = definition_parts["haar"]
    if haar is not None:
        out["haar"] = {
            lbl(x): [[lbl(h), lbl(k), format_fraction(w)] for (h, k), w in haar.measure(x).items()]
            for x in sorted(haar.measures)
        }
    if "functions" in doc:
        out["functions"] = {
            name: (value.strip() if isinstance(value, str) else _canonical_function(definition_parts["functions"][name]))
            for name, value in doc["functions"].items()
        }
    return out


def serialize(document: Mapping[str, Any]) -> str:
    """Key-sorted JSON with two-space indentation and a trailing newline."""
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ============================================================================
# Entry points
# ============================================================================


def parse_definition(text: str, path: Optional[str] = None) -> Definition:
    """Parse a definition document; raises DefinitionError subclasses with positions."""
    loc = _Locator(text, path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DefinitionSyntaxError(f"invalid JSON: {e.msg}", file_path=path, line_no=e.lineno, column_no=e.colno) from None
    if not isinstance(doc, dict):
        raise DefinitionSyntaxError("a definition must be a JSON object", file_path=path, line_no=1, column_no=1)
    _check_keys(loc, "definition", doc, TOP_LEVEL_KEYS)

    present = [k for k in STRUCTURE_KEYS if k in doc]
    if len(present) != 1:
        raise loc.error(DefinitionError, "exactly one of L, group or groupoid must be given")
    if "I" in doc and present[0] != "L":
        raise loc.error(DefinitionError, f"I is derived from the {present[0]} section", "I")

    name = str(doc.get("name") or (Path(path).stem if path else "definition"))
    labels = [str(x) for x in _expect(loc, doc.get("carrier"), list, "carrier")]
    try:
        carrier = FiniteSet(labels, name=name)
    except RelConvError as e:
        raise loc.error(DefinitionError, e.message, e.context.get("label")) from None

    table: Optional[GroupoidTable] = None
    if present[0] == "L":
        groupoid = _from_l(loc, doc, carrier, name)
    elif present[0] == "group":
        groupoid, table = _from_group(loc, doc, carrier, name)
    else:
        groupoid, table = _from_groupoid(loc, doc, carrier, name)

    haar = _haar(loc, doc["haar"], groupoid) if "haar" in doc else None
    functions: dict[str, AlgebraElement] = {}
    expressions: dict[str, str] = {}
    for fname, value in _expect(loc, doc.get("functions", {}), dict, "functions").items():
        functions[fname] = _function(loc, fname, value, carrier)
        if isinstance(value, str):
            expressions[fname] = value.strip()

    document = _canonical(doc, {"groupoid": groupoid, "table": table, "haar": haar, "functions": functions})
    logger.debug("Loaded definition %s: %d elements, %d functions", name, len(carrier), len(functions))
    return Definition(
        name=name,
        groupoid=groupoid,
        haar=haar,
        functions=functions,
        document=document,
        table=table,
        path=path,
        expressions=expressions,
    )


def load_definition(path: Union[str, Path]) -> Definition:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DefinitionError(f"cannot read definition file: {e.strerror}", file_path=str(p)) from None
    return parse_definition(text, str(p))


def canonical_form(text: str) -> str:
    """serialize(parse(text))."""
    return serialize(parse_definition(text).document)


def to_document(
    g: RelationalGroupoid,
    haar: Optional[RelationalHaarSystem] = None,
    functions: Optional[Mapping[str, AlgebraElement]] = None,
    name: str = "",
    description: str = "",
) -> dict[str, Any]:
    """Describe a relational groupoid in the L/I form."""
    lbl = g.label
    doc: dict[str, Any] = {
        "carrier": list(g.carrier.labels),
        "L": [[lbl(a), lbl(b), lbl(c)] for a, b, c in g.triples.ordered],
        "I": [[lbl(a), lbl(b)] for a, b in g.involution.ordered],
    }
    if name or g.name:
        doc["name"] = name or g.name
    if description:
        doc["description"] = description
    if haar is not None:
        doc["haar"] = {
            lbl(x): [[lbl(h), lbl(k), format_fraction(w)] for (h, k), w in haar.measure(x).items()]
            for x in sorted(haar.measures)
            if not haar.measure(x).is_zero()
        }
    if functions:
        doc["functions"] = {fname: _canonical_function(f) for fname, f in functions.items()}
    return doc


__all__ = [
    "Definition",
    "canonical_form",
    "load_definition",
    "parse_definition",
    "serialize",
    "to_document",
]

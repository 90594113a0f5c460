"""
Tests for function expressions and definition files.
"""

import json
import unittest
from fractions import Fraction

import pytest

from relconv.core.exceptions import (
    CarrierError,
    DefinitionError,
    DefinitionSyntaxError,
    FractionFormatError,
    UnknownFunctionError,
    UnknownKeyError,
)
from relconv.core.relation import FiniteSet
from relconv.core.relational_groupoid import check_axioms
from relconv.core.scalars import scalar
from relconv.generators.corpus import export_corpus, standard_corpus, strongly_split, z4z2
from relconv.parser.definition import (
    canonical_form,
    load_definition,
    parse_definition,
    serialize,
    to_document,
)
from relconv.parser.function_parser import parse_fraction, parse_function

Z4 = FiniteSet(["0", "1", "2", "3"], name="Z4")

Z4_GROUP = {
    "name": "z4-group",
    "carrier": ["0", "1", "2", "3"],
    "group": {
        "table": [[str((a + b) % 4) for b in range(4)] for a in range(4)],
        "normal_subgroup": ["0", "2"],
    },
}

PAIR2 = {
    "carrier": ["aa", "ab", "ba", "bb"],
    "groupoid": {
        "objects": ["a", "b"],
        "source": {"aa": "a", "ab": "b", "ba": "a", "bb": "b"},
        "target": {"aa": "a", "ab": "a", "ba": "b", "bb": "b"},
        "products": [[x + y, y + z, x + z] for x in "ab" for y in "ab" for z in "ab"],
    },
}


def text_of(doc):
    return json.dumps(doc, indent=2)


class TestFractions(unittest.TestCase):
    def test_integers_and_ratios(self):
        self.assertEqual(parse_fraction("3"), Fraction(3))
        self.assertEqual(parse_fraction("2/6"), Fraction(1, 3))
        self.assertEqual(parse_fraction("-1/2"), Fraction(-1, 2))

    def test_zero_denominator(self):
        with self.assertRaises(FractionFormatError):
            parse_fraction("1/0")

    def test_malformed(self):
        with self.assertRaises(FractionFormatError):
            parse_fraction("0.5")


class TestFunctionExpressions:
    """Tests for parse_function."""

    def test_deltas_and_coefficients(self):
        """d(0) + 1/2*d(2)."""
        f = parse_function("d(0) + 1/2*d(2)", Z4)
        assert f.format() == "0: 1, 2: 1/2"

    def test_complex_coefficients(self):
        """Pairs and imaginary literals are exact."""
        f = parse_function("[1,-1/3]*d(1) - 1/2i*ind(1, 3)", Z4)
        assert f[1] == scalar(1, Fraction(-5, 6))
        assert f[3] == scalar(0, Fraction(-1, 2))

    def test_one_and_negation(self):
        """one is the constant function."""
        f = parse_function("one - d(0)", Z4)
        assert f.support() == (1, 2, 3)
        assert parse_function("-(d(0))", Z4)[0] == scalar(-1)

    def test_quoted_labels(self):
        """Labels may be JSON strings."""
        assert parse_function('d("2")', Z4) == parse_function("d(2)", Z4)

    def test_syntax_error(self):
        """Dangling operators are syntax errors."""
        with pytest.raises(DefinitionSyntaxError):
            parse_function("d(0) +", Z4)

    def test_unknown_label(self):
        """Labels must belong to the carrier."""
        with pytest.raises(CarrierError):
            parse_function("d(9)", Z4)


class TestDefinitions:
    """Tests for parse_definition."""

    def test_l_form_round_trip(self):
        """A relational groupoid written as L and I loads back unchanged."""
        g = z4z2()
        defn = parse_definition(serialize(to_document(g)))
        assert defn.groupoid.triples == g.triples
        assert defn.groupoid.inverse_map == g.inverse_map
        assert defn.haar is None

    def test_group_form(self):
        """A Cayley table and a normal subgroup give Z4/Z2."""
        defn = parse_definition(text_of(Z4_GROUP))
        assert defn.name == "z4-group"
        assert defn.table is not None
        assert len(defn.groupoid.l3) == 32
        assert check_axioms(defn.groupoid).passed

    def test_groupoid_form(self):
        """Objects, source, target and products describe a groupoid."""
        defn = parse_definition(text_of(PAIR2))
        assert len(defn.groupoid.unit_elements) == 2
        assert defn.table.source[defn.table.morphisms.index("ab")] == defn.table.objects.index("b")
        assert check_axioms(defn.groupoid).passed

    def test_haar_and_functions(self):
        """Haar weights and functions are exact."""
        g = z4z2()
        rhs = strongly_split(g)
        doc = to_document(g, rhs)
        doc["functions"] = {"half": {"0": ["1/2", "0"]}, "expr": "d(1) + d(3)"}
        defn = parse_definition(serialize(doc))
        assert defn.haar.measure(0) == rhs.measure(0)
        assert defn.function("half")[0] == scalar(Fraction(1, 2))
        assert defn.function("expr").support() == (1, 3)
        assert defn.expressions == {"expr": "d(1) + d(3)"}

    def test_unknown_function(self):
        """Looking up an undefined function names the known ones."""
        defn = parse_definition(text_of(Z4_GROUP))
        with pytest.raises(UnknownFunctionError):
            defn.function("d0")

    def test_canonical_form_is_stable(self):
        """Canonicalizing twice changes nothing."""
        once = canonical_form(text_of(Z4_GROUP))
        assert canonical_form(once) == once
        assert once.endswith("\n")

    def test_corpus_files_load(self, tmp_path):
        """Every exported corpus file loads with its Haar system."""
        written = export_corpus(tmp_path, negative=False)
        assert len(written) == len(standard_corpus())
        for path in written:
            defn = load_definition(path)
            assert defn.haar is not None, path.name


class TestDefinitionErrors:
    """Malformed definition files."""

    def test_invalid_json(self):
        """JSON errors carry the line."""
        with pytest.raises(DefinitionSyntaxError) as info:
            parse_definition('{"carrier": [\n  "0",\n}')
        assert info.value.line_no is not None

    def test_unknown_key(self):
        """Keys outside the schema are rejected with their position."""
        doc = dict(Z4_GROUP, bogus=1)
        with pytest.raises(UnknownKeyError) as info:
            parse_definition(text_of(doc), "bogus.json")
        assert info.value.file_path == "bogus.json"
        assert info.value.line_no is not None

    def test_two_structure_sections(self):
        """Exactly one of L, group or groupoid."""
        doc = dict(Z4_GROUP, groupoid=PAIR2["groupoid"])
        with pytest.raises(DefinitionError):
            parse_definition(text_of(doc))

    def test_zero_denominator_weight(self):
        """A weight of 1/0 is a fraction error."""
        doc = to_document(z4z2())
        doc["haar"] = {"0": [["0", "0", "1/0"]]}
        with pytest.raises(FractionFormatError) as info:
            parse_definition(serialize(doc))
        assert info.value.line_no is not None

    def test_negative_weight(self):
        """Weights are nonnegative."""
        doc = to_document(z4z2())
        doc["haar"] = {"0": [["0", "0", "-1/8"]]}
        with pytest.raises(FractionFormatError):
            parse_definition(serialize(doc))

    def test_duplicate_haar_entry(self):
        """A pair listed twice under one element is rejected at the second listing."""
        doc = to_document(z4z2())
        doc["haar"] = {"0": [["0", "0", "1/8"], ["2", "2", "1/8"], ["0", "0", "1/8"]]}
        text = serialize(doc)
        with pytest.raises(DefinitionError) as info:
            parse_definition(text, "dup.json")
        assert "duplicate haar entry" in info.value.message
        assert info.value.file_path == "dup.json"
        first = text.count("\n", 0, text.index("\"haar\"")) + 1
        assert info.value.line_no > first

    def test_unknown_label(self):
        """Labels outside the carrier are definition errors."""
        doc = to_document(z4z2())
        doc["haar"] = {"7": []}
        with pytest.raises(DefinitionError):
            parse_definition(serialize(doc))

    def test_bad_expression_position(self):
        """Expression errors point into the file."""
        doc = dict(Z4_GROUP, functions={"f": "d(0) * *"})
        with pytest.raises(DefinitionSyntaxError) as info:
            parse_definition(text_of(doc))
        assert info.value.line_no is not None

    def test_missing_file(self, tmp_path):
        """Unreadable files are definition errors."""
        with pytest.raises(DefinitionError):
            load_definition(tmp_path / "missing.json")

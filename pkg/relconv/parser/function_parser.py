"""Parser for function expressions such as ``d(0) + 1/2*d(2)``."""

import json
import os
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional

from lark import Lark, Token, Transformer, UnexpectedInput  # type: ignore[import-untyped,unused-ignore]

from relconv.core.convolution import AlgebraElement
from relconv.core.exceptions import CarrierError, DefinitionSyntaxError, FractionFormatError
from relconv.core.relation import FiniteSet
from relconv.core.scalars import Scalar, scalar


def parse_fraction(text: str) -> Fraction:
    """Read "p" or "p/q" exactly; a zero denominator is an error."""
    raw = str(text).strip()
    numerator, _, denominator = raw.partition("/")
    try:
        if denominator:
            if int(denominator) == 0:
                raise FractionFormatError(f"zero denominator in {raw!r}")
            return Fraction(int(numerator), int(denominator))
        return Fraction(int(numerator))
    except ValueError:
        raise FractionFormatError(f"malformed fraction {raw!r}") from None


class FunctionTransformer(Transformer[Any, Any]):
    """Evaluate a parse tree to an AlgebraElement over a fixed carrier."""

    def __init__(self, carrier: FiniteSet) -> None:
        super().__init__()
        self.carrier = carrier

    def start(self, items: list[Any]) -> AlgebraElement:
        return items[0]  # type: ignore[no-any-return]

    def add(self, items: list[Any]) -> AlgebraElement:
        return items[0] + items[1]  # type: ignore[no-any-return]

    def sub(self, items: list[Any]) -> AlgebraElement:
        return items[0] - items[1]  # type: ignore[no-any-return]

    def neg(self, items: list[Any]) -> AlgebraElement:
        return -items[0]  # type: ignore[no-any-return]

    def scaled(self, items: list[Any]) -> AlgebraElement:
        c, f = items
        return f.scale(c)  # type: ignore[no-any-return]

    def delta(self, items: list[Any]) -> AlgebraElement:
        return AlgebraElement.delta(self.carrier, self.carrier.index(items[0]))

    def indicator(self, items: list[Any]) -> AlgebraElement:
        return AlgebraElement.indicator(self.carrier, (self.carrier.index(label) for label in items))

    def one(self, _items: list[Any]) -> AlgebraElement:
        return AlgebraElement.constant(self.carrier)

    def real(self, items: list[Token]) -> Scalar:
        return scalar(parse_fraction(items[0]))

    def imaginary(self, items: list[Token]) -> Scalar:
        return scalar(0, parse_fraction(str(items[0])[:-1]))

    def pair(self, items: list[Fraction]) -> Scalar:
        return scalar(items[0], items[1])

    def positive(self, items: list[Token]) -> Fraction:
        return parse_fraction(items[0])

    def negative(self, items: list[Token]) -> Fraction:
        return -parse_fraction(items[0])

    def label(self, items: list[Token]) -> str:
        token = items[0]
        if token.type == "ESCAPED_STRING":
            return str(json.loads(token))
        return str(token)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    grammar_path = os.path.join(os.path.dirname(__file__), "function.lark")
    with open(grammar_path) as f:
        grammar = f.read()
    return Lark(grammar, start="start", parser="lalr")


def parse_function(text: str, carrier: FiniteSet, name: Optional[str] = None) -> AlgebraElement:
    """Parse an expression; syntax errors carry the line and column."""
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as e:
        raise DefinitionSyntaxError(
            f"bad function expression{' ' + repr(name) if name else ''}: unexpected input",
            line_no=getattr(e, "line", None),
            column_no=getattr(e, "column", None),
        ) from None
    try:
        result: AlgebraElement = FunctionTransformer(carrier).transform(tree)
    except Exception as e:
        # lark wraps callback errors in VisitError
        original = getattr(e, "orig_exc", e)
        if isinstance(original, (CarrierError, FractionFormatError)):
            raise original from None
        raise
    return result

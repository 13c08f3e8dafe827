"""Canonical multivariate polynomials over edge symbols.

A PolyExpr is a sum of terms, each a rational coefficient times a
monomial (sorted multiset of symbols). Canonical form is unique, so
equality is decidable by normalization and rendering is deterministic.
RationalExpr pairs two polynomials for ratio results.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .errors import ParseError

Monomial = tuple[str, ...]
Number = Union[int, float, Fraction]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<sym>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


def _coerce(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ParseError(f"non-finite coefficient: {value}")
        return Fraction(value).limit_denominator(10**12)
    raise ParseError(f"unsupported coefficient type: {type(value)!r}")


class PolyExpr:
    """Immutable polynomial in canonical form.

    >>> p = PolyExpr.parse("e - d")
    >>> str(p)
    '-d + e'
    >>> str(p + PolyExpr.symbol("d"))
    'e'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff != 0:
                    clean[tuple(sorted(mono))] = Fraction(coeff)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PolyExpr is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "PolyExpr":
        return cls()

    @classmethod
    def one(cls) -> "PolyExpr":
        return cls({(): Fraction(1)})

    @classmethod
    def const(cls, value: Number) -> "PolyExpr":
        return cls({(): _coerce(value)})

    @classmethod
    def symbol(cls, name: str) -> "PolyExpr":
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ParseError(f"invalid symbol name: {name!r}")
        return cls({(name,): Fraction(1)})

    @classmethod
    def parse(cls, text: str) -> "PolyExpr":
        """Parse '+'/'-'/'*'/'^'/parenthesis expressions over symbols and numbers."""
        tokens = cls._tokenize(text)
        pos = 0

        def parse_expr(p: int) -> tuple["PolyExpr", int]:
            sign = 1
            while p < len(tokens) and tokens[p] in ("+", "-"):
                if tokens[p] == "-":
                    sign = -sign
                p += 1
            acc, p = parse_term(p)
            if sign < 0:
                acc = -acc
            while p < len(tokens) and tokens[p] in ("+", "-"):
                op = tokens[p]
                term, p = parse_term(p + 1)
                acc = acc + term if op == "+" else acc - term
            return acc, p

        def parse_term(p: int) -> tuple["PolyExpr", int]:
            acc, p = parse_factor(p)
            while p < len(tokens) and tokens[p] == "*":
                nxt, p = parse_factor(p + 1)
                acc = acc * nxt
            return acc, p

        def parse_factor(p: int) -> tuple["PolyExpr", int]:
            if p >= len(tokens):
                raise ParseError(f"unexpected end of expression: {text!r}")
            tok = tokens[p]
            if tok == "-":
                inner, p = parse_factor(p + 1)
                return -inner, p
            if tok == "(":
                inner, p = parse_expr(p + 1)
                if p >= len(tokens) or tokens[p] != ")":
                    raise ParseError(f"unbalanced parenthesis in {text!r}")
                p += 1
                base = inner
            elif re.fullmatch(r"\d+(?:\.\d+)?", tok):
                base = cls.const(Fraction(tok))
                p += 1
            elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
                base = cls.symbol(tok)
                p += 1
            else:
                raise ParseError(f"unexpected token {tok!r} in {text!r}")
            if p < len(tokens) and tokens[p] == "^":
                exp_tok = tokens[p + 1] if p + 1 < len(tokens) else ""
                if not re.fullmatch(r"\d+", exp_tok):
                    raise ParseError(f"invalid exponent in {text!r}")
                base = base ** int(exp_tok)
                p += 2
            return base, p

        result, pos = parse_expr(pos)
        if pos != len(tokens):
            raise ParseError(f"trailing tokens in {text!r}")
        return result

    @staticmethod
    def _tokenize(text: str) -> list[str]:
        tokens: list[str] = []
        pos = 0
        while pos < len(text):
            match = _TOKEN_RE.match(text, pos)
            if not match:
                if text[pos:].strip() == "":
                    break
                raise ParseError(f"cannot tokenize {text!r} at offset {pos}")
            tokens.append(match.group().strip())
            pos = match.end()
        return tokens

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "PolyExpr") -> "PolyExpr":
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return PolyExpr(terms)

    def __sub__(self, other: "PolyExpr") -> "PolyExpr":
        return self + (-other)

    def __neg__(self) -> "PolyExpr":
        return PolyExpr({m: -c for m, c in self._terms.items()})

    def __mul__(self, other: "PolyExpr") -> "PolyExpr":
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(sorted(m1 + m2))
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return PolyExpr(terms)

    def __pow__(self, exponent: int) -> "PolyExpr":
        if exponent < 0:
            raise ParseError("negative exponents unsupported")
        result = PolyExpr.one()
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, value: Number) -> "PolyExpr":
        factor = _coerce(value)
        return PolyExpr({m: c * factor for m, c in self._terms.items()})

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ParseError(f"{self} is not constant")
        return self._terms.get((), Fraction(0))

    def symbols(self) -> frozenset[str]:
        return frozenset(s for mono in self._terms for s in mono)

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0])))

    def evaluate(self, assignment: Mapping[str, float]) -> float:
        total = 0.0
        for mono, coeff in self.terms():
            value = float(coeff)
            for sym in mono:
                if sym not in assignment:
                    raise ParseError(f"assignment missing symbol {sym!r}")
                value *= assignment[sym]
            total += value
        return total

    # -- identity ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash(frozenset(self._terms.items()))
            )
        return self._hash

    def __repr__(self) -> str:
        return f"PolyExpr({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        # positive terms render first ("e - d", "h - f"), each group in
        # canonical (degree, lexicographic) order
        ordered = sorted(self.terms(), key=lambda t: (t[1] < 0, len(t[0]), t[0]))
        for mono, coeff in ordered:
            mag = abs(coeff)
            if mono == ():
                body = _fraction_str(mag)
            elif mag == 1:
                body = "*".join(mono)
            else:
                body = _fraction_str(mag) + "*" + "*".join(mono)
            if not parts:
                parts.append(body if coeff > 0 else "-" + body)
            else:
                parts.append(("+ " if coeff > 0 else "- ") + body)
        return " ".join(parts)


def _fraction_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class RationalExpr:
    """Ratio of two polynomials; equality by cross-multiplication."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: PolyExpr, denominator: PolyExpr | None = None):
        if denominator is None:
            denominator = PolyExpr.one()
        if denominator.is_zero():
            raise ParseError("zero denominator")
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("RationalExpr is immutable")

    def evaluate(self, assignment: Mapping[str, float]) -> float:
        den = self.denominator.evaluate(assignment)
        if den == 0:
            raise ParseError("denominator evaluates to zero")
        return self.numerator.evaluate(assignment) / den

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalExpr):
            return NotImplemented
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def __str__(self) -> str:
        if self.denominator == PolyExpr.one():
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"

    def __repr__(self) -> str:
        return f"RationalExpr({self})"

"""
Exact sparse multivariate polynomials.

Variables are tuples whose first entry is a string tag, for example
``("x", j)`` for a coordinate of R^n, ``("X", i, j)`` for an entry of
Mat_{k x n}, ``("Q", i, j)`` with i <= j for a symmetric coordinate of Sym_k,
and ``("min", edges)`` for a weight token of a forest. A monomial is a sorted
tuple of ``(variable, exponent)`` pairs. Coefficients are ``Fraction`` or
``GaussianRational``; integers are promoted on the way in.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from app.core.errors import ParseError

Variable = Tuple[Hashable, ...]
Monomial = Tuple[Tuple[Variable, int], ...]


@dataclass(frozen=True)
class GaussianRational:
    """re + i*im with rational parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _coerce(other) -> Optional["GaussianRational"]:
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(Fraction(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o.re * o.re + o.im * o.im
        return self * GaussianRational(o.re / norm, -o.im / norm)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


I = GaussianRational(Fraction(0), Fraction(1))

Coefficient = Union[Fraction, GaussianRational]


def _normalize(c) -> Coefficient:
    if isinstance(c, GaussianRational):
        return c.re if c.im == 0 else c
    return Fraction(c)


def _multiply_monomials(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for var, exp in b:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted(powers.items()))


class RationalPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, object]] = None):
        self.terms: Dict[Monomial, Coefficient] = {}
        for mono, coeff in (terms or {}).items():
            c = _normalize(coeff)
            if c:
                self.terms[mono] = c

    # ----- constructors -----

    @classmethod
    def constant(cls, value) -> "RationalPolynomial":
        return cls({(): value})

    @classmethod
    def zero(cls) -> "RationalPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "RationalPolynomial":
        return cls({(): 1})

    @classmethod
    def variable(cls, var: Variable, exponent: int = 1) -> "RationalPolynomial":
        return cls({((var, exponent),) if exponent else (): 1})

    @classmethod
    def monomial(cls, powers: Mapping[Variable, int], coeff=1) -> "RationalPolynomial":
        return cls({tuple(sorted((v, e) for v, e in powers.items() if e)): coeff})

    @staticmethod
    def lift(value) -> "RationalPolynomial":
        if isinstance(value, RationalPolynomial):
            return value
        return RationalPolynomial.constant(value)

    # ----- arithmetic -----

    def __add__(self, other) -> "RationalPolynomial":
        other = self.lift(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
        return RationalPolynomial(terms)

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "RationalPolynomial":
        return self + (-self.lift(other))

    def __rsub__(self, other) -> "RationalPolynomial":
        return self.lift(other) - self

    def __mul__(self, other) -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            if not other:
                return RationalPolynomial()
            return RationalPolynomial({m: c * other for m, c in self.terms.items()})
        terms: Dict[Monomial, Coefficient] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _multiply_monomials(ma, mb)
                terms[mono] = terms.get(mono, 0) + ca * cb
        return RationalPolynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RationalPolynomial":
        result = RationalPolynomial.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolynomial):
            try:
                other = RationalPolynomial.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ----- inspection -----

    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def constant_term(self) -> Coefficient:
        return self.terms.get((), Fraction(0))

    def degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self.terms), default=0)

    def variables(self) -> List[Variable]:
        return sorted({var for mono in self.terms for var, _ in mono})

    def items(self) -> Iterator[Tuple[Monomial, Coefficient]]:
        return iter(sorted(self.terms.items()))

    # ----- calculus and substitution -----

    def derivative(self, var: Variable) -> "RationalPolynomial":
        terms: Dict[Monomial, Coefficient] = {}
        for mono, coeff in self.terms.items():
            powers = dict(mono)
            exp = powers.get(var, 0)
            if not exp:
                continue
            if exp == 1:
                del powers[var]
            else:
                powers[var] = exp - 1
            key = tuple(sorted(powers.items()))
            terms[key] = terms.get(key, 0) + coeff * exp
        return RationalPolynomial(terms)

    def substitute(self, mapping: Mapping[Variable, object]) -> "RationalPolynomial":
        """Replace variables by polynomials or numbers; others stay symbolic."""
        power_cache: Dict[Tuple[Variable, int], RationalPolynomial] = {}

        def power(var: Variable, exp: int) -> RationalPolynomial:
            key = (var, exp)
            if key not in power_cache:
                power_cache[key] = self.lift(mapping[var]) ** exp
            return power_cache[key]

        result = RationalPolynomial()
        for mono, coeff in self.terms.items():
            kept = {}
            term = RationalPolynomial.constant(coeff)
            for var, exp in mono:
                if var in mapping:
                    term = term * power(var, exp)
                else:
                    kept[var] = exp
            if kept:
                term = term * RationalPolynomial.monomial(kept)
            result = result + term
        return result

    def rename(self, fn: Callable[[Variable], Variable]) -> "RationalPolynomial":
        terms: Dict[Monomial, Coefficient] = {}
        for mono, coeff in self.terms.items():
            powers: Dict[Variable, int] = {}
            for var, exp in mono:
                new = fn(var)
                powers[new] = powers.get(new, 0) + exp
            key = tuple(sorted(powers.items()))
            terms[key] = terms.get(key, 0) + coeff
        return RationalPolynomial(terms)

    def evaluate(self, values: Mapping[Variable, object]):
        """Numeric value at a point; every variable must be assigned."""
        total = 0
        for mono, coeff in self.terms.items():
            term = coeff if isinstance(coeff, Fraction) else complex(coeff)
            for var, exp in mono:
                term = term * values[var] ** exp
            total = total + term
        return total

    # ----- rendering -----

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.items():
            factors = " ".join(render_variable(v) + (f"^{e}" if e > 1 else "") for v, e in mono)
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(factors)
            else:
                parts.append(f"{coeff} {factors}" if isinstance(coeff, Fraction) else f"({coeff}) {factors}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"RationalPolynomial({self})"


def sum_polynomials(polys: Iterable[RationalPolynomial]) -> RationalPolynomial:
    terms: Dict[Monomial, Coefficient] = {}
    for poly in polys:
        for mono, coeff in poly.terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
    return RationalPolynomial(terms)


def render_variable(var: Variable) -> str:
    tag, *index = var
    if tag == "x" and len(index) == 1:
        return f"x{index[0] + 1}"
    if tag in ("X", "Q") and len(index) == 2:
        return f"{'x' if tag == 'X' else 'q'}[{index[0] + 1},{index[1] + 1}]"
    if tag == "min":
        return "min{" + ",".join(f"{a + 1}-{b + 1}" for a, b in index[0]) + "}"
    return f"{tag}" + ("[" + ",".join(str(i) for i in index) + "]" if index else "")


# ----- plain-text grammar -----
#
#   polynomial := [sign] term (sign term)*
#   term       := [rational] factor* | rational
#   factor     := ['*'] name index ['^' integer]
#   index      := digits | '[' integer (',' integer)* ']'
#
# x1 is the coordinate ("x", 0) of R^n, x[i,j] the entry ("X", i-1, j-1) of
# Mat_{k x n}, q[i,j] the symmetric coordinate ("Q", min, max) of Sym_k.

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>\d+(?:/\d+)?)"
    r"|(?P<var>[A-Za-z])(?P<index>\d+|\[[\s\d,]*\])"
    r"|(?P<caret>\^)"
    r"|(?P<sign>[+-])"
    r"|(?P<star>\*)"
)


def _variable_from(name: str, index_text: str, text: str, offset: int) -> Variable:
    if index_text.startswith("["):
        parts = [p.strip() for p in index_text[1:-1].split(",")]
        if not all(p.isdigit() and int(p) >= 1 for p in parts):
            raise ParseError.at_offset(f"bad index {index_text!r}", text, offset)
        idx = [int(p) - 1 for p in parts]
    else:
        if int(index_text) < 1:
            raise ParseError.at_offset(f"bad index {index_text!r}", text, offset)
        idx = [int(index_text) - 1]
    lowered = name.lower()
    if lowered == "x" and len(idx) == 1:
        return ("x", idx[0])
    if lowered == "x" and len(idx) == 2:
        return ("X", idx[0], idx[1])
    if lowered == "q" and len(idx) == 2:
        return ("Q", min(idx), max(idx))
    raise ParseError.at_offset(f"unknown variable {name}{index_text}", text, offset)


def parse_polynomial(text: str) -> RationalPolynomial:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError.at_offset(f"unexpected character {text[pos]!r}", text, pos)
        if match.lastgroup != "ws":
            tokens.append(match)
        pos = match.end()
    if not tokens:
        raise ParseError("empty polynomial", text, 1, 1)

    result = RationalPolynomial()
    i = 0
    while i < len(tokens):
        sign = 1
        if tokens[i].lastgroup == "sign":
            sign = -1 if tokens[i].group() == "-" else 1
            i += 1
        elif result.terms or i > 0:
            raise ParseError.at_offset("expected '+' or '-'", text, tokens[i].start())
        coeff = Fraction(sign)
        seen_factor = False
        if i < len(tokens) and tokens[i].lastgroup == "number":
            coeff *= Fraction(tokens[i].group())
            seen_factor = True
            i += 1
        powers: Dict[Variable, int] = {}
        while i < len(tokens) and tokens[i].lastgroup in ("var", "star"):
            if tokens[i].lastgroup == "star":
                i += 1
                if i >= len(tokens) or tokens[i].lastgroup != "var":
                    offset = tokens[i].start() if i < len(tokens) else len(text)
                    raise ParseError.at_offset("expected a variable after '*'", text, offset)
            tok = tokens[i]
            var = _variable_from(tok.group("var"), tok.group("index"), text, tok.start())
            i += 1
            exp = 1
            if i < len(tokens) and tokens[i].lastgroup == "caret":
                i += 1
                if i >= len(tokens) or tokens[i].lastgroup != "number" or "/" in tokens[i].group():
                    offset = tokens[i].start() if i < len(tokens) else len(text)
                    raise ParseError.at_offset("expected an integer exponent", text, offset)
                exp = int(tokens[i].group())
                i += 1
            powers[var] = powers.get(var, 0) + exp
            seen_factor = True
        if not seen_factor:
            offset = tokens[i].start() if i < len(tokens) else len(text)
            raise ParseError.at_offset("expected a term", text, offset)
        result = result + RationalPolynomial.monomial(powers, coeff)
    return result

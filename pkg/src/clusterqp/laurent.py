"""Exact multivariate Laurent polynomials with integer coefficients.

Values are immutable.  Division is exact-or-fail: :func:`div_exact` raises
:class:`NotDivisible` when the quotient is not a Laurent polynomial, which is
how membership in a ring of Laurent polynomials is decided throughout the
package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]

__all__ = [
    "LaurentPoly",
    "FractionExpr",
    "NotDivisible",
    "add",
    "mul",
    "div_exact",
    "substitute",
    "parse",
]


class NotDivisible(ArithmeticError):
    """The quotient of two Laurent polynomials is not a Laurent polynomial."""


def _order_key(exp: Exponent) -> tuple[int, Exponent]:
    # graded lexicographic; larger key = leading
    return (sum(exp), exp)


class LaurentPoly:
    """A Laurent polynomial in ``x1, ..., xn`` with integer coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Exponent, int] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
            c = int(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self.nvars = nvars
        self._terms = clean
        self._hash: int | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, int]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: int = 1) -> "LaurentPoly":
        return cls._raw(nvars, {(0,) * nvars: int(c)} if c else {})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: int = 1) -> "LaurentPoly":
        exp = tuple(int(e) for e in exp)
        return cls._raw(len(exp), {exp: int(c)} if c else {})

    @classmethod
    def var(cls, i: int, nvars: int) -> "LaurentPoly":
        """The variable ``x_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"variable index {i} out of range 1..{nvars}")
        exp = [0] * nvars
        exp[i - 1] = 1
        return cls.monomial(exp)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def sorted_terms(self) -> list[tuple[Exponent, int]]:
        return sorted(self._terms.items(), key=lambda t: _order_key(t[0]), reverse=True)

    def leading(self) -> tuple[Exponent, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self._terms, key=_order_key)
        return exp, self._terms[exp]

    def min_exponent(self) -> Exponent:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(e[k] for e in self._terms) for k in range(self.nvars))

    def coefficient(self, exp: Sequence[int]) -> int:
        return self._terms.get(tuple(exp), 0)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "LaurentPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("negative power of a non-monomial")
            (exp, c), = self._terms.items()
            if c not in (1, -1):
                raise NotDivisible("negative power of a monomial with coefficient != +-1")
            return LaurentPoly.monomial([e * k for e in exp], c ** (-k))
        result = LaurentPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exp``."""
        exp = tuple(exp)
        return LaurentPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exp)): c for e, c in self._terms.items()},
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __truediv__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return div_exact(self, other)

    # -- text form --------------------------------------------------------

    def __str__(self) -> str:
        return format_laurent(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.nvars}, {str(self)!r})"


def _format_monomial(exp: Exponent) -> str:
    parts = []
    for k, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"x{k}")
        elif e:
            parts.append(f"x{k}^{e}")
    return "*".join(parts)


def format_laurent(p: LaurentPoly) -> str:
    """Canonical text form: terms in decreasing graded-lex order."""
    if p.is_zero():
        return "0"
    out = []
    for idx, (exp, c) in enumerate(p.sorted_terms()):
        mono = _format_monomial(exp)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if idx == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append((" + " if c > 0 else " - ") + body)
    return "".join(out)


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?((?:x\d+(?:\^-?\d+)?\*?)*)$")
_FACTOR_RE = re.compile(r"x(\d+)(?:\^(-?\d+))?")


def parse(text: str, nvars: int) -> LaurentPoly:
    """Inverse of ``str``; accepts the canonical form and mild variations."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if s == "0":
        return LaurentPoly.zero(nvars)
    # protect exponent signs, then split on the remaining +/-
    tokens = re.findall(r"[+-]?[^+-]+", s.replace("^-", "^~"))
    if "".join(tokens) != s.replace("^-", "^~"):
        raise ValueError(f"cannot parse {text!r}")
    terms: dict[Exponent, int] = {}
    for tok in tokens:
        sign = -1 if tok.startswith("-") else 1
        body = tok.lstrip("+-").replace("^~", "^-")
        m = _TERM_RE.match(body)
        if not m or not body:
            raise ValueError(f"cannot parse term {tok!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        exp = [0] * nvars
        for fm in _FACTOR_RE.finditer(m.group(2) or ""):
            k = int(fm.group(1))
            if not 1 <= k <= nvars:
                raise ValueError(f"variable x{k} out of range for {nvars} variables")
            exp[k - 1] += int(fm.group(2)) if fm.group(2) else 1
        key = tuple(exp)
        terms[key] = terms.get(key, 0) + sign * coeff
    return LaurentPoly(nvars, terms)


def add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    a._check(b)
    return a + b


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    a._check(b)
    return a * b


def div_exact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Return ``q`` with ``a == b * q``, or raise :class:`NotDivisible`.

    Both operands are shifted to polynomials with no monomial factor in the
    divisor; then ordinary division by a single polynomial in graded-lex order
    decides divisibility (the remainder is unique for one divisor).
    """
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if a.is_zero():
        return LaurentPoly.zero(a.nvars)
    n = a.nvars
    amin, bmin = a.min_exponent(), b.min_exponent()
    rem = {tuple(x - y for x, y in zip(e, amin)): c for e, c in a.items()}
    div = {tuple(x - y for x, y in zip(e, bmin)): c for e, c in b.items()}
    lead_exp = max(div, key=_order_key)
    lead_c = div[lead_exp]
    div_rest = [(e, c) for e, c in div.items() if e != lead_exp]
    quot: dict[Exponent, int] = {}
    while rem:
        r_exp = max(rem, key=_order_key)
        r_c = rem[r_exp]
        q_exp = tuple(x - y for x, y in zip(r_exp, lead_exp))
        if min(q_exp, default=0) < 0 or r_c % lead_c:
            raise NotDivisible(f"{a} is not divisible by {b}")
        q_c = r_c // lead_c
        quot[q_exp] = q_c
        del rem[r_exp]
        for e, c in div_rest:
            t = tuple(x + y for x, y in zip(e, q_exp))
            v = rem.get(t, 0) - q_c * c
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    shift = tuple(x - y for x, y in zip(amin, bmin))
    return LaurentPoly._raw(n, {tuple(x + y for x, y in zip(e, shift)): c for e, c in quot.items()})


@dataclass(frozen=True, eq=False)
class FractionExpr:
    """A formal quotient ``num / den`` of Laurent polynomials, never auto-reduced."""

    num: LaurentPoly
    den: LaurentPoly

    def __post_init__(self):
        self.num._check(self.den)
        if self.den.is_zero():
            raise ZeroDivisionError("FractionExpr with zero denominator")

    @classmethod
    def of(cls, p: LaurentPoly) -> "FractionExpr":
        return cls(p, LaurentPoly.const(p.nvars, 1))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "FractionExpr") -> "FractionExpr":
        return FractionExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other: "FractionExpr") -> "FractionExpr":
        return FractionExpr(self.num * other.num, self.den * other.den)

    def inverse(self) -> "FractionExpr":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FractionExpr(self.den, self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            other = FractionExpr.of(other)
        if not isinstance(other, FractionExpr):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is cross-multiplication, not structural

    def to_laurent(self) -> LaurentPoly:
        """Normalize by exact division; raises :class:`NotDivisible`."""
        return div_exact(self.num, self.den)

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"


def substitute(p: LaurentPoly, images: Sequence[FractionExpr | LaurentPoly]) -> FractionExpr:
    """Evaluate ``p`` at ``x_i -> images[i-1]`` as a ring homomorphism."""
    if len(images) != p.nvars:
        raise ValueError(f"need {p.nvars} images, got {len(images)}")
    imgs = [im if isinstance(im, FractionExpr) else FractionExpr.of(im) for im in images]
    if not imgs:
        # p is a constant in zero variables
        raise ValueError("substitution into a polynomial in zero variables is undefined")
    for k, im in enumerate(imgs, start=1):
        if im.is_zero():
            raise ZeroDivisionError(f"image of x{k} is zero")
    m = imgs[0].nvars
    one = LaurentPoly.const(m, 1)
    if p.is_zero():
        return FractionExpr(LaurentPoly.zero(m), one)
    # common denominator: prod den_i^{max positive e_i} * num_i^{max negative e_i}
    pos = [max(0, max(e[k] for e in p._terms)) for k in range(p.nvars)]
    neg = [max(0, -min(e[k] for e in p._terms)) for k in range(p.nvars)]
    cache: dict[tuple[int, str, int], LaurentPoly] = {}

    def power(k: int, which: str, e: int) -> LaurentPoly:
        key = (k, which, e)
        if key not in cache:
            base = imgs[k].num if which == "n" else imgs[k].den
            cache[key] = base ** e
        return cache[key]

    num = LaurentPoly.zero(m)
    for exp, c in p.items():
        term = LaurentPoly.const(m, c)
        for k, e in enumerate(exp):
            if e >= 0:
                # (n/d)^e * d^pos * n^neg = n^(e+neg) * d^(pos-e)
                term = term * power(k, "n", e + neg[k]) * power(k, "d", pos[k] - e)
            else:
                term = term * power(k, "d", -e + pos[k]) * power(k, "n", neg[k] + e)
        num = num + term
    den = one
    for k in range(p.nvars):
        den = den * power(k, "d", pos[k]) * power(k, "n", neg[k])
    return FractionExpr(num, den)


def monomial_fraction(p: LaurentPoly) -> tuple[LaurentPoly, Exponent]:
    """Write ``p = N / x^m`` with ``N`` a polynomial free of monomial factors."""
    mn = p.min_exponent()
    return p.shift([-e for e in mn]), tuple(-e for e in mn)


def format_fraction(p: LaurentPoly) -> str:
    """Human-readable ``(numerator) / (monomial)`` form."""
    num, den = monomial_fraction(p)
    # keep positive denominators only; negative entries move into the numerator
    num = num.shift([-min(d, 0) for d in den])
    den = tuple(max(d, 0) for d in den)
    dtext = _format_monomial(den)
    ntext = format_laurent(num)
    if not dtext:
        return ntext
    if len(num) > 1:
        ntext = f"({ntext})"
    if sum(1 for d in den if d) > 1 or any(d > 1 for d in den):
        dtext = f"({dtext})"
    return f"{ntext} / {dtext}"


def laurent_vars(nvars: int) -> list[LaurentPoly]:
    return [LaurentPoly.var(i, nvars) for i in range(1, nvars + 1)]


def from_iterable(nvars: int, items: Iterable[tuple[Sequence[int], int]]) -> LaurentPoly:
    return LaurentPoly(nvars, {tuple(e): c for e, c in items})

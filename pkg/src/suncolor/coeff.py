"""Exact arithmetic in Q(N, T_R): rational functions in the number of colours
N and the generator normalisation T_R, with arbitrary-precision integer
coefficients.

Values are canonical on construction: numerator and denominator are fully
reduced (polynomial gcd, including integer content) and the denominator's
leading coefficient under graded-lexicographic order (N before T_R) is
positive.  Equal values therefore have identical representations, so
``RationalFunction`` can be used as a dictionary key.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Mapping, Union

from .errors import ParseError, PoleError

Mono = tuple[int, int]  # (exponent of N, exponent of T_R)


def _grlex(mono: Mono) -> tuple[int, int]:
    # graded first, then N-exponent: N comes before T_R
    return (mono[0] + mono[1], mono[0])


# ---------------------------------------------------------------------------
# sparse bivariate polynomials over Z


class Poly:
    """Sparse polynomial in N and T_R with integer coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, int] | None = None):
        self.terms: dict[Mono, int] = {m: c for m, c in (terms or {}).items() if c}
        self._hash: int | None = None

    # -- constructors

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(0, 0): c}) if c else cls()

    @classmethod
    def variable(cls, name: str) -> "Poly":
        if name == "N":
            return cls({(1, 0): 1})
        if name in ("TR", "T_R"):
            return cls({(0, 1): 1})
        raise ValueError(f"unknown variable {name!r}")

    # -- predicates

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return not self.terms or self.terms.keys() == {(0, 0)}

    def const_value(self) -> int:
        if not self.terms:
            return 0
        if self.is_const:
            return self.terms[(0, 0)]
        raise ValueError("polynomial is not constant")

    # -- structure

    def leading_mono(self) -> Mono:
        return max(self.terms, key=_grlex)

    def leading_coeff(self) -> int:
        return self.terms[self.leading_mono()] if self.terms else 0

    def total_degree(self) -> int:
        return max((m[0] + m[1] for m in self.terms), default=-1)

    def int_content(self) -> int:
        return math.gcd(*self.terms.values()) if self.terms else 0

    # -- arithmetic

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Mono, int] = {}
        for (a, b), c in self.terms.items():
            for (d, e), f in other.terms.items():
                m = (a + d, b + e)
                v = out.get(m, 0) + c * f
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly(out)

    def scale(self, c: int) -> "Poly":
        if c == 0:
            return Poly()
        return Poly({m: c * v for m, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def evaluate(self, n: Fraction, tr: Fraction) -> Fraction:
        total = Fraction(0)
        for (a, b), c in self.terms.items():
            total += c * n**a * tr**b
        return total

    # -- comparison / hashing

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return render_poly(self)


_ONE_P = Poly.const(1)


# -- recursive representation used by gcd: dict[degN, upoly] with
#    upoly = dict[degTR, int]


def _u_deg(f: dict[int, int]) -> int:
    return max(f) if f else -1


def _u_add(f, g):
    out = dict(f)
    for k, v in g.items():
        w = out.get(k, 0) + v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _u_neg(f):
    return {k: -v for k, v in f.items()}


def _u_mul(f, g):
    out: dict[int, int] = {}
    for a, c in f.items():
        for b, d in g.items():
            k = a + b
            v = out.get(k, 0) + c * d
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _u_scale(f, c):
    return {k: c * v for k, v in f.items()} if c else {}


def _u_content(f) -> int:
    return math.gcd(*f.values()) if f else 0


def _u_divexact_scalar(f, c):
    out = {}
    for k, v in f.items():
        q, r = divmod(v, c)
        if r:
            raise ArithmeticError("inexact scalar division")
        out[k] = q
    return out


def _u_divexact(f, g):
    """Exact division in Z[T_R]; raises if the division is not exact."""
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    f = dict(f)
    q: dict[int, int] = {}
    dg, lg = _u_deg(g), g[_u_deg(g)]
    while f:
        df = _u_deg(f)
        if df < dg:
            raise ArithmeticError("inexact polynomial division")
        c, r = divmod(f[df], lg)
        if r:
            raise ArithmeticError("inexact polynomial division")
        q[df - dg] = c
        f = _u_add(f, _u_scale({k + df - dg: v for k, v in g.items()}, -c))
    return q


def _u_prem(f, g):
    """Pseudo-remainder of f by g in Z[T_R] (requires deg f >= deg g)."""
    r = f
    dg = _u_deg(g)
    lg = g[dg]
    while r and _u_deg(r) >= dg:
        dr = _u_deg(r)
        lead = r[dr]
        r = _u_add(_u_scale(r, lg), _u_scale({k + dr - dg: v for k, v in g.items()}, -lead))
    return r


def _u_gcd(f, g):
    """gcd in Z[T_R] via primitive PRS, positive leading coefficient."""
    if not f:
        res = dict(g)
    elif not g:
        res = dict(f)
    else:
        c = math.gcd(_u_content(f), _u_content(g))
        f = _u_divexact_scalar(f, _u_content(f))
        g = _u_divexact_scalar(g, _u_content(g))
        while g:
            if _u_deg(f) < _u_deg(g):
                f, g = g, f
            r = _u_prem(f, g)
            f, g = g, (_u_divexact_scalar(r, _u_content(r)) if r else {})
        res = _u_scale(f, c)
    if res and res[_u_deg(res)] < 0:
        res = _u_neg(res)
    return res


def _b_content(f: dict[int, dict[int, int]]) -> dict[int, int]:
    c: dict[int, int] = {}
    for u in f.values():
        c = _u_gcd(c, u) if c else dict(u)
        if _u_deg(c) == 0 and abs(c.get(0, 0)) == 1:
            break
    if c and c[_u_deg(c)] < 0:
        c = _u_neg(c)
    return c


def _b_divexact_u(f, u):
    return {k: _u_divexact(v, u) for k, v in f.items()}


def _b_scale_u(f, u):
    out = {}
    for k, v in f.items():
        w = _u_mul(v, u)
        if w:
            out[k] = w
    return out


def _b_sub(f, g):
    out = dict(f)
    for k, v in g.items():
        w = _u_add(out.get(k, {}), _u_neg(v))
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _b_gcd(f, g):
    """gcd in Z[T_R][N] via primitive pseudo-remainder sequence."""
    if not f:
        return g
    if not g:
        return f
    cf, cg = _b_content(f), _b_content(g)
    pf, pg = _b_divexact_u(f, cf), _b_divexact_u(g, cg)
    c = _u_gcd(cf, cg)
    while pg:
        if max(pf) < max(pg):
            pf, pg = pg, pf
        # pseudo-remainder of pf by pg in the main variable N
        dg = max(pg)
        lg = pg[dg]
        r = pf
        while r and max(r) >= dg:
            dr = max(r)
            lead = r[dr]
            r = _b_sub(_b_scale_u(r, lg), _b_scale_u({k + dr - dg: v for k, v in pg.items()}, lead))
        pf, pg = pg, (_b_divexact_u(r, _b_content(r)) if r else {})
    return _b_scale_u(pf, c)


def _to_rec(p: Poly) -> dict[int, dict[int, int]]:
    out: dict[int, dict[int, int]] = {}
    for (a, b), c in p.terms.items():
        out.setdefault(a, {})[b] = c
    return out


def _from_rec(f: dict[int, dict[int, int]]) -> Poly:
    return Poly({(a, b): c for a, u in f.items() for b, c in u.items() if c})


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Polynomial gcd, normalised to positive grlex-leading coefficient."""
    if f.is_zero:
        r = g
    elif g.is_zero:
        r = f
    else:
        r = _from_rec(_b_gcd(_to_rec(f), _to_rec(g)))
    if r.is_zero:
        return r
    if r.leading_coeff() < 0:
        r = -r
    return r


def poly_divexact(f: Poly, g: Poly) -> Poly:
    """Exact multivariate division f / g (raises on inexactness)."""
    if g.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero:
        return Poly()
    if g.is_const:
        c = g.const_value()
        out = {}
        for m, v in f.terms.items():
            q, r = divmod(v, c)
            if r:
                raise ArithmeticError("inexact polynomial division")
            out[m] = q
        return Poly(out)
    fr, gr = _to_rec(f), _to_rec(g)
    dg, lg = max(gr), gr[max(gr)]
    q: dict[int, dict[int, int]] = {}
    while fr:
        df = max(fr)
        if df < dg:
            raise ArithmeticError("inexact polynomial division")
        qc = _u_divexact(fr[df], lg)
        q[df - dg] = qc
        fr = _b_sub(fr, _b_scale_u({k + df - dg: v for k, v in gr.items()}, qc))
    return _from_rec(q)


# ---------------------------------------------------------------------------
# rational functions


Scalar = Union[int, Fraction, "RationalFunction"]


class RationalFunction:
    """Element of the field Q(N, T_R), stored fully reduced and canonical."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None):
        den = _ONE_P if den is None else den
        if den.is_zero:
            raise PoleError("zero denominator")
        if num.is_zero:
            num, den = Poly(), _ONE_P
        elif den.is_const and den.const_value() in (1, -1):
            if den.const_value() == -1:
                num = -num
            den = _ONE_P
        else:
            g = poly_gcd(num, den)
            if not (g.is_const and g.const_value() == 1):
                num = poly_divexact(num, g)
                den = poly_divexact(den, g)
            if den.leading_coeff() < 0:
                num, den = -num, -den
        self.num = num
        self.den = den
        self._hash: int | None = None

    # -- constructors

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFunction":
        out = object.__new__(cls)
        out.num = num
        out.den = den
        out._hash = None
        return out

    @classmethod
    def from_int(cls, c: int) -> "RationalFunction":
        return cls._raw(Poly.const(c), _ONE_P)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "RationalFunction":
        q = Fraction(q)
        return cls._raw(Poly.const(q.numerator), Poly.const(q.denominator))

    @staticmethod
    def coerce(value: Scalar) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, int):
            return RationalFunction.from_int(value)
        if isinstance(value, Fraction):
            return RationalFunction.from_fraction(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to RationalFunction")

    # -- predicates

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_one(self) -> bool:
        return self.num == _ONE_P and self.den == _ONE_P

    @property
    def is_const(self) -> bool:
        return self.num.is_const and self.den.is_const

    def const_value(self) -> Fraction:
        return Fraction(self.num.const_value(), self.den.const_value())

    # -- arithmetic

    def __add__(self, other: Scalar) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.is_const and other.is_const:
            return RationalFunction.from_fraction(self.const_value() + other.const_value())
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other: Scalar) -> "RationalFunction":
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other: Scalar) -> "RationalFunction":
        return RationalFunction.coerce(other) + (-self)

    def __mul__(self, other: Scalar) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if self.is_zero or other.is_zero:
            return RF_ZERO
        if self.is_one:
            return other
        if other.is_one:
            return self
        if self.is_const and other.is_const:
            return RationalFunction.from_fraction(self.const_value() * other.const_value())
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other.is_zero:
            raise PoleError("division by zero rational function")
        if self.is_zero:
            return RF_ZERO
        if self.is_const and other.is_const:
            return RationalFunction.from_fraction(self.const_value() / other.const_value())
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Scalar) -> "RationalFunction":
        return RationalFunction.coerce(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        if k == 0:
            return RF_ONE
        if k < 0:
            return RF_ONE / self**(-k)
        return RationalFunction._raw(self.num**k, self.den**k)

    def reciprocal(self) -> "RationalFunction":
        return RF_ONE / self

    def evaluate(self, n: Fraction | int, tr: Fraction | int = Fraction(1, 2)) -> Fraction:
        """Exact value at (N, T_R); raises PoleError at a denominator zero."""
        n, tr = Fraction(n), Fraction(tr)
        d = self.den.evaluate(n, tr)
        if d == 0:
            raise PoleError(f"pole at N={n}, T_R={tr}")
        return self.num.evaluate(n, tr) / d

    # -- comparison / hashing

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.coerce(other)
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero

    def __str__(self) -> str:
        return render_rational(self)

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        return parse_rational(text)


RF_ZERO = RationalFunction._raw(Poly(), _ONE_P)
RF_ONE = RationalFunction._raw(_ONE_P, _ONE_P)
RF_N = RationalFunction._raw(Poly.variable("N"), _ONE_P)
RF_TR = RationalFunction._raw(Poly.variable("TR"), _ONE_P)


def casimir_fundamental() -> RationalFunction:
    """C_F = T_R (N^2 - 1) / N."""
    return RF_TR * (RF_N**2 - 1) / RF_N


def casimir_adjoint() -> RationalFunction:
    """C_A = 2 T_R N."""
    return 2 * RF_TR * RF_N


# ---------------------------------------------------------------------------
# text format


def render_poly(p: Poly) -> str:
    if p.is_zero:
        return "0"
    parts: list[str] = []
    for mono in sorted(p.terms, key=_grlex, reverse=True):
        c = p.terms[mono]
        factors = []
        if abs(c) != 1 or mono == (0, 0):
            factors.append(str(abs(c)))
        for name, e in zip(("N", "T_R"), mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        body = "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+{body}" if c > 0 else f"-{body}")
    return "".join(parts)


def render_rational(r: RationalFunction) -> str:
    num = render_poly(r.num)
    if r.den == _ONE_P:
        return f"({num})" if len(r.num.terms) > 1 else num
    return f"({num})/({render_poly(r.den)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/^]))")


def _tokenize_rational(text: str) -> list[tuple[str, str]]:
    text = text.rstrip()
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.group(1):
            tokens.append(("int", m.group(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        elif m.group(3):
            tokens.append(("op", m.group(3)))
    tokens.append(("end", ""))
    return tokens


class _RationalParser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def parse_expr(self) -> RationalFunction:
        value = self.parse_term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.next()
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> RationalFunction:
        value = self.parse_factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.next()
            rhs = self.parse_factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def parse_factor(self) -> RationalFunction:
        sign = 1
        while self.peek() == ("op", "-"):
            self.next()
            sign = -sign
        value = self.parse_primary()
        if self.peek() == ("op", "^"):
            self.next()
            kind, val = self.next()
            neg = False
            if (kind, val) == ("op", "-"):
                neg = True
                kind, val = self.next()
            if kind != "int":
                raise ParseError("exponent must be an integer")
            value = value ** (-int(val) if neg else int(val))
        return value if sign == 1 else -value

    def parse_primary(self) -> RationalFunction:
        kind, val = self.next()
        if kind == "int":
            return RationalFunction.from_int(int(val))
        if kind == "name":
            if val == "N":
                return RF_N
            if val in ("TR", "T_R"):
                return RF_TR
            raise ParseError(f"unknown symbol {val!r} in coefficient")
        if (kind, val) == ("op", "("):
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_rational(text: str) -> RationalFunction:
    """Parse coefficient text such as ``(T_R*(N^2-1))/N`` or ``-2/3``."""
    parser = _RationalParser(_tokenize_rational(text))
    value = parser.parse_expr()
    if parser.peek()[0] != "end":
        raise ParseError(f"trailing input in coefficient: {parser.peek()[1]!r}")
    return value

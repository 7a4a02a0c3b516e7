"""Epsilon-delta calculus over three-dimensional real vectors: a formal
linear combination of products of epsilon vertices and delta lines over
unoriented 3-valued indices, with its own reducer and a brute-force oracle.

Kept separate from the SU(N) machinery on purpose: these indices are
orthogonal (SO(3)) rather than unitary, so there is no arrow bookkeeping.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError

# wiring: (epsilons, deltas); epsilons is a sorted tuple of ascending index
# triples, deltas a sorted tuple of external index pairs.  External indices
# are 0..E-1, contracted indices E, E+1, ... renumbered canonically.


def _normalise_eps(tri: Sequence[int]) -> tuple[tuple[int, int, int] | None, int]:
    if len(set(tri)) < 3:
        return None, 0
    order = tuple(sorted(tri))
    perm = tuple(sorted(range(3), key=lambda k: tri[k]))
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return order, (-1 if inv % 2 else 1)


def _canonical_wiring(epsilons, deltas, first_internal: int):
    """Canonical representative: epsilons sorted with antisymmetry signs,
    internal labels minimised over relabellings."""
    sign = 1
    eps_norm = []
    for tri in epsilons:
        order, s = _normalise_eps(tri)
        if order is None:
            return None, 0
        eps_norm.append(order)
        sign *= s
    deltas = [tuple(sorted(p)) for p in deltas]
    internals = sorted({x for tri in eps_norm for x in tri if x >= first_internal})
    if not internals:
        return (tuple(sorted(eps_norm)), tuple(sorted(deltas))), sign
    best = None
    for perm in itertools.permutations(internals):
        relabel = dict(zip(internals, perm))
        cand_sign = 1
        cand_eps = []
        for tri in eps_norm:
            mapped = tuple(relabel.get(x, x) for x in tri)
            order, s = _normalise_eps(mapped)
            cand_eps.append(order)
            cand_sign *= s
        cand = (tuple(sorted(cand_eps)), tuple(sorted(deltas)))
        if best is None or cand < best[0]:
            best = (cand, cand_sign)
    return best[0], sign * best[1]


class Eps3Expr:
    """Sum of epsilon/delta wirings with rational coefficients."""

    __slots__ = ("names", "terms")

    def __init__(self, names: Sequence[str], terms: Mapping[tuple, Fraction] | None = None):
        self.names = tuple(names)
        self.terms: dict[tuple, Fraction] = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[w] = c

    @property
    def n_external(self) -> int:
        return len(self.names)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _accumulate(self, wiring, coeff: Fraction) -> None:
        if wiring is None or not coeff:
            return
        cur = self.terms.get(wiring, Fraction(0)) + coeff
        if cur:
            self.terms[wiring] = cur
        else:
            self.terms.pop(wiring, None)

    def __add__(self, other: "Eps3Expr") -> "Eps3Expr":
        if self.n_external != other.n_external:
            raise ValueError("external arity mismatch")
        out = Eps3Expr(self.names, self.terms)
        for w, c in other.terms.items():
            out._accumulate(w, c)
        return out

    def __sub__(self, other: "Eps3Expr") -> "Eps3Expr":
        return self + other.scale(-1)

    def scale(self, c) -> "Eps3Expr":
        c = Fraction(c)
        out = Eps3Expr(self.names)
        if c:
            out.terms = {w: v * c for w, v in self.terms.items()}
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Eps3Expr)
            and self.n_external == other.n_external
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.names, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (eps, deltas), c in sorted(self.terms.items()):
            atoms = []
            for tri in eps:
                atoms.append(f"eps({','.join(self._name(x) for x in tri)})")
            for a, b in deltas:
                atoms.append(f"d3l({self._name(a)},{self._name(b)})")
            if atoms:
                parts.append(f"({c})*" + "*".join(atoms))
            else:
                parts.append(f"({c})")
        return " + ".join(parts)

    def _name(self, x: int) -> str:
        if x < len(self.names):
            return self.names[x]
        return f"m{x - len(self.names) + 1}"

    @classmethod
    def parse(cls, text: str) -> "Eps3Expr":
        return parse_eps(text)


def reduce_eps(e: Eps3Expr) -> Eps3Expr:
    """Expand every pair of epsilons into the 6-term determinant of deltas,
    splice deltas and evaluate loops (each closed line contributes 3), until
    at most one epsilon per term remains."""
    E = e.n_external
    out = Eps3Expr(e.names)
    work = list(e.terms.items())
    while work:
        (eps, deltas), coeff = work.pop()
        if len(eps) < 2:
            w, s = _canonical_wiring(eps, deltas, E)
            out._accumulate(w, coeff * s)
            continue
        a, b, *rest = eps
        for perm in itertools.permutations(range(3)):
            sgn = _perm_sign3(perm)
            new_deltas = list(deltas) + [(a[k], b[perm[k]]) for k in range(3)]
            new_eps, new_deltas2, factor = _splice(rest, new_deltas, E)
            w, s = _canonical_wiring(new_eps, new_deltas2, E)
            if w is None:
                continue
            if len(w[0]) >= 2:
                work.append((w, coeff * sgn * factor * s))
            else:
                out._accumulate(w, coeff * sgn * factor * s)
    return out


def _perm_sign3(perm) -> int:
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def _splice(epsilons, deltas, first_internal):
    """Substitute away deltas carrying contracted indices; count loops."""
    epsilons = [list(t) for t in epsilons]
    pending = [tuple(p) for p in deltas]
    external: list[tuple[int, int]] = []
    factor = Fraction(1)
    while pending:
        x, y = pending.pop()
        if x == y:
            if x >= first_internal:
                factor *= 3  # closed line
                continue
            # d3l(i,i) with an external index named twice is a loop as well
            factor *= 3
            continue
        if x < first_internal and y < first_internal:
            external.append((x, y))
            continue
        # substitute the contracted index by the other end everywhere
        src, dst = (x, y) if x >= first_internal else (y, x)
        for tri in epsilons:
            for k in range(3):
                if tri[k] == src:
                    tri[k] = dst
        pending = [tuple(dst if v == src else v for v in p) for p in pending]
        external = [tuple(dst if v == src else v for v in p) for p in external]
    return [tuple(t) for t in epsilons], external, factor


_EPS3 = np.zeros((3, 3, 3), dtype=np.int64)
for _p in itertools.permutations(range(3)):
    _EPS3[_p] = _perm_sign3(_p)
_EPS3.setflags(write=False)


def eval3(e: Eps3Expr) -> np.ndarray:
    """Brute-force contraction: exact array of Fractions with one 3-valued
    axis per external port."""
    E = e.n_external
    shape = (3,) * E
    total = np.zeros(shape, dtype=object)
    total += Fraction(0)
    for (eps, deltas), coeff in e.terms.items():
        axes: dict[int, int] = {}

        def axis(x: int) -> int:
            return axes.setdefault(x, len(axes))

        for x in range(E):
            axis(x)
        ops, subs = [], []
        for tri in eps:
            ops.append(_EPS3)
            subs.append([axis(x) for x in tri])
        # delta pairs between externals need an explicit identity operand
        for a, b in deltas:
            ops.append(np.eye(3, dtype=np.int64))
            subs.append([axis(a), axis(b)])
        if not ops:
            arr = np.ones(shape, dtype=np.int64)
        else:
            args: list = []
            for op, sub in zip(ops, subs):
                args.extend((op, sub))
            args.append(list(range(E)))
            arr = np.einsum(*args)
        total = total + arr * coeff
    return np.asarray(total, dtype=object)


def permutation_wiring(names_left: Sequence[str], names_right: Sequence[str], images: Sequence[int]) -> Eps3Expr:
    """Delta wiring connecting right port j to left port images[j] (1-based),
    used to express permutation identities for the reducer."""
    n = len(names_left)
    names = tuple(names_left) + tuple(names_right)
    deltas = [tuple(sorted((images[j] - 1, n + j))) for j in range(n)]
    w, s = _canonical_wiring((), deltas, len(names))
    return Eps3Expr(names, {w: Fraction(s)})


# ---------------------------------------------------------------------------
# mini-DSL: eps(i,j,k) and d3l(i,j) atoms with rational coefficients


_TOK3 = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/,]))")


def parse_eps(text: str) -> Eps3Expr:
    toks: list[tuple[str, str]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOK3.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("int", m.group(1)))
        elif m.group(2):
            toks.append(("name", m.group(2)))
        else:
            toks.append(("op", m.group(3)))
    toks.append(("end", ""))

    state = {"pos": 0}

    def peek():
        return toks[state["pos"]]

    def nxt():
        t = toks[state["pos"]]
        state["pos"] += 1
        return t

    def expect(op):
        k, v = nxt()
        if (k, v) != ("op", op):
            raise ParseError(f"expected {op!r}, got {v!r}")

    # terms: list of (Fraction, atom list); atom = ("eps"|"d3l", names)
    def parse_expr():
        value = parse_term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = nxt()
            rhs = parse_term()
            if op == "-":
                rhs = [(-c, a) for c, a in rhs]
            value = value + rhs
        return value

    def parse_term():
        value = parse_factor()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = nxt()
            rhs = parse_factor()
            if op == "*":
                value = [(c1 * c2, a1 + a2) for c1, a1 in value for c2, a2 in rhs]
            else:
                value = [(c1 / _scalar3(rhs), a1) for c1, a1 in value]
        return value

    def parse_factor():
        sign = 1
        while peek() == ("op", "-"):
            nxt()
            sign = -sign
        k, v = nxt()
        if k == "int":
            out = [(Fraction(int(v)), ())]
        elif k == "name" and v in ("eps", "d3l"):
            expect("(")
            args = []
            while True:
                k2, v2 = nxt()
                if k2 != "name":
                    raise ParseError(f"expected index name, got {v2!r}")
                args.append(v2)
                if peek() == ("op", ","):
                    nxt()
                    continue
                expect(")")
                break
            if v == "eps" and len(args) != 3:
                raise ParseError("eps takes three indices")
            if v == "d3l" and len(args) != 2:
                raise ParseError("d3l takes two indices")
            out = [(Fraction(1), ((v, tuple(args)),))]
        elif (k, v) == ("op", "("):
            out = parse_expr()
            expect(")")
        else:
            raise ParseError(f"unexpected token {v!r}")
        return [(-c, a) for c, a in out] if sign == -1 else out

    def _scalar3(value):
        total = Fraction(0)
        for c, atoms in value:
            if atoms:
                raise ParseError("division requires a scalar")
            total += c
        return total

    value = parse_expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input {peek()[1]!r}")

    # wire the index names per term
    # occurrence counting across the whole expression determines externals
    all_names: dict[str, int] = {}
    for _c, atoms in value:
        names_in_term: dict[str, int] = {}
        for _kind, args in atoms:
            for nm in args:
                names_in_term[nm] = names_in_term.get(nm, 0) + 1
        for nm, cnt in names_in_term.items():
            if cnt > 2:
                raise ParseError(f"index {nm!r} used more than twice")
            all_names.setdefault(nm, cnt)
            if all_names[nm] != cnt:
                raise ParseError(f"index {nm!r} inconsistent across terms")
    ext = sorted(nm for nm, cnt in all_names.items() if cnt == 1)
    ext_index = {nm: k for k, nm in enumerate(ext)}
    expr = Eps3Expr(ext)
    E = len(ext)
    for coeff, atoms in value:
        internal: dict[str, int] = {}
        epsilons, deltas = [], []
        factor = Fraction(1)

        def idx(nm: str) -> int:
            if nm in ext_index:
                return ext_index[nm]
            return internal.setdefault(nm, E + len(internal))

        for kind, args in atoms:
            if kind == "eps":
                epsilons.append(tuple(idx(a) for a in args))
            else:
                deltas.append(tuple(idx(a) for a in args))
        eps2, deltas2, f2 = _splice(epsilons, deltas, E)
        w, s = _canonical_wiring(eps2, deltas2, E)
        expr._accumulate(w, coeff * factor * f2 * s)
    return expr

"""Symmetric group S_n and its group algebra.

Permutations are stored as 1-based image tuples; cycle notation is a
presentation layer.  Algebra elements map permutations to coefficients in
Q(N, T_R) so they can be mixed freely with the tensor layer.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .coeff import RF_ONE, RF_ZERO, RationalFunction, Scalar
from .errors import DegreeMismatchError, ParseError, ResourceLimitError

DEFAULT_DEGREE_CAP = 8


class Permutation:
    """A permutation of {1..n}, stored as the image sequence (pi(1), ..., pi(n))."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a bijection of 1..{len(images)}: {images}")
        self.images = images
        self._hash: int | None = None

    @classmethod
    def _raw(cls, images: tuple[int, ...]) -> "Permutation":
        out = object.__new__(cls)
        out.images = images
        out._hash = None
        return out

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls._raw(tuple(range(1, degree + 1)))

    @classmethod
    def transposition(cls, degree: int, a: int, b: int) -> "Permutation":
        images = list(range(1, degree + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(x) = self(other(x))."""
        if self.degree != other.degree:
            raise DegreeMismatchError(f"degree {self.degree} vs {other.degree}")
        im = self.images
        return Permutation._raw(tuple(im[o - 1] for o in other.images))

    __mul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for x, y in enumerate(self.images, start=1):
            inv[y - 1] = x
        return Permutation._raw(tuple(inv))

    def cycles(self, include_fixed: bool = False) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles, each starting at its smallest element, sorted.

        One-cycles are omitted unless include_fixed is set.
        """
        seen = [False] * self.degree
        out: list[tuple[int, ...]] = []
        for start in range(1, self.degree + 1):
            if seen[start - 1]:
                continue
            cyc = [start]
            seen[start - 1] = True
            nxt = self(start)
            while nxt != start:
                cyc.append(nxt)
                seen[nxt - 1] = True
                nxt = self(nxt)
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return tuple(out)

    def cycle_count(self) -> int:
        """Number of cycles including fixed points (trace exponent of N)."""
        return len(self.cycles(include_fixed=True))

    def sign(self) -> int:
        return -1 if (self.degree - self.cycle_count()) % 2 else 1

    def is_identity(self) -> bool:
        return all(y == x for x, y in enumerate(self.images, start=1))

    def embed(self, degree: int) -> "Permutation":
        """Extend with fixed points up to the given degree."""
        if degree < self.degree:
            raise ValueError("cannot embed into a smaller degree")
        return Permutation(self.images + tuple(range(self.degree + 1, degree + 1)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def __str__(self) -> str:
        return render_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"


def render_cycles(p: Permutation) -> str:
    cycs = p.cycles()
    if not cycs:
        return "()"
    sep = "" if p.degree <= 9 else " "
    return "".join("(" + sep.join(str(x) for x in cyc) + ")" for cyc in cycs)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse cycle notation such as ``(124)(35)`` (single digits) or
    ``(1 2 4)(3 5)`` / ``(1,2,4)(3,5)`` for arbitrary element labels."""
    text = text.strip()
    if text in ("", "()", "id", "e"):
        return Permutation.identity(degree)
    if not re.fullmatch(r"(?:\([^()]*\)\s*)+", text):
        raise ParseError(f"malformed cycle notation: {text!r}")
    images = list(range(1, degree + 1))
    seen: set[int] = set()
    for body in _CYCLE_RE.findall(text):
        body = body.strip()
        if not body:
            continue
        if re.search(r"[\s,]", body):
            elems = [int(tok) for tok in re.split(r"[\s,]+", body) if tok]
        else:
            if not body.isdigit():
                raise ParseError(f"malformed cycle {body!r}")
            elems = [int(ch) for ch in body]
        for x in elems:
            if not 1 <= x <= degree:
                raise ParseError(f"element {x} out of range for degree {degree}")
            if x in seen:
                raise ParseError(f"element {x} named twice")
            seen.add(x)
        for a, b in zip(elems, elems[1:] + elems[:1]):
            images[a - 1] = b
    return Permutation(images)


class AlgebraElement:
    """Element of the group algebra of S_n: finite sum of permutations with
    coefficients in Q(N, T_R).  Zero coefficients are never stored."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[Permutation, Scalar] | None = None):
        self.degree = degree
        self.terms: dict[Permutation, RationalFunction] = {}
        for p, c in (terms or {}).items():
            if p.degree != degree:
                raise DegreeMismatchError(f"term degree {p.degree} != {degree}")
            c = RationalFunction.coerce(c)
            if not c.is_zero:
                self.terms[p] = c

    @classmethod
    def zero(cls, degree: int) -> "AlgebraElement":
        return cls(degree)

    @classmethod
    def unit(cls, degree: int) -> "AlgebraElement":
        return cls(degree, {Permutation.identity(degree): RF_ONE})

    @classmethod
    def from_permutation(cls, p: Permutation, coeff: Scalar = 1) -> "AlgebraElement":
        return cls(p.degree, {p: coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, p: Permutation) -> RationalFunction:
        return self.terms.get(p, RF_ZERO)

    def support(self) -> list[Permutation]:
        return sorted(self.terms)

    def _check(self, other: "AlgebraElement") -> None:
        if self.degree != other.degree:
            raise DegreeMismatchError(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            v = out.get(p, RF_ZERO) + c
            if v.is_zero:
                out.pop(p, None)
            else:
                out[p] = v
        res = AlgebraElement.zero(self.degree)
        res.terms = out
        return res

    def __neg__(self) -> "AlgebraElement":
        res = AlgebraElement.zero(self.degree)
        res.terms = {p: -c for p, c in self.terms.items()}
        return res

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c: Scalar) -> "AlgebraElement":
        c = RationalFunction.coerce(c)
        res = AlgebraElement.zero(self.degree)
        if not c.is_zero:
            res.terms = {p: v * c for p, v in self.terms.items()}
        return res

    def __mul__(self, other: "AlgebraElement | Permutation") -> "AlgebraElement":
        if isinstance(other, Permutation):
            other = AlgebraElement.from_permutation(other)
        self._check(other)
        res = AlgebraElement.zero(self.degree)
        if all(c.is_const for c in self.terms.values()) and all(
            c.is_const for c in other.terms.values()
        ):
            # constant coefficients: convolve in Fractions keyed by image
            # tuples, wrap into rational functions once at the end
            acc: dict[tuple[int, ...], Fraction] = {}
            lhs = [(p.images, c.const_value()) for p, c in self.terms.items()]
            rhs = [(p.images, c.const_value()) for p, c in other.terms.items()]
            get = acc.get
            for im, c1 in lhs:
                for im2, c2 in rhs:
                    key = tuple(im[o - 1] for o in im2)
                    v = get(key)
                    acc[key] = c1 * c2 if v is None else v + c1 * c2
            res.terms = {
                Permutation._raw(k): RationalFunction.from_fraction(v)
                for k, v in acc.items()
                if v
            }
            return res
        out: dict[Permutation, RationalFunction] = {}
        for p1, c1 in self.terms.items():
            for p2, c2 in other.terms.items():
                q = p1 * p2
                v = out.get(q)
                v = c1 * c2 if v is None else v + c1 * c2
                if v.is_zero:
                    out.pop(q, None)
                else:
                    out[q] = v
        res.terms = out
        return res

    def __rmul__(self, other: "Permutation") -> "AlgebraElement":
        if isinstance(other, Permutation):
            return AlgebraElement.from_permutation(other) * self
        return NotImplemented

    def dagger(self) -> "AlgebraElement":
        """Adjoint: permutations are replaced by their inverses (coefficients
        in scope are real rational functions)."""
        res = AlgebraElement.zero(self.degree)
        res.terms = {p.inverse(): c for p, c in self.terms.items()}
        return res

    def is_hermitian(self) -> bool:
        return all(self.coefficient(p.inverse()) == c for p, c in self.terms.items())

    def conjugate_by(self, p: Permutation) -> "AlgebraElement":
        """p * self * p^{-1}."""
        pinv = p.inverse()
        res = AlgebraElement.zero(self.degree)
        res.terms = {p * q * pinv: c for q, c in self.terms.items()}
        return res

    def embed(self, degree: int) -> "AlgebraElement":
        res = AlgebraElement.zero(degree)
        res.terms = {p.embed(degree): c for p, c in self.terms.items()}
        return res

    def trace_dimension(self) -> RationalFunction:
        """Trace of the tensor interpretation on V^{\\otimes n}: each
        permutation contributes N^(number of cycles)."""
        from .coeff import RF_N

        total = RF_ZERO
        for p, c in self.terms.items():
            total = total + c * RF_N ** p.cycle_count()
        return total

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.degree, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"({c})*{render_cycles(p)}" for p, c in sorted(self.terms.items())]
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"AlgebraElement({self.degree}, {len(self.terms)} terms)"


def all_permutations(degree: int) -> Iterator[Permutation]:
    for images in itertools.permutations(range(1, degree + 1)):
        yield Permutation(images)


def _check_degree(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError("degree must be >= 1")
    if n > cap:
        raise ResourceLimitError(f"full S_{n} expansion exceeds degree cap {cap}")


def symmetriser(n: int, cap: int = DEFAULT_DEGREE_CAP) -> AlgebraElement:
    """S = (1/n!) sum over all permutations."""
    _check_degree(n, cap)
    w = RationalFunction.from_fraction(Fraction(1, _factorial(n)))
    res = AlgebraElement.zero(n)
    res.terms = {p: w for p in all_permutations(n)}
    return res


def antisymmetriser(n: int, cap: int = DEFAULT_DEGREE_CAP) -> AlgebraElement:
    """A = (1/n!) sum of sign(pi) * pi over all permutations."""
    _check_degree(n, cap)
    w = Fraction(1, _factorial(n))
    res = AlgebraElement.zero(n)
    res.terms = {
        p: RationalFunction.from_fraction(p.sign() * w) for p in all_permutations(n)
    }
    return res


def subset_sum(
    degree: int,
    positions: Iterable[int],
    signed: bool = False,
    normalised: bool = False,
) -> AlgebraElement:
    """Sum over permutations of the given positions (fixing the rest).

    Unnormalised by default; with ``normalised`` the 1/k! prefactor of the
    (anti-)symmetriser convention is included.
    """
    positions = sorted(positions)
    if len(set(positions)) != len(positions):
        raise ValueError("repeated position")
    if positions and not (1 <= positions[0] and positions[-1] <= degree):
        raise ValueError("position out of range")
    k = len(positions)
    weight = Fraction(1, _factorial(k)) if normalised else Fraction(1)
    res = AlgebraElement.zero(degree)
    for images in itertools.permutations(positions):
        full = list(range(1, degree + 1))
        for src, dst in zip(positions, images):
            full[src - 1] = dst
        p = Permutation(full)
        c = weight * (p.sign() if signed else 1)
        res.terms[p] = RationalFunction.from_fraction(c)
    return res


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out

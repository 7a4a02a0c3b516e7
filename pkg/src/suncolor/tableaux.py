"""Young diagrams and tableaux: enumeration, hook products, SU(N) dimensions,
Littlewood-Richardson products, adjoint-power decompositions, first occurrence.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from .coeff import RF_N, RF_ONE, RationalFunction
from .errors import ParseError

FIRST_OCCURRENCE_CAP = 8


@dataclass(frozen=True)
class YoungDiagram:
    """Partition shape: non-increasing positive row lengths."""

    rows: tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        if any(r <= 0 for r in rows):
            raise ValueError(f"row lengths must be positive: {rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ValueError(f"rows must be non-increasing: {rows}")

    @property
    def n_boxes(self) -> int:
        return sum(self.rows)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def is_trivial(self) -> bool:
        return not self.rows

    def cells(self) -> Iterator[tuple[int, int]]:
        for r, length in enumerate(self.rows):
            for c in range(length):
                yield (r, c)

    def column_lengths(self) -> tuple[int, ...]:
        if not self.rows:
            return ()
        return tuple(sum(1 for r in self.rows if r > c) for c in range(self.rows[0]))

    def conjugate(self) -> "YoungDiagram":
        return YoungDiagram(self.column_lengths())

    def hook_length(self, r: int, c: int) -> int:
        arm = self.rows[r] - c - 1
        leg = sum(1 for rr in range(r + 1, len(self.rows)) if self.rows[rr] > c)
        return arm + leg + 1

    def hook_product(self) -> int:
        out = 1
        for r, c in self.cells():
            out *= self.hook_length(r, c)
        return out

    def sun_dimension(self) -> RationalFunction:
        """Dimension of the SU(N) multiplet as a polynomial in N:
        product over boxes of (N + column - row) / hook length."""
        num = RF_ONE
        for r, c in self.cells():
            num = num * (RF_N + (c - r))
        return num / self.hook_product()

    def dimension_at(self, n: int) -> int:
        value = self.sun_dimension().evaluate(n, 1)
        assert value.denominator == 1
        return int(value)

    def is_sun_valid(self, n: int) -> bool:
        return len(self.rows) <= n

    def __str__(self) -> str:
        return "[" + ",".join(str(r) for r in self.rows) + "]"

    @classmethod
    def parse(cls, text: str) -> "YoungDiagram":
        text = text.strip()
        if not re.fullmatch(r"\[[0-9, ]*\]", text):
            raise ParseError(f"malformed diagram text {text!r}")
        body = text[1:-1].strip()
        if not body:
            return cls()
        try:
            return cls(tuple(int(tok) for tok in body.split(",")))
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of n in reverse-lexicographic (dominance-friendly) order."""

    out: list[tuple[int, ...]] = []

    def rec(remaining: int, maximum: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(prefix)
            return
        for k in range(min(remaining, maximum), 0, -1):
            rec(remaining - k, k, prefix + (k,))

    rec(n, n, ())
    return out


@dataclass(frozen=True)
class YoungTableau:
    """A filling of a Young diagram with 1..n, each number used once."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        flat = [x for row in entries for x in row]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise ValueError(f"filling must use 1..n exactly once: {entries}")
        YoungDiagram(tuple(len(row) for row in entries))  # validates shape

    @property
    def shape(self) -> YoungDiagram:
        return YoungDiagram(tuple(len(row) for row in self.entries))

    @property
    def n_boxes(self) -> int:
        return sum(len(row) for row in self.entries)

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self.entries

    def columns(self) -> tuple[tuple[int, ...], ...]:
        ncols = len(self.entries[0]) if self.entries else 0
        return tuple(
            tuple(row[c] for row in self.entries if len(row) > c) for c in range(ncols)
        )

    def is_standard(self) -> bool:
        for row in self.entries:
            if any(row[i] >= row[i + 1] for i in range(len(row) - 1)):
                return False
        for col in self.columns():
            if any(col[i] >= col[i + 1] for i in range(len(col) - 1)):
                return False
        return True

    def remove_largest(self) -> "YoungTableau":
        """Tableau with the box containing the highest number removed."""
        n = self.n_boxes
        rows = [list(row) for row in self.entries]
        for row in rows:
            if row and row[-1] == n:
                row.pop()
                break
        else:
            raise ValueError("largest entry is not removable")
        return YoungTableau(tuple(tuple(row) for row in rows if row))

    def relabel(self, mapping) -> "YoungTableau":
        """Apply a relabelling x -> mapping(x) to all entries (same shape)."""
        return YoungTableau(tuple(tuple(mapping(x) for x in row) for row in self.entries))

    def __str__(self) -> str:
        if self.n_boxes <= 9:
            body = "/".join("".join(str(x) for x in row) for row in self.entries)
        else:
            body = "/".join(",".join(str(x) for x in row) for row in self.entries)
        return f"[{body}]"

    @classmethod
    def parse(cls, text: str) -> "YoungTableau":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ParseError(f"malformed tableau text {text!r}")
        body = text[1:-1]
        if not body:
            raise ParseError("empty tableau")
        rows = []
        for part in body.split("/"):
            part = part.strip()
            if "," in part:
                rows.append(tuple(int(tok) for tok in part.split(",") if tok))
            elif part.isdigit():
                rows.append(tuple(int(ch) for ch in part))
            else:
                raise ParseError(f"malformed tableau row {part!r}")
        try:
            return cls(tuple(rows))
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def standard_tableaux_of_shape(shape: YoungDiagram) -> list[YoungTableau]:
    """All standard tableaux of one shape, ordered by row-reading word."""
    n = shape.n_boxes
    target = shape.rows
    results: list[YoungTableau] = []

    def rec(k: int, row_lens: list[int], entries: list[list[int]]):
        if k > n:
            results.append(YoungTableau(tuple(tuple(r) for r in entries if r)))
            return
        for r in range(len(target)):
            if row_lens[r] < target[r] and (r == 0 or row_lens[r] < row_lens[r - 1]):
                row_lens[r] += 1
                entries[r].append(k)
                rec(k + 1, row_lens, entries)
                entries[r].pop()
                row_lens[r] -= 1

    rec(1, [0] * len(target), [[] for _ in target])
    results.sort(key=lambda t: tuple(x for row in t.entries for x in row))
    return results


def standard_tableaux(n: int) -> list[YoungTableau]:
    """All standard Young tableaux with n boxes: shapes in reverse-lexicographic
    order, fillings in lexicographic (row-reading) order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: list[YoungTableau] = []
    for rows in partitions(n):
        out.extend(standard_tableaux_of_shape(YoungDiagram(rows)))
    return out


class MultipletCount:
    """Multiset of Young diagrams with positive multiplicities."""

    __slots__ = ("counts",)

    def __init__(self, counts: Mapping[YoungDiagram, int] | None = None):
        self.counts: dict[YoungDiagram, int] = {}
        for d, m in (counts or {}).items():
            if m < 0:
                raise ValueError("multiplicities must be positive")
            if m:
                self.counts[d] = m

    def items(self) -> list[tuple[YoungDiagram, int]]:
        return sorted(self.counts.items(), key=lambda kv: (kv[0].n_boxes, kv[0].rows))

    def __getitem__(self, d: YoungDiagram) -> int:
        return self.counts.get(d, 0)

    def __contains__(self, d: YoungDiagram) -> bool:
        return d in self.counts

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultipletCount) and self.counts == other.counts

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total_multiplicity(self) -> int:
        return sum(self.counts.values())

    def total_dimension_at(self, n: int) -> int:
        return sum(m * d.dimension_at(n) for d, m in self.counts.items())

    def sum_m_squared(self) -> int:
        return sum(m * m for m in self.counts.values())

    def to_json(self) -> str:
        return json.dumps(
            [{"diagram": str(d), "multiplicity": m} for d, m in self.items()]
        )

    @classmethod
    def from_json(cls, text: str) -> "MultipletCount":
        data = json.loads(text)
        return cls({YoungDiagram.parse(e["diagram"]): int(e["multiplicity"]) for e in data})

    def __str__(self) -> str:
        return " + ".join(
            (f"{m}*{d}" if m > 1 else str(d)) for d, m in self.items()
        ) or "0"

    def __repr__(self) -> str:
        return f"MultipletCount({self})"


@lru_cache(maxsize=None)
def _lr_pairs(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Littlewood-Richardson expansion of a*b as ((rows, multiplicity), ...).

    Boxes of b's row i (label i) are added as horizontal strips; column
    strictness is enforced by bounding each new row length by the previous
    row's pre-strip length, and the lattice-word condition by requiring that
    label i's cumulative count down to row r never exceeds label (i-1)'s
    cumulative count down to row r-1.
    """
    nrows = len(a) + len(b) + 1
    base = tuple(list(a) + [0] * (nrows - len(a)))
    results: Counter = Counter()

    def place(label: int, shape: tuple[int, ...], cum_prev: tuple[int, ...]):
        if label == len(b):
            results[tuple(x for x in shape if x)] += 1
            return
        size = b[label]

        def rec(r: int, new_shape: list[int], cum: list[int], placed: int):
            if placed == size:
                final = tuple(new_shape) + shape[r:]
                cum_full = tuple(cum) + (placed,) * (nrows - len(cum))
                place(label + 1, final, cum_full)
                return
            if r >= nrows:
                return
            lo = shape[r]
            hi = shape[r - 1] if r > 0 else shape[0] + size
            for new_len in range(lo, hi + 1):
                add = new_len - lo
                if placed + add > size:
                    break
                if label > 0:
                    limit = cum_prev[r - 1] if r > 0 else 0
                    if placed + add > limit:
                        break
                new_shape.append(new_len)
                cum.append(placed + add)
                rec(r + 1, new_shape, cum, placed + add)
                new_shape.pop()
                cum.pop()

        rec(0, [], [], 0)

    place(0, base, (0,) * nrows)
    return tuple(sorted(results.items()))


def lr_multiply(a: YoungDiagram, b: YoungDiagram) -> MultipletCount:
    """Littlewood-Richardson product (no SU(N) trimming)."""
    return MultipletCount(
        {YoungDiagram(rows): m for rows, m in _lr_pairs(a.rows, b.rows)}
    )


def sun_trim_diagram(d: YoungDiagram, n: int) -> YoungDiagram | None:
    """SU(N)-reduce one diagram: drop if more than N rows, remove full columns
    of N boxes.  Returns None for an invalid (vanishing) diagram."""
    if n < 2:
        raise ValueError("N must be >= 2")
    rows = d.rows
    if len(rows) > n:
        return None
    if len(rows) == n:
        cut = rows[-1]
        rows = tuple(r - cut for r in rows if r - cut)
    return YoungDiagram(rows)


def sun_trim(c: MultipletCount, n: int) -> MultipletCount:
    out: dict[YoungDiagram, int] = {}
    for d, m in c.counts.items():
        t = sun_trim_diagram(d, n)
        if t is not None:
            out[t] = out.get(t, 0) + m
    return MultipletCount(out)


def adjoint_diagram(n: int) -> YoungDiagram:
    """Young diagram of the SU(N) adjoint: a column of N-1 boxes next to a
    column with one box."""
    if n < 2:
        raise ValueError("N must be >= 2")
    return YoungDiagram((2,) + (1,) * (n - 2))


@dataclass(frozen=True)
class AdjointDecomposition:
    """Decomposition of the n-th adjoint tensor power into multiplets."""

    power: int
    n_colours: int | None  # None = stabilised large-N counting
    counts: MultipletCount

    @property
    def effective_n(self) -> int:
        return self.n_colours if self.n_colours is not None else 2 * self.power + 1

    @property
    def multiplets(self) -> int:
        return self.counts.total_multiplicity

    @property
    def colour_space_dimension(self) -> int:
        """Dimension of the colour space of A^n -> A^n maps: sum of squared
        multiplicities."""
        return self.counts.sum_m_squared()

    def to_json(self) -> str:
        return json.dumps(
            {
                "power": self.power,
                "N": self.n_colours if self.n_colours is not None else "large",
                "multiplets": self.multiplets,
                "colour_space_dimension": self.colour_space_dimension,
                "decomposition": [
                    {"diagram": str(d), "multiplicity": m, "dimension": d.dimension_at(self.effective_n)}
                    for d, m in self.counts.items()
                ],
            }
        )


@lru_cache(maxsize=None)
def _adjoint_power(power: int, n_eff: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    if power == 0:
        return (((), 1),)
    prev = _adjoint_power(power - 1, n_eff)
    adj = adjoint_diagram(n_eff)
    out: Counter = Counter()
    for rows, mult in prev:
        product = sun_trim(lr_multiply(YoungDiagram(rows), adj), n_eff)
        for d, m in product.counts.items():
            out[d.rows] += mult * m
    return tuple(sorted(out.items()))


def decompose_adjoint_power(power: int, n: int | None = None) -> AdjointDecomposition:
    """Iterated LR product of the adjoint with itself, SU(N)-trimmed at each
    step.  ``n=None`` computes the stabilised (large-N) counting with a
    concrete N = 2*power + 1, large enough that no trimming occurs."""
    if power < 0:
        raise ValueError("power must be >= 0")
    n_eff = n if n is not None else max(2 * power + 1, 2)
    if n_eff < 2:
        raise ValueError("N must be >= 2")
    counts = MultipletCount(
        {YoungDiagram(rows): m for rows, m in _adjoint_power(power, n_eff)}
    )
    return AdjointDecomposition(power=power, n_colours=n, counts=counts)


def first_occurrence(d: YoungDiagram, n: int, cap: int = FIRST_OCCURRENCE_CAP) -> int:
    """Least power with d in the decomposition of the adjoint power; raises
    ResourceLimitError past the search cap."""
    target = sun_trim_diagram(d, n)
    if target is None:
        raise ValueError(f"{d} is not an SU({n}) diagram")
    for power in range(cap + 1):
        if target in decompose_adjoint_power(power, n).counts:
            return power
    from .errors import ResourceLimitError

    raise ResourceLimitError(f"first occurrence of {d} unknown beyond power {cap}")

"""Young operators and their Hermitian variants as group-algebra elements.

The Young operator of a standard tableau is (1/hook product) times the row
symmetriser times the column antisymmetriser.  Hermitian operators are built
by the recursive sandwich construction along the chain of tableaux obtained
by repeatedly removing the highest box: P = Y for up to two boxes, then
P_j = (P_{j-1} x 1) Y_j (P_{j-1} x 1).  Everything is stored in the group
algebra; the tensor interpretation on V^{\\otimes n} is generated on demand
via ``tensor.TensorExpr.from_permutation``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeff import RationalFunction
from .errors import ResourceLimitError
from .perm import AlgebraElement, subset_sum
from .tableaux import YoungTableau

DEFAULT_BOX_CAP = 6


@dataclass(frozen=True)
class YoungOperator:
    """A (possibly Hermitian) Young operator with its defining tableau."""

    tableau: YoungTableau
    element: AlgebraElement
    hermitian: bool

    @property
    def degree(self) -> int:
        return self.element.degree

    def trace_dimension(self) -> RationalFunction:
        """Closed trace of the tensor interpretation: sum of coefficient
        times N^(cycle count) over the permutation terms."""
        return self.element.trace_dimension()

    def __str__(self) -> str:
        kind = "hermitian Young operator" if self.hermitian else "Young operator"
        return f"{kind} {self.tableau}"


def _row_column_product(t: YoungTableau) -> AlgebraElement:
    n = t.n_boxes
    s = AlgebraElement.unit(n)
    for row in t.rows():
        if len(row) > 1:
            s = s * subset_sum(n, row)
    a = AlgebraElement.unit(n)
    for col in t.columns():
        if len(col) > 1:
            a = a * subset_sum(n, col, signed=True)
    return s * a


def young_operator(t: YoungTableau, require_standard: bool = True) -> YoungOperator:
    """Y = (1/hook product) * row symmetriser * column antisymmetriser."""
    if require_standard and not t.is_standard():
        raise ValueError(f"tableau {t} is not standard")
    element = _row_column_product(t).scale(Fraction(1, t.shape.hook_product()))
    return YoungOperator(t, element, hermitian=False)


def hermitian_young(t: YoungTableau, cap: int = DEFAULT_BOX_CAP) -> YoungOperator:
    """Hermitian Young operator by the recursive sandwich construction."""
    if not t.is_standard():
        raise ValueError(f"tableau {t} is not standard")
    n = t.n_boxes
    if n > cap:
        raise ResourceLimitError(f"{n} boxes exceed the cap {cap}")
    chain = [t]
    while chain[-1].n_boxes > 1:
        chain.append(chain[-1].remove_largest())
    chain.reverse()  # chain[j] has j+1 boxes
    element = young_operator(chain[0]).element
    for j in range(1, len(chain)):
        y = young_operator(chain[j]).element
        if j + 1 <= 2:
            element = y
        else:
            sandwich = element.embed(j + 1)
            element = sandwich * y * sandwich
    return YoungOperator(t, element, hermitian=True)


def operator_trace_dimension(y: YoungOperator) -> RationalFunction:
    """Multiplet dimension as a polynomial in N (trace of the projector)."""
    return y.trace_dimension()
